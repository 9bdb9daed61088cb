use crate::error::{Error, Result};
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const MAX_TERMS: usize = 10_000;

/// Ascending series for `K1`, accurate for `0 < x <= 2`.
///
/// `K1(x) = 1/x + ln(x/2) I1(x) - (x/4) sum_k (psi(k+1) + psi(k+2)) t^k / (k! (k+1)!)`
/// with `t = x^2/4`.
fn k1_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let mut coeff = 1.0; // t^k / (k! (k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // psi(k+1)
    let mut psi_k2 = 1.0 - EULER_GAMMA; // psi(k+2)
    let mut i1_sum = 0.0;
    let mut psi_sum = 0.0;
    for k in 0..MAX_TERMS {
        i1_sum += coeff;
        let contrib = (psi_k1 + psi_k2) * coeff;
        psi_sum += contrib;
        if k > 0 && coeff < f64::EPSILON * i1_sum && contrib.abs() < f64::EPSILON * psi_sum.abs() {
            break;
        }
        let kf = k as f64;
        coeff *= t / ((kf + 1.0) * (kf + 2.0));
        psi_k1 += 1.0 / (kf + 1.0);
        psi_k2 += 1.0 / (kf + 2.0);
    }
    let i1 = 0.5 * x * i1_sum;
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * psi_sum
}

/// Steed's continued fraction for `e^x K1(x)`, used for `x > 2`.
fn scaled_k1_continued_fraction(x: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    k0 * (x + 0.5 - h) / x
}

/// Modified Bessel function of the second kind, order one, for `x > 0`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("K1 requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 2.0 {
        Ok(k1_series(x))
    } else {
        Ok((-x).exp() * scaled_k1_continued_fraction(x))
    }
}

/// `x K1(x)`, which tends to 1 as `x -> 0+`. Defined as 1 at the origin.
pub fn x_bessel_k1(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() && x > 0.0 {
        return Ok(0.0);
    }
    Ok(x * bessel_k1(x)?)
}

/// Bessel function of the first kind, order zero.
///
/// Power series for `|x| < 1`, Miller's backward recurrence normalised by
/// `J0 + 2 sum_k J_2k = 1` elsewhere.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax.is_nan() {
        return f64::NAN;
    }
    if ax < 1.0 {
        let t = -0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= t / ((k * k) as f64);
            sum += term;
            if term.abs() < f64::EPSILON * 1e-2 {
                break;
            }
        }
        return sum;
    }
    if ax.is_infinite() {
        return 0.0;
    }
    let start = ax + 40.0 + 12.0 * ax.cbrt();
    let m = 2 * (start as usize).div_ceil(2);
    let two_over_x = 2.0 / ax;
    let mut next = 0.0; // J_{n+1}
    let mut current = 1e-30; // J_n
    let mut even_sum = 0.0;
    for n in (1..=m).rev() {
        if n % 2 == 0 {
            even_sum += 2.0 * current;
        }
        let prev = n as f64 * two_over_x * current - next;
        next = current;
        current = prev;
        if current.abs() > 1e200 {
            current *= 1e-200;
            next *= 1e-200;
            even_sum *= 1e-200;
        }
    }
    current / (current + even_sum)
}
