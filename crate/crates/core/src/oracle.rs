//! Brute-force reference evaluations used by the validation suite and tests.
//!
//! Everything here goes through a route independent of the production code:
//! trapezoidal sums over integral representations (exponentially convergent
//! for these analytic integrands) and power series summed term by term.

use crate::analysis::g_alpha;
use crate::phy::{ModulationParams, PowerProfile};
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Trapezoid sum of `f` over `[lo, hi]` with step close to `h`.
fn trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, h: f64) -> f64 {
    let n = ((hi - lo) / h).ceil().max(1.0) as usize;
    let step = (hi - lo) / n as f64;
    let mut sum = 0.5 * (f(lo) + f(hi));
    for k in 1..n {
        sum += f(lo + k as f64 * step);
    }
    sum * step
}

/// `E1(x) = -gamma - ln x - sum (-x)^k/(k k!)`, reliable for `x <~ 2`.
pub fn e1_series(x: f64) -> f64 {
    // Kahan-compensated sum of the alternating tail.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut power_over_factorial = 1.0f64;
    for k in 1..400 {
        power_over_factorial *= -x / k as f64;
        let term = power_over_factorial / k as f64;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// `e^x E1(x) = \int_{-inf}^{inf} exp(-e^s) e^s / (x + e^s) ds` by trapezoid.
pub fn scaled_e1_quadrature(x: f64) -> f64 {
    let lo = x.ln().min(0.0) - 42.0;
    let hi = 4.0;
    trapezoid(|s| {
        let u = s.exp();
        (-u).exp() * u / (x + u)
    }, lo, hi, 0.01)
}

pub fn e1_quadrature(x: f64) -> f64 {
    (-x).exp() * scaled_e1_quadrature(x)
}

/// `e^x K1(x) = \int_0^inf exp(-x (cosh t - 1)) cosh t dt` by trapezoid.
pub fn scaled_k1_integral(x: f64) -> f64 {
    let h = (0.5 / x.sqrt()).min(0.05);
    // x (cosh t - 1) > 760 beyond this point
    let t_max = (1.0 + 760.0 / x).acosh() + 1.0;
    trapezoid(|t| (-x * (t.cosh() - 1.0)).exp() * t.cosh(), 0.0, t_max, h)
}

pub fn k1_integral(x: f64) -> f64 {
    (-x).exp() * scaled_k1_integral(x)
}

/// `J0(x) = (1/2pi) \int_0^{2pi} cos(x sin t) dt` with the periodic trapezoid rule.
pub fn j0_integral(x: f64) -> f64 {
    let n = 2 * x.abs() as usize + 64;
    let step = 2.0 * PI / n as f64;
    (0..n).map(|k| (x * (k as f64 * step).sin()).cos()).sum::<f64>() / n as f64
}

/// `J0(x) = sum (-x^2/4)^k / (k!)^2`; only meaningful for moderate `|x|`.
pub fn j0_series(x: f64) -> f64 {
    let t = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= t / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn lambda_average<F: Fn(f64) -> f64>(f: F) -> f64 {
    // lambda = e^s; weight e^-lambda d lambda = exp(-e^s) e^s ds
    trapezoid(|s| {
        let lambda = s.exp();
        f(lambda) * (-lambda).exp() * lambda
    }, -48.0, 4.5, 0.02)
}

/// Exact BER by direct two-dimensional quadrature over `(theta, lambda)` of
/// `g(theta) [I1 + I2 - I3]`, with `I_i = 1 / (m_i alpha + 1)` for the three
/// exponential components of the conditional `gamma_max` density.
pub fn ber_2d_quadrature(modulation: &ModulationParams, profile: &PowerProfile) -> f64 {
    let p0 = profile.source_power();
    let a2 = profile.amplification().powi(2);
    let n_theta = 512;
    let step = 2.0 * PI / n_theta as f64;
    let mut total = 0.0;
    for k in 0..n_theta {
        let theta = -PI + k as f64 * step;
        let (g, alpha) = g_alpha(theta, modulation);
        let inner = lambda_average(|lambda| {
            let c = a2 * p0 * lambda / (1.0 + a2 * lambda);
            let c_prime = c * p0 / (c + p0);
            1.0 / (p0 * alpha + 1.0) + 1.0 / (c * alpha + 1.0) - 1.0 / (c_prime * alpha + 1.0)
        });
        total += g * inner;
    }
    total * step / (4.0 * PI)
}

/// Outage as the numerical `lambda`-average of the conditional `gamma_max` cdf.
pub fn outage_lambda_average(gamma_th: f64, profile: &PowerProfile) -> f64 {
    let p0 = profile.source_power();
    let a2 = profile.amplification().powi(2);
    let direct = 1.0 - (-gamma_th / p0).exp();
    direct * lambda_average(|lambda| {
        let c = a2 * p0 * lambda / (1.0 + a2 * lambda);
        1.0 - (-gamma_th / c).exp()
    })
}

/// Log-spaced grid of `n` points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
