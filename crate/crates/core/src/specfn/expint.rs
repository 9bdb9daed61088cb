use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const MAX_TERMS: usize = 1000;

fn check_positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} requires x > 0, got {x}")))
    }
}

/// `E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)`, used for `x <= 1`.
fn e1_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() < f64::EPSILON * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Continued fraction for `e^x E1(x)`, evaluated with modified Lentz. Used for `x > 1`.
fn scaled_e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

/// Exponential integral `E1(x) = \int_x^\infty e^{-t}/t dt` for `x > 0`.
///
/// Underflows gracefully to zero for very large arguments.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_positive(x, "E1")?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok((-x).exp() * scaled_e1_continued_fraction(x))
    }
}

/// `e^x E1(x)` without forming either factor when that would overflow.
pub fn scaled_e1(x: f64) -> Result<f64> {
    check_positive(x, "scaled E1")?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(scaled_e1_continued_fraction(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn e1_at_one() {
        assert!(rel(exp_integral_e1(1.0).unwrap(), 0.219_383_934_395_520_27) < 1e-14);
    }

    #[test]
    fn e1_small_argument_is_log_dominated() {
        let v = exp_integral_e1(1e-8).unwrap();
        assert!(rel(v, 17.843_465_089_050_83) < 1e-13);
        assert!(rel(v, -EULER_GAMMA - 1e-8f64.ln()) < 1e-8);
    }

    #[test]
    fn e1_large_argument_asymptote() {
        let x: f64 = 500.0;
        let product = x * x.exp() * exp_integral_e1(x).unwrap();
        assert!((product - 1.0).abs() < 1e-2);
        assert_eq!(exp_integral_e1(800.0).unwrap(), 0.0);
        assert_eq!(exp_integral_e1(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn scaled_e1_examples() {
        assert!(rel(scaled_e1(1.0).unwrap(), 0.596_347_362_323_194_07) < 1e-14);
        let big = scaled_e1(700.0).unwrap();
        assert!(big.is_finite());
        assert!(rel(big, 1.0 / 701.0) < 0.01);
        assert!(rel(scaled_e1(1e-10).unwrap(), exp_integral_e1(1e-10).unwrap()) < 1e-9);
    }

    #[test]
    fn continuity_across_branch_point() {
        let below = exp_integral_e1(1.0).unwrap();
        let above = exp_integral_e1(1.0 + 1e-12).unwrap();
        assert!(rel(below, above) < 1e-10);
        // both branches agree at the split
        assert!(rel(e1_series(1.0), (-1.0f64).exp() * scaled_e1_continued_fraction(1.0)) < 1e-13);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(exp_integral_e1(0.0), Err(Error::Domain(_))));
        assert!(matches!(exp_integral_e1(-1.0), Err(Error::Domain(_))));
        assert!(matches!(scaled_e1(0.0), Err(Error::Domain(_))));
        assert!(exp_integral_e1(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn e1_decreasing_and_positive(a in 1e-10f64..600.0, b in 1e-10f64..600.0) {
            prop_assume!((a - b).abs() > 1e-9 * a.max(b));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let e_lo = exp_integral_e1(lo).unwrap();
            let e_hi = exp_integral_e1(hi).unwrap();
            prop_assert!(e_lo > e_hi);
            prop_assert!(e_hi > 0.0);
        }

        #[test]
        fn scaled_matches_naive_product(x in 1e-10f64..300.0) {
            let naive = x.exp() * exp_integral_e1(x).unwrap();
            prop_assert!(rel(scaled_e1(x).unwrap(), naive) < 1e-9);
        }
    }
}
