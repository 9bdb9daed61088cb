//! Adaptive Gauss-Kronrod (7, 15) quadrature with global bisection.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget for [`integrate`] and [`integrate_theta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-14,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    resasc *= scale;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    Segment { a, b, value: resk * half, error }
}

/// Integrates `f` over `[a, b]` to within `max(absolute, relative * |I|)`.
///
/// On budget exhaustion the error carries the best estimate and its bound.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    let first = kronrod15(&f, a, b);
    let mut total = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;
    loop {
        if !total.is_finite() || !total_error.is_finite() {
            return Err(Error::Domain("integrand is not finite on the interval".into()));
        }
        let target = spec.absolute_tolerance.max(spec.relative_tolerance * total.abs());
        if total_error <= target {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence { estimate: total, error_bound: total_error });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Running sums drift; resum occasionally so the stopping test stays honest.
        if subdivisions % 32 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Integrates `f` over `[-pi, pi]`.
pub fn integrate_theta<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    integrate(f, -PI, PI, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_integrand() {
        let v = integrate_theta(|_| 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let spec = QuadratureSpec::default();
        let v = integrate_theta(f64::sin, &spec).unwrap();
        assert!(v.abs() <= spec.absolute_tolerance);
    }

    #[test]
    fn reciprocal_of_shifted_sine() {
        // \int d\theta / (A + B sin\theta) = 2 pi / sqrt(A^2 - B^2)
        let v = integrate_theta(|t| 1.0 / (1.25 + 0.5 * 2.0 * t.sin()), &QuadratureSpec::default())
            .unwrap();
        let closed = 2.0 * PI / (1.25f64 * 1.25 - 1.0).sqrt();
        assert!(((v - closed) / closed).abs() < 1e-10);
        assert!((closed - 8.377_580_409_572_782).abs() < 1e-12);

        // brute-force midpoint sum agrees with the closed form
        let n = 20_000;
        let h = 2.0 * PI / n as f64;
        let riemann: f64 = (0..n)
            .map(|i| {
                let t = -PI + (i as f64 + 0.5) * h;
                h / (1.25 + t.sin())
            })
            .sum();
        assert!(((riemann - closed) / closed).abs() < 1e-10);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let spec = QuadratureSpec { max_subdivisions: 2, ..QuadratureSpec::default() };
        match integrate(|x: f64| x.abs().sqrt().recip(), 1e-12, 1.0, &spec) {
            Err(Error::Convergence { estimate, error_bound }) => {
                assert!(estimate.is_finite() && estimate > 0.0);
                assert!(error_bound > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = QuadratureSpec { relative_tolerance: 0.0, ..QuadratureSpec::default() };
        assert!(matches!(integrate_theta(|_| 1.0, &spec), Err(Error::Config(_))));
        let spec = QuadratureSpec { max_subdivisions: 0, ..QuadratureSpec::default() };
        assert!(integrate_theta(|_| 1.0, &spec).is_err());
    }

    #[test]
    fn deterministic() {
        let f = |t: f64| (3.0 * t).cos().exp() / (2.0 + t.sin());
        let spec = QuadratureSpec::default();
        let a = integrate_theta(f, &spec).unwrap();
        let b = integrate_theta(f, &spec).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    proptest! {
        #[test]
        fn linearity(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, w in 0.5f64..4.0, s in 0.1f64..0.9) {
            let spec = QuadratureSpec::default();
            let f = |t: f64| (w * t).cos() + t * t;
            let g = |t: f64| 1.0 / (1.0 + s * t.sin());
            let combined = integrate_theta(|t| c1 * f(t) + c2 * g(t), &spec).unwrap();
            let separate = c1 * integrate_theta(f, &spec).unwrap() + c2 * integrate_theta(g, &spec).unwrap();
            prop_assert!((combined - separate).abs() <= 1e-9 * (1.0 + separate.abs()));
        }
    }
}
