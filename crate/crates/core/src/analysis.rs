//! Exact BER and outage probability of selection combining for D-AF relaying.
//!
//! With `lambda = |h_rd|^2 ~ Exp(1)`, the branch SNRs are
//! `gamma_sd = P0 |h_sd|^2` and `gamma_rd = c |h_sr|^2` where
//! `c = A^2 P0 lambda / (1 + A^2 lambda)`. The combiner output
//! `gamma_max = max(gamma_sd, gamma_rd)` is averaged against the conditional
//! differential-PSK BER `(1/4pi) \int g(theta) exp(-alpha(theta) gamma) dtheta`.

use crate::error::{Error, Result};
use crate::phy::{ModulationParams, PowerProfile};
use crate::specfn::{integrate_theta, scaled_e1, x_bessel_k1, QuadratureSpec};
use std::f64::consts::PI;

/// `g(theta)` and `alpha(theta)` of the conditional BER integrand.
pub fn g_alpha(theta: f64, modulation: &ModulationParams) -> (f64, f64) {
    let beta = modulation.beta();
    let b = modulation.b();
    let s = 1.0 + beta * beta + 2.0 * beta * theta.sin();
    let g = (1.0 - beta * beta) / s;
    let alpha = b * b / (2.0 * modulation.bits_per_symbol() as f64) * s;
    (g, alpha)
}

/// Coefficients of the closed-form `J2`, `J3` terms at one `alpha(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerIntegrandTerms {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl BerIntegrandTerms {
    pub fn new(alpha: f64, source_power: f64, amplification: f64) -> Self {
        let a2 = amplification * amplification;
        let x = source_power * alpha;
        Self {
            b1: 1.0 / a2,
            b2: 1.0 / (a2 * (1.0 + x)),
            b3: 1.0 / (x + 1.0),
            d1: 1.0 / (2.0 * a2),
            d2: 1.0 / (a2 * (2.0 + x)),
            d3: 2.0 / (x + 2.0),
        }
    }

    /// `J1 = 1 / (P0 alpha + 1)`; equal to `b3`.
    pub fn j1(&self) -> f64 {
        self.b3
    }

    pub fn j2(&self) -> Result<f64> {
        Ok(self.b3 * (1.0 + (self.b1 - self.b2) * scaled_e1(self.b2)?))
    }

    pub fn j3(&self) -> Result<f64> {
        Ok(self.d3 * (1.0 + (self.d1 - self.d2) * scaled_e1(self.d2)?))
    }
}

/// Conditional first-order statistics of the two branch SNRs given `lambda = |h_rd|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDistribution {
    pub source_power: f64,
    pub c: f64,
    pub c_prime: f64,
}

impl SnrDistribution {
    pub fn conditional(profile: &PowerProfile, lambda: f64) -> Self {
        let p0 = profile.source_power();
        let a2 = profile.amplification().powi(2);
        let c = a2 * p0 * lambda / (1.0 + a2 * lambda);
        Self { source_power: p0, c, c_prime: c * p0 / (c + p0) }
    }

    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        conditional_gamma_max_cdf(gamma, self.source_power, self.c)
    }

    /// Density of `gamma_max` given `lambda`.
    pub fn pdf(&self, gamma: f64) -> f64 {
        let term = |m: f64| (-gamma / m).exp() / m;
        term(self.source_power) + term(self.c) - term(self.c_prime)
    }
}

/// `(1 - e^{-gamma/P0}) (1 - e^{-gamma/c})`.
pub fn conditional_gamma_max_cdf(gamma: f64, source_power: f64, c: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("SNR threshold must be non-negative, got {gamma}")));
    }
    if !(source_power > 0.0 && c > 0.0) {
        return Err(Error::Domain("branch mean SNRs must be positive".into()));
    }
    Ok((-(-gamma / source_power).exp_m1()) * (-(-gamma / c).exp_m1()))
}

fn check_profile(profile: &PowerProfile) -> Result<()> {
    if !(profile.amplification() > 0.0) || !(profile.source_power() > 0.0) {
        return Err(Error::Domain("analysis needs P0 > 0 and A > 0".into()));
    }
    Ok(())
}

/// Exact average BER of selection combining:
/// `(1/4pi) \int g(theta) [J1 + J2 - J3] dtheta`.
pub fn analytical_ber(
    modulation: &ModulationParams,
    profile: &PowerProfile,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_profile(profile)?;
    let p0 = profile.source_power();
    let amp = profile.amplification();
    // b2, d2 > 0 whenever P0, A > 0, so scaled_e1 cannot fail here; a NaN
    // would surface as a non-finite integrand error.
    let integral = integrate_theta(
        |theta| {
            let (g, alpha) = g_alpha(theta, modulation);
            let t = BerIntegrandTerms::new(alpha, p0, amp);
            match (t.j2(), t.j3()) {
                (Ok(j2), Ok(j3)) => g * (t.j1() + j2 - j3),
                _ => f64::NAN,
            }
        },
        quad,
    )?;
    Ok(integral / (4.0 * PI))
}

/// BER with `J2 ~ b3` and `J3 ~ d3`, i.e. `(1/4pi) \int g 2 / ((1 + alpha P0)(2 + alpha P0))`.
/// Its log-log slope against `P0` tends to -2.
pub fn ber_high_snr_approx(
    modulation: &ModulationParams,
    profile: &PowerProfile,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_profile(profile)?;
    let p0 = profile.source_power();
    let integral = integrate_theta(
        |theta| {
            let (g, alpha) = g_alpha(theta, modulation);
            let x = alpha * p0;
            g * 2.0 / ((1.0 + x) * (2.0 + x))
        },
        quad,
    )?;
    Ok(integral / (4.0 * PI))
}

/// Probability that `gamma_max` falls below `gamma_th`, averaged over `|h_rd|^2`.
pub fn outage_probability(gamma_th: f64, profile: &PowerProfile) -> Result<f64> {
    if !(gamma_th >= 0.0) {
        return Err(Error::Domain(format!("SNR threshold must be non-negative, got {gamma_th}")));
    }
    check_profile(profile)?;
    if gamma_th == 0.0 {
        return Ok(0.0);
    }
    let p0 = profile.source_power();
    let a2 = profile.amplification().powi(2);
    let direct = -(-gamma_th / p0).exp_m1();
    let arg = (4.0 * gamma_th / (a2 * p0)).sqrt();
    let relayed = 1.0 - (-gamma_th / p0).exp() * x_bessel_k1(arg)?;
    Ok((direct * relayed).clamp(0.0, 1.0))
}
