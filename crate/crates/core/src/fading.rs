//! Rayleigh fading taps and complex white Gaussian noise.
//!
//! Taps come from a sum-of-sinusoids generator of the improved Jakes type:
//!
//! ```text
//! h(t) = (1/sqrt(N)) sum_n [ cos(w_d t cos(a_n) + phi_n) + j sin(w_d t sin(a_n) + psi_n) ]
//! a_n  = (2 pi n - pi + theta) / (4N),   n = 1..N
//! ```
//!
//! with `theta`, `phi_n`, `psi_n` drawn uniformly per realization. Each tap is
//! `CN(0, 1)` in the ensemble and the autocorrelation tends to `J0(w_d tau)`.

use crate::error::{Error, Result};
use crate::ComplexSample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

pub const DEFAULT_NUM_SINUSOIDS: usize = 16;
pub const DEFAULT_NORMALIZED_DOPPLER: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConfig {
    /// Doppler frequency times symbol period.
    pub normalized_doppler: f64,
    pub num_sinusoids: usize,
    pub seed: u64,
}

impl Default for FadingConfig {
    fn default() -> Self {
        Self {
            normalized_doppler: DEFAULT_NORMALIZED_DOPPLER,
            num_sinusoids: DEFAULT_NUM_SINUSOIDS,
            seed: 0,
        }
    }
}

impl FadingConfig {
    pub fn validate(&self) -> Result<()> {
        validate_params(self.normalized_doppler, self.num_sinusoids)
    }
}

fn validate_params(normalized_doppler: f64, num_sinusoids: usize) -> Result<()> {
    if !(0.0..0.5).contains(&normalized_doppler) {
        return Err(Error::Config(format!(
            "normalized Doppler must lie in [0, 0.5), got {normalized_doppler}"
        )));
    }
    if num_sinusoids < 8 {
        return Err(Error::Config(format!(
            "at least 8 sinusoids are required, got {num_sinusoids}"
        )));
    }
    Ok(())
}

/// A realized fading tap sequence, one tap per symbol time.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProcess {
    pub taps: Vec<ComplexSample>,
}

impl FadingProcess {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

/// One realization of the sum-of-sinusoids process, evaluable at any sample index.
#[derive(Debug, Clone)]
pub struct FadingGenerator {
    freq_i: Vec<f64>,
    phase_i: Vec<f64>,
    freq_q: Vec<f64>,
    phase_q: Vec<f64>,
    scale: f64,
}

impl FadingGenerator {
    /// Draws a fresh realization from `rng`.
    pub fn from_rng<R: Rng + ?Sized>(
        normalized_doppler: f64,
        num_sinusoids: usize,
        rng: &mut R,
    ) -> Result<Self> {
        validate_params(normalized_doppler, num_sinusoids)?;
        let n = num_sinusoids;
        let w_d = 2.0 * PI * normalized_doppler;
        let theta = uniform_phase(rng);
        let mut freq_i = Vec::with_capacity(n);
        let mut freq_q = Vec::with_capacity(n);
        let mut phase_i = Vec::with_capacity(n);
        let mut phase_q = Vec::with_capacity(n);
        for k in 1..=n {
            let alpha = (2.0 * PI * k as f64 - PI + theta) / (4.0 * n as f64);
            freq_i.push(w_d * alpha.cos());
            freq_q.push(w_d * alpha.sin());
            phase_i.push(uniform_phase(rng));
            phase_q.push(uniform_phase(rng));
        }
        Ok(Self {
            freq_i,
            phase_i,
            freq_q,
            phase_q,
            scale: 1.0 / (n as f64).sqrt(),
        })
    }

    pub fn new(config: &FadingConfig) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self::from_rng(config.normalized_doppler, config.num_sinusoids, &mut rng)
    }

    pub fn sample_at(&self, t: u64) -> ComplexSample {
        let mut out = [ComplexSample::new(0.0, 0.0)];
        self.fill(t, &mut out);
        out[0]
    }

    /// Writes the taps for sample indices `start .. start + out.len()`.
    ///
    /// Oscillators are evaluated exactly at `start` and advanced by complex
    /// rotation inside the block. Outputs depend on block boundaries at the
    /// rounding level.
    pub fn fill(&self, start: u64, out: &mut [ComplexSample]) {
        let n = self.freq_i.len();
        let t0 = start as f64;
        let mut ci: Vec<f64> = Vec::with_capacity(n);
        let mut si: Vec<f64> = Vec::with_capacity(n);
        let mut cq: Vec<f64> = Vec::with_capacity(n);
        let mut sq: Vec<f64> = Vec::with_capacity(n);
        let mut step_ci = Vec::with_capacity(n);
        let mut step_si = Vec::with_capacity(n);
        let mut step_cq = Vec::with_capacity(n);
        let mut step_sq = Vec::with_capacity(n);
        for k in 0..n {
            let (s, c) = (self.freq_i[k] * t0 + self.phase_i[k]).sin_cos();
            ci.push(c);
            si.push(s);
            let (s, c) = (self.freq_q[k] * t0 + self.phase_q[k]).sin_cos();
            cq.push(c);
            sq.push(s);
            let (s, c) = self.freq_i[k].sin_cos();
            step_ci.push(c);
            step_si.push(s);
            let (s, c) = self.freq_q[k].sin_cos();
            step_cq.push(c);
            step_sq.push(s);
        }
        for tap in out.iter_mut() {
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 0..n {
                re += ci[k];
                im += sq[k];
                let (c, s) = (ci[k], si[k]);
                ci[k] = c * step_ci[k] - s * step_si[k];
                si[k] = s * step_ci[k] + c * step_si[k];
                let (c, s) = (cq[k], sq[k]);
                cq[k] = c * step_cq[k] - s * step_sq[k];
                sq[k] = s * step_cq[k] + c * step_sq[k];
            }
            *tap = ComplexSample::new(re * self.scale, im * self.scale);
        }
    }
}

fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(-PI..PI)
}

/// Generates `length` taps of one fading realization seeded by `config.seed`.
pub fn generate_fading(config: &FadingConfig, length: usize) -> Result<FadingProcess> {
    config.validate()?;
    if length < 1 {
        return Err(Error::Config("fading length must be at least 1".into()));
    }
    let generator = FadingGenerator::new(config)?;
    let mut taps = vec![ComplexSample::new(0.0, 0.0); length];
    // Resynchronize the oscillators every block to bound rotation drift.
    const BLOCK: usize = 4096;
    for (i, chunk) in taps.chunks_mut(BLOCK).enumerate() {
        generator.fill((i * BLOCK) as u64, chunk);
    }
    Ok(FadingProcess { taps })
}

/// One circularly-symmetric complex Gaussian draw with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> ComplexSample {
    let sigma = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ComplexSample::new(sigma * re, sigma * im)
}

/// Fills `out` with i.i.d. `CN(0, variance)` samples.
pub fn fill_awgn<R: Rng + ?Sized>(rng: &mut R, variance: f64, out: &mut [ComplexSample]) {
    for w in out.iter_mut() {
        *w = complex_gaussian(rng, variance);
    }
}

/// `length` i.i.d. `CN(0, variance)` samples from a stream seeded by `seed`.
pub fn generate_awgn(seed: u64, length: usize, variance: f64) -> Result<Vec<ComplexSample>> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::Domain(format!("noise variance must be positive, got {variance}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![ComplexSample::new(0.0, 0.0); length];
    fill_awgn(&mut rng, variance, &mut out);
    Ok(out)
}
