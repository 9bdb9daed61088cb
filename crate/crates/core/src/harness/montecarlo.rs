//! Paired Monte Carlo estimation of SC and semi-MRC bit error rates.
//!
//! A trial is one independent fading realization spanning `frames_per_trial`
//! consecutive frames. Each frame occupies `2 (L + 1)` symbol slots: the
//! source-destination and source-relay links are sampled during the first
//! half, the relay-destination link during the second. Both combiners see the
//! same channels and noise. Trials run in fixed-size batches, so the stopping
//! point and all counts are independent of the worker count.

use super::seed::{stream_rng, StreamRole};
use crate::error::Result;
use crate::fading::FadingGenerator;
use crate::phy::{run_frame, FrameChannels, FrameErrors, FrameNoise, ModulationParams, PowerProfile, SymbolFrame};
use crate::ComplexSample;
use rayon::prelude::*;

/// Trials simulated between two stopping checks.
pub const BATCH_TRIALS: u64 = 64;

/// Two-sided 95% normal quantile used for confidence half-widths.
pub const CI_Z: f64 = 1.96;

#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub modulation: ModulationParams,
    pub profile: PowerProfile,
    pub normalized_doppler: f64,
    pub num_sinusoids: usize,
    pub frame_length: usize,
    pub frames_per_trial: usize,
    pub seed: u64,
}

/// Runs trial `trial` of grid point `point`.
pub fn simulate_trial(setup: &TrialSetup, point: u64, trial: u64) -> Result<FrameErrors> {
    let fading = |role| {
        let mut rng = stream_rng(setup.seed, point, trial, role);
        FadingGenerator::from_rng(setup.normalized_doppler, setup.num_sinusoids, &mut rng)
    };
    let sd = fading(StreamRole::FadingSd)?;
    let sr = fading(StreamRole::FadingSr)?;
    let rd = fading(StreamRole::FadingRd)?;
    let mut symbol_rng = stream_rng(setup.seed, point, trial, StreamRole::Symbols);
    let mut noise_rng = stream_rng(setup.seed, point, trial, StreamRole::Noise);

    let slots = setup.frame_length + 1;
    let zero = ComplexSample::new(0.0, 0.0);
    let (mut h_sd, mut h_sr, mut h_rd) = (vec![zero; slots], vec![zero; slots], vec![zero; slots]);
    let mut total = FrameErrors::default();
    for f in 0..setup.frames_per_trial {
        let phase_one = (f * 2 * slots) as u64;
        let phase_two = phase_one + slots as u64;
        sd.fill(phase_one, &mut h_sd);
        sr.fill(phase_one, &mut h_sr);
        rd.fill(phase_two, &mut h_rd);
        let frame = SymbolFrame::random(&mut symbol_rng, setup.frame_length, &setup.modulation);
        let noise = FrameNoise::draw(&mut noise_rng, slots);
        total += run_frame(
            &frame,
            FrameChannels { sd: &h_sd, sr: &h_sr, rd: &h_rd },
            &setup.profile,
            &noise,
            &setup.modulation,
        )?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub min_bit_errors: u64,
    pub min_trials: u64,
    pub max_symbols: u64,
}

/// BER estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEstimate {
    pub errors: u64,
    pub ber: f64,
    /// Standard error from the spread of per-trial error counts.
    pub standard_error: f64,
}

impl BranchEstimate {
    pub fn ci_halfwidth(&self) -> f64 {
        CI_Z * self.standard_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSimulation {
    pub sc: BranchEstimate,
    pub mrc: BranchEstimate,
    pub bits: u64,
    pub symbols: u64,
    pub trials: u64,
    /// False when the symbol budget ran out before `min_bit_errors` was reached.
    pub reached_target: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: u64,
    sum_sq: u128,
}

impl Moments {
    fn push(&mut self, errors: u64) {
        self.sum += errors;
        self.sum_sq += (errors as u128) * (errors as u128);
    }

    fn estimate(&self, trials: u64, bits_per_trial: u64) -> BranchEstimate {
        let total_bits = (trials * bits_per_trial) as f64;
        let ber = self.sum as f64 / total_bits;
        let standard_error = if trials >= 2 {
            let t = trials as f64;
            let mean = self.sum as f64 / t;
            let ss = (self.sum_sq as f64 - self.sum as f64 * mean).max(0.0);
            let var_rate = ss / (t - 1.0) / (bits_per_trial as f64).powi(2);
            (var_rate / t).sqrt()
        } else {
            (ber * (1.0 - ber) / total_bits).sqrt()
        };
        BranchEstimate { errors: self.sum, ber, standard_error }
    }
}

/// Simulates one grid point until the stopping rule is met.
pub fn simulate_point(
    setup: &TrialSetup,
    point: u64,
    stopping: &StoppingRule,
    pool: &rayon::ThreadPool,
) -> Result<PointSimulation> {
    let symbols_per_trial = (setup.frame_length * setup.frames_per_trial) as u64;
    let bits_per_trial = symbols_per_trial * setup.modulation.bits_per_symbol() as u64;
    let mut sc = Moments::default();
    let mut mrc = Moments::default();
    let mut trials = 0u64;
    loop {
        let batch: Vec<FrameErrors> = pool.install(|| {
            (trials..trials + BATCH_TRIALS)
                .into_par_iter()
                .map(|t| simulate_trial(setup, point, t))
                .collect::<Result<Vec<_>>>()
        })?;
        for counts in &batch {
            sc.push(counts.errors_sc);
            mrc.push(counts.errors_mrc);
        }
        trials += BATCH_TRIALS;
        let symbols = trials * symbols_per_trial;
        let enough_errors = sc.sum.min(mrc.sum) >= stopping.min_bit_errors;
        if (enough_errors && trials >= stopping.min_trials) || symbols >= stopping.max_symbols {
            return Ok(PointSimulation {
                sc: sc.estimate(trials, bits_per_trial),
                mrc: mrc.estimate(trials, bits_per_trial),
                bits: trials * bits_per_trial,
                symbols,
                trials,
                reached_target: enough_errors,
            });
        }
    }
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::Config(format!("cannot start worker pool: {e}")))
}
