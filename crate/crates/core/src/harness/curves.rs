//! BER curves, power-allocation sweeps and outage tables.

use super::config::ExperimentConfig;
use super::montecarlo::{simulate_point, thread_pool, PointSimulation, StoppingRule, TrialSetup};
use super::seed::{stream_rng, StreamRole};
use crate::analysis::{analytical_ber, outage_probability};
use crate::error::{Error, Result};
use crate::phy::PowerProfile;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

/// One row of a BER table. `x` is the total power in dB for curves and `q` for sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub x: f64,
    pub analytical_ber: f64,
    pub simulated_ber_sc: Option<f64>,
    pub ci_halfwidth_sc: Option<f64>,
    pub simulated_ber_mrc: Option<f64>,
    pub ci_halfwidth_mrc: Option<f64>,
    pub bits_simulated: Option<u64>,
}

impl BerPoint {
    pub fn analytical(x: f64, analytical_ber: f64) -> Self {
        Self {
            x,
            analytical_ber,
            simulated_ber_sc: None,
            ci_halfwidth_sc: None,
            simulated_ber_mrc: None,
            ci_halfwidth_mrc: None,
            bits_simulated: None,
        }
    }

    fn with_simulation(mut self, sim: &PointSimulation) -> Self {
        self.simulated_ber_sc = Some(sim.sc.ber);
        self.ci_halfwidth_sc = Some(sim.sc.ci_halfwidth());
        self.simulated_ber_mrc = Some(sim.mrc.ber);
        self.ci_halfwidth_mrc = Some(sim.mrc.ci_halfwidth());
        self.bits_simulated = Some(sim.bits);
        self
    }
}

/// A table of points plus the raw Monte Carlo results behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
    pub simulations: Vec<Option<PointSimulation>>,
}

impl BerCurve {
    /// x values whose simulation stopped on the symbol budget.
    pub fn low_confidence(&self) -> Vec<f64> {
        self.points
            .iter()
            .zip(&self.simulations)
            .filter(|(_, s)| s.is_some_and(|s| !s.reached_target))
            .map(|(p, _)| p.x)
            .collect()
    }
}

struct Evaluator<'a> {
    config: &'a ExperimentConfig,
    pool: Option<rayon::ThreadPool>,
}

impl<'a> Evaluator<'a> {
    fn new(config: &'a ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let pool = if config.analytical_only { None } else { Some(thread_pool(config.workers)?) };
        Ok(Self { config, pool })
    }

    fn point(&self, x: f64, profile: PowerProfile, index: u64) -> Result<(BerPoint, Option<PointSimulation>)> {
        let c = self.config;
        let modulation = c.modulation.params();
        let point = BerPoint::analytical(x, analytical_ber(&modulation, &profile, &c.quadrature)?);
        let Some(pool) = &self.pool else {
            return Ok((point, None));
        };
        let setup = TrialSetup {
            modulation,
            profile,
            normalized_doppler: c.normalized_doppler,
            num_sinusoids: c.num_sinusoids,
            frame_length: c.frame_length,
            frames_per_trial: c.frames_per_trial,
            seed: c.seed,
        };
        let stopping = StoppingRule {
            min_bit_errors: c.min_bit_errors,
            min_trials: c.min_trials,
            max_symbols: c.max_symbols,
        };
        let sim = simulate_point(&setup, index, &stopping, pool)?;
        Ok((point.with_simulation(&sim), Some(sim)))
    }
}

/// Analytical and simulated BER over `config.power_db` at fixed `config.q`.
pub fn run_ber_curve(config: &ExperimentConfig) -> Result<BerCurve> {
    let eval = Evaluator::new(config)?;
    let mut curve = BerCurve { points: Vec::new(), simulations: Vec::new() };
    for (i, &db) in config.power_db.iter().enumerate() {
        let profile = config.amplification.profile(db, config.q)?;
        let (p, s) = eval.point(db, profile, i as u64)?;
        curve.points.push(p);
        curve.simulations.push(s);
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub power_db: f64,
    pub curve: BerCurve,
}

impl SweepCurve {
    /// Grid value of `q` with the lowest analytical BER.
    pub fn argmin_q(&self) -> f64 {
        self.curve
            .points
            .iter()
            .min_by(|a, b| a.analytical_ber.total_cmp(&b.analytical_ber))
            .map(|p| p.x)
            .unwrap_or(f64::NAN)
    }
}

/// BER against `q` over `config.q_grid`, once per total power in `config.power_db`.
pub fn run_power_allocation_sweep(config: &ExperimentConfig) -> Result<Vec<SweepCurve>> {
    let eval = Evaluator::new(config)?;
    let nq = config.q_grid.len() as u64;
    let mut out = Vec::with_capacity(config.power_db.len());
    for (i, &db) in config.power_db.iter().enumerate() {
        let mut curve = BerCurve { points: Vec::new(), simulations: Vec::new() };
        for (j, &q) in config.q_grid.iter().enumerate() {
            let profile = config.amplification.profile(db, q)?;
            let (p, s) = eval.point(q, profile, i as u64 * nq + j as u64)?;
            curve.points.push(p);
            curve.simulations.push(s);
        }
        out.push(SweepCurve { power_db: db, curve });
    }
    Ok(out)
}

/// Draws per Monte Carlo chunk in outage estimation.
pub const OUTAGE_CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub outage: f64,
    pub standard_error: f64,
    pub draws: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageRow {
    pub profile: PowerProfile,
    pub gamma_th: f64,
    pub outage: f64,
    pub monte_carlo: Option<OutageEstimate>,
}

/// Counts draws of `max(P0 |h_sd|^2, A^2 P0 |h_sr|^2 |h_rd|^2 / (1 + A^2 |h_rd|^2))` at or below `gamma_th`.
fn outage_chunk(profile: &PowerProfile, gamma_th: f64, seed: u64, row: u64, chunk: u64, draws: u64) -> u64 {
    let mut rng = stream_rng(seed, row, chunk, StreamRole::Outage);
    let p0 = profile.source_power();
    let a2 = profile.amplification().powi(2);
    let mut hits = 0;
    for _ in 0..draws {
        let sd: f64 = rng.sample(Exp1);
        let sr: f64 = rng.sample(Exp1);
        let rd: f64 = rng.sample(Exp1);
        let direct = p0 * sd;
        let relayed = a2 * p0 * sr * rd / (1.0 + a2 * rd);
        if direct.max(relayed) <= gamma_th {
            hits += 1;
        }
    }
    hits
}

pub fn monte_carlo_outage(
    profile: &PowerProfile,
    gamma_th: f64,
    draws: u64,
    seed: u64,
    row: u64,
    pool: &rayon::ThreadPool,
) -> OutageEstimate {
    let chunks = draws.div_ceil(OUTAGE_CHUNK);
    let hits: u64 = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let n = OUTAGE_CHUNK.min(draws - c * OUTAGE_CHUNK);
                outage_chunk(profile, gamma_th, seed, row, c, n)
            })
            .sum()
    });
    let p = hits as f64 / draws as f64;
    OutageEstimate { outage: p, standard_error: (p * (1.0 - p) / draws as f64).sqrt(), draws }
}

/// Closed-form outage for every (profile, threshold) pair, with an optional
/// Monte Carlo column when `mc_draws > 0`.
pub fn run_outage_curve(
    gamma_th: &[f64],
    profiles: &[PowerProfile],
    mc_draws: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<OutageRow>> {
    if let Some(g) = gamma_th.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
        return Err(Error::Config(format!("SNR thresholds must be finite and non-negative, got {g}")));
    }
    let pool = if mc_draws > 0 { Some(thread_pool(workers)?) } else { None };
    let mut rows = Vec::with_capacity(gamma_th.len() * profiles.len());
    for profile in profiles {
        for &g in gamma_th {
            let row = rows.len() as u64;
            let monte_carlo = pool.as_ref().map(|pool| monte_carlo_outage(profile, g, mc_draws, seed, row, pool));
            rows.push(OutageRow { profile: *profile, gamma_th: g, outage: outage_probability(g, profile)?, monte_carlo });
        }
    }
    Ok(rows)
}
