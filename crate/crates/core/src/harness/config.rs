use crate::error::{Error, Result};
use crate::fading::{DEFAULT_NORMALIZED_DOPPLER, DEFAULT_NUM_SINUSOIDS};
use crate::phy::{ModulationParams, PowerProfile, DEFAULT_FRAME_LENGTH};
use crate::specfn::QuadratureSpec;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulationKind {
    Dbpsk,
    Dqpsk,
}

impl ModulationKind {
    pub fn params(self) -> ModulationParams {
        match self {
            Self::Dbpsk => ModulationParams::dbpsk(),
            Self::Dqpsk => ModulationParams::dqpsk(),
        }
    }
}

impl FromStr for ModulationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dbpsk" | "2" => Ok(Self::Dbpsk),
            "dqpsk" | "4" => Ok(Self::Dqpsk),
            other => Err(Error::Config(format!("unknown modulation '{other}' (dbpsk or dqpsk)"))),
        }
    }
}

impl fmt::Display for ModulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dbpsk => "dbpsk",
            Self::Dqpsk => "dqpsk",
        })
    }
}

/// How the relay gain is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplificationRule {
    /// `A = sqrt(P1 / (P0 + 1))`.
    Derived,
    Fixed(f64),
}

impl AmplificationRule {
    pub fn profile(self, total_power_db: f64, q: f64) -> Result<PowerProfile> {
        let profile = PowerProfile::from_db(total_power_db, q)?;
        match self {
            Self::Derived => Ok(profile),
            Self::Fixed(a) => profile.with_amplification(a),
        }
    }
}

impl FromStr for AmplificationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("derived") {
            return Ok(Self::Derived);
        }
        let a: f64 = s
            .parse()
            .map_err(|_| Error::Config(format!("amplification must be 'derived' or a number, got '{s}'")))?;
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Config(format!("amplification must be positive, got {a}")));
        }
        Ok(Self::Fixed(a))
    }
}

/// Parses `a,b,c` lists or inclusive `start:stop:step` ranges.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let bad = |what: &str| Error::Config(format!("invalid grid '{s}': {what}"));
    let number = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let values = if s.contains(':') {
        let parts: Vec<_> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("ranges are start:stop:step"));
        }
        let (start, stop, step) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        s.split(',').map(number).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad("empty or non-finite"));
    }
    Ok(values)
}

pub const DEFAULT_Q: f64 = 0.7;
pub const DEFAULT_MIN_BIT_ERRORS: u64 = 200;

/// Everything that determines a BER curve or power-allocation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub modulation: ModulationKind,
    /// Total power grid in dB.
    pub power_db: Vec<f64>,
    /// Allocation grid for power sweeps.
    pub q_grid: Vec<f64>,
    pub q: f64,
    pub amplification: AmplificationRule,
    pub normalized_doppler: f64,
    pub num_sinusoids: usize,
    /// Information symbols per frame.
    pub frame_length: usize,
    /// Consecutive frames sharing one fading realization.
    pub frames_per_trial: usize,
    /// Sequential stopping target, per combiner.
    pub min_bit_errors: u64,
    /// Independent fading realizations required before stopping.
    pub min_trials: u64,
    pub max_symbols: u64,
    pub seed: u64,
    /// Worker threads; 0 picks the machine's parallelism.
    pub workers: usize,
    pub analytical_only: bool,
    pub quadrature: QuadratureSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            modulation: ModulationKind::Dbpsk,
            power_db: parse_grid("5:35:2.5").expect("static grid"),
            q_grid: parse_grid("0.05:0.95:0.05").expect("static grid"),
            q: DEFAULT_Q,
            amplification: AmplificationRule::Derived,
            normalized_doppler: DEFAULT_NORMALIZED_DOPPLER,
            num_sinusoids: DEFAULT_NUM_SINUSOIDS,
            frame_length: DEFAULT_FRAME_LENGTH,
            frames_per_trial: 4,
            min_bit_errors: DEFAULT_MIN_BIT_ERRORS,
            min_trials: 256,
            max_symbols: 200_000_000,
            seed: 1,
            workers: 0,
            analytical_only: false,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.power_db.is_empty() || self.q_grid.is_empty() {
            return fail("grids must be non-empty".into());
        }
        if let Some(q) = self.q_grid.iter().chain([&self.q]).find(|&&q| !(q > 0.0 && q < 1.0)) {
            return fail(format!("allocation factor {q} outside (0, 1)"));
        }
        if self.min_bit_errors < 100 {
            return fail(format!("min_bit_errors must be at least 100, got {}", self.min_bit_errors));
        }
        if self.frame_length < 1 || self.frames_per_trial < 1 {
            return fail("frame_length and frames_per_trial must be positive".into());
        }
        if self.max_symbols < 1 {
            return fail("max_symbols must be positive".into());
        }
        crate::fading::FadingConfig {
            normalized_doppler: self.normalized_doppler,
            num_sinusoids: self.num_sinusoids,
            seed: self.seed,
        }
        .validate()?;
        self.quadrature.validate()
    }

    pub fn symbols_per_trial(&self) -> u64 {
        (self.frame_length * self.frames_per_trial) as u64
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let int = |v: &str| {
            v.trim()
                .replace('_', "")
                .parse::<f64>()
                .ok()
                .filter(|x| *x >= 0.0 && x.fract() == 0.0)
                .map(|x| x as u64)
                .ok_or_else(|| Error::Config(format!("{key}: expected a non-negative integer, got '{v}'")))
        };
        let float = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: expected a number, got '{v}'")))
        };
        match key.trim().replace('-', "_").as_str() {
            "mod" | "modulation" => self.modulation = value.parse()?,
            "power_db" => self.power_db = parse_grid(value)?,
            "q_grid" => self.q_grid = parse_grid(value)?,
            "q" => self.q = float(value)?,
            "amplification" => self.amplification = value.parse()?,
            "doppler" | "normalized_doppler" => self.normalized_doppler = float(value)?,
            "num_sinusoids" => self.num_sinusoids = int(value)? as usize,
            "frame_length" => self.frame_length = int(value)? as usize,
            "frames_per_trial" => self.frames_per_trial = int(value)? as usize,
            "min_errors" | "min_bit_errors" => self.min_bit_errors = int(value)?,
            "min_trials" => self.min_trials = int(value)?,
            "max_symbols" => self.max_symbols = int(value)?,
            "seed" => self.seed = int(value)?,
            "workers" => self.workers = int(value)? as usize,
            "analytical_only" => {
                self.analytical_only = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("{key}: expected true or false")))?
            }
            "rel_tol" => self.quadrature.relative_tolerance = float(value)?,
            "abs_tol" => self.quadrature.absolute_tolerance = float(value)?,
            "max_subdivisions" => self.quadrature.max_subdivisions = int(value)? as usize,
            other => return Err(Error::Config(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }
}

/// Parses `key = value` lines (`#` starts a comment) into ordered pairs.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}
