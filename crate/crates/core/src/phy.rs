//! Transmit, relay and receive chain for differential AF relaying.
//!
//! Phase I: the source broadcasts the differentially encoded frame
//! `s[k] = v[k] s[k-1]`, so the destination sees `y_sd = sqrt(P0) h_sd s + w_sd`
//! and the relay `y_sr = sqrt(P0) h_sr s + w_sr`. Phase II: the relay forwards
//! `y_rd = A h_rd y_sr + w_rd`. The destination forms `zeta = y*[k-1] y[k]` per
//! branch and either selects the larger-magnitude branch or applies the fixed
//! semi-MRC weights, then detects by minimum Euclidean distance.

use crate::error::{Error, Result};
use crate::fading::complex_gaussian;
use crate::ComplexSample;
use rand::Rng;
use std::f64::consts::PI;

/// Default number of information symbols per frame.
pub const DEFAULT_FRAME_LENGTH: usize = 500;

const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Differential M-PSK constellation together with the constants of the
/// conditional BER integrand `g(theta)`, `alpha(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationParams {
    order: usize,
    a: f64,
    b: f64,
    points: Vec<ComplexSample>,
}

impl ModulationParams {
    pub fn dbpsk() -> Self {
        Self::with_constants(2, 0.0, 2f64.sqrt())
    }

    pub fn dqpsk() -> Self {
        let r2 = 2f64.sqrt();
        Self::with_constants(4, (2.0 - r2).sqrt(), (2.0 + r2).sqrt())
    }

    /// Only `M = 2` and `M = 4` have known BER constants.
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            2 => Ok(Self::dbpsk()),
            4 => Ok(Self::dqpsk()),
            _ => Err(Error::Config(format!("unsupported constellation order {order}"))),
        }
    }

    fn with_constants(order: usize, a: f64, b: f64) -> Self {
        Self { order, a, b, points: psk_points(order) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.order.trailing_zeros()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn beta(&self) -> f64 {
        self.a / self.b
    }

    pub fn points(&self) -> &[ComplexSample] {
        &self.points
    }

    pub fn point(&self, index: usize) -> ComplexSample {
        self.points[index]
    }

    /// Index of the constellation point within tolerance of `v`.
    pub fn index_of(&self, v: ComplexSample) -> Result<usize> {
        self.points
            .iter()
            .position(|p| (p - v).norm() < MEMBERSHIP_TOLERANCE)
            .ok_or_else(|| Error::Domain(format!("{v} is not a {}-PSK symbol", self.order)))
    }

    /// Nearest constellation index. Exact ties go to the lowest index.
    pub fn detect(&self, zeta: ComplexSample) -> usize {
        // |zeta - x|^2 = |zeta|^2 + 1 - 2 Re(zeta x*)
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let score = zeta.re * p.re + zeta.im * p.im;
            if score > best_score {
                best = i;
                best_score = score;
            }
        }
        best
    }

    /// Gray label carried by symbol index `index`.
    pub fn gray_label(&self, index: usize) -> u32 {
        (index ^ (index >> 1)) as u32
    }

    /// Symbol index carrying the Gray label `label`.
    pub fn index_for_label(&self, label: u32) -> usize {
        let mut index = label;
        let mut shift = label >> 1;
        while shift != 0 {
            index ^= shift;
            shift >>= 1;
        }
        index as usize
    }

    /// Bit errors between transmitted and detected indices under Gray mapping.
    pub fn bit_errors(&self, sent: usize, detected: usize) -> u32 {
        (self.gray_label(sent) ^ self.gray_label(detected)).count_ones()
    }
}

fn psk_points(order: usize) -> Vec<ComplexSample> {
    (0..order)
        .map(|m| {
            let p = ComplexSample::from_polar(1.0, 2.0 * PI * m as f64 / order as f64);
            // snap so that +-1 and +-j are exact
            let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
            ComplexSample::new(snap(p.re), snap(p.im))
        })
        .collect()
}

/// Total power, its split between source and relay, and the relay gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    total_power: f64,
    q: f64,
    amplification: f64,
}

impl PowerProfile {
    /// Uses the variance-normalizing gain `A = sqrt(P1 / (P0 + 1))`.
    pub fn new(total_power: f64, q: f64) -> Result<Self> {
        if !(total_power > 0.0) || !total_power.is_finite() {
            return Err(Error::Config(format!("total power must be positive, got {total_power}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Config(format!("allocation factor q must lie in (0, 1), got {q}")));
        }
        let p0 = q * total_power;
        let p1 = (1.0 - q) * total_power;
        Ok(Self { total_power, q, amplification: (p1 / (p0 + 1.0)).sqrt() })
    }

    pub fn from_db(total_power_db: f64, q: f64) -> Result<Self> {
        Self::new(crate::db_to_linear(total_power_db), q)
    }

    /// Overrides the relay gain with a fixed value.
    pub fn with_amplification(self, amplification: f64) -> Result<Self> {
        if !(amplification > 0.0) || amplification.is_nan() {
            return Err(Error::Config(format!("amplification must be positive, got {amplification}")));
        }
        Ok(Self { amplification, ..self })
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn total_power_db(&self) -> f64 {
        crate::linear_to_db(self.total_power)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn source_power(&self) -> f64 {
        self.q * self.total_power
    }

    pub fn relay_power(&self) -> f64 {
        (1.0 - self.q) * self.total_power
    }

    pub fn amplification(&self) -> f64 {
        self.amplification
    }
}

/// Information symbols and their differential encoding (`encoded[0] = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub indices: Vec<usize>,
    pub info: Vec<ComplexSample>,
    pub encoded: Vec<ComplexSample>,
}

impl SymbolFrame {
    pub fn from_indices(indices: Vec<usize>, modulation: &ModulationParams) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= modulation.order()) {
            return Err(Error::Domain(format!("symbol index {bad} out of range")));
        }
        let info: Vec<_> = indices.iter().map(|&i| modulation.point(i)).collect();
        let encoded = differential_encode(&info, modulation)?;
        Ok(Self { indices, info, encoded })
    }

    /// Uniform random information bits, Gray mapped to symbols.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize, modulation: &ModulationParams) -> Self {
        let bits = modulation.bits_per_symbol();
        let indices = (0..len)
            .map(|_| modulation.index_for_label(rng.gen_range(0..1u32 << bits)))
            .collect();
        Self::from_indices(indices, modulation).expect("indices are in range")
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `s[0] = 1`, `s[k] = v[k] s[k-1]`.
pub fn differential_encode(
    info: &[ComplexSample],
    modulation: &ModulationParams,
) -> Result<Vec<ComplexSample>> {
    let mut encoded = Vec::with_capacity(info.len() + 1);
    let mut index = 0usize;
    encoded.push(ComplexSample::new(1.0, 0.0));
    for &v in info {
        index = (index + modulation.index_of(v)?) % modulation.order();
        encoded.push(modulation.point(index));
    }
    Ok(encoded)
}

/// `y_rd[k] = A h_rd[k] y_sr[k] + w_rd[k]`.
pub fn relay_forward(
    y_sr: &[ComplexSample],
    amplification: f64,
    h_rd: &[ComplexSample],
    w_rd: &[ComplexSample],
) -> Result<Vec<ComplexSample>> {
    if y_sr.len() != h_rd.len() || y_sr.len() != w_rd.len() {
        return Err(Error::Shape(format!(
            "relay inputs have lengths {}, {}, {}",
            y_sr.len(),
            h_rd.len(),
            w_rd.len()
        )));
    }
    Ok(y_sr
        .iter()
        .zip(h_rd)
        .zip(w_rd)
        .map(|((&y, &h), &w)| amplification * h * y + w)
        .collect())
}

/// Per-branch differential decision statistics for one symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionPair {
    pub zeta_sd: ComplexSample,
    pub zeta_rd: ComplexSample,
}

/// `zeta[k] = y*[k-1] y[k]` on both branches, for `k >= 1`.
pub fn decision_variables(y_sd: &[ComplexSample], y_rd: &[ComplexSample]) -> Result<Vec<DecisionPair>> {
    if y_sd.len() < 2 || y_rd.len() < 2 {
        return Err(Error::Shape("decision variables need at least two samples".into()));
    }
    if y_sd.len() != y_rd.len() {
        return Err(Error::Shape(format!(
            "branch lengths differ: {} vs {}",
            y_sd.len(),
            y_rd.len()
        )));
    }
    Ok(y_sd
        .windows(2)
        .zip(y_rd.windows(2))
        .map(|(sd, rd)| DecisionPair {
            zeta_sd: sd[0].conj() * sd[1],
            zeta_rd: rd[0].conj() * rd[1],
        })
        .collect())
}

/// Selection combining: the branch with the larger `|zeta|`; ties keep the direct link.
pub fn sc_combine(pair: DecisionPair) -> ComplexSample {
    if pair.zeta_rd.norm_sqr() > pair.zeta_sd.norm_sqr() {
        pair.zeta_rd
    } else {
        pair.zeta_sd
    }
}

/// Fixed-weight combining from the noise variances 2 and `2(1 + A^2)`.
pub fn semi_mrc_combine(pair: DecisionPair, amplification: f64) -> ComplexSample {
    let relay_weight = 1.0 / (2.0 * (1.0 + amplification * amplification));
    0.5 * pair.zeta_sd + relay_weight * pair.zeta_rd
}

/// Minimum Euclidean distance decision over the M-PSK set.
pub fn min_ed_detect(zeta: ComplexSample, modulation: &ModulationParams) -> ComplexSample {
    modulation.point(modulation.detect(zeta))
}

/// Channel taps seen by one frame: `sd` and `sr` during phase I, `rd` during phase II.
#[derive(Debug, Clone, Copy)]
pub struct FrameChannels<'a> {
    pub sd: &'a [ComplexSample],
    pub sr: &'a [ComplexSample],
    pub rd: &'a [ComplexSample],
}

/// Error counts for both combiners on one channel and noise realization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameErrors {
    pub errors_sc: u64,
    pub errors_mrc: u64,
    pub bits: u64,
}

impl std::ops::AddAssign for FrameErrors {
    fn add_assign(&mut self, rhs: Self) {
        self.errors_sc += rhs.errors_sc;
        self.errors_mrc += rhs.errors_mrc;
        self.bits += rhs.bits;
    }
}

/// Unit-variance noise for one frame; drawn in the order `w_sd`, `w_sr`, `w_rd`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameNoise {
    pub sd: Vec<ComplexSample>,
    pub sr: Vec<ComplexSample>,
    pub rd: Vec<ComplexSample>,
}

impl FrameNoise {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        let mut draw = || (0..len).map(|_| complex_gaussian(rng, 1.0)).collect::<Vec<_>>();
        let sd = draw();
        let sr = draw();
        let rd = draw();
        Self { sd, sr, rd }
    }

    pub fn zero(len: usize) -> Self {
        let z = vec![ComplexSample::new(0.0, 0.0); len];
        Self { sd: z.clone(), sr: z.clone(), rd: z }
    }
}

/// Runs one frame through both phases and both combiners.
pub fn run_frame(
    frame: &SymbolFrame,
    channels: FrameChannels<'_>,
    profile: &PowerProfile,
    noise: &FrameNoise,
    modulation: &ModulationParams,
) -> Result<FrameErrors> {
    let n = frame.encoded.len();
    for (name, len) in [
        ("h_sd", channels.sd.len()),
        ("h_sr", channels.sr.len()),
        ("h_rd", channels.rd.len()),
        ("w_sd", noise.sd.len()),
        ("w_sr", noise.sr.len()),
        ("w_rd", noise.rd.len()),
    ] {
        if len < n {
            return Err(Error::Shape(format!("{name} has {len} samples, frame needs {n}")));
        }
    }
    let amp_source = profile.source_power().sqrt();
    let amplification = profile.amplification();
    let y_sd: Vec<_> = (0..n)
        .map(|k| amp_source * channels.sd[k] * frame.encoded[k] + noise.sd[k])
        .collect();
    let y_sr: Vec<_> = (0..n)
        .map(|k| amp_source * channels.sr[k] * frame.encoded[k] + noise.sr[k])
        .collect();
    let y_rd = relay_forward(&y_sr, amplification, &channels.rd[..n], &noise.rd[..n])?;
    let pairs = decision_variables(&y_sd, &y_rd)?;

    let mut counts = FrameErrors {
        bits: frame.len() as u64 * modulation.bits_per_symbol() as u64,
        ..FrameErrors::default()
    };
    for (pair, &sent) in pairs.iter().zip(&frame.indices) {
        let sc = modulation.detect(sc_combine(*pair));
        let mrc = modulation.detect(semi_mrc_combine(*pair, amplification));
        counts.errors_sc += modulation.bit_errors(sent, sc) as u64;
        counts.errors_mrc += modulation.bit_errors(sent, mrc) as u64;
    }
    Ok(counts)
}
