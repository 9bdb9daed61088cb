//! Differential amplify-and-forward (D-AF) relaying over slow Rayleigh fading.
//!
//! The crate is split the same way a link-level study is:
//!
//! - [`specfn`]: exponential integral, modified Bessel `K1`, Bessel `J0` and
//!   adaptive Gauss-Kronrod quadrature.
//! - [`fading`]: sum-of-sinusoids Rayleigh fading and complex AWGN.
//! - [`phy`]: differential M-PSK, the two-phase relay chain, selection
//!   combining, semi-MRC and minimum-distance detection.
//! - [`analysis`]: exact BER of the selection combiner, its high-SNR
//!   approximation and the outage probability.
//! - [`harness`]: Monte Carlo BER curves, power-allocation sweeps, outage
//!   tables, CSV output and the validation suite behind the CLI.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod error;
pub mod fading;
pub mod harness;
pub mod oracle;
pub mod phy;
pub mod specfn;

pub use error::{Error, Result};

/// Complex baseband value: a transmitted symbol, a channel tap, a noise draw
/// or a decision variable.
pub type ComplexSample = num_complex::Complex64;

/// Converts a power in dB to linear units.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
