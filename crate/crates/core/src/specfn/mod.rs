//! Special functions and quadrature for the analytical BER and outage engine.

mod bessel;
mod expint;
mod quad;

pub use bessel::{bessel_j0, bessel_k1, x_bessel_k1};
pub use expint::{exp_integral_e1, scaled_e1};
pub use quad::{integrate, integrate_theta, QuadratureSpec};
