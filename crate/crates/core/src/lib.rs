//! Negative-eigenvalue Riesz means of half-line Schrödinger operators with the
//! critical Hardy term `−d²/dr² − 1/(4r²)`, and Lieb–Thirring certificates for
//! them.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: modified Bessel functions `I₀, I₁, K₀, K₁`, gamma and beta.
//! * [`green`]: the resolvent kernel of the interval operator and `C_α(k)`.
//! * [`poincare`]: the Poincaré–Sobolev constant `Φ(b, c)` and `S_α`.
//! * [`spectral`]: finite element eigensolvers and Riesz means.
//! * [`partition`]: the recursive partition and the bound certificate.
//! * [`deltabound`]: the delta-well lower bound `sup_R R^{1−α} I₀(R) K₀(R)`.
//! * [`sigma`]: reductions of the operator family `H_σ` to `H₀` or the line.

pub mod error;
pub mod expr;
pub mod extended;
pub mod optimize;
pub mod quadrature;
pub mod specfun;

pub mod green;
pub mod poincare;
pub mod potential;
pub mod spectral;
pub mod sigma;
pub mod partition;
pub mod deltabound;

pub use error::{Error, Result};
pub use extended::Extended;
