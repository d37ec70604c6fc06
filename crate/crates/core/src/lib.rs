//! Numerical operator theory on the Bergman space of the unit ball.
//!
//! The crate provides, at desk scale and with exact arithmetic wherever a
//! claim is an identity:
//!
//! - exact multivariate polynomial algebra with the radial and complex
//!   tangential derivatives ([`poly`]),
//! - exact weighted monomial moments over the ball and spherical shells,
//!   with slice-decomposition and Monte Carlo cross-checks ([`moments`]),
//! - truncated matrices of multiplication/Toeplitz operators, submodule
//!   projectors, compressions and commutators ([`operators`]),
//! - singular-value spectra and Schatten-norm estimates ([`spectra`]),
//! - executable verifiers for the identity/inequality suite with
//!   empirical constant estimation ([`inequalities`]),
//! - anisotropic Carleson-box geometry and the greedy covering algorithm
//!   with bounded-overlap diagnostics ([`covering`]).

pub mod covering;
pub mod error;
pub mod inequalities;
pub mod moments;
pub mod multiindex;
pub mod operators;
pub mod parse;
pub mod poly;
pub mod randpoly;
pub mod report;
pub mod scalar;
pub mod spectra;

pub use error::{CoreError, Result};
pub use multiindex::MultiIndex;
pub use poly::{HoloPoly, MixedPoly};
pub use scalar::{C64, ExactC, Rat, Scalar};
