//! Exact verification toolkit for the exponential limit of the Bernoulli-Laplace
//! eigenvalue measure.
//!
//! The crate builds the spectral measure of the two-urn chain, two reversible
//! birth-death kernels that realize same-law pairs `(W, W')`, the solutions of
//! the two exponential Stein equations, and a term-by-term evaluator for the
//! associated Kolmogorov-distance bounds. An independent spherical-function
//! route (Hahn recurrence, Johnson-graph distance walks) reproduces the same
//! kernels and moments and is cross-checked against the direct construction.
//!
//! All distributional quantities are exact rationals over big integers;
//! floating point enters only through transcendental factors (`exp`, `ln`,
//! roots) when a bound is finally composed.
//!
//! With the default `parallel` feature, sweeps over chain sizes fan out via
//! rayon; disabling it yields a dependency-free sequential fallback with
//! identical results and ordering.

pub mod bounds;
pub mod error;
pub mod exact;
pub mod kernels;
mod par;
pub mod report;
pub mod spectrum;
pub mod spherical;
pub mod stein;
pub mod sweep;

pub use error::{Error, Result};
