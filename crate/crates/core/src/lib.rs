//! Numerical toolkit for the second-order expansion of fractional Gagliardo
//! seminorms as `s → 1`: the rate functional `(𝒢¹ − 𝒢ˢ)/(1−s)`, its limit
//! `𝒢¹_∞`, their Fourier multipliers, the operators they generate and the
//! exact spectral gradient flows of both.

pub mod energies;
pub mod error;
pub mod fields;
pub mod flows;
pub mod fmtnum;
pub mod geometry;
pub mod operators;
pub mod quadrature;
pub mod series;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
