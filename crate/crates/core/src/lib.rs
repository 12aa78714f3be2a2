//! Numerical toolkit for weights on the real line.
//!
//! A *weight* is a locally integrable, positive function `w`. This crate
//! measures how far a weight is from behaving like a constant at small
//! scales: doubling constants and their vanishing moduli, Muckenhoupt
//! `A_p`/`A_inf` constants, mean oscillation of `log w` (BMO/VMO),
//! exponential distribution tails, a Carleson box density built from the
//! concavity defect of the primitive, a telescoping decomposition of the
//! box functional, and a cone (area) functional. All suprema are computed
//! over explicit finite sweeps and reported together with the witness
//! configuration that attained them, so every number can be reproduced by
//! a single call.
//!
//! Weights are carried either in closed form (`analytic` families with
//! exact primitives) or as piecewise-constant samples on a uniform grid
//! (`sampled`), in which case all interval masses are exact *for the
//! sampled model*. Every operation is deterministic: identical inputs
//! produce identical floating-point output.

pub mod area;
pub mod carleson;
pub mod error;
pub mod interval;
pub mod muckenhoupt;
pub mod oscillation;
pub mod quadrature;
pub mod sweep;
pub mod weight;

pub use error::WeightError;
pub use interval::{BoxPoint, Interval};
pub use weight::WeightHandle;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, WeightError>;
