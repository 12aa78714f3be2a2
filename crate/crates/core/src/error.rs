//! Error type shared by all analysis operations.

use crate::interval::Interval;
use thiserror::Error;

/// Failure modes of weight construction and analysis queries.
///
/// `Diverged` is a *mathematical* outcome, not a bug: it reports that a
/// requested integral is infinite (e.g. the reciprocal of `|x|` over an
/// interval containing the origin). Sweep drivers catch it and surface a
/// per-scale diverged flag instead of aborting the whole profile.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum WeightError {
    /// Query interval leaves the working domain of the weight.
    #[error("interval [{}, {}] exceeds working domain [{}, {}]", requested.lo(), requested.hi(), domain.lo(), domain.hi())]
    DomainExceeded { requested: Interval, domain: Interval },

    /// A point query leaves the working domain.
    #[error("point {point} exceeds working domain [{}, {}]", domain.lo(), domain.hi())]
    PointOutsideDomain { point: f64, domain: Interval },

    /// An integral that the caller asked for is infinite.
    #[error("{what} diverges on [{}, {}]", interval.lo(), interval.hi())]
    Diverged { what: &'static str, interval: Interval },

    /// Construction data violates positivity or finiteness.
    #[error("invalid weight data: {0}")]
    InvalidWeight(String),

    /// Malformed weight family specification string.
    #[error("invalid weight spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },

    /// Operation parameters are out of range (exponents, depths, counts).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested transform is not available for this representation.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A sweep produced no admissible test configuration.
    #[error("sweep is empty: {0}")]
    EmptySweep(String),

    /// A screening hypothesis required by a check does not hold.
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    /// Reading external data (sampled weight CSV) failed.
    #[error("weight data I/O: {0}")]
    Io(String),
}
