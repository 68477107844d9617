//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the analytic, optimization and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueueError {
    /// Arrival rate below zero.
    #[error("arrival rate {0} is negative")]
    NegativeRate(f64),

    /// Arrival rate at or above the fast service rate 1; the queue has no
    /// stationary regime there.
    #[error("arrival rate {0} is at or above 1; the queue is unstable")]
    UnstableRate(f64),

    /// Arrival rate above the potential arrival rate.
    #[error("arrival rate {lambda} exceeds the potential arrival rate {cap}")]
    RateAboveCap { lambda: f64, cap: f64 },

    /// The unsimplified delay expression has a removable singularity at
    /// `lambda == low_rate`; callers must use the simplified form there.
    #[error(
        "raw delay expression is singular near lambda = mu_l \
         (|{lambda} - {low_rate}| <= {guard}); use the simplified form"
    )]
    NearRemovableSingularity {
        lambda: f64,
        low_rate: f64,
        guard: f64,
    },

    /// A constructor or operation was given a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative routine exhausted its budget before reaching tolerance.
    /// Carries the best bracket found so far.
    #[error(
        "no convergence to tolerance {tol} within {iterations} iterations; \
         best bracket [{lower}, {upper}]"
    )]
    NoConvergence {
        tol: f64,
        iterations: u32,
        lower: f64,
        upper: f64,
    },

    /// A simulation with arrival rate zero serves no customers, so the mean
    /// sojourn time is undefined.
    #[error("simulation served no customers (arrival rate 0); mean sojourn undefined")]
    EmptyEstimate,

    /// A state the case analysis should make unreachable.
    #[error("internal consistency violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, QueueError>;
