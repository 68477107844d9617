//! Customer equilibria and socially optimal arrival rates for an
//! unobservable M/M/1 queue whose service rate switches between a low and a
//! high value at a congestion threshold.
//!
//! The server works at rate `mu_l < 1` while the number in system is at or
//! below a threshold `T` and at rate 1 above it. Arriving customers cannot
//! see the queue; they weigh a fixed service reward against the expected
//! delay cost and join or balk accordingly. Because extra arrivals can push
//! the server into its fast mode, joining may impose positive externalities
//! and the symmetric equilibrium arrival rate is not unique: instances have
//! between one and three equilibria, each stable or unstable under small
//! perturbations of the arrival rate.
//!
//! What's here:
//! - [`delay`]: the exact delay function `W(lambda)`, its unsimplified
//!   cross-check form, and the welfare flow `S(lambda) = lambda (R - W)`;
//! - [`stationary`]: the birth-death stationary distribution, an
//!   independent oracle for W through Little's law;
//! - [`polynomial`]: the degree `T + 1` indifference polynomial and
//!   Fourier-Budan sign-variation counts bounding its root count;
//! - [`equilibrium`]: enumeration and stability classification of all
//!   equilibria, with a closed form for `T = 1`;
//! - [`welfare`]: global welfare maximization (the flow can be bimodal),
//!   first-order-condition residuals, and optimum-vs-equilibrium reports;
//! - [`sim`]: a seeded discrete-event simulation of the queue and damped
//!   best-response dynamics exhibiting stability empirically;
//! - [`cli`]: the command-line front end (`delay | equilibria | welfare |
//!   sweep | simulate`) with CSV output and study presets.
//!
//! Everything is normalized: fast service rate 1, delay cost 1. See the
//! `examples/` directory for one runnable walk-through per capability.

pub mod cli;
pub mod delay;
pub mod equilibrium;
pub mod error;
pub mod model;
mod numeric;
pub mod polynomial;
pub mod sim;
pub mod stationary;
pub mod welfare;

pub use delay::{
    delay_denominator, delay_numerator, social_welfare, waiting_time, waiting_time_raw,
    DelayEvaluation, DelayFunction,
};
pub use equilibrium::{
    classify_stability, find_equilibria, t1_equilibria, EquilibriumKind, EquilibriumPoint,
    EquilibriumSet, Stability,
};
pub use error::{QueueError, Result};
pub use model::{Market, ServicePolicy};
pub use polynomial::{EquilibriumPolynomial, SignVariationReport};
pub use sim::{best_response_dynamics, simulate, DynamicsTrace, SimConfig, SimEstimate};
pub use stationary::{stationary_distribution, StationaryDistribution};
pub use welfare::{
    compare_optimum_to_equilibria, foc_residual, optimize_welfare, t1_welfare_properties,
    OptimumComparison, T1WelfareReport, WelfareOptimum,
};
