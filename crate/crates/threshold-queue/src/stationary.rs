//! Stationary distribution of the queue-length birth-death chain.
//!
//! Serves as the independent oracle for the delay function: by Little's law
//! the mean number in system divided by the arrival rate must reproduce W.

use crate::error::{QueueError, Result};
use crate::model::ServicePolicy;

/// Default truncation tail used by the oracles; strictly tighter than any
/// comparison tolerance in the test suites.
pub const DEFAULT_TAIL_BOUND: f64 = 1e-14;

/// Truncated stationary distribution of the number in system.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    probabilities: Vec<f64>,
    truncation_level: usize,
    tail_mass_bound: f64,
}

impl StationaryDistribution {
    /// Probabilities for levels `0..=truncation_level`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn truncation_level(&self) -> usize {
        self.truncation_level
    }

    /// Bound on the probability mass beyond the truncation level.
    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    /// Sum of the retained probabilities; lies in `[1 - tail bound, 1]`.
    pub fn total_mass(&self) -> f64 {
        crate::numeric::compensated_sum(self.probabilities.iter().copied())
    }

    /// Mean number in system over the retained levels.
    pub fn mean_number_in_system(&self) -> f64 {
        crate::numeric::compensated_sum(
            self.probabilities
                .iter()
                .enumerate()
                .map(|(n, p)| n as f64 * p),
        )
    }

    /// Probability that the server is busy at the low rate: levels 1..=T.
    pub fn low_rate_busy_fraction(&self, policy: ServicePolicy) -> f64 {
        let t = policy.threshold() as usize;
        self.probabilities
            .iter()
            .take(t + 1)
            .skip(1)
            .sum()
    }
}

/// Stationary distribution at effective arrival rate `lambda`, truncated so
/// the omitted geometric tail carries less than `tail_bound` of the mass.
pub fn stationary_distribution(
    policy: ServicePolicy,
    lambda: f64,
    tail_bound: f64,
) -> Result<StationaryDistribution> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(QueueError::NegativeRate(lambda));
    }
    if lambda >= 1.0 {
        return Err(QueueError::UnstableRate(lambda));
    }
    if tail_bound.is_nan() || tail_bound <= 0.0 {
        return Err(QueueError::InvalidParameter(format!(
            "tail bound must be positive, got {tail_bound}"
        )));
    }
    if lambda == 0.0 {
        return Ok(StationaryDistribution {
            probabilities: vec![1.0],
            truncation_level: 0,
            tail_mass_bound: tail_bound,
        });
    }

    let t = policy.threshold() as usize;
    let mu = policy.low_rate();

    // Unnormalized weights up to the threshold; above it the weights form a
    // geometric sequence with ratio lambda, so the total and the tail beyond
    // any level are available in closed form.
    let mut weights = Vec::with_capacity(t + 2);
    weights.push(1.0);
    for _ in 1..=t {
        let prev = *weights.last().unwrap();
        weights.push(prev * lambda / mu);
    }
    let head_sum: f64 = weights.iter().sum();
    let w_t = weights[t];
    let total = head_sum + w_t * lambda / (1.0 - lambda);

    // Smallest level whose geometric tail mass falls below half the
    // requested bound; the slack keeps the retained-mass invariant true in
    // floating point, not only for the exact values.
    let target = 0.5 * tail_bound * total;
    let mut level = t;
    let mut tail = w_t * lambda / (1.0 - lambda);
    while tail > target {
        level += 1;
        tail *= lambda;
    }

    // Direct powers instead of a running product: the rounding error stays
    // logarithmic in the distance from the threshold.
    for n in (t + 1)..=level {
        weights.push(w_t * lambda.powi((n - t) as i32));
    }
    let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();

    Ok(StationaryDistribution {
        probabilities,
        truncation_level: level,
        tail_mass_bound: tail_bound,
    })
}
