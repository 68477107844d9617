//! Event-driven simulation of the threshold queue, used as a statistical
//! oracle for the delay function, and damped best-response dynamics that
//! exhibit equilibrium stability empirically.
//!
//! The number-in-system process is simulated directly as its birth-death
//! chain: exponential holding times at rate `lambda + mu(n)`, split between
//! an arrival and a departure. Restarting the service clock at every state
//! change is distribution-equivalent for exponential services, so no
//! preemption semantics need to be specified. Sojourn times come from FCFS
//! arrival stamps; runs are bit-reproducible from the seed.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::delay::DelayFunction;
use crate::error::{QueueError, Result};
use crate::model::{Market, ServicePolicy};

/// Batch count for the batch-means confidence intervals.
pub const BATCHES: usize = 32;

/// Student-t quantiles at 31 degrees of freedom.
const T_CRIT_95: f64 = 2.039_513_446_396_407_7;
const T_CRIT_99: f64 = 2.744_041_919_294_126_8;

/// Successive best-response iterates closer than this declare convergence.
pub const DYNAMICS_DELTA: f64 = 1e-6;

/// Stability margin keeping the join-everything response strictly inside
/// the stable region.
pub const DYNAMICS_MARGIN: f64 = 1e-3;

/// A reproducible simulation run description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub policy: ServicePolicy,
    pub lambda: f64,
    pub horizon_customers: u64,
    pub warmup_customers: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(
        policy: ServicePolicy,
        lambda: f64,
        horizon_customers: u64,
        warmup_customers: u64,
        seed: u64,
    ) -> Result<Self> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(QueueError::NegativeRate(lambda));
        }
        if lambda >= 1.0 {
            return Err(QueueError::UnstableRate(lambda));
        }
        if horizon_customers == 0 {
            return Err(QueueError::InvalidParameter(
                "horizon must cover at least one customer".into(),
            ));
        }
        if warmup_customers >= horizon_customers {
            return Err(QueueError::InvalidParameter(format!(
                "warmup ({warmup_customers}) must be smaller than the horizon ({horizon_customers})"
            )));
        }
        Ok(Self {
            policy,
            lambda,
            horizon_customers,
            warmup_customers,
            seed,
        })
    }
}

/// Point estimates with batch-means confidence half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    /// Mean sojourn time over the measured customers.
    pub mean_sojourn: f64,
    /// 95% confidence half-width of the mean sojourn.
    pub half_width_95: f64,
    /// Customers served over the whole run, warmup included.
    pub customers_served: u64,
    /// Fraction of elapsed time the server was busy at the low rate.
    pub fraction_time_low_rate: f64,
    /// 95% confidence half-width of that fraction.
    pub fraction_half_width_95: f64,
}

impl SimEstimate {
    /// 99% half-width, rescaled from the stored 95% quantile.
    pub fn half_width_99(&self) -> f64 {
        self.half_width_95 * (T_CRIT_99 / T_CRIT_95)
    }
}

/// Run the simulation described by `config`.
///
/// The mean is taken over post-warmup departures, truncated to a multiple of
/// the batch count so the batch means partition the sample exactly.
pub fn simulate(config: &SimConfig) -> Result<SimEstimate> {
    if config.lambda >= 1.0 {
        return Err(QueueError::UnstableRate(config.lambda));
    }
    if config.lambda == 0.0 {
        return Err(QueueError::EmptyEstimate);
    }
    let lambda = config.lambda;
    let policy = config.policy;
    let horizon = config.horizon_customers;
    let warmup = config.warmup_customers;

    let measured_total = horizon - warmup;
    let per_batch = measured_total / BATCHES as u64;
    let measured = if per_batch == 0 {
        measured_total
    } else {
        per_batch * BATCHES as u64
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut clock = 0.0_f64;
    let mut in_system: u64 = 0;
    let mut arrivals: VecDeque<f64> = VecDeque::new();
    let mut served: u64 = 0;

    let mut sojourn_sum = vec![0.0_f64; BATCHES.max(1)];
    let mut sojourn_all = 0.0_f64;
    let mut low_time = vec![0.0_f64; BATCHES.max(1)];
    let mut elapsed = vec![0.0_f64; BATCHES.max(1)];

    let batch_of = |done: u64| -> Option<usize> {
        if done < warmup || done >= warmup + measured || per_batch == 0 {
            None
        } else {
            Some(((done - warmup) / per_batch) as usize)
        }
    };

    while served < horizon {
        if in_system == 0 {
            let dt: f64 = rng.sample::<f64, _>(Exp1) / lambda;
            if let Some(b) = batch_of(served) {
                elapsed[b] += dt;
            }
            clock += dt;
            arrivals.push_back(clock);
            in_system = 1;
            continue;
        }
        let service_rate = policy.rate_at(in_system);
        let total_rate = lambda + service_rate;
        let dt: f64 = rng.sample::<f64, _>(Exp1) / total_rate;
        if let Some(b) = batch_of(served) {
            elapsed[b] += dt;
            if in_system <= u64::from(policy.threshold()) {
                low_time[b] += dt;
            }
        }
        clock += dt;
        if rng.random::<f64>() * total_rate < lambda {
            arrivals.push_back(clock);
            in_system += 1;
        } else {
            let arrived = arrivals.pop_front().expect("queue contents tracked");
            in_system -= 1;
            let done = served;
            served += 1;
            if done >= warmup && done < warmup + measured {
                let sojourn = clock - arrived;
                sojourn_all += sojourn;
                if let Some(b) = batch_of(done) {
                    sojourn_sum[b] += sojourn;
                }
            }
        }
    }

    let mean_sojourn = sojourn_all / measured as f64;
    let (half_width_95, fraction, fraction_half_width_95) = if per_batch == 0 {
        (f64::INFINITY, f64::NAN, f64::INFINITY)
    } else {
        let batch_means: Vec<f64> = sojourn_sum
            .iter()
            .map(|s| s / per_batch as f64)
            .collect();
        let hw = half_width(&batch_means, mean_sojourn);
        let total_time: f64 = elapsed.iter().sum();
        let total_low: f64 = low_time.iter().sum();
        let fraction = total_low / total_time;
        let fraction_means: Vec<f64> = low_time
            .iter()
            .zip(&elapsed)
            .map(|(l, t)| l / t)
            .collect();
        let fraction_mean = fraction_means.iter().sum::<f64>() / BATCHES as f64;
        let fhw = half_width(&fraction_means, fraction_mean);
        (hw, fraction, fhw)
    };

    Ok(SimEstimate {
        mean_sojourn,
        half_width_95,
        customers_served: horizon,
        fraction_time_low_rate: fraction,
        fraction_half_width_95,
    })
}

fn half_width(batch_means: &[f64], grand_mean: f64) -> f64 {
    let n = batch_means.len() as f64;
    let var = batch_means
        .iter()
        .map(|m| (m - grand_mean) * (m - grand_mean))
        .sum::<f64>()
        / (n - 1.0);
    T_CRIT_95 * (var / n).sqrt()
}

/// Arrival-rate trajectory of the damped best-response iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrace {
    /// Iterates, starting rate first.
    pub iterates: Vec<f64>,
    /// Final rate when successive iterates met [`DYNAMICS_DELTA`].
    pub converged_to: Option<f64>,
    /// Base damping factor.
    pub step_size: f64,
}

/// Damped best-response dynamics of the arrival rate.
///
/// Each step moves the rate a fraction of the way toward the best response:
/// everyone joins (capped at `min(Lambda, 1 - margin)`) when the current
/// delay is below the reward, everyone balks when it is above. The raw map
/// oscillates between the extremes, so the step is additionally halved every
/// time the direction of motion reverses; this settles on stable
/// equilibria and leaves unstable ones.
pub fn best_response_dynamics(
    policy: ServicePolicy,
    market: Market,
    lambda_init: f64,
    gamma: f64,
    iterations: u32,
) -> Result<DynamicsTrace> {
    if !gamma.is_finite() || gamma <= 0.0 || gamma > 1.0 {
        return Err(QueueError::InvalidParameter(format!(
            "damping factor must lie in (0, 1], got {gamma}"
        )));
    }
    if lambda_init.is_nan() || lambda_init < 0.0 {
        return Err(QueueError::NegativeRate(lambda_init));
    }
    if lambda_init > market.rate_cap() {
        return Err(QueueError::RateAboveCap {
            lambda: lambda_init,
            cap: market.rate_cap(),
        });
    }
    if lambda_init >= 1.0 {
        return Err(QueueError::UnstableRate(lambda_init));
    }

    let df = DelayFunction::new(policy);
    let reward = market.reward();
    let join_target = market.potential_rate().min(1.0 - DYNAMICS_MARGIN);

    let mut iterates = vec![lambda_init];
    let mut converged_to = None;
    let mut step = gamma;
    let mut prev_direction = 0i8;
    let mut rate = lambda_init;
    for _ in 0..iterations {
        let w = df.sojourn_unchecked(rate);
        let response = if w < reward {
            join_target
        } else if w > reward {
            0.0
        } else {
            rate
        };
        let pull = response - rate;
        let direction = if pull > 0.0 {
            1
        } else if pull < 0.0 {
            -1
        } else {
            0
        };
        if direction != 0 && prev_direction == -direction {
            step *= 0.5;
        }
        if direction != 0 {
            prev_direction = direction;
        }
        let next = rate + step * pull;
        iterates.push(next);
        let moved = (next - rate).abs();
        rate = next;
        if moved < DYNAMICS_DELTA {
            converged_to = Some(rate);
            break;
        }
    }

    Ok(DynamicsTrace {
        iterates,
        converged_to,
        step_size: gamma,
    })
}
