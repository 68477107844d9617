//! Domain types: the threshold service policy and the market parameters.
//!
//! Everything is dimensionless after the usual normalization: the fast
//! service rate and the per-unit-time delay cost are both fixed at 1, so the
//! slow rate lives in (0, 1), rewards are measured in multiples of the delay
//! cost, and arrival rates in multiples of the fast service rate. The API
//! does not accept un-normalized inputs.

use crate::error::{QueueError, Result};

/// A two-speed service rule: the server works at `low_rate` while the number
/// in system is at or below `threshold`, and at rate 1 above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServicePolicy {
    threshold: u32,
    low_rate: f64,
}

impl ServicePolicy {
    /// Requires `threshold >= 1` and `low_rate` strictly inside (0, 1).
    pub fn new(threshold: u32, low_rate: f64) -> Result<Self> {
        if threshold == 0 {
            return Err(QueueError::InvalidParameter(
                "threshold must be at least 1".into(),
            ));
        }
        if !low_rate.is_finite() || low_rate <= 0.0 || low_rate >= 1.0 {
            return Err(QueueError::InvalidParameter(format!(
                "low service rate must lie strictly in (0, 1), got {low_rate}"
            )));
        }
        Ok(Self {
            threshold,
            low_rate,
        })
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn low_rate(&self) -> f64 {
        self.low_rate
    }

    /// The fast rate is the normalization unit.
    pub fn high_rate(&self) -> f64 {
        1.0
    }

    /// Service rate in effect when `in_system` customers are present.
    pub fn rate_at(&self, in_system: u64) -> f64 {
        if in_system <= u64::from(self.threshold) {
            self.low_rate
        } else {
            1.0
        }
    }
}

/// Market side of the model: the service reward and the potential arrival
/// rate of the customer stream. The delay cost is normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Market {
    reward: f64,
    potential_rate: f64,
}

impl Market {
    /// Requires `reward >= 0` and `potential_rate > 0`.
    pub fn new(reward: f64, potential_rate: f64) -> Result<Self> {
        if !reward.is_finite() || reward < 0.0 {
            return Err(QueueError::InvalidParameter(format!(
                "reward must be a finite non-negative real, got {reward}"
            )));
        }
        if !potential_rate.is_finite() || potential_rate <= 0.0 {
            return Err(QueueError::InvalidParameter(format!(
                "potential arrival rate must be a finite positive real, got {potential_rate}"
            )));
        }
        Ok(Self {
            reward,
            potential_rate,
        })
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    pub fn potential_rate(&self) -> f64 {
        self.potential_rate
    }

    /// Delay cost per unit time, fixed by normalization.
    pub fn delay_cost(&self) -> f64 {
        1.0
    }

    /// Upper end of the feasible effective arrival rates, `min(Lambda, 1)`.
    pub fn rate_cap(&self) -> f64 {
        self.potential_rate.min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_rejects_bad_parameters() {
        assert!(ServicePolicy::new(0, 0.5).is_err());
        assert!(ServicePolicy::new(1, 0.0).is_err());
        assert!(ServicePolicy::new(1, 1.0).is_err());
        assert!(ServicePolicy::new(1, f64::NAN).is_err());
        assert!(ServicePolicy::new(1, 0.5).is_ok());
    }

    #[test]
    fn policy_rate_switches_at_threshold() {
        let p = ServicePolicy::new(3, 0.1).unwrap();
        assert_eq!(p.rate_at(0), 0.1);
        assert_eq!(p.rate_at(3), 0.1);
        assert_eq!(p.rate_at(4), 1.0);
    }

    #[test]
    fn market_rejects_bad_parameters() {
        assert!(Market::new(-1.0, 1.0).is_err());
        assert!(Market::new(1.0, 0.0).is_err());
        assert!(Market::new(f64::INFINITY, 1.0).is_err());
        assert!(Market::new(0.0, 2.0).is_ok());
    }

    #[test]
    fn rate_cap_never_exceeds_one() {
        assert_eq!(Market::new(4.0, 2.5).unwrap().rate_cap(), 1.0);
        assert_eq!(Market::new(4.0, 0.5).unwrap().rate_cap(), 0.5);
    }
}
