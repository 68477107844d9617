//! The expected sojourn time W of the threshold queue and the welfare it
//! induces.
//!
//! W is a rational function of the effective arrival rate: a polynomial
//! numerator divided by `(1 - lambda)` times a polynomial denominator that is
//! strictly positive on [0, 1). Both polynomials are evaluated with a nested
//! (Horner) scheme. An unsimplified form of the same quantity, which has a
//! removable singularity at `lambda == low_rate`, is kept only as a
//! cross-check.

use crate::error::{QueueError, Result};
use crate::model::{Market, ServicePolicy};
use crate::numeric::horner;

/// Half-width of the exclusion window around `lambda == low_rate` inside
/// which [`waiting_time_raw`] refuses to evaluate. The window only affects
/// the diagnostic path; the simplified form has no singularity.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// One evaluation of the delay function, with the polynomial pieces exposed
/// so callers can check the positivity and lower-bound invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEvaluation {
    /// Effective arrival rate the evaluation was taken at.
    pub lambda: f64,
    /// Expected sojourn time W(lambda).
    pub sojourn: f64,
    /// Numerator polynomial value; positive on [0, 1).
    pub numerator: f64,
    /// Denominator polynomial value (without the `1 - lambda` factor);
    /// strictly positive on [0, 1).
    pub denominator: f64,
}

/// Ascending coefficients of the numerator polynomial of W.
///
/// Degree is `threshold`; for `threshold == 1` the polynomial is the
/// constant 1 (the general form has an empty sum and a vanishing leading
/// coefficient there).
pub fn numerator_coefficients(policy: ServicePolicy) -> Vec<f64> {
    let t = policy.threshold() as usize;
    let tf = t as f64;
    let mu = policy.low_rate();
    let mut c = vec![0.0; t + 1];
    c[t] += -(tf - 1.0) * (1.0 - mu);
    for j in 1..t {
        let jf = j as f64;
        c[t - j] += -(1.0 - mu) * mu.powi(j as i32 - 1) * ((tf - jf - 1.0) * mu + jf - 1.0 - tf);
    }
    c[0] += mu.powi(t as i32 - 1);
    c
}

/// Ascending coefficients of the denominator polynomial of W.
///
/// All coefficients are positive, so the value is strictly positive on
/// [0, 1) (indeed on [0, ∞)).
pub fn denominator_coefficients(policy: ServicePolicy) -> Vec<f64> {
    let t = policy.threshold() as usize;
    let mu = policy.low_rate();
    let mut c = vec![0.0; t + 1];
    for j in 0..t {
        c[t - j] += (1.0 - mu) * mu.powi(j as i32);
    }
    c[0] += mu.powi(t as i32);
    c
}

/// Reusable evaluator for W and the welfare flow at a fixed policy.
///
/// Building one hoists the coefficient construction out of dense scans.
#[derive(Debug, Clone)]
pub struct DelayFunction {
    policy: ServicePolicy,
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

impl DelayFunction {
    pub fn new(policy: ServicePolicy) -> Self {
        Self {
            policy,
            numerator: numerator_coefficients(policy),
            denominator: denominator_coefficients(policy),
        }
    }

    pub fn policy(&self) -> ServicePolicy {
        self.policy
    }

    pub fn numerator_coefficients(&self) -> &[f64] {
        &self.numerator
    }

    pub fn denominator_coefficients(&self) -> &[f64] {
        &self.denominator
    }

    /// Full evaluation with domain checks.
    pub fn eval(&self, lambda: f64) -> Result<DelayEvaluation> {
        check_rate(lambda)?;
        let numerator = horner(&self.numerator, lambda);
        let denominator = horner(&self.denominator, lambda);
        debug_assert!(denominator > 0.0);
        Ok(DelayEvaluation {
            lambda,
            sojourn: numerator / ((1.0 - lambda) * denominator),
            numerator,
            denominator,
        })
    }

    /// Sojourn time alone.
    pub fn sojourn(&self, lambda: f64) -> Result<f64> {
        self.eval(lambda).map(|e| e.sojourn)
    }

    /// Hot-path evaluation without domain checks; callers guarantee
    /// `lambda` in [0, 1).
    pub(crate) fn sojourn_unchecked(&self, lambda: f64) -> f64 {
        horner(&self.numerator, lambda) / ((1.0 - lambda) * horner(&self.denominator, lambda))
    }

    /// Central-difference slope of W at `lambda`, with the nominal step
    /// clamped so the stencil stays inside [0, 1).
    pub fn sojourn_slope(&self, lambda: f64, step: f64) -> Result<f64> {
        check_rate(lambda)?;
        let h = step.min(0.5 * lambda).min(0.5 * (1.0 - lambda));
        if h <= 0.0 {
            return Err(QueueError::InvalidParameter(format!(
                "cannot form a difference stencil at lambda = {lambda}"
            )));
        }
        Ok((self.sojourn_unchecked(lambda + h) - self.sojourn_unchecked(lambda - h)) / (2.0 * h))
    }

    /// Welfare flow `lambda * (reward - W(lambda))`; zero at `lambda == 0`.
    pub(crate) fn welfare_unchecked(&self, reward: f64, lambda: f64) -> f64 {
        if lambda == 0.0 {
            0.0
        } else {
            lambda * (reward - self.sojourn_unchecked(lambda))
        }
    }
}

fn check_rate(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(QueueError::NegativeRate(lambda));
    }
    if lambda >= 1.0 {
        return Err(QueueError::UnstableRate(lambda));
    }
    Ok(())
}

/// Numerator polynomial value at `lambda`.
pub fn delay_numerator(policy: ServicePolicy, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    Ok(horner(&numerator_coefficients(policy), lambda))
}

/// Denominator polynomial value at `lambda`; strictly positive.
pub fn delay_denominator(policy: ServicePolicy, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    Ok(horner(&denominator_coefficients(policy), lambda))
}

/// Expected sojourn time of a customer joining at effective rate `lambda`.
///
/// `W(0) = 1/low_rate`, W exceeds `1/(1 - lambda)` everywhere, and W
/// diverges as `lambda -> 1`.
pub fn waiting_time(policy: ServicePolicy, lambda: f64) -> Result<DelayEvaluation> {
    DelayFunction::new(policy).eval(lambda)
}

/// The unsimplified sojourn-time expression, valid away from
/// `lambda == low_rate` where it hits a removable singularity.
///
/// Exists solely as an independent cross-check of [`waiting_time`].
pub fn waiting_time_raw(policy: ServicePolicy, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    let mu = policy.low_rate();
    if (lambda - mu).abs() <= SINGULARITY_GUARD {
        return Err(QueueError::NearRemovableSingularity {
            lambda,
            low_rate: mu,
            guard: SINGULARITY_GUARD,
        });
    }
    let t = policy.threshold() as i32;
    let tf = t as f64;
    let mu_t = mu.powi(t);
    let lam_t = lambda.powi(t);
    let gap = mu - lambda;
    let numerator = (mu_t - (tf + 1.0) * lam_t + lambda / gap * (mu_t - lam_t)) / gap
        + lam_t * (tf + 1.0 - tf * lambda) / ((1.0 - lambda) * (1.0 - lambda));
    let denominator = (mu_t * mu - lam_t * lambda) / gap + lam_t * lambda / (1.0 - lambda);
    Ok(numerator / denominator)
}

/// Aggregate welfare flow `S(lambda) = lambda * (reward - W(lambda))`.
///
/// The feasible range is `[0, min(potential_rate, 1))`; `S(0) = 0`.
pub fn social_welfare(policy: ServicePolicy, market: Market, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    if lambda > market.potential_rate() {
        return Err(QueueError::RateAboveCap {
            lambda,
            cap: market.potential_rate(),
        });
    }
    Ok(DelayFunction::new(policy).welfare_unchecked(market.reward(), lambda))
}
