//! Maximization of the aggregate welfare flow `S(lambda) = lambda * (reward
//! - W(lambda))` over the feasible arrival rates.
//!
//! S can be bimodal (the source of the jump discontinuities the optimal rate
//! exhibits in parameter sweeps), so the optimizer is a dense grid pass
//! followed by golden-section refinement of every grid-local maximum; a
//! single local search is not enough.

use crate::delay::DelayFunction;
use crate::equilibrium::{find_equilibria, EquilibriumSet};
use crate::error::{QueueError, Result};
use crate::model::{Market, ServicePolicy};
use crate::numeric::golden_section_min;

/// Grid resolution of the global pass.
pub const GRID_POINTS: usize = 10_000;

/// Rate-space width to which each local maximum is refined.
pub const REFINE_TOL: f64 = 1e-10;

/// Central-difference step for the first-order-condition residual.
pub const FOC_STEP: f64 = 1e-6;

/// Relative gap below which two local maxima are reported as tied; ties
/// resolve to the smaller rate.
const TIE_TOL: f64 = 1e-9;

/// Local maxima closer than this in rate are merged.
const MERGE_TOL: f64 = 1e-7;

/// Root tolerance used when the comparison report enumerates equilibria.
const EQUILIBRIUM_TOL: f64 = 1e-10;

/// A local maximum of the welfare flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMaximum {
    pub rate: f64,
    pub value: f64,
}

/// Result of the global welfare maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareOptimum {
    /// Maximizing arrival rate.
    pub rate: f64,
    /// Welfare flow at the maximizer.
    pub value: f64,
    /// `|reward - W - lambda W'|` at the maximizer; 0 by convention at a
    /// boundary maximizer, where the stationarity condition does not apply.
    pub foc_residual: f64,
    /// Every local maximum found, ascending in rate.
    pub local_maxima: Vec<LocalMaximum>,
    /// True when more than one local maximum exists.
    pub bimodal: bool,
    /// True when the maximizer sits on the boundary of the feasible range.
    pub boundary: bool,
}

/// Globally maximize the welfare flow over `[0, min(Lambda, 1))`.
pub fn optimize_welfare(policy: ServicePolicy, market: Market) -> Result<WelfareOptimum> {
    let df = DelayFunction::new(policy);
    let reward = market.reward();
    let upper = market.rate_cap();
    let n = GRID_POINTS;
    let step = upper / n as f64;

    // Dense pass; the grid stops one step short of the cap, which is outside
    // the half-open feasible range.
    let values: Vec<f64> = (0..n)
        .map(|i| df.welfare_unchecked(reward, step * i as f64))
        .collect();

    // Refine every grid-local maximum.
    let mut maxima: Vec<LocalMaximum> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || values[i] >= values[i - 1];
        let right_ok = i == n - 1 || values[i] >= values[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = step * i.saturating_sub(1) as f64;
        let hi = step * (i + 1).min(n - 1) as f64;
        let rate = if hi > lo {
            golden_section_min(|x| -df.welfare_unchecked(reward, x), lo, hi, REFINE_TOL, 200)
        } else {
            lo
        };
        let value = df.welfare_unchecked(reward, rate);
        match maxima.iter_mut().find(|m| (m.rate - rate).abs() < MERGE_TOL) {
            Some(m) if value > m.value => {
                m.rate = rate;
                m.value = value;
            }
            Some(_) => {}
            None => maxima.push(LocalMaximum { rate, value }),
        }
    }
    maxima.sort_by(|a, b| a.rate.total_cmp(&b.rate));

    // Global choice with a deterministic tie-break toward the smaller rate.
    let best_value = maxima
        .iter()
        .map(|m| m.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let tie_window = TIE_TOL * best_value.abs().max(1.0);
    let winner = maxima
        .iter()
        .find(|m| m.value >= best_value - tie_window)
        .copied()
        .ok_or_else(|| QueueError::Internal("no welfare maximum found".into()))?;

    let boundary = winner.rate == 0.0
        || (market.potential_rate() < 1.0 && upper - winner.rate <= 2.0 * step);
    let foc = if boundary {
        0.0
    } else {
        foc_residual(policy, market, winner.rate)?
    };

    Ok(WelfareOptimum {
        rate: winner.rate,
        value: winner.value,
        foc_residual: foc,
        bimodal: maxima.len() >= 2,
        local_maxima: maxima,
        boundary,
    })
}

/// Stationarity residual `|reward - W(lambda) - lambda W'(lambda)|` of the
/// welfare flow at an interior rate.
pub fn foc_residual(policy: ServicePolicy, market: Market, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(QueueError::NegativeRate(lambda));
    }
    if lambda >= 1.0 {
        return Err(QueueError::UnstableRate(lambda));
    }
    if lambda == 0.0 {
        return Err(QueueError::InvalidParameter(
            "stationarity residual is undefined at the boundary rate 0".into(),
        ));
    }
    let df = DelayFunction::new(policy);
    let w = df.sojourn(lambda)?;
    let slope = df.sojourn_slope(lambda, FOC_STEP)?;
    Ok((market.reward() - w - lambda * slope).abs())
}

/// Socially optimal rate set against the equilibrium range.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumComparison {
    pub optimum: WelfareOptimum,
    pub equilibria: EquilibriumSet,
    /// Smallest and largest equilibrium rates.
    pub eq_min: f64,
    pub eq_max: f64,
    /// Optimal rate within `[eq_min, eq_max]` up to tolerance.
    pub within_envelope: bool,
    /// Optimal rate at or below the largest equilibrium rate.
    pub below_or_at_max: bool,
    /// For threshold 1: the largest equilibrium rate, which the optimum
    /// provably never exceeds.
    pub t1_reference: Option<f64>,
    pub t1_bound_holds: Option<bool>,
}

/// Maximize welfare, enumerate equilibria and report where the optimum falls
/// relative to the equilibrium range.
pub fn compare_optimum_to_equilibria(
    policy: ServicePolicy,
    market: Market,
) -> Result<OptimumComparison> {
    let optimum = optimize_welfare(policy, market)?;
    let equilibria = find_equilibria(policy, market, EQUILIBRIUM_TOL)?;
    let eq_min = equilibria.min_rate().unwrap_or(f64::NAN);
    let eq_max = equilibria.max_rate().unwrap_or(f64::NAN);
    let tol = 1e-8;
    let within_envelope = optimum.rate >= eq_min - tol && optimum.rate <= eq_max + tol;
    let below_or_at_max = optimum.rate <= eq_max + tol;
    let (t1_reference, t1_bound_holds) = if policy.threshold() == 1 {
        (Some(eq_max), Some(below_or_at_max))
    } else {
        (None, None)
    };
    Ok(OptimumComparison {
        optimum,
        equilibria,
        eq_min,
        eq_max,
        within_envelope,
        below_or_at_max,
        t1_reference,
        t1_bound_holds,
    })
}

/// Which tail statement applies to the threshold-1 welfare flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum T1Tail {
    /// Slow rate on the tangency boundary: tail starts at the touch point.
    FromTangency { start: f64 },
    /// Two positive crossings: tail starts at the larger one.
    FromUpperRoot { start: f64 },
}

/// Numeric certification of shape properties of the threshold-1 welfare
/// flow on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct T1WelfareReport {
    pub low_rate: f64,
    pub reward: f64,
    /// Second central differences negative across the whole grid.
    pub concave_on_grid: bool,
    /// Grid the certification ran on.
    pub grid_points: usize,
    pub tail: Option<T1Tail>,
    /// S strictly decreasing along the tail grid (when a tail applies).
    pub tail_decreasing: Option<bool>,
    /// Second differences negative along the tail grid.
    pub tail_concave: Option<bool>,
}

const T1_GRID: usize = 400;
const SECOND_DIFF_STEP: f64 = 1e-4;

/// Certify shape properties of the threshold-1 welfare flow numerically.
pub fn t1_welfare_properties(low_rate: f64, market: Market) -> Result<T1WelfareReport> {
    if !(low_rate > 0.0 && low_rate < 1.0) {
        return Err(QueueError::InvalidParameter(format!(
            "low service rate must lie strictly in (0, 1), got {low_rate}"
        )));
    }
    let policy = ServicePolicy::new(1, low_rate)?;
    let df = DelayFunction::new(policy);
    let r = market.reward();
    let mu = low_rate;
    let s = |x: f64| df.welfare_unchecked(r, x);
    let second_diff = |x: f64| {
        let h = SECOND_DIFF_STEP;
        (s(x + h) - 2.0 * s(x) + s(x - h)) / (h * h)
    };

    let lo = 0.005;
    let hi = 0.99;
    let grid_step = (hi - lo) / (T1_GRID - 1) as f64;
    let concave_on_grid = (0..T1_GRID).all(|k| second_diff(lo + grid_step * k as f64) < 0.0);

    let tail = if mu < 0.5 {
        let dip_boundary = 1.0 - r / 4.0;
        if mu == dip_boundary {
            Some(T1Tail::FromTangency {
                start: (1.0 - 2.0 * mu) / (2.0 * (1.0 - mu)),
            })
        } else if mu > dip_boundary {
            let disc = r * (r - 4.0 * (1.0 - mu));
            if disc >= 0.0 {
                Some(T1Tail::FromUpperRoot {
                    start: (r * (1.0 - 2.0 * mu) + disc.sqrt()) / (2.0 * r * (1.0 - mu)),
                })
            } else {
                None
            }
        } else {
            None
        }
    } else {
        None
    };

    let (tail_decreasing, tail_concave) = match tail {
        Some(T1Tail::FromTangency { start }) | Some(T1Tail::FromUpperRoot { start }) => {
            let a = start + 0.002;
            let n = 300;
            let step = (hi - a) / n as f64;
            let mut decreasing = true;
            let mut concave = true;
            let mut prev = s(a);
            for k in 1..=n {
                let x = a + step * k as f64;
                let v = s(x);
                if v >= prev {
                    decreasing = false;
                }
                prev = v;
            }
            for k in 0..=n {
                let x = a + step * k as f64;
                if second_diff(x) >= 0.0 {
                    concave = false;
                }
            }
            (Some(decreasing), Some(concave))
        }
        None => (None, None),
    };

    Ok(T1WelfareReport {
        low_rate,
        reward: r,
        concave_on_grid,
        grid_points: T1_GRID,
        tail,
        tail_decreasing,
        tail_concave,
    })
}
