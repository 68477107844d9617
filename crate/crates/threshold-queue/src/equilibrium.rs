//! Enumeration and stability classification of symmetric equilibrium
//! arrival rates.
//!
//! A rate is an equilibrium when no customer gains by deviating from the
//! joining probability that induces it: rate 0 when even an empty-ish system
//! is not worth joining (`W(0) >= reward`), the cap `Lambda` when joining is
//! strictly profitable there (`W(Lambda) < reward`, only binding when
//! `Lambda < 1`), and any interior rate where customers are indifferent
//! (`W = reward`). Interior roots are found by a dense sign scan of the
//! indifference polynomial plus bisection, with a slope-bisection pass that
//! picks up tangency (double) roots the sign scan cannot see.

use crate::delay::DelayFunction;
use crate::error::{QueueError, Result};
use crate::model::{Market, ServicePolicy};
use crate::polynomial::EquilibriumPolynomial;

/// Number of grid points in the interior sign scan.
pub const SCAN_POINTS: usize = 20_001;

/// Nominal central-difference step for the stability slope.
pub const STABILITY_STEP: f64 = 1e-6;

/// Slope magnitudes below this are classified as marginal (tangency).
pub const STABILITY_SLOPE_TOL: f64 = 1e-5;

/// Relative tolerance for the boundary tie `W(0) == reward`.
const BOUNDARY_TIE_TOL: f64 = 1e-12;

/// Rate-space width to which sign-change brackets are bisected.
const BISECTION_WIDTH: f64 = 1e-12;

/// Interior roots closer than this are treated as duplicates.
const MERGE_TOL: f64 = 1e-6;

const MAX_BISECTIONS: u32 = 300;

/// How an equilibrium arises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// Rate 0: every customer balks.
    AllBalk,
    /// Rate `Lambda` (< 1): every customer joins.
    AllJoin,
    /// Indifference point strictly inside (0, min(Lambda, 1)).
    Interior,
}

impl std::fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EquilibriumKind::AllBalk => "all-balk",
            EquilibriumKind::AllJoin => "all-join",
            EquilibriumKind::Interior => "interior",
        })
    }
}

/// Response of the equilibrium to a small perturbation of the arrival rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

/// One equilibrium arrival rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPoint {
    pub rate: f64,
    pub kind: EquilibriumKind,
    pub stability: Stability,
    /// `|W(rate) - reward|` for interior points; 0 by convention for the
    /// boundary kinds, where no indifference condition applies.
    pub residual: f64,
}

/// All equilibria of an instance, ordered by ascending rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    points: Vec<EquilibriumPoint>,
}

impl EquilibriumSet {
    fn new(mut points: Vec<EquilibriumPoint>) -> Self {
        points.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        Self { points }
    }

    pub fn points(&self) -> &[EquilibriumPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn interior_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.kind == EquilibriumKind::Interior)
            .count()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rate).collect()
    }

    pub fn min_rate(&self) -> Option<f64> {
        self.points.first().map(|p| p.rate)
    }

    pub fn max_rate(&self) -> Option<f64> {
        self.points.last().map(|p| p.rate)
    }
}

/// Label an equilibrium point by the response of the arrival rate to a small
/// perturbation.
///
/// Interior points are stable where W is increasing (a joiner surplus above
/// the indifference rate discourages further joining), unstable where W is
/// decreasing, and marginal where the slope is numerically zero (tangency).
/// The all-balk point is stable under a strict gap `W(0) > reward` and
/// marginal on the tie; the all-join point is always stable.
pub fn classify_stability(
    policy: ServicePolicy,
    market: Market,
    point: EquilibriumPoint,
) -> EquilibriumPoint {
    let df = DelayFunction::new(policy);
    classify_with(&df, market, point)
}

fn classify_with(df: &DelayFunction, market: Market, mut point: EquilibriumPoint) -> EquilibriumPoint {
    point.stability = match point.kind {
        EquilibriumKind::AllJoin => Stability::Stable,
        EquilibriumKind::AllBalk => {
            let w0 = 1.0 / df.policy().low_rate();
            let r = market.reward();
            if (w0 - r).abs() <= BOUNDARY_TIE_TOL * r.abs().max(1.0) {
                Stability::Marginal
            } else {
                Stability::Stable
            }
        }
        EquilibriumKind::Interior => {
            let slope = df
                .sojourn_slope(point.rate, STABILITY_STEP)
                .unwrap_or(f64::NAN);
            if !slope.is_finite() || slope.abs() < STABILITY_SLOPE_TOL {
                Stability::Marginal
            } else if slope > 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            }
        }
    };
    point
}

/// Enumerate every symmetric equilibrium arrival rate in
/// `[0, min(Lambda, 1)]` and classify its stability.
///
/// `tol` bounds the indifference residual `|W(rate) - reward|` accepted for
/// interior points; brackets that cannot be driven below it raise
/// [`QueueError::NoConvergence`].
pub fn find_equilibria(policy: ServicePolicy, market: Market, tol: f64) -> Result<EquilibriumSet> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(QueueError::InvalidParameter(format!(
            "root tolerance must be positive, got {tol}"
        )));
    }
    let df = DelayFunction::new(policy);
    let poly = EquilibriumPolynomial::new(policy, market.reward())?;
    let reward = market.reward();
    let upper = market.rate_cap();

    let mut points = Vec::new();

    let w0 = 1.0 / policy.low_rate();
    if w0 >= reward {
        points.push(EquilibriumPoint {
            rate: 0.0,
            kind: EquilibriumKind::AllBalk,
            stability: Stability::Stable,
            residual: 0.0,
        });
    }

    let mut interior = scan_sign_changes(&df, &poly, reward, upper, tol)?;
    scan_tangencies(&df, reward, upper, tol, &mut interior);
    interior.sort_by(f64::total_cmp);
    for rate in interior {
        let residual = (df.sojourn_unchecked(rate) - reward).abs();
        points.push(EquilibriumPoint {
            rate,
            kind: EquilibriumKind::Interior,
            stability: Stability::Stable,
            residual,
        });
    }

    if market.potential_rate() < 1.0 {
        let w_cap = df.sojourn(market.potential_rate())?;
        if w_cap < reward {
            points.push(EquilibriumPoint {
                rate: market.potential_rate(),
                kind: EquilibriumKind::AllJoin,
                stability: Stability::Stable,
                residual: 0.0,
            });
        }
    }

    let classified = points
        .into_iter()
        .map(|p| classify_with(&df, market, p))
        .collect();
    Ok(EquilibriumSet::new(classified))
}

/// Dense sign scan of H over (0, upper) followed by bisection of each
/// sign-change bracket.
fn scan_sign_changes(
    df: &DelayFunction,
    poly: &EquilibriumPolynomial,
    reward: f64,
    upper: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let step = upper / (SCAN_POINTS - 1) as f64;
    let mut roots = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_v = poly.eval(0.0);
    for i in 1..SCAN_POINTS {
        let x = if i == SCAN_POINTS - 1 {
            upper
        } else {
            step * i as f64
        };
        let v = poly.eval(x);
        if v == 0.0 {
            if x > 0.0 && x < upper {
                roots.push(x);
            }
        } else if prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0) {
            let root = bisect(poly, prev_x, prev_v, x, tol, df, reward)?;
            if root > 0.0 && root < upper {
                roots.push(root);
            }
        }
        prev_x = x;
        prev_v = v;
    }
    Ok(roots)
}

fn bisect(
    poly: &EquilibriumPolynomial,
    mut lo: f64,
    lo_value: f64,
    mut hi: f64,
    tol: f64,
    df: &DelayFunction,
    reward: f64,
) -> Result<f64> {
    let lo_negative = lo_value < 0.0;
    let mut iterations = 0u32;
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_WIDTH || mid <= lo || mid >= hi {
            // Bracket exhausted; accept only if the indifference residual
            // meets the caller's tolerance.
            if mid < 1.0 && (df.sojourn_unchecked(mid) - reward).abs() <= tol {
                return Ok(mid);
            }
            if iterations >= MAX_BISECTIONS || mid <= lo || mid >= hi {
                return Err(QueueError::NoConvergence {
                    tol,
                    iterations,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        let v = poly.eval(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > MAX_BISECTIONS {
            return Err(QueueError::NoConvergence {
                tol,
                iterations,
                lower: lo,
                upper: hi,
            });
        }
    }
}

/// Locate tangency (double) roots: grid-local minima of `|W - reward|` that
/// dip below `sqrt(tol)` with no sign change, refined by bisecting the sign
/// of the symmetric slope of W.
fn scan_tangencies(
    df: &DelayFunction,
    reward: f64,
    upper: f64,
    tol: f64,
    roots: &mut Vec<f64>,
) {
    let step = upper / (SCAN_POINTS - 1) as f64;
    let detect = tol.sqrt();
    let slope = |x: f64| df.sojourn_unchecked(x + STABILITY_STEP) - df.sojourn_unchecked(x - STABILITY_STEP);
    let residual_at = |i: usize| (df.sojourn_unchecked(step * i as f64) - reward).abs();

    let mut prev2 = residual_at(1);
    let mut prev1 = residual_at(2);
    for i in 3..SCAN_POINTS - 1 {
        let cur = residual_at(i);
        // Strict local minimum of the residual at i - 1.
        if prev1 < prev2 && prev1 <= cur && prev1 < detect {
            let x = step * (i - 1) as f64;
            let (mut lo, mut hi) = (x - step, x + step);
            let (slo, shi) = (slope(lo), slope(hi));
            if slo < 0.0 && shi > 0.0 || slo > 0.0 && shi < 0.0 {
                let lo_negative = slo < 0.0;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if (slope(mid) < 0.0) == lo_negative {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let candidate = 0.5 * (lo + hi);
                let is_root = (df.sojourn_unchecked(candidate) - reward).abs() <= tol;
                let is_new = roots.iter().all(|r| (r - candidate).abs() > MERGE_TOL);
                if is_root && is_new && candidate > 0.0 && candidate < upper {
                    roots.push(candidate);
                }
            }
        }
        prev2 = prev1;
        prev1 = cur;
    }
}

/// Closed-form equilibrium set for threshold 1, where the indifference
/// condition is quadratic.
///
/// Dispatches on the exact case boundaries `reward = 1`, `reward = 2`,
/// `low_rate` vs `1/reward` and `low_rate` vs `1 - reward/4`, then applies
/// the same cap handling as the numeric path when `Lambda < 1`.
pub fn t1_equilibria(low_rate: f64, market: Market) -> Result<EquilibriumSet> {
    if !low_rate.is_finite() || low_rate <= 0.0 || low_rate >= 1.0 {
        return Err(QueueError::InvalidParameter(format!(
            "low service rate must lie strictly in (0, 1), got {low_rate}"
        )));
    }
    let policy = ServicePolicy::new(1, low_rate)?;
    let df = DelayFunction::new(policy);
    let r = market.reward();
    let mu = low_rate;

    // Quadratic roots, defined when the discriminant is non-negative.
    let quad_roots = |require: &str| -> Result<(f64, f64)> {
        let disc = r * (r - 4.0 * (1.0 - mu));
        if disc < 0.0 {
            return Err(QueueError::Internal(format!(
                "negative discriminant {disc} in case {require} (reward {r}, low rate {mu})"
            )));
        }
        let sqrt_disc = disc.sqrt();
        let denom = 2.0 * r * (1.0 - mu);
        Ok((
            (r * (1.0 - 2.0 * mu) + sqrt_disc) / denom,
            (r * (1.0 - 2.0 * mu) - sqrt_disc) / denom,
        ))
    };
    let tangency_rate = (1.0 - 2.0 * mu) / (2.0 * (1.0 - mu));

    let mut include_zero = false;
    let mut positive: Vec<f64> = Vec::new();
    if r < 1.0 {
        include_zero = true;
    } else if mu > 1.0 / r {
        let (hi, _) = quad_roots("unique-crossing")?;
        positive.push(hi);
    } else if r <= 2.0 {
        include_zero = true;
    } else {
        let dip_boundary = 1.0 - r / 4.0;
        include_zero = true;
        if mu == dip_boundary {
            positive.push(tangency_rate);
        } else if mu > dip_boundary {
            let (hi, lo) = quad_roots("double-crossing")?;
            // On the exact tie low_rate == 1/reward the smaller root is 0
            // and coincides with the all-balk point.
            if lo > 0.0 {
                positive.push(lo);
            }
            positive.push(hi);
        }
    }

    let mut points = Vec::new();
    if include_zero {
        points.push(EquilibriumPoint {
            rate: 0.0,
            kind: EquilibriumKind::AllBalk,
            stability: Stability::Stable,
            residual: 0.0,
        });
    }
    for rate in positive {
        if rate > market.potential_rate() {
            continue;
        }
        let residual = (df.sojourn_unchecked(rate) - r).abs();
        points.push(EquilibriumPoint {
            rate,
            kind: EquilibriumKind::Interior,
            stability: Stability::Stable,
            residual,
        });
    }
    if market.potential_rate() < 1.0 {
        let w_cap = df.sojourn(market.potential_rate())?;
        if w_cap < r {
            points.push(EquilibriumPoint {
                rate: market.potential_rate(),
                kind: EquilibriumKind::AllJoin,
                stability: Stability::Stable,
                residual: 0.0,
            });
        }
    }

    let classified = points
        .into_iter()
        .map(|p| classify_with(&df, market, p))
        .collect();
    Ok(EquilibriumSet::new(classified))
}
