//! Small numeric helpers shared by the solver and optimizer modules.

/// Evaluate a polynomial given by ascending coefficients at `x`.
pub(crate) fn horner(coefficients: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coefficients.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Horner evaluation of the absolute-coefficient polynomial at `|x|`; an
/// upper bound on the magnitude of the terms, used to decide whether a
/// computed value is numerically zero.
pub(crate) fn horner_magnitude(coefficients: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    let mut acc = 0.0;
    for &c in coefficients.iter().rev() {
        acc = acc * ax + c.abs();
    }
    acc
}

/// Kahan-compensated sum; keeps the rounding error of long positive sums at
/// a few ulps instead of growing with the term count.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`, to an interval
/// width of `tol`. Returns the best abscissa found, which is also compared
/// against both endpoints so a boundary minimum is reported exactly.
pub(crate) fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: u32,
) -> f64 {
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while hi - lo > tol && iter < max_iter {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        iter += 1;
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid));
    for x in [a, b] {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_matches_direct_evaluation() {
        let c = [2.0, -3.0, 0.5, 1.0];
        let x = 0.7_f64;
        let direct = 2.0 - 3.0 * x + 0.5 * x * x + x * x * x;
        assert!((horner(&c, x) - direct).abs() < 1e-15);
    }

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let m = golden_section_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-10, 200);
        assert!((m - 0.3).abs() < 1e-9);
    }

    #[test]
    fn golden_section_reports_boundary_minimum_exactly() {
        let m = golden_section_min(|x| x, 0.0, 1.0, 1e-10, 200);
        assert_eq!(m, 0.0);
    }
}
