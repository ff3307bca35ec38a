//! One-dimensional adaptive Simpson quadrature.

use crate::error::FunctionalError;

const MAX_DEPTH: u32 = 50;

/// `∫_lo^hi f`, refined until the local Richardson estimate is below `tol`
/// (absolute). Reversed limits give the negated integral.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, FunctionalError> {
    if lo == hi {
        return Ok(0.0);
    }
    if hi < lo {
        return adaptive_simpson(f, hi, lo, tol).map(|v| -v);
    }
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    let whole = simpson(lo, hi, fa, fm, fb);
    let mut ok = true;
    let v = recurse(f, lo, hi, fa, fm, fb, whole, tol, MAX_DEPTH, &mut ok);
    if ok && v.is_finite() {
        Ok(v)
    } else {
        Err(FunctionalError::QuadratureFailure { lo, hi, tol })
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 || m <= a || m >= b {
        *ok = false;
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok)
}

/// `∫_base^{x_j} f` for every `x_j`, integrating only between consecutive
/// sorted abscissae so each stretch of the real line is visited once.
pub fn cumulative_from(
    f: &impl Fn(f64) -> f64,
    base: f64,
    xs: &[f64],
    tol: f64,
) -> Result<Vec<f64>, FunctionalError> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut out = vec![0.0; xs.len()];
    // Above the base: walk upward. Below: walk downward.
    let split = order.partition_point(|&i| xs[i] < base);
    let mut acc = 0.0;
    let mut prev = base;
    for &i in &order[split..] {
        acc += adaptive_simpson(f, prev, xs[i], tol)?;
        prev = xs[i];
        out[i] = acc;
    }
    let mut acc = 0.0;
    let mut prev = base;
    for &i in order[..split].iter().rev() {
        acc += adaptive_simpson(f, prev, xs[i], tol)?;
        prev = xs[i];
        out[i] = acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
        let r = adaptive_simpson(&|x: f64| x.exp(), 1.0, 0.0, 1e-13).unwrap();
        assert_eq!(r, -v);
        assert_eq!(adaptive_simpson(&|x: f64| x, 2.0, 2.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn cumulative_matches_direct() {
        let f = |s: f64| 1.0 / s.sinh();
        let xs = [0.9, 0.3, 1.7, 0.5, 0.5, 2.4];
        let cum = cumulative_from(&f, 0.6, &xs, 1e-13).unwrap();
        for (x, c) in xs.iter().zip(&cum) {
            let exact = ((x / 2.0).tanh() / (0.3_f64).tanh()).ln();
            assert!((c - exact).abs() < 1e-11, "{x}: {c} vs {exact}");
        }
    }

    #[test]
    fn reports_failure_on_singularity() {
        let r = adaptive_simpson(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(FunctionalError::QuadratureFailure { .. })));
    }
}
