//! Scalar numerics shared by the bound engine, the Monte Carlo engine and the
//! spectral scans: log-scale golden-section minimization, adaptive Simpson
//! quadrature and order-independent summation.

use statrs::function::erf;

/// `√(2/π)`, the leading constant of every Bismut-type bound.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const PRESCAN_POINTS: usize = 65;

/// Location and value of a one-dimensional minimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Minimizes `f` over `[lo, hi]` (with `0 < lo < hi`) on a logarithmic scale.
///
/// A uniform pre-scan in `log x` localizes the basin, golden-section search
/// refines it until the bracket is below `rel_tol` in `log x`, and both window
/// endpoints are always compared against the refined point.
pub fn minimize_log_scale(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> Minimum {
    minimize_scanned(f, lo, hi, rel_tol, true)
}

/// Like [`minimize_log_scale`] for objectives with several local minima:
/// the refinement starts from the best pre-scan basin, and unimodality is
/// not asserted.
pub fn minimize_log_scale_multimodal(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> Minimum {
    minimize_scanned(f, lo, hi, rel_tol, false)
}

fn minimize_scanned(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64, unimodal: bool) -> Minimum {
    assert!(lo > 0.0 && hi > lo, "invalid log-scale bracket [{lo}, {hi}]");
    let (a, b) = (lo.ln(), hi.ln());
    let g = |y: f64| f(y.exp());

    let step = (b - a) / (PRESCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| if i + 1 == PRESCAN_POINTS { b } else { a + step * i as f64 })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&y| g(y)).collect();
    debug_assert!(
        !unimodal || is_unimodal(&values),
        "objective is not unimodal on [{lo}, {hi}]: {values:?}"
    );

    let best = values
        .iter()
        .enumerate()
        .min_by(|l, r| l.1.total_cmp(r.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(PRESCAN_POINTS - 1)];
    let (y, fy) = golden_section(g, left, right, rel_tol);

    let mut out = Minimum { x: y.exp(), value: fy };
    for (x, v) in [(lo, values[0]), (hi, values[PRESCAN_POINTS - 1])] {
        if v < out.value {
            out = Minimum { x, value: v };
        }
    }
    out
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// Sequence decreases, then increases; ties within a relative 1e-12 are ignored.
fn is_unimodal(values: &[f64]) -> bool {
    let mut rising = false;
    for w in values.windows(2) {
        let (l, r) = (w[0], w[1]);
        if !l.is_finite() || !r.is_finite() {
            continue;
        }
        let slack = 1e-12 * l.abs().max(r.abs()).max(1e-300);
        if r > l + slack {
            rising = true;
        } else if r < l - slack && rising {
            return false;
        }
    }
    true
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite Simpson rule on uniformly spaced samples (odd count).
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "composite Simpson needs an odd sample count");
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Neumaier-compensated sum; the result depends only on the input order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error (`sample std / √n`).
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(samples.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(samples.iter().map(|v| (v - mean) * (v - mean)));
    let var = ss / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `x⁻ = max(−x, 0)`.
#[inline]
pub fn neg_part(x: f64) -> f64 {
    (-x).max(0.0)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_scale_minimum_of_exp_over_t() {
        // e^{λt}/t is minimized at t = 1/λ with value eλ.
        let lambda = 2.0;
        let m = minimize_log_scale(|t| (lambda * t).exp() / t, 1e-6, 1e3, 1e-10);
        assert_relative_eq!(m.x, 0.5, max_relative = 1e-6);
        assert_relative_eq!(m.value, std::f64::consts::E * lambda, max_relative = 1e-12);
    }

    #[test]
    fn monotone_objective_picks_endpoint() {
        let m = minimize_log_scale(|s| 1.0 / s.sqrt(), 1e-4, 3.0, 1e-10);
        assert_eq!(m.x, 3.0);
    }

    #[test]
    fn simpson_integrates_singular_after_substitution() {
        // ∫_0^1 s^{-1/2} ds = 2 via s = v².
        let v = adaptive_simpson(|v| 2.0 * v / v.max(1e-300), 0.0, 1.0, 1e-12);
        assert_relative_eq!(v, 2.0, epsilon = 1e-12);
        let w = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert_relative_eq!(w, 2.0, epsilon = 1e-11);
    }

    #[test]
    fn compensated_sum_is_exact_for_ones() {
        let ones = vec![1.0; 100_001];
        assert_eq!(compensated_sum(ones.iter().copied()) / 100_001.0, 1.0);
    }

    #[test]
    fn normal_cdf_matches_reflection_value() {
        // 2Φ(0.5) − 1 from 30-digit arithmetic.
        assert_relative_eq!(2.0 * normal_cdf(0.5) - 1.0, 0.382_924_922_548_026_2, epsilon = 1e-15);
    }

    #[test]
    fn unimodality_detector() {
        assert!(is_unimodal(&[3.0, 2.0, 1.0, 2.0, 5.0]));
        assert!(is_unimodal(&[3.0, 2.0, 1.0]));
        assert!(!is_unimodal(&[1.0, 2.0, 1.0, 2.0]));
    }
}
