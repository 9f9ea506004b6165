//! Small statistics kernels used by the sensitivity metrics.
//!
//! Standard deviations and correlations are computed from pairwise
//! differences rather than the usual centered sums. The pairwise form is
//! algebraically identical but cancels a constant offset of the data
//! exactly: if every element is shifted by the same amount (and the shifted
//! values are exactly representable), each `v[i] - v[j]` is bit-identical to
//! the unshifted difference, so the resulting statistic is too. The golden
//! invariance suite relies on this.

/// Arithmetic mean. Sequential summation, deterministic.
pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance (n-1 denominator) via pairwise differences:
/// `Var = sum_{i<j} (v_i - v_j)^2 / (n (n-1))`.
pub fn pairwise_var(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let vi = v[i];
        for &vj in &v[i + 1..] {
            let d = vi - vj;
            acc += d * d;
        }
    }
    acc / (n as f64 * (n - 1) as f64)
}

/// Sample standard deviation (n-1 denominator), pairwise form.
pub fn pairwise_std(v: &[f64]) -> f64 {
    pairwise_var(v).sqrt()
}

/// Sample covariance (n-1 denominator) via pairwise differences.
pub fn pairwise_cov(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let (ai, bi) = (a[i], b[i]);
        for j in i + 1..n {
            acc += (ai - a[j]) * (bi - b[j]);
        }
    }
    acc / (n as f64 * (n - 1) as f64)
}

/// Pearson correlation over paired samples.
///
/// Returns `None` when either series has exactly zero variance (a flat
/// curve has no defined correlation). Finite results are clamped to
/// `[-1, 1]` to absorb rounding.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let va = pairwise_var(a);
    let vb = pairwise_var(b);
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    let r = pairwise_cov(a, b) / (va.sqrt() * vb.sqrt());
    Some(r.clamp(-1.0, 1.0))
}

/// Quantile by linear interpolation of order statistics (the `h = (n-1)p`
/// convention). `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let w = h - lo as f64;
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}
