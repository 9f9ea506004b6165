//! Scalar sensitivity metrics: PDP importance, per-curve ICE importance and
//! its aggregates, ICE-correlation dispersion, two-way PDP importance, and
//! Monte-Carlo Sobol' indices.

use crate::error::{CoreError, Result};
use crate::evaluator::Evaluator;
use crate::pdp::{IceEnsemble, JointPdp};
use crate::sampling::saltelli_design;
use crate::space::InputSpace;
use crate::stats::{mean, pairwise_std, pearson, quantile_sorted};
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// PDP feature importance: sample standard deviation (K-1 denominator) of
/// the PDP across the grid.
///
/// Computed from per-instance column differences so that a constant offset
/// of the curves cancels exactly; algebraically this is the standard
/// deviation of the column means. Anchoring does not change the result.
pub fn i_pdp(ens: &IceEnsemble) -> Result<f64> {
    column_mean_std(&ens.raw_curves())
}

fn column_mean_std(curves: &ArrayView2<'_, f64>) -> Result<f64> {
    let k = curves.ncols();
    let n = curves.nrows();
    if k < 2 {
        return Err(CoreError::DegenerateGrid { min: 2, got: k });
    }
    let pairs = k * (k - 1) / 2;
    let mut diff_sums = vec![0.0; pairs];
    for row in curves.outer_iter() {
        let row = row.as_slice().expect("standard layout");
        let mut idx = 0;
        for a in 0..k {
            let ra = row[a];
            for &rb in &row[a + 1..] {
                diff_sums[idx] += ra - rb;
                idx += 1;
            }
        }
    }
    let nf = n as f64;
    let var = diff_sums
        .iter()
        .map(|d| {
            let md = d / nf;
            md * md
        })
        .sum::<f64>()
        / (k as f64 * (k - 1) as f64);
    Ok(var.sqrt())
}

/// Per-curve importance: sample standard deviation of each ICE curve across
/// the grid (Eq.-level analogue of the PDP importance, one value per
/// complement instance).
pub fn ice_importances(ens: &IceEnsemble) -> Result<Vec<f64>> {
    if ens.k() < 2 {
        return Err(CoreError::DegenerateGrid { min: 2, got: ens.k() });
    }
    Ok(ens
        .raw_curves()
        .outer_iter()
        .map(|row| pairwise_std(row.as_slice().expect("standard layout")))
        .collect())
}

/// Mean and sample standard deviation (n-1) of the per-curve importances.
pub fn mu_sigma_ice(importances: &[f64]) -> Result<(f64, f64)> {
    if importances.len() < 2 {
        return Err(CoreError::InvalidParameter(
            "need at least 2 curve importances".into(),
        ));
    }
    Ok((mean(importances), pairwise_std(importances)))
}

/// Pearson correlations of each ICE curve with the PDP, and their spread.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IceCorrelations {
    /// Correlations of the curves with defined (non-flat) variance.
    pub rho: Vec<f64>,
    /// Curves excluded because the curve or the PDP is exactly flat across
    /// the grid, making the correlation undefined.
    pub excluded: usize,
    /// Sample standard deviation of `rho`; `None` when fewer than two
    /// correlations are defined.
    pub sigma_rho: Option<f64>,
}

/// Correlation of every curve with the PDP across the K grid points.
///
/// Flat curves (or a flat PDP) have no defined correlation; they are
/// excluded and counted rather than recorded as zero.
pub fn ice_correlations(ens: &IceEnsemble) -> Result<IceCorrelations> {
    if ens.k() < 3 {
        return Err(CoreError::DegenerateGrid { min: 3, got: ens.k() });
    }
    let curves = ens.raw_curves();
    let n = curves.nrows();
    // Correlation is invariant to per-curve shifts, so the raw PDP (mean of
    // raw curves) is the right reference even for anchored ensembles.
    let mut pdp = vec![0.0; ens.k()];
    for row in curves.outer_iter() {
        for (k, v) in row.iter().enumerate() {
            pdp[k] += v;
        }
    }
    for v in pdp.iter_mut() {
        *v /= n as f64;
    }
    let mut rho = Vec::with_capacity(n);
    let mut excluded = 0;
    for row in curves.outer_iter() {
        match pearson(row.as_slice().expect("standard layout"), &pdp) {
            Some(r) => rho.push(r),
            None => excluded += 1,
        }
    }
    let sigma_rho = if rho.len() >= 2 { Some(pairwise_std(&rho)) } else { None };
    Ok(IceCorrelations { rho, excluded, sigma_rho })
}

/// Two-way PDP interaction importance from a joint surface.
///
/// For every fixed grid value of one feature, take the importance (std
/// across the other feature's grid) of the conditional slice; the spread of
/// those conditional importances measures how much the conditioning value
/// reshapes the effect. The two directions are averaged.
pub fn two_way_ipdp(joint: &JointPdp) -> Result<f64> {
    let (ki, kj) = (joint.surface.nrows(), joint.surface.ncols());
    if ki < 2 || kj < 2 {
        return Err(CoreError::DegenerateGrid { min: 2, got: ki.min(kj) });
    }
    // I_pdp(x_i | x_j = b): std over the i-grid of column b.
    let cond_i: Vec<f64> = (0..kj)
        .map(|b| pairwise_std(&joint.surface.column(b).to_vec()))
        .collect();
    let cond_j: Vec<f64> = (0..ki)
        .map(|a| pairwise_std(&joint.surface.row(a).to_vec()))
        .collect();
    Ok(0.5 * (pairwise_std(&cond_i) + pairwise_std(&cond_j)))
}

/// First-order and total Sobol' indices from a pick-freeze design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SobolIndices {
    pub first: Vec<f64>,
    pub total: Vec<f64>,
    /// Feature indices whose estimates fell outside [0, 1]; the values are
    /// reported unclipped.
    pub out_of_range: Vec<usize>,
    /// Total variance of the pooled (A, B) outputs.
    pub variance: f64,
}

fn eval_rows(ev: &dyn Evaluator, pts: &ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let chunk = 8192usize;
    let n = pts.nrows();
    let idx: Vec<usize> = (0..n).collect();
    let blocks: Vec<Vec<f64>> = idx
        .par_chunks(chunk)
        .map(|ids| {
            let sub = pts.select(ndarray::Axis(0), ids);
            ev.eval_unchecked(sub.view()).to_vec()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for b in blocks {
        out.extend_from_slice(&b);
    }
    for (i, v) in out.iter().enumerate() {
        if !v.is_finite() {
            return Err(CoreError::EvaluatorFailure { instance: i, grid: 0 });
        }
    }
    Ok(out)
}

fn pooled_variance(fa: &[f64], fb: &[f64]) -> f64 {
    let n = (fa.len() + fb.len()) as f64;
    let total: f64 = fa.iter().chain(fb.iter()).sum();
    let m = total / n;
    let ss: f64 = fa.iter().chain(fb.iter()).map(|v| (v - m) * (v - m)).sum();
    ss / (n - 1.0)
}

/// Monte-Carlo Sobol' indices: Saltelli-2010 first-order estimator
/// `S_j = mean(f(B) (f(AB_j) - f(A))) / V` and the Jansen total estimator
/// `S_Tj = mean((f(A) - f(AB_j))^2) / (2V)`.
pub fn sobol_mc(
    ev: &dyn Evaluator,
    space: &InputSpace,
    n_base: usize,
    seed: u64,
) -> Result<SobolIndices> {
    if n_base < 100 {
        return Err(CoreError::InvalidParameter(format!(
            "sobol_mc requires n_base >= 100, got {n_base}"
        )));
    }
    let m = space.dim();
    let design = saltelli_design(space, n_base, seed)?;
    let fa = eval_rows(ev, &design.a.values.view())?;
    let fb = eval_rows(ev, &design.b.values.view())?;
    let variance = pooled_variance(&fa, &fb);
    if variance == 0.0 {
        return Err(CoreError::DegenerateVariance(
            "constant evaluator output over the pick-freeze design".into(),
        ));
    }
    let nf = n_base as f64;
    let mut first = Vec::with_capacity(m);
    let mut total = Vec::with_capacity(m);
    let mut out_of_range = Vec::new();
    for j in 0..m {
        let ab = design.ab(j);
        let fab = eval_rows(ev, &ab.view())?;
        let mut num_f = 0.0;
        let mut num_t = 0.0;
        for i in 0..n_base {
            num_f += fb[i] * (fab[i] - fa[i]);
            let d = fa[i] - fab[i];
            num_t += d * d;
        }
        let sf = num_f / nf / variance;
        let st = num_t / (2.0 * nf) / variance;
        if !(0.0..=1.0).contains(&sf) || !(0.0..=1.0).contains(&st) {
            out_of_range.push(j);
        }
        first.push(sf);
        total.push(st);
    }
    Ok(SobolIndices { first, total, out_of_range, variance })
}

/// Second-order Sobol' indices via the closed-pair pick-freeze estimator:
/// `S_ij = S^closed_ij - S_i - S_j`, sharing the same `(A, B)` design as
/// [`sobol_mc`] under the same seed. Returns a symmetric matrix with zero
/// diagonal.
pub fn sobol_second_mc(
    ev: &dyn Evaluator,
    space: &InputSpace,
    n_base: usize,
    seed: u64,
) -> Result<Array2<f64>> {
    if n_base < 100 {
        return Err(CoreError::InvalidParameter(format!(
            "sobol_second_mc requires n_base >= 100, got {n_base}"
        )));
    }
    let m = space.dim();
    let design = saltelli_design(space, n_base, seed)?;
    let fa = eval_rows(ev, &design.a.values.view())?;
    let fb = eval_rows(ev, &design.b.values.view())?;
    let variance = pooled_variance(&fa, &fb);
    if variance == 0.0 {
        return Err(CoreError::DegenerateVariance(
            "constant evaluator output over the pick-freeze design".into(),
        ));
    }
    let nf = n_base as f64;
    let closed = |fab: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n_base {
            acc += fb[i] * (fab[i] - fa[i]);
        }
        acc / nf / variance
    };
    let mut single = Vec::with_capacity(m);
    for j in 0..m {
        let fab = eval_rows(ev, &design.ab(j).view())?;
        single.push(closed(&fab));
    }
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in i + 1..m {
            let fab = eval_rows(ev, &design.ab_pair(i, j).view())?;
            let s = closed(&fab) - single[i] - single[j];
            out[[i, j]] = s;
            out[[j, i]] = s;
        }
    }
    Ok(out)
}

/// Five-number summary with IQR whiskers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    /// `Q1 - 1.5 (Q3 - Q1)`.
    pub lower_whisker: f64,
    /// `Q3 + 1.5 (Q3 - Q1)`.
    pub upper_whisker: f64,
    /// Samples strictly outside the whiskers.
    pub outliers: Vec<f64>,
}

/// Quartiles by linear interpolation of order statistics, whiskers at
/// 1.5 IQR, outliers listed.
pub fn boxplot_stats(samples: &[f64]) -> Result<BoxplotStats> {
    if samples.len() < 4 {
        return Err(CoreError::InvalidParameter(format!(
            "boxplot requires at least 4 samples, got {}",
            samples.len()
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let q1 = quantile_sorted(&sorted, 0.25);
    let q2 = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lower_whisker = q1 - 1.5 * iqr;
    let upper_whisker = q3 + 1.5 * iqr;
    let outliers = sorted
        .iter()
        .copied()
        .filter(|v| *v < lower_whisker || *v > upper_whisker)
        .collect();
    Ok(BoxplotStats { q1, q2, q3, lower_whisker, upper_whisker, outliers })
}

/// Which metric an interaction matrix carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Pdp,
    Sobol2,
    Shap,
}

/// Symmetric m x m matrix: diagonal holds the main-effect importance,
/// off-diagonal entries the pairwise interaction importance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionMatrix {
    pub metric: InteractionKind,
    pub values: Vec<Vec<f64>>,
}

impl InteractionMatrix {
    pub fn from_array(metric: InteractionKind, a: &Array2<f64>) -> Self {
        let values = a.outer_iter().map(|r| r.to_vec()).collect();
        Self { metric, values }
    }
}

/// Per-feature scalar sensitivity record assembled by a full run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSensitivity {
    pub feature: usize,
    pub name: String,
    pub i_pdp: f64,
    pub mu_ice: f64,
    pub sigma_ice: f64,
    pub sigma_rho: Option<f64>,
    /// Curves whose correlation with the PDP is undefined (flat).
    pub rho_excluded: usize,
    pub rho_boxplot: Option<BoxplotSummary>,
    pub s_first: f64,
    pub s_total: f64,
    /// Mean |phi| with the background (marginal expectation) baseline.
    pub sh_bar: f64,
    /// Mean |phi| with the anchor-point baseline.
    pub sh_bar_anchored: f64,
}

/// Boxplot five-number summary for the report (outliers summarized by
/// count, not listed).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outlier_count: usize,
}

impl From<&BoxplotStats> for BoxplotSummary {
    fn from(b: &BoxplotStats) -> Self {
        Self {
            q1: b.q1,
            q2: b.q2,
            q3: b.q3,
            lower_whisker: b.lower_whisker,
            upper_whisker: b.upper_whisker,
            outlier_count: b.outliers.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{builtin_friedman5, builtin_goldstein3};
    use crate::evaluator::FnEvaluator;
    use crate::pdp::{compute_ice, compute_ice_with_sample};
    use crate::sampling::{draw_iid, feature_grid, streams, GridScheme};
    use crate::space::Marginal;
    use approx::assert_abs_diff_eq;
    use ndarray::ArrayView1;

    fn unit_space(m: usize) -> InputSpace {
        InputSpace::new(
            (0..m)
                .map(|i| Marginal::uniform(format!("x{}", i + 1), 0.0, 1.0).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn i_pdp_matches_direct_std_of_pdp() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| (4.0 * r[0]).sin() + r[1]);
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 20, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 200, 3).unwrap();
        let direct = pairwise_std(&ens.pdp().to_vec());
        assert_abs_diff_eq!(i_pdp(&ens).unwrap(), direct, epsilon = 1e-10);
    }

    #[test]
    fn additive_evaluator_identities() {
        // Theorem-level identities, exact on shared samples: every curve
        // importance equals the PDP importance; sigma_ice and sigma_rho are 0.
        let ev = FnEvaluator::new(3, |r: ArrayView1<f64>| {
            (3.0 * r[0]).sin() + 2.0 * r[1] - r[2] * r[2]
        });
        let space = unit_space(3);
        let grid = feature_grid(&space, 0, 25, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 300, 11).unwrap();
        let ip = i_pdp(&ens).unwrap();
        let imp = ice_importances(&ens).unwrap();
        for v in &imp {
            assert!((v - ip).abs() < 1e-10);
        }
        let (mu, sigma) = mu_sigma_ice(&imp).unwrap();
        assert!((mu - ip).abs() < 1e-10);
        assert!(sigma < 1e-10);
        let corr = ice_correlations(&ens).unwrap();
        assert_eq!(corr.excluded, 0);
        assert!(corr.rho.iter().all(|r| (r - 1.0).abs() < 1e-9));
        assert!(corr.sigma_rho.unwrap() < 1e-9);
    }

    #[test]
    fn constant_evaluator_all_zero() {
        let ev = FnEvaluator::new(2, |_| 4.25);
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 10, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 20, 1).unwrap();
        assert_eq!(i_pdp(&ens).unwrap(), 0.0);
        let imp = ice_importances(&ens).unwrap();
        assert!(imp.iter().all(|v| *v == 0.0));
        let corr = ice_correlations(&ens).unwrap();
        assert_eq!(corr.excluded, 20);
        assert!(corr.sigma_rho.is_none());
    }

    #[test]
    fn goldstein_x2_per_curve_importance() {
        // Each x2 ICE curve has slope +-5, so every per-curve importance is
        // 5 * std(grid) regardless of the complement draw.
        let (ev, space) = builtin_goldstein3();
        let grid = feature_grid(&space, 1, 50, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 1, &grid, 500, 7).unwrap();
        let expected = 5.0 * pairwise_std(&grid.values);
        for v in ice_importances(&ens).unwrap() {
            assert_abs_diff_eq!(v, expected, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(expected, 2.9155, epsilon = 2e-4);
    }

    #[test]
    fn goldstein_x2_pdp_nearly_flat() {
        let (ev, space) = builtin_goldstein3();
        let grid = feature_grid(&space, 1, 50, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 1, &grid, 10_000, 7).unwrap();
        let pdp = ens.pdp();
        let range = pdp.iter().cloned().fold(f64::MIN, f64::max)
            - pdp.iter().cloned().fold(f64::MAX, f64::min);
        assert!(range < 0.2, "x2 PDP should be nearly flat, range = {range}");
        assert!(i_pdp(&ens).unwrap() < 0.05);
    }

    #[test]
    fn friedman_x4_slope_matches_analytic() {
        // pdp(x4) = 10 x4 + const; least-squares slope within 1 percent.
        let (ev, space) = builtin_friedman5();
        let grid = feature_grid(&space, 3, 50, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 3, &grid, 2_000, 5).unwrap();
        let pdp = ens.pdp().to_vec();
        let g = &grid.values;
        let gm = mean(g);
        let pm = mean(&pdp);
        let num: f64 = g.iter().zip(&pdp).map(|(x, y)| (x - gm) * (y - pm)).sum();
        let den: f64 = g.iter().map(|x| (x - gm) * (x - gm)).sum();
        let slope = num / den;
        assert!((slope - 10.0).abs() < 0.1, "slope = {slope}");
    }

    #[test]
    fn goldstein_x3_mu_sigma() {
        // Per-curve std for x3 is 5|x2| (step of height 10 x2, split across
        // the closed-indicator halves): mu ~ 2.5, sigma ~ 5/sqrt(12).
        let (ev, space) = builtin_goldstein3();
        let grid = feature_grid(&space, 2, 50, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 2, &grid, 10_000, 7).unwrap();
        let imp = ice_importances(&ens).unwrap();
        let (mu, sigma) = mu_sigma_ice(&imp).unwrap();
        assert!((mu - 2.5).abs() < 0.1, "mu = {mu}");
        assert!((sigma - 5.0 / 12.0f64.sqrt()).abs() < 0.08, "sigma = {sigma}");
    }

    #[test]
    fn scale_and_shift_metric_relations() {
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 15, GridScheme::Quantile).unwrap();
        let sample = draw_iid(&space, 400, 21, streams::ICE_COMPLEMENT).unwrap();
        let base = FnEvaluator::new(2, |r: ArrayView1<f64>| (3.0 * r[0]).sin() * (1.0 + r[1]));
        let scaled =
            FnEvaluator::new(2, |r: ArrayView1<f64>| 4.0 * ((3.0 * r[0]).sin() * (1.0 + r[1])));
        let shifted = FnEvaluator::new(2, |r: ArrayView1<f64>| {
            (3.0 * r[0]).sin() * (1.0 + r[1]) + 3.7
        });
        let e0 = compute_ice_with_sample(&base, &space, 0, &grid, &sample).unwrap();
        let es = compute_ice_with_sample(&scaled, &space, 0, &grid, &sample).unwrap();
        let eh = compute_ice_with_sample(&shifted, &space, 0, &grid, &sample).unwrap();
        // Power-of-two scaling commutes with every floating operation.
        assert_eq!(i_pdp(&es).unwrap(), 4.0 * i_pdp(&e0).unwrap());
        let (mu0, sg0) = mu_sigma_ice(&ice_importances(&e0).unwrap()).unwrap();
        let (mus, sgs) = mu_sigma_ice(&ice_importances(&es).unwrap()).unwrap();
        assert_eq!(mus, 4.0 * mu0);
        assert_eq!(sgs, 4.0 * sg0);
        // Correlations are scale-free.
        let c0 = ice_correlations(&e0).unwrap();
        let cs = ice_correlations(&es).unwrap();
        assert_eq!(c0.rho, cs.rho);
        // A generic shift cancels to floating accuracy.
        assert_abs_diff_eq!(i_pdp(&eh).unwrap(), i_pdp(&e0).unwrap(), epsilon = 1e-9);
        let (muh, sgh) = mu_sigma_ice(&ice_importances(&eh).unwrap()).unwrap();
        assert_abs_diff_eq!(muh, mu0, epsilon = 1e-9);
        assert_abs_diff_eq!(sgh, sg0, epsilon = 1e-9);
    }

    #[test]
    fn two_way_additive_is_zero() {
        let ev = FnEvaluator::new(3, |r: ArrayView1<f64>| (2.0 * r[0]).exp() + 3.0 * r[1] - r[2]);
        let space = unit_space(3);
        let gi = feature_grid(&space, 0, 12, GridScheme::Equispaced).unwrap();
        let gj = feature_grid(&space, 1, 12, GridScheme::Equispaced).unwrap();
        let joint =
            crate::pdp::compute_joint_pdp(&ev, &space, 0, 1, &gi, &gj, 300, 13).unwrap();
        assert!(two_way_ipdp(&joint).unwrap() < 1e-10);
    }

    #[test]
    fn sobol_additive_two_variable() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| r[0] + r[1]);
        let space = unit_space(2);
        let s = sobol_mc(&ev, &space, 100_000, 9).unwrap();
        for j in 0..2 {
            assert!((s.first[j] - 0.5).abs() < 0.01, "S_F[{j}] = {}", s.first[j]);
            assert!((s.total[j] - 0.5).abs() < 0.01, "S_T[{j}] = {}", s.total[j]);
        }
        let s2 = sobol_second_mc(&ev, &space, 100_000, 9).unwrap();
        assert!(s2[[0, 1]].abs() < 0.01);
    }

    #[test]
    fn sobol_degenerate_variance_errors() {
        let ev = FnEvaluator::new(2, |_| 1.0);
        let space = unit_space(2);
        assert!(matches!(
            sobol_mc(&ev, &space, 200, 1),
            Err(CoreError::DegenerateVariance(_))
        ));
    }

    #[test]
    fn boxplot_basics() {
        let b = boxplot_stats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(b.q2, 3.0);
        assert!(b.outliers.is_empty());

        let b = boxplot_stats(&[2.0, 2.0, 2.0, 2.0]).unwrap();
        assert_eq!(b.q1, b.q3);
        assert_eq!(b.lower_whisker, b.upper_whisker);
        assert!(b.outliers.is_empty());

        let b = boxplot_stats(&[0.0, 0.0, 0.0, 0.0, 100.0]).unwrap();
        assert_eq!(b.outliers, vec![100.0]);
        assert!(boxplot_stats(&[1.0, 2.0, 3.0]).is_err());
    }
}
