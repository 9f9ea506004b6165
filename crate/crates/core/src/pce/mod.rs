//! Sparse polynomial chaos expansion surrogates.

pub mod basis;
pub mod lars;
mod serialize;
mod sobol;

pub use basis::{eval_basis, hyperbolic_index_set, BasisSet, MultiIndex, UnivariateFamily};
pub use lars::{fit_lars, LarsFit};
pub use serialize::{load_model, save_model};
pub use sobol::{pce_sobol, PceSobol};

use crate::error::{CoreError, Result};
use crate::evaluator::Evaluator;
use crate::space::InputSpace;
use basis::UnivariateTable;
use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

/// Fit quality summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Selected polynomial order.
    pub order: u32,
    /// Hyperbolic truncation exponent used.
    pub q: f64,
    pub r2_train: f64,
    /// Relative leave-one-out error of the selected model.
    pub loo_rel: f64,
    /// Nonzero expansion terms.
    pub active_terms: usize,
    /// Held-out R^2 when a validation split was used.
    pub heldout_r2: Option<f64>,
}

/// A fitted sparse PCE surrogate.
///
/// Predictions are `out_mean + out_scale * sum_gamma beta_gamma Psi_gamma(x)`;
/// the coefficients refer to the standardized response.
#[derive(Debug, Clone)]
pub struct PceModel {
    pub basis: BasisSet,
    /// Dense coefficient vector over `basis.indices`, mostly zero.
    pub beta: Vec<f64>,
    pub space: InputSpace,
    pub out_mean: f64,
    pub out_scale: f64,
    pub diagnostics: FitDiagnostics,
    /// Cached nonzero positions for fast prediction.
    active: Vec<usize>,
}

impl PceModel {
    pub fn new(
        basis: BasisSet,
        beta: Vec<f64>,
        space: InputSpace,
        out_mean: f64,
        out_scale: f64,
        diagnostics: FitDiagnostics,
    ) -> Result<Self> {
        if beta.len() != basis.cardinality() {
            return Err(CoreError::DimensionMismatch {
                expected: basis.cardinality(),
                got: beta.len(),
            });
        }
        let active = beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { basis, beta, space, out_mean, out_scale, diagnostics, active })
    }

    /// Predicted values at `pts` (validated).
    pub fn predict(&self, pts: &ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if pts.ncols() != self.space.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.space.dim(),
                got: pts.ncols(),
            });
        }
        Ok(self.predict_unchecked(pts))
    }

    fn predict_unchecked(&self, pts: &ArrayView2<'_, f64>) -> Array1<f64> {
        let table = UnivariateTable::build(&self.basis.families, pts, self.basis.max_degree);
        let active_idx: Vec<MultiIndex> =
            self.active.iter().map(|i| self.basis.indices[*i].clone()).collect();
        let design = table.design(&active_idx);
        let coef: Vec<f64> = self.active.iter().map(|i| self.beta[*i]).collect();
        let mut out = Array1::zeros(pts.nrows());
        for (c, b) in coef.iter().enumerate() {
            let col = design.column(c);
            for (o, v) in out.iter_mut().zip(col.iter()) {
                *o += b * v;
            }
        }
        out.mapv_inplace(|v| self.out_mean + self.out_scale * v);
        out
    }

    /// Count of nonzero coefficients.
    pub fn nonzeros(&self) -> usize {
        self.active.len()
    }

    /// Model variance implied by the coefficients (Parseval):
    /// `out_scale^2 * sum_{gamma != 0} beta_gamma^2`.
    pub fn coefficient_variance(&self) -> f64 {
        let s: f64 = self
            .active
            .iter()
            .filter(|i| !self.basis.indices[**i].is_zero())
            .map(|i| self.beta[*i] * self.beta[*i])
            .sum();
        self.out_scale * self.out_scale * s
    }
}

impl Evaluator for PceModel {
    fn arity(&self) -> usize {
        self.space.dim()
    }

    fn eval_unchecked(&self, pts: ArrayView2<'_, f64>) -> Array1<f64> {
        self.predict_unchecked(&pts)
    }
}

/// Fits sparse PCE models for `p = 1..=p_max` and returns the one with the
/// smallest relative leave-one-out error (ties break toward smaller `p`).
pub fn select_order(
    x: &ArrayView2<'_, f64>,
    y: &ArrayView1<'_, f64>,
    space: &InputSpace,
    p_max: u32,
    q: f64,
) -> Result<PceModel> {
    let (n, m) = (x.nrows(), x.ncols());
    if m != space.dim() {
        return Err(CoreError::DimensionMismatch { expected: space.dim(), got: m });
    }
    if p_max < 1 {
        return Err(CoreError::InvalidParameter("p_max must be >= 1".into()));
    }
    if n < m + 1 {
        return Err(CoreError::InvalidParameter(format!(
            "select_order requires n >= m + 1 = {}, got {n}",
            m + 1
        )));
    }
    if y.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: y.len() });
    }
    for (i, row) in x.outer_iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFiniteInput { row: i, col: j });
            }
        }
    }

    let y_vec: Vec<f64> = y.to_vec();
    let out_mean = crate::stats::mean(&y_vec);
    let raw_scale = crate::stats::pairwise_std(&y_vec);
    let degenerate = raw_scale == 0.0;
    let out_scale = if degenerate { 1.0 } else { raw_scale };
    let ys: Vec<f64> = y_vec.iter().map(|v| (v - out_mean) / out_scale).collect();
    let ys = Array1::from_vec(ys);

    let families: Vec<UnivariateFamily> = space
        .marginals()
        .iter()
        .map(|mg| UnivariateFamily::from_marginal(mg, p_max as usize))
        .collect::<Result<_>>()?;

    if degenerate {
        let basis = BasisSet {
            indices: hyperbolic_index_set(m, 1, q)?,
            families,
            max_degree: 1,
        };
        let beta = vec![0.0; basis.cardinality()];
        let diagnostics = FitDiagnostics {
            order: 1,
            q,
            r2_train: 1.0,
            loo_rel: 0.0,
            active_terms: 0,
            heldout_r2: None,
        };
        return PceModel::new(basis, beta, space.clone(), out_mean, out_scale, diagnostics);
    }

    let table = UnivariateTable::build(&families, x, p_max as usize);

    let mut best: Option<(f64, u32, Vec<MultiIndex>, LarsFit)> = None;
    let mut failures: Vec<(usize, String)> = Vec::new();
    for p in 1..=p_max {
        let indices = hyperbolic_index_set(m, p, q)?;
        let design = table.design(&indices);
        match fit_lars(&design.view(), &ys.view()) {
            Ok(fit) => {
                let better = match &best {
                    None => true,
                    Some((best_loo, _, _, _)) => {
                        fit.loo_rel.max(1e-14) < best_loo.max(1e-14) * (1.0 - 1e-9)
                    }
                };
                if better {
                    best = Some((fit.loo_rel, p, indices, fit));
                }
            }
            Err(e) => failures.push((p as usize, e.to_string())),
        }
    }

    let Some((loo_rel, p, indices, fit)) = best else {
        return Err(CoreError::FitFailure {
            summary: "no polynomial order produced a usable fit".into(),
            per_order: failures,
        });
    };

    let beta = fit.dense_beta(indices.len());
    let basis = BasisSet { indices, families, max_degree: p as usize };
    let diagnostics = FitDiagnostics {
        order: p,
        q,
        r2_train: fit.r2_train,
        loo_rel,
        active_terms: fit.active.len(),
        heldout_r2: None,
    };
    PceModel::new(basis, beta, space.clone(), out_mean, out_scale, diagnostics)
}

/// Coefficient of determination on a held-out set.
pub fn r_squared(predicted: &[f64], observed: &[f64]) -> f64 {
    let mean = crate::stats::mean(observed);
    let ss_tot: f64 = observed.iter().map(|v| (v - mean) * (v - mean)).sum();
    let ss_res: f64 =
        predicted.iter().zip(observed).map(|(p, o)| (o - p) * (o - p)).sum();
    1.0 - ss_res / ss_tot
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{draw_iid, streams};
    use crate::space::Marginal;
    use approx::assert_abs_diff_eq;

    fn unit_space(m: usize) -> InputSpace {
        InputSpace::new(
            (0..m)
                .map(|i| Marginal::uniform(format!("x{}", i + 1), 0.0, 1.0).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn quadratic_target_selects_order_two() {
        let space = unit_space(2);
        let x = draw_iid(&space, 400, 3, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::from_iter(
            x.outer_iter().map(|r| 1.0 + 2.0 * r[0] - 3.0 * r[1] + 4.0 * r[0] * r[1]),
        );
        let model = select_order(&x.view(), &y.view(), &space, 4, 1.0).unwrap();
        assert_eq!(model.diagnostics.order, 2);
        assert!(model.diagnostics.loo_rel < 1e-12);
        let pred = model.predict(&x.view()).unwrap();
        let max_err = pred
            .iter()
            .zip(y.iter())
            .map(|(p, o)| (p - o).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-6, "max_err = {max_err}");
    }

    #[test]
    fn linear_target_selects_order_one() {
        let space = unit_space(3);
        let x = draw_iid(&space, 200, 5, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::from_iter(x.outer_iter().map(|r| 5.0 - r[0] + 0.5 * r[2]));
        let model = select_order(&x.view(), &y.view(), &space, 3, 1.0).unwrap();
        assert_eq!(model.diagnostics.order, 1);
    }

    #[test]
    fn constant_target_gives_constant_model() {
        let space = unit_space(2);
        let x = draw_iid(&space, 50, 7, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::from_elem(50, -2.25);
        let model = select_order(&x.view(), &y.view(), &space, 3, 1.0).unwrap();
        assert_eq!(model.nonzeros(), 0);
        let pred = model.predict(&x.view()).unwrap();
        assert!(pred.iter().all(|v| (v + 2.25).abs() < 1e-12));
    }

    #[test]
    fn sparsity_bounded_by_sample_size() {
        let space = unit_space(4);
        let n = 60;
        let x = draw_iid(&space, n, 11, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::from_iter(
            x.outer_iter()
                .map(|r| (6.0 * r[0]).sin() + r[1] * r[2] - (2.0 * r[3]).cos()),
        );
        let model = select_order(&x.view(), &y.view(), &space, 5, 1.0).unwrap();
        assert!(model.nonzeros() <= n);
    }

    #[test]
    fn parseval_variance_matches_sample_variance() {
        let space = unit_space(2);
        let x = draw_iid(&space, 500, 13, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::from_iter(
            x.outer_iter().map(|r| 2.0 * r[0] + r[1] * r[1] + 0.5 * r[0] * r[1]),
        );
        let model = select_order(&x.view(), &y.view(), &space, 3, 1.0).unwrap();
        let big = draw_iid(&space, 200_000, 17, streams::PCE_VALIDATION).unwrap().values;
        let pred = model.predict(&big.view()).unwrap().to_vec();
        let sample_var = {
            let m = crate::stats::mean(&pred);
            pred.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (pred.len() - 1) as f64
        };
        let coef_var = model.coefficient_variance();
        // Monte Carlo 3-sigma window on the variance estimate.
        let tol = 3.0 * coef_var * (2.0 / (pred.len() as f64 - 1.0)).sqrt() + 1e-12;
        assert!(
            (sample_var - coef_var).abs() < tol.max(0.01 * coef_var),
            "sample {sample_var} vs coefficients {coef_var}"
        );
    }

    #[test]
    fn predict_equals_design_times_beta() {
        let space = unit_space(2);
        let x = draw_iid(&space, 120, 19, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::from_iter(x.outer_iter().map(|r| r[0] - 0.25 * r[1]));
        let model = select_order(&x.view(), &y.view(), &space, 2, 1.0).unwrap();
        let pts = draw_iid(&space, 40, 23, streams::PCE_VALIDATION).unwrap().values;
        let design = eval_basis(&model.basis, &pts.view()).unwrap();
        let direct = model.predict(&pts.view()).unwrap();
        for i in 0..pts.nrows() {
            let mut acc = 0.0;
            for (c, b) in model.beta.iter().enumerate() {
                acc += design[[i, c]] * b;
            }
            let manual = model.out_mean + model.out_scale * acc;
            assert_abs_diff_eq!(direct[i], manual, epsilon = 1e-10);
        }
    }

    #[test]
    fn too_few_rows_rejected() {
        let space = unit_space(4);
        let x = draw_iid(&space, 3, 1, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::zeros(3);
        assert!(select_order(&x.view(), &y.view(), &space, 2, 1.0).is_err());
    }
}
