//! Sobol' decomposition of a fitted expansion from its coefficients.

use super::PceModel;
use crate::error::{CoreError, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Variance shares read off the orthonormal expansion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PceSobol {
    /// First-order indices: terms supported on feature j alone.
    pub first: Vec<f64>,
    /// Total indices: every term touching feature j.
    pub total: Vec<f64>,
    /// Second-order indices: terms supported on exactly the pair {i, j}.
    pub second: Vec<Vec<f64>>,
}

/// Coefficient-based Sobol' indices: with an orthonormal basis the model
/// variance is `D = sum_{gamma != 0} beta_gamma^2` and each index is the
/// share of squared coefficients with matching support.
pub fn pce_sobol(model: &PceModel) -> Result<PceSobol> {
    let m = model.space.dim();
    let mut d_total = 0.0;
    let mut first = vec![0.0; m];
    let mut total = vec![0.0; m];
    let mut second = Array2::<f64>::zeros((m, m));
    for (idx, beta) in model.basis.indices.iter().zip(&model.beta) {
        if *beta == 0.0 || idx.is_zero() {
            continue;
        }
        let b2 = beta * beta;
        d_total += b2;
        let support = idx.support();
        for &j in &support {
            total[j] += b2;
        }
        if support.len() == 1 {
            first[support[0]] += b2;
        } else if support.len() == 2 {
            second[[support[0], support[1]]] += b2;
            second[[support[1], support[0]]] += b2;
        }
    }
    if d_total == 0.0 {
        return Err(CoreError::DegenerateVariance(
            "constant expansion has no variance to decompose".into(),
        ));
    }
    for j in 0..m {
        first[j] /= d_total;
        total[j] /= d_total;
    }
    second.mapv_inplace(|v| v / d_total);
    Ok(PceSobol {
        first,
        total,
        second: second.outer_iter().map(|r| r.to_vec()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::basis::{BasisSet, MultiIndex, UnivariateFamily};
    use crate::pce::{FitDiagnostics, PceModel};
    use crate::space::{InputSpace, Marginal};
    use approx::assert_abs_diff_eq;

    fn toy_model(beta: Vec<f64>) -> PceModel {
        let space = InputSpace::new(vec![
            Marginal::uniform("a", -1.0, 1.0).unwrap(),
            Marginal::uniform("b", -1.0, 1.0).unwrap(),
        ])
        .unwrap();
        let indices = vec![
            MultiIndex(vec![0, 0]),
            MultiIndex(vec![1, 0]),
            MultiIndex(vec![0, 1]),
            MultiIndex(vec![2, 0]),
            MultiIndex(vec![1, 1]),
            MultiIndex(vec![0, 2]),
        ];
        let families = vec![
            UnivariateFamily::Legendre { lo: -1.0, hi: 1.0 },
            UnivariateFamily::Legendre { lo: -1.0, hi: 1.0 },
        ];
        let basis = BasisSet { indices, families, max_degree: 2 };
        let diagnostics = FitDiagnostics {
            order: 2,
            q: 1.0,
            r2_train: 1.0,
            loo_rel: 0.0,
            active_terms: beta.iter().filter(|b| **b != 0.0).count(),
            heldout_r2: None,
        };
        PceModel::new(basis, beta, space, 0.0, 1.0, diagnostics).unwrap()
    }

    #[test]
    fn single_term_model() {
        let model = toy_model(vec![0.0, 3.0, 0.0, 0.0, 0.0, 0.0]);
        let s = pce_sobol(&model).unwrap();
        assert_eq!(s.first, vec![1.0, 0.0]);
        assert_eq!(s.total, vec![1.0, 0.0]);
    }

    #[test]
    fn additive_model_first_equals_total() {
        let model = toy_model(vec![1.0, 2.0, -1.0, 0.5, 0.0, 0.25]);
        let s = pce_sobol(&model).unwrap();
        for j in 0..2 {
            assert_abs_diff_eq!(s.first[j], s.total[j], epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.first.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interaction_term_shares() {
        let model = toy_model(vec![0.0, 1.0, 1.0, 0.0, 2.0_f64.sqrt(), 0.0]);
        let s = pce_sobol(&model).unwrap();
        // D = 1 + 1 + 2 = 4.
        assert_abs_diff_eq!(s.first[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(s.total[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(s.second[0][1], 0.5, epsilon = 1e-12);
        // 0 <= S_F <= S_T <= 1 and the first-order shares sum below 1.
        for j in 0..2 {
            assert!(s.first[j] >= 0.0 && s.first[j] <= s.total[j] && s.total[j] <= 1.0);
        }
        assert!(s.first.iter().sum::<f64>() <= 1.0 + 1e-12);
    }

    #[test]
    fn constant_model_errors() {
        let model = toy_model(vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            pce_sobol(&model),
            Err(CoreError::DegenerateVariance(_))
        ));
    }
}
