//! Exact interventional Shapley values and pairwise interaction indices by
//! full coalition enumeration.
//!
//! The value of a coalition `T` at a point `x` is the mean model output with
//! the features in `T` fixed to `x` and the rest drawn from a shared
//! background sample (the interventional convention; under independent
//! inputs this coincides with the conditional one). Sharing one background
//! across all coalitions of a record makes the efficiency identity exact up
//! to float summation rather than stochastic.

use crate::error::{CoreError, Result};
use crate::evaluator::Evaluator;
use crate::sampling::{draw_iid, streams};
use crate::space::InputSpace;
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Enumeration bound for per-feature attributions.
pub const MAX_SHAP_FEATURES: usize = 20;
/// Enumeration bound for pairwise interaction indices.
pub const MAX_INTERACTION_FEATURES: usize = 16;

/// Local attribution record at one evaluation point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapRecord {
    pub point: Vec<f64>,
    pub phi: Vec<f64>,
    /// Baseline expectation: mean model output over the background.
    pub phi0: f64,
    /// Model output at the point.
    pub reconstruction: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Coalition values `v[mask]` for all subsets at one point: mean model
/// output over the background rows with masked features pinned to `x`.
fn coalition_values(
    ev: &dyn Evaluator,
    x: &[f64],
    background: &ArrayView2<'_, f64>,
) -> Result<Vec<f64>> {
    let m = x.len();
    let n_bg = background.nrows();
    let mut values = vec![0.0; 1 << m];
    let mut pts = Array2::zeros((n_bg, m));
    for (mask, slot) in values.iter_mut().enumerate() {
        pts.assign(background);
        for (j, xj) in x.iter().enumerate() {
            if mask >> j & 1 == 1 {
                pts.column_mut(j).fill(*xj);
            }
        }
        let out = ev.eval_unchecked(pts.view());
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::EvaluatorFailure { instance: i, grid: mask });
        }
        *slot = out.sum() / n_bg as f64;
    }
    Ok(values)
}

fn phi_from_values(values: &[f64], m: usize) -> Vec<f64> {
    // Shapley kernel: w(|T|) = |T|! (m - |T| - 1)! / m! = 1 / (m C(m-1, |T|)).
    let weights: Vec<f64> =
        (0..m).map(|t| 1.0 / (m as f64 * binomial(m - 1, t))).collect();
    let mut phi = vec![0.0; m];
    for (mask, &v_t) in values.iter().enumerate() {
        let t = mask.count_ones() as usize;
        for (j, p) in phi.iter_mut().enumerate() {
            if mask >> j & 1 == 0 {
                *p += weights[t] * (values[mask | (1 << j)] - v_t);
            }
        }
    }
    phi
}

fn pair_from_values(values: &[f64], m: usize, i: usize, j: usize) -> f64 {
    // Pairwise interaction index: second differences over coalitions that
    // exclude both features, weighted by w2(|T|) = 1 / ((m-1) C(m-2, |T|)).
    let rest: Vec<usize> = (0..m).filter(|k| *k != i && *k != j).collect();
    let bi = 1usize << i;
    let bj = 1usize << j;
    let mut acc = 0.0;
    for sub in 0..1usize << rest.len() {
        let mut mask = 0usize;
        let mut t = 0usize;
        for (b, k) in rest.iter().enumerate() {
            if sub >> b & 1 == 1 {
                mask |= 1 << k;
                t += 1;
            }
        }
        let w = 1.0 / ((m - 1) as f64 * binomial(m - 2, t));
        acc += w
            * (values[mask | bi | bj] - values[mask | bi] - values[mask | bj] + values[mask]);
    }
    acc
}

fn validate_point(space: &InputSpace, x: &[f64]) -> Result<()> {
    if x.len() != space.dim() {
        return Err(CoreError::DimensionMismatch { expected: space.dim(), got: x.len() });
    }
    if let Some(col) = x.iter().position(|v| !v.is_finite()) {
        return Err(CoreError::NonFiniteInput { row: 0, col });
    }
    Ok(())
}

/// Exact Shapley attributions at `x` with a background of size `n_bg` drawn
/// from [`streams::SHAP_BACKGROUND`]. Enumeration over all `2^m` coalitions;
/// refuses `m > 20`.
pub fn exact_shap(
    ev: &dyn Evaluator,
    space: &InputSpace,
    x: &[f64],
    n_bg: usize,
    seed: u64,
) -> Result<ShapRecord> {
    let m = space.dim();
    if m > MAX_SHAP_FEATURES {
        return Err(CoreError::EnumerationBound { limit: MAX_SHAP_FEATURES, got: m });
    }
    if n_bg == 0 {
        return Err(CoreError::EmptyDesign);
    }
    validate_point(space, x)?;
    let background = draw_iid(space, n_bg, seed, streams::SHAP_BACKGROUND)?;
    exact_shap_with_background(ev, x, &background.values.view())
}

/// Exact Shapley attributions against an explicit background matrix.
pub fn exact_shap_with_background(
    ev: &dyn Evaluator,
    x: &[f64],
    background: &ArrayView2<'_, f64>,
) -> Result<ShapRecord> {
    let m = x.len();
    if m > MAX_SHAP_FEATURES {
        return Err(CoreError::EnumerationBound { limit: MAX_SHAP_FEATURES, got: m });
    }
    let values = coalition_values(ev, x, background)?;
    let phi = phi_from_values(&values, m);
    let full = values[(1 << m) - 1];
    Ok(ShapRecord { point: x.to_vec(), phi, phi0: values[0], reconstruction: full })
}

/// Pairwise Shapley interaction index at `x` for features `(i, j)`.
pub fn shap_interaction_pair(
    ev: &dyn Evaluator,
    space: &InputSpace,
    x: &[f64],
    i: usize,
    j: usize,
    n_bg: usize,
    seed: u64,
) -> Result<f64> {
    let m = space.dim();
    if m > MAX_INTERACTION_FEATURES {
        return Err(CoreError::EnumerationBound { limit: MAX_INTERACTION_FEATURES, got: m });
    }
    if i == j || i >= m || j >= m {
        return Err(CoreError::InvalidParameter(format!(
            "interaction pair requires distinct in-range features, got ({i}, {j})"
        )));
    }
    if n_bg == 0 {
        return Err(CoreError::EmptyDesign);
    }
    validate_point(space, x)?;
    let background = draw_iid(space, n_bg, seed, streams::SHAP_BACKGROUND)?;
    let values = coalition_values(ev, x, &background.values.view())?;
    Ok(pair_from_values(&values, m, i, j))
}

/// Baseline convention for averaged summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapBaseline {
    /// Marginal-expectation baseline: background drawn from the input space.
    Background,
    /// Single-row background pinned at the anchor point.
    Anchor,
}

fn background_matrix(
    space: &InputSpace,
    baseline: ShapBaseline,
    n_bg: usize,
    seed: u64,
) -> Result<Array2<f64>> {
    match baseline {
        ShapBaseline::Background => {
            Ok(draw_iid(space, n_bg, seed, streams::SHAP_BACKGROUND)?.values)
        }
        ShapBaseline::Anchor => {
            let anchor = space.anchor();
            Ok(Array2::from_shape_vec((1, anchor.len()), anchor.to_vec())
                .expect("anchor length matches"))
        }
    }
}

/// Per-point Shapley records over `n_pts` i.i.d. evaluation points from
/// [`streams::SHAP_POINTS`], sharing one background across all points.
pub fn shap_records(
    ev: &dyn Evaluator,
    space: &InputSpace,
    n_pts: usize,
    n_bg: usize,
    seed: u64,
    baseline: ShapBaseline,
) -> Result<Vec<ShapRecord>> {
    let m = space.dim();
    if m > MAX_SHAP_FEATURES {
        return Err(CoreError::EnumerationBound { limit: MAX_SHAP_FEATURES, got: m });
    }
    if n_pts == 0 || n_bg == 0 {
        return Err(CoreError::EmptyDesign);
    }
    let pts = draw_iid(space, n_pts, seed, streams::SHAP_POINTS)?;
    let background = background_matrix(space, baseline, n_bg, seed)?;
    let rows: Vec<Result<ShapRecord>> = (0..n_pts)
        .into_par_iter()
        .map(|i| {
            let x: Vec<f64> = pts.values.row(i).to_vec();
            exact_shap_with_background(ev, &x, &background.view())
        })
        .collect();
    rows.into_iter().collect()
}

/// Global summary: mean |phi_j| over i.i.d. evaluation points.
pub fn averaged_shap(
    ev: &dyn Evaluator,
    space: &InputSpace,
    n_pts: usize,
    n_bg: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let records = shap_records(ev, space, n_pts, n_bg, seed, ShapBaseline::Background)?;
    Ok(mean_abs_phi(&records, space.dim()))
}

/// Mean |phi_j| with the anchor-point baseline.
pub fn averaged_shap_anchored(
    ev: &dyn Evaluator,
    space: &InputSpace,
    n_pts: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let records = shap_records(ev, space, n_pts, 1, seed, ShapBaseline::Anchor)?;
    Ok(mean_abs_phi(&records, space.dim()))
}

pub fn mean_abs_phi(records: &[ShapRecord], m: usize) -> Vec<f64> {
    let mut acc = vec![0.0; m];
    for r in records {
        for (a, p) in acc.iter_mut().zip(&r.phi) {
            *a += p.abs();
        }
    }
    for a in acc.iter_mut() {
        *a /= records.len() as f64;
    }
    acc
}

/// Symmetric matrix of mean |Phi_ij| over evaluation points (zero diagonal).
pub fn averaged_shap_interaction(
    ev: &dyn Evaluator,
    space: &InputSpace,
    n_pts: usize,
    n_bg: usize,
    seed: u64,
) -> Result<Array2<f64>> {
    let m = space.dim();
    if m > MAX_INTERACTION_FEATURES {
        return Err(CoreError::EnumerationBound { limit: MAX_INTERACTION_FEATURES, got: m });
    }
    if n_pts == 0 || n_bg == 0 {
        return Err(CoreError::EmptyDesign);
    }
    let pts = draw_iid(space, n_pts, seed, streams::SHAP_POINTS)?;
    let background = background_matrix(space, ShapBaseline::Background, n_bg, seed)?;
    let per_point: Vec<Result<Vec<f64>>> = (0..n_pts)
        .into_par_iter()
        .map(|p| {
            let x: Vec<f64> = pts.values.row(p).to_vec();
            let values = coalition_values(ev, &x, &background.view())?;
            let mut flat = Vec::with_capacity(m * (m - 1) / 2);
            for i in 0..m {
                for j in i + 1..m {
                    flat.push(pair_from_values(&values, m, i, j).abs());
                }
            }
            Ok(flat)
        })
        .collect();
    let mut acc = vec![0.0; m * (m - 1) / 2];
    for row in per_point {
        for (a, v) in acc.iter_mut().zip(row?) {
            *a += v;
        }
    }
    let mut out = Array2::zeros((m, m));
    let mut idx = 0;
    for i in 0..m {
        for j in i + 1..m {
            let v = acc[idx] / n_pts as f64;
            out[[i, j]] = v;
            out[[j, i]] = v;
            idx += 1;
        }
    }
    Ok(out)
}

/// Writes the SHAP dependence CSV for feature `j`: the feature value, its
/// attribution, and a coloring feature's value per evaluation point.
pub fn write_dependence_csv<W: std::io::Write>(
    records: &[ShapRecord],
    j: usize,
    color: usize,
    mut w: W,
) -> Result<()> {
    writeln!(w, "x_{},phi_{},color_x_{}", j + 1, j + 1, color + 1)?;
    for r in records {
        writeln!(w, "{},{},{}", r.point[j], r.phi[j], r.point[color])?;
    }
    Ok(())
}
