//! Partial dependence and individual conditional expectation curves.

use crate::error::{CoreError, Result};
use crate::evaluator::Evaluator;
use crate::sampling::{self, streams, FeatureGrid, SampleMatrix};
use crate::space::InputSpace;
use ndarray::{Array1, Array2, ArrayView2};
use rayon::prelude::*;
use std::io::Write;

/// ICE curves for one feature plus the derived PDP.
///
/// Raw model outputs are kept verbatim; anchoring stores per-curve offsets
/// on the side. Scalar metrics are always computed from the raw curves
/// (standard deviation and Pearson correlation are invariant to per-curve
/// shifts), which keeps them bit-identical across anchored and un-anchored
/// ensembles. [`IceEnsemble::curves`] and [`IceEnsemble::pdp`] return the
/// anchored values once the anchored flag is set.
#[derive(Debug, Clone)]
pub struct IceEnsemble {
    pub feature: usize,
    pub grid: FeatureGrid,
    /// Complement values per instance, n_mc x (m - 1).
    pub instances: Array2<f64>,
    curves_raw: Array2<f64>,
    pdp_raw: Array1<f64>,
    /// Model value of each instance at the anchor point, once anchored.
    anchor_values: Option<Array1<f64>>,
    pub anchored: bool,
}

impl IceEnsemble {
    pub fn n_instances(&self) -> usize {
        self.curves_raw.nrows()
    }

    pub fn k(&self) -> usize {
        self.curves_raw.ncols()
    }

    /// Raw (un-anchored) curve matrix; the domain for all scalar metrics.
    pub fn raw_curves(&self) -> ArrayView2<'_, f64> {
        self.curves_raw.view()
    }

    /// User-facing curves: anchored when the flag is set.
    pub fn curves(&self) -> Array2<f64> {
        match (&self.anchor_values, self.anchored) {
            (Some(a), true) => {
                let mut c = self.curves_raw.clone();
                for (mut row, off) in c.outer_iter_mut().zip(a.iter()) {
                    row.mapv_inplace(|v| v - off);
                }
                c
            }
            _ => self.curves_raw.clone(),
        }
    }

    /// PDP as the column mean of [`IceEnsemble::curves`], bitwise.
    pub fn pdp(&self) -> Array1<f64> {
        match (&self.anchor_values, self.anchored) {
            (Some(_), true) => column_means(&self.curves()),
            _ => self.pdp_raw.clone(),
        }
    }
}

fn column_means(curves: &Array2<f64>) -> Array1<f64> {
    let n = curves.nrows() as f64;
    let mut acc = Array1::<f64>::zeros(curves.ncols());
    for row in curves.outer_iter() {
        acc += &row;
    }
    acc / n
}

/// Inserts `x_j` into a complement row, restoring full input order.
fn assemble_row(out: &mut [f64], complement: &[f64], j: usize, xj: f64) {
    out[..j].copy_from_slice(&complement[..j]);
    out[j] = xj;
    out[j + 1..].copy_from_slice(&complement[j..]);
}

fn complement_of(sample: &ArrayView2<'_, f64>, j: usize) -> Array2<f64> {
    let (n, m) = (sample.nrows(), sample.ncols());
    let mut out = Array2::zeros((n, m - 1));
    for (i, row) in sample.outer_iter().enumerate() {
        let mut c = 0;
        for (col, v) in row.iter().enumerate() {
            if col != j {
                out[[i, c]] = *v;
                c += 1;
            }
        }
    }
    out
}

/// Evaluates the ICE curve block for a chunk of instances. Returns the
/// flattened chunk_len x K outputs.
fn eval_chunk(
    ev: &dyn Evaluator,
    instances: &Array2<f64>,
    grid: &[f64],
    j: usize,
    m: usize,
) -> Array2<f64> {
    let k = grid.len();
    let n = instances.nrows();
    let mut pts = Array2::zeros((n * k, m));
    for (i, inst) in instances.outer_iter().enumerate() {
        let inst = inst.as_slice().expect("standard layout");
        for (g, &xj) in grid.iter().enumerate() {
            assemble_row(
                pts.row_mut(i * k + g).as_slice_mut().expect("standard layout"),
                inst,
                j,
                xj,
            );
        }
    }
    let flat = ev.eval_unchecked(pts.view());
    Array2::from_shape_vec((n, k), flat.to_vec()).expect("shape matches")
}

/// Computes the ICE ensemble for feature `j` from a shared complement sample.
///
/// The complement values are the non-`j` columns of `sample`, so calling
/// this for every feature with the same sample matrix shares the Monte
/// Carlo noise across features. Total model evaluations: `n_mc * K`.
pub fn compute_ice_with_sample(
    ev: &dyn Evaluator,
    space: &InputSpace,
    j: usize,
    grid: &FeatureGrid,
    sample: &SampleMatrix,
) -> Result<IceEnsemble> {
    let m = space.dim();
    if ev.arity() != m {
        return Err(CoreError::DimensionMismatch { expected: ev.arity(), got: m });
    }
    if j >= m {
        return Err(CoreError::InvalidParameter(format!(
            "feature index {j} out of range for dimension {m}"
        )));
    }
    if grid.values.iter().any(|g| !space.marginal(j).contains(*g)) {
        return Err(CoreError::InvalidParameter(format!(
            "grid for feature {j} leaves the marginal support"
        )));
    }
    let n_mc = sample.n();
    if n_mc == 0 {
        return Err(CoreError::EmptyDesign);
    }
    let instances = complement_of(&sample.values.view(), j);

    let chunk = 512usize;
    let blocks: Vec<Array2<f64>> = (0..n_mc)
        .collect::<Vec<_>>()
        .par_chunks(chunk)
        .map(|idx| {
            let sub = instances.select(ndarray::Axis(0), idx);
            eval_chunk(ev, &sub, &grid.values, j, m)
        })
        .collect();

    let k = grid.len();
    let mut curves = Array2::zeros((n_mc, k));
    let mut row = 0;
    for b in blocks {
        for r in b.outer_iter() {
            curves.row_mut(row).assign(&r);
            row += 1;
        }
    }
    for (i, r) in curves.outer_iter().enumerate() {
        for (g, v) in r.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::EvaluatorFailure { instance: i, grid: g });
            }
        }
    }
    let pdp_raw = column_means(&curves);
    Ok(IceEnsemble {
        feature: j,
        grid: grid.clone(),
        instances,
        curves_raw: curves,
        pdp_raw,
        anchor_values: None,
        anchored: false,
    })
}

/// Draws a fresh complement sample on [`streams::ICE_COMPLEMENT`] and
/// computes the ensemble. Reports that need cross-feature noise sharing use
/// [`compute_ice_with_sample`] with one matrix for all features.
pub fn compute_ice(
    ev: &dyn Evaluator,
    space: &InputSpace,
    j: usize,
    grid: &FeatureGrid,
    n_mc: usize,
    seed: u64,
) -> Result<IceEnsemble> {
    if n_mc == 0 {
        return Err(CoreError::EmptyDesign);
    }
    let sample = sampling::draw_iid(space, n_mc, seed, streams::ICE_COMPLEMENT)?;
    compute_ice_with_sample(ev, space, j, grid, &sample)
}

/// Anchors every curve at `a_j`: the model value at the anchor is evaluated
/// exactly (not interpolated from the grid) and subtracted per curve; the
/// PDP is anchored by the mean of those values. Idempotent.
pub fn anchor_curves(ev: &dyn Evaluator, mut ens: IceEnsemble, a_j: f64) -> Result<IceEnsemble> {
    let lo = *ens.grid.values.first().expect("grid non-empty");
    let hi = *ens.grid.values.last().expect("grid non-empty");
    if !(a_j >= lo && a_j <= hi) {
        return Err(CoreError::InvalidParameter(format!(
            "anchor {a_j} outside the grid span [{lo}, {hi}]"
        )));
    }
    let m = ens.instances.ncols() + 1;
    let n = ens.n_instances();
    let mut pts = Array2::zeros((n, m));
    for (i, inst) in ens.instances.outer_iter().enumerate() {
        assemble_row(
            pts.row_mut(i).as_slice_mut().expect("standard layout"),
            inst.as_slice().expect("standard layout"),
            ens.feature,
            a_j,
        );
    }
    let values = ev.eval_unchecked(pts.view());
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(CoreError::EvaluatorFailure { instance: i, grid: 0 });
    }
    ens.anchor_values = Some(values);
    ens.anchored = true;
    Ok(ens)
}

/// Two-feature partial dependence surface.
#[derive(Debug, Clone)]
pub struct JointPdp {
    pub feature_i: usize,
    pub feature_j: usize,
    pub grid_i: FeatureGrid,
    pub grid_j: FeatureGrid,
    /// `surface[[a, b]]` = mean over the complement sample with
    /// `(x_i, x_j) = (grid_i[a], grid_j[b])`.
    pub surface: Array2<f64>,
}

/// Computes the joint PDP surface from a shared complement sample.
/// Evaluations: `n_mc * K_i * K_j`.
pub fn compute_joint_pdp_with_sample(
    ev: &dyn Evaluator,
    space: &InputSpace,
    i: usize,
    j: usize,
    grid_i: &FeatureGrid,
    grid_j: &FeatureGrid,
    sample: &SampleMatrix,
) -> Result<JointPdp> {
    let m = space.dim();
    if i == j {
        return Err(CoreError::InvalidParameter(
            "joint PDP requires two distinct features".into(),
        ));
    }
    if i >= m || j >= m {
        return Err(CoreError::InvalidParameter(format!(
            "feature pair ({i}, {j}) out of range for dimension {m}"
        )));
    }
    let (ki, kj) = (grid_i.len(), grid_j.len());
    let n = sample.n();
    let cells: Vec<(usize, usize)> =
        (0..ki).flat_map(|a| (0..kj).map(move |b| (a, b))).collect();
    let means: Vec<f64> = cells
        .par_iter()
        .map(|&(a, b)| {
            let mut pts = sample.values.clone();
            pts.column_mut(i).fill(grid_i.values[a]);
            pts.column_mut(j).fill(grid_j.values[b]);
            let out = ev.eval_unchecked(pts.view());
            out.sum() / n as f64
        })
        .collect();
    if let Some(flat) = means.iter().position(|v| !v.is_finite()) {
        return Err(CoreError::EvaluatorFailure { instance: flat / kj, grid: flat % kj });
    }
    let surface = Array2::from_shape_vec((ki, kj), means).expect("shape matches");
    Ok(JointPdp {
        feature_i: i,
        feature_j: j,
        grid_i: grid_i.clone(),
        grid_j: grid_j.clone(),
        surface,
    })
}

/// Joint PDP with a fresh complement sample on [`streams::ICE_COMPLEMENT`].
pub fn compute_joint_pdp(
    ev: &dyn Evaluator,
    space: &InputSpace,
    i: usize,
    j: usize,
    grid_i: &FeatureGrid,
    grid_j: &FeatureGrid,
    n_mc: usize,
    seed: u64,
) -> Result<JointPdp> {
    if n_mc == 0 {
        return Err(CoreError::EmptyDesign);
    }
    let sample = sampling::draw_iid(space, n_mc, seed, streams::ICE_COMPLEMENT)?;
    compute_joint_pdp_with_sample(ev, space, i, j, grid_i, grid_j, &sample)
}

/// Writes the wide curve CSV: first column the grid value, one column per
/// instance curve, last column the PDP. Anchored values when flagged.
pub fn write_curves_csv<W: Write>(ens: &IceEnsemble, mut w: W) -> Result<()> {
    let curves = ens.curves();
    let pdp = ens.pdp();
    write!(w, "grid")?;
    for i in 0..ens.n_instances() {
        write!(w, ",curve_{i}")?;
    }
    writeln!(w, ",pdp")?;
    for (k, g) in ens.grid.values.iter().enumerate() {
        write!(w, "{g}")?;
        for i in 0..ens.n_instances() {
            write!(w, ",{}", curves[[i, k]])?;
        }
        writeln!(w, ",{}", pdp[k])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::FnEvaluator;
    use crate::sampling::{draw_iid, feature_grid, GridScheme};
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
    fn additive_pdp_closed_form() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| r[0] + r[1]);
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 21, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 4000, 3).unwrap();
        let pdp = ens.pdp();
        // pdp(x1) ~ x1 + 0.5 within Monte Carlo error
        let mc_std = (1.0f64 / 12.0 / 4000.0).sqrt();
        for (k, g) in grid.values.iter().enumerate() {
            assert!((pdp[k] - (g + 0.5)).abs() < 3.0 * mc_std + 1e-9);
        }
    }

    #[test]
    fn pdp_is_mean_of_curves_bitwise() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| (3.0 * r[0]).sin() * r[1]);
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 9, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 100, 5).unwrap();
        let curves = ens.curves();
        let pdp = ens.pdp();
        for k in 0..grid.len() {
            let col: Vec<f64> = curves.column(k).to_vec();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            assert_eq!(pdp[k], mean);
        }
    }

    #[test]
    fn anchoring_zeroes_curves_at_anchor_and_is_idempotent() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| r[0] * r[0] + 2.0 * r[1]);
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 11, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 50, 1).unwrap();
        let a = space.anchor()[0];
        let once = anchor_curves(&ev, ens, a).unwrap();
        // Evaluating an anchored curve at the anchor gives exactly zero:
        // the offset is the model value there.
        let offs = once.anchor_values.as_ref().unwrap().clone();
        for (i, inst) in once.instances.outer_iter().enumerate() {
            let expected = a * a + 2.0 * inst[0];
            assert_abs_diff_eq!(offs[i], expected, epsilon = 1e-12);
        }
        let twice = anchor_curves(&ev, once.clone(), a).unwrap();
        assert_eq!(once.curves(), twice.curves());
        assert_eq!(once.pdp(), twice.pdp());
    }

    #[test]
    fn additive_anchored_curves_collapse_to_pdp() {
        // For f = g(x1) + h(xC) the anchored curves are all identical.
        let ev = FnEvaluator::new(3, |r: ArrayView1<f64>| (2.0 * r[0]).exp() + r[1] - 4.0 * r[2]);
        let space = unit_space(3);
        let grid = feature_grid(&space, 0, 15, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 64, 9).unwrap();
        let anch = anchor_curves(&ev, ens, space.anchor()[0]).unwrap();
        let curves = anch.curves();
        let pdp = anch.pdp();
        for row in curves.outer_iter() {
            for (k, v) in row.iter().enumerate() {
                assert!((v - pdp[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn independent_feature_gives_constant_curves() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| 7.0 * r[1]);
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 8, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 40, 2).unwrap();
        for row in ens.raw_curves().outer_iter() {
            let first = row[0];
            assert!(row.iter().all(|v| *v == first));
        }
        let anch = anchor_curves(&ev, ens, 0.5).unwrap();
        assert!(anch.curves().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn pdp_linearity_in_the_evaluator() {
        let g = FnEvaluator::new(2, |r: ArrayView1<f64>| (r[0] * 2.0).cos());
        let h = FnEvaluator::new(2, |r: ArrayView1<f64>| r[0] * r[1]);
        let f = FnEvaluator::new(2, |r: ArrayView1<f64>| {
            2.5 * (r[0] * 2.0).cos() - 1.5 * (r[0] * r[1])
        });
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 12, GridScheme::Quantile).unwrap();
        let sample = draw_iid(&space, 300, 17, streams::ICE_COMPLEMENT).unwrap();
        let pg = compute_ice_with_sample(&g, &space, 0, &grid, &sample).unwrap().pdp();
        let ph = compute_ice_with_sample(&h, &space, 0, &grid, &sample).unwrap().pdp();
        let pf = compute_ice_with_sample(&f, &space, 0, &grid, &sample).unwrap().pdp();
        for k in 0..grid.len() {
            assert_abs_diff_eq!(pf[k], 2.5 * pg[k] - 1.5 * ph[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn joint_pdp_product_function() {
        let ev = FnEvaluator::new(3, |r: ArrayView1<f64>| r[0] * r[1]);
        let space = unit_space(3);
        let gi = feature_grid(&space, 0, 6, GridScheme::Equispaced).unwrap();
        let gj = feature_grid(&space, 1, 6, GridScheme::Equispaced).unwrap();
        let joint = compute_joint_pdp(&ev, &space, 0, 1, &gi, &gj, 200, 4).unwrap();
        for (a, &ga) in gi.values.iter().enumerate() {
            for (b, &gb) in gj.values.iter().enumerate() {
                assert_abs_diff_eq!(joint.surface[[a, b]], ga * gb, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn joint_pdp_symmetric_function_transposes() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| (r[0] + r[1]).powi(2));
        let space = unit_space(2);
        let g0 = feature_grid(&space, 0, 7, GridScheme::Equispaced).unwrap();
        let g1 = feature_grid(&space, 1, 7, GridScheme::Equispaced).unwrap();
        let j01 = compute_joint_pdp(&ev, &space, 0, 1, &g0, &g1, 100, 8).unwrap();
        let j10 = compute_joint_pdp(&ev, &space, 1, 0, &g1, &g0, 100, 8).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                assert_abs_diff_eq!(j01.surface[[a, b]], j10.surface[[b, a]], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn curve_csv_shape() {
        let ev = FnEvaluator::new(2, |r: ArrayView1<f64>| r[0] + r[1]);
        let space = unit_space(2);
        let grid = feature_grid(&space, 0, 4, GridScheme::Quantile).unwrap();
        let ens = compute_ice(&ev, &space, 0, &grid, 3, 1).unwrap();
        let mut buf = Vec::new();
        write_curves_csv(&ens, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "grid,curve_0,curve_1,curve_2,pdp");
        assert_eq!(lines[1].split(',').count(), 5);
    }
}
