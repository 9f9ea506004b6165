//! Hybrid least-angle regression: the LARS path chooses the active set, the
//! reported coefficients are ordinary least squares on that set, and the
//! step is selected by leave-one-out error via the hat-matrix shortcut.

use crate::error::{CoreError, Result};
use ndarray::{ArrayView1, ArrayView2};

/// One step of the path, for diagnostics.
#[derive(Debug, Clone)]
pub struct PathStep {
    pub n_active: usize,
    pub loo_rel: f64,
}

/// Result of a hybrid-LARS fit.
#[derive(Debug, Clone)]
pub struct LarsFit {
    /// Selected columns, always starting with the constant column 0.
    pub active: Vec<usize>,
    /// OLS coefficients aligned with `active`, in original column scaling.
    pub beta_active: Vec<f64>,
    /// Relative leave-one-out error of the selected step.
    pub loo_rel: f64,
    /// Training R^2 of the selected step.
    pub r2_train: f64,
    pub path: Vec<PathStep>,
}

impl LarsFit {
    /// Dense coefficient vector of length `p`.
    pub fn dense_beta(&self, p: usize) -> Vec<f64> {
        let mut beta = vec![0.0; p];
        for (col, b) in self.active.iter().zip(&self.beta_active) {
            beta[*col] = *b;
        }
        beta
    }
}

const LOO_FLOOR: f64 = 1e-14;
const IMPROVE: f64 = 1e-9;

/// Whether `new` is a real improvement over `best` (ties favor the earlier,
/// smaller model).
fn improves(new: f64, best: f64) -> bool {
    new.max(LOO_FLOOR) < best.max(LOO_FLOOR) * (1.0 - IMPROVE)
}

/// Incremental modified Gram-Schmidt factorization of the active columns,
/// tracking the hat-matrix diagonal and the OLS residual as columns enter.
struct OrthoState {
    n: usize,
    /// Orthonormal columns, flattened n per column.
    q: Vec<f64>,
    /// Upper-triangular factor, stored column-wise.
    r: Vec<Vec<f64>>,
    /// q_k . y per column.
    qty: Vec<f64>,
    /// Hat diagonal h_i = sum_k q_k[i]^2.
    h: Vec<f64>,
    /// OLS residual y - Q Q^T y.
    e: Vec<f64>,
}

impl OrthoState {
    fn new(y: &[f64]) -> Self {
        Self {
            n: y.len(),
            q: Vec::new(),
            r: Vec::new(),
            qty: Vec::new(),
            h: vec![0.0; y.len()],
            e: y.to_vec(),
        }
    }

    fn k(&self) -> usize {
        self.r.len()
    }

    /// Adds a column; returns false when it is numerically dependent on the
    /// current active set.
    fn push(&mut self, col: &[f64]) -> bool {
        let k = self.k();
        let mut v = col.to_vec();
        let mut rcol = vec![0.0; k + 1];
        for j in 0..k {
            let qj = &self.q[j * self.n..(j + 1) * self.n];
            let dot: f64 = qj.iter().zip(&v).map(|(a, b)| a * b).sum();
            rcol[j] = dot;
            for (vi, qi) in v.iter_mut().zip(qj) {
                *vi -= dot * qi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let col_norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-10 * col_norm.max(1.0) {
            return false;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        rcol[k] = norm;
        let qty: f64 = v.iter().zip(&self.e).map(|(a, b)| a * b).sum();
        for i in 0..self.n {
            self.h[i] += v[i] * v[i];
            self.e[i] -= qty * v[i];
        }
        self.q.extend_from_slice(&v);
        self.r.push(rcol);
        self.qty.push(qty);
        true
    }

    /// LOO mean squared error of the current OLS fit.
    fn loo(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let denom = 1.0 - self.h[i];
            if denom <= 1e-12 {
                return f64::INFINITY;
            }
            let r = self.e[i] / denom;
            acc += r * r;
        }
        acc / self.n as f64
    }

    fn rss(&self) -> f64 {
        self.e.iter().map(|x| x * x).sum()
    }

    /// Back-substitutes R beta = Q^T y for the prefix of size `k`.
    fn beta(&self, k: usize) -> Vec<f64> {
        // qty was computed against the running residual; against the fixed y
        // those coefficients coincide because residuals are orthogonal to
        // earlier q's.
        let mut beta = self.qty[..k].to_vec();
        for j in (0..k).rev() {
            let d = self.r[j][j];
            beta[j] /= d;
            for i in 0..j {
                beta[i] -= self.r[j][i] * beta[j];
            }
        }
        beta
    }
}

/// Fits `design * beta ~ y`. Column 0 must be constant; it is always active.
pub fn fit_lars(design: &ArrayView2<'_, f64>, y: &ArrayView1<'_, f64>) -> Result<LarsFit> {
    let (n, p) = (design.nrows(), design.ncols());
    if n < 2 {
        return Err(CoreError::InvalidParameter(format!(
            "lars requires at least 2 rows, got {n}"
        )));
    }
    if y.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: y.len() });
    }
    let c0 = design[[0, 0]];
    if c0 == 0.0 || design.column(0).iter().any(|v| *v != c0) {
        return Err(CoreError::InvalidParameter(
            "design column 0 must be a nonzero constant".into(),
        ));
    }

    let y_vec: Vec<f64> = y.to_vec();
    let y_mean = crate::stats::mean(&y_vec);
    let y_var = crate::stats::pairwise_var(&y_vec);

    // Constant response: intercept-only model.
    if y_var == 0.0 {
        return Ok(LarsFit {
            active: vec![0],
            beta_active: vec![y_mean / c0],
            loo_rel: 0.0,
            r2_train: 1.0,
            path: vec![PathStep { n_active: 1, loo_rel: 0.0 }],
        });
    }

    // Centered, unit-norm columns for the LARS geometry.
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut usable: Vec<bool> = Vec::with_capacity(p);
    for c in 0..p {
        let col = design.column(c);
        let mean = col.sum() / n as f64;
        let mut v: Vec<f64> = col.iter().map(|x| x - mean).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let ok = c != 0 && norm > 1e-12 * (n as f64).sqrt();
        if ok {
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
        usable.push(ok);
        centered.push(v);
    }

    // Ordinary-least-squares tracker over the original columns.
    let mut ortho = OrthoState::new(&y_vec);
    let const_col: Vec<f64> = design.column(0).to_vec();
    assert!(ortho.push(&const_col));

    let mut path = Vec::new();
    let loo0 = ortho.loo() / y_var;
    path.push(PathStep { n_active: 1, loo_rel: loo0 });
    let mut best = (loo0, 1usize); // (loo_rel, number of active columns incl. constant)

    // LARS state.
    let mut residual: Vec<f64> = y_vec.iter().map(|v| v - y_mean).collect();
    let mut active: Vec<usize> = Vec::new();
    let mut in_active = vec![false; p];
    let mut chol: Vec<Vec<f64>> = Vec::new(); // lower-triangular rows
    let max_active = (n.saturating_sub(2)).min(p - 1);

    'path: while active.len() < max_active {
        // Correlations of candidates with the LARS residual.
        let mut best_j = None;
        let mut best_c = 0.0f64;
        for j in 1..p {
            if !usable[j] || in_active[j] {
                continue;
            }
            let c: f64 = centered[j].iter().zip(&residual).map(|(a, b)| a * b).sum();
            if c.abs() > best_c.abs() {
                best_c = c;
                best_j = Some(j);
            }
        }
        let Some(jin) = best_j else { break };
        if best_c.abs() < 1e-12 {
            break;
        }

        // Grow the Cholesky of the active Gram matrix.
        let k = active.len();
        let mut g = vec![0.0; k];
        for (t, &a) in active.iter().enumerate() {
            g[t] = centered[a].iter().zip(&centered[jin]).map(|(x, z)| x * z).sum();
        }
        // Solve L w = g.
        let mut w = g;
        for t in 0..k {
            for s in 0..t {
                w[t] -= chol[t][s] * w[s];
            }
            w[t] /= chol[t][t];
        }
        let d2 = 1.0 - w.iter().map(|x| x * x).sum::<f64>();
        if d2 <= 1e-10 {
            break; // entering column is collinear with the active set
        }
        let mut row = w;
        row.push(d2.sqrt());
        chol.push(row);
        active.push(jin);
        in_active[jin] = true;

        // OLS refit + LOO at this step (on the original columns).
        if !ortho.push(&design.column(jin).to_vec()) {
            // Dependent in the original scaling: truncate at the previous
            // full-rank step.
            active.pop();
            in_active[jin] = false;
            chol.pop();
            break;
        }
        let loo_rel = ortho.loo() / y_var;
        path.push(PathStep { n_active: active.len() + 1, loo_rel });
        if improves(loo_rel, best.0) {
            best = (loo_rel, active.len() + 1);
        }

        // Equiangular direction.
        let ka = active.len();
        let signs: Vec<f64> = active
            .iter()
            .map(|&a| {
                let c: f64 = centered[a].iter().zip(&residual).map(|(x, r)| x * r).sum();
                if c >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        // Solve G_A t = s via L L^T.
        let mut t = signs.clone();
        for i in 0..ka {
            for s in 0..i {
                t[i] -= chol[i][s] * t[s];
            }
            t[i] /= chol[i][i];
        }
        for i in (0..ka).rev() {
            for s in i + 1..ka {
                t[i] -= chol[s][i] * t[s];
            }
            t[i] /= chol[i][i];
        }
        let denom: f64 = signs.iter().zip(&t).map(|(a, b)| a * b).sum();
        if denom <= 0.0 {
            break;
        }
        let a_norm = denom.sqrt().recip();
        let mut u = vec![0.0; n];
        for (idx, &a) in active.iter().enumerate() {
            let wcoef = a_norm * t[idx];
            for (ui, xi) in u.iter_mut().zip(&centered[a]) {
                *ui += wcoef * xi;
            }
        }
        let cmax: f64 = {
            let a0 = active[0];
            let c: f64 = centered[a0].iter().zip(&residual).map(|(x, r)| x * r).sum();
            c.abs()
        };

        // Step length to the next entering column.
        let mut gamma = cmax / a_norm;
        let mut part_step = false;
        for j in 1..p {
            if !usable[j] || in_active[j] {
                continue;
            }
            let cj: f64 = centered[j].iter().zip(&residual).map(|(x, r)| x * r).sum();
            let aj: f64 = centered[j].iter().zip(&u).map(|(x, ui)| x * ui).sum();
            for val in [(cmax - cj) / (a_norm - aj), (cmax + cj) / (a_norm + aj)] {
                if val.is_finite() && val > 1e-12 && val < gamma {
                    gamma = val;
                    part_step = true;
                }
            }
        }
        for (ri, ui) in residual.iter_mut().zip(&u) {
            *ri -= gamma * ui;
        }
        if !part_step {
            break 'path; // took the full least-squares step; path exhausted
        }
    }

    // Rebuild the OLS coefficients for the selected prefix.
    let n_sel = best.1;
    let beta_active = ortho.beta(n_sel);
    let mut sel_cols = vec![0usize];
    sel_cols.extend(active.iter().take(n_sel - 1).copied());

    // Recompute training R^2 for the selected prefix.
    let r2_train = {
        let mut pred = vec![0.0; n];
        for (t, &c) in sel_cols.iter().enumerate() {
            let b = beta_active[t];
            for (pi, xi) in pred.iter_mut().zip(design.column(c).iter()) {
                *pi += b * xi;
            }
        }
        let rss: f64 = pred.iter().zip(&y_vec).map(|(p, y)| (y - p) * (y - p)).sum();
        1.0 - rss / (y_var * (n - 1) as f64)
    };
    let _ = ortho.rss();

    Ok(LarsFit { active: sel_cols, beta_active, loo_rel: best.0, r2_train, path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{Array1, Array2};

    fn design_from_cols(cols: Vec<Vec<f64>>) -> Array2<f64> {
        let n = cols[0].len();
        let p = cols.len();
        let mut d = Array2::zeros((n, p));
        for (c, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                d[[i, c]] = *v;
            }
        }
        d
    }

    #[test]
    fn recovers_single_clean_column() {
        // y = 2 * column 1, noise-free: one nonzero coefficient ~ 2.
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 / n as f64) * 2.0 - 1.0).collect();
        let col1: Vec<f64> = xs.iter().map(|x| 3.0f64.sqrt() * x).collect();
        let col2: Vec<f64> = xs.iter().map(|x| 5.0f64.sqrt() * (1.5 * x * x - 0.5)).collect();
        let y: Vec<f64> = col1.iter().map(|v| 2.0 * v).collect();
        let d = design_from_cols(vec![vec![1.0; n], col1, col2]);
        let fit = fit_lars(&d.view(), &Array1::from_vec(y).view()).unwrap();
        let beta = fit.dense_beta(3);
        assert!((beta[1] - 2.0).abs() < 1e-8, "beta = {beta:?}");
        assert!(beta[0].abs() < 1e-8);
        assert!(beta[2].abs() < 1e-8);
        assert!(fit.loo_rel < 1e-12);
    }

    #[test]
    fn constant_response() {
        let n = 20;
        let col1: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let d = design_from_cols(vec![vec![1.0; n], col1]);
        let y = Array1::from_elem(n, 4.5);
        let fit = fit_lars(&d.view(), &y.view()).unwrap();
        assert_eq!(fit.active, vec![0]);
        assert_abs_diff_eq!(fit.beta_active[0], 4.5, epsilon = 1e-12);
    }

    #[test]
    fn duplicate_column_truncates_path() {
        let n = 30;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let col: Vec<f64> = xs.iter().map(|x| x * 2.0 - 1.0).collect();
        let y: Vec<f64> = col.iter().map(|v| 3.0 * v + 0.5).collect();
        let d = design_from_cols(vec![vec![1.0; n], col.clone(), col.clone()]);
        let fit = fit_lars(&d.view(), &Array1::from_vec(y).view()).unwrap();
        // Only one of the duplicated columns can enter.
        assert!(fit.active.len() <= 2);
        let beta = fit.dense_beta(3);
        assert_abs_diff_eq!(beta[1] + beta[2], 3.0, epsilon = 1e-8);
    }

    #[test]
    fn requires_constant_column() {
        let d = design_from_cols(vec![vec![1.0, 2.0, 3.0], vec![0.1, 0.2, 0.3]]);
        let y = Array1::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(fit_lars(&d.view(), &y.view()).is_err());
    }

    #[test]
    fn hybrid_refit_matches_ols_on_full_support() {
        // With every column active the refit equals dense least squares.
        let n = 50;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64 * 2.0 - 1.0).collect();
        let c1: Vec<f64> = xs.clone();
        let c2: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let y: Vec<f64> =
            xs.iter().map(|x| 1.0 + 0.5 * x - 2.0 * x * x + 0.01 * (13.0 * x).sin()).collect();
        let d = design_from_cols(vec![vec![1.0; n], c1, c2]);
        let fit = fit_lars(&d.view(), &Array1::from_vec(y.clone()).view()).unwrap();
        if fit.active.len() == 3 {
            // Normal equations solved directly for reference.
            let mut g = [[0.0f64; 3]; 3];
            let mut rhs = [0.0f64; 3];
            for i in 0..n {
                let row = [1.0, d[[i, 1]], d[[i, 2]]];
                for a in 0..3 {
                    rhs[a] += row[a] * y[i];
                    for b in 0..3 {
                        g[a][b] += row[a] * row[b];
                    }
                }
            }
            // Tiny 3x3 solve by Gaussian elimination.
            let mut aug = [[0.0f64; 4]; 3];
            for a in 0..3 {
                aug[a][..3].copy_from_slice(&g[a]);
                aug[a][3] = rhs[a];
            }
            for col in 0..3 {
                let piv = (col..3).max_by(|x, y_| {
                    aug[*x][col].abs().partial_cmp(&aug[*y_][col].abs()).unwrap()
                });
                let piv = piv.unwrap();
                aug.swap(col, piv);
                for r in 0..3 {
                    if r != col {
                        let f = aug[r][col] / aug[col][col];
                        for cc in col..4 {
                            aug[r][cc] -= f * aug[col][cc];
                        }
                    }
                }
            }
            let reference: Vec<f64> = (0..3).map(|a| aug[a][3] / aug[a][a]).collect();
            let beta = fit.dense_beta(3);
            for a in 0..3 {
                assert_abs_diff_eq!(beta[a], reference[a], epsilon = 1e-7);
            }
        }
    }
}
