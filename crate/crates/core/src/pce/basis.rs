//! Orthonormal polynomial bases and hyperbolic index sets.

use crate::error::{CoreError, Result};
use crate::space::{Family, InputSpace, Marginal};
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

/// Per-dimension polynomial degrees of one expansion term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|g| *g == 0)
    }

    /// Dimensions with a nonzero degree.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, g)| **g > 0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// All multi-indices with `(sum_i gamma_i^q)^(1/q) <= p`, in graded
/// lexicographic order (total degree first, then lexicographic).
pub fn hyperbolic_index_set(m: usize, p: u32, q: f64) -> Result<Vec<MultiIndex>> {
    if m == 0 {
        return Err(CoreError::InvalidParameter("m must be >= 1".into()));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(CoreError::InvalidParameter(format!(
            "hyperbolic truncation requires 0 < q <= 1, got {q}"
        )));
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; m];
    // For q <= 1 the q-norm dominates the total degree, so enumerating the
    // total-degree simplex and filtering is exhaustive.
    for degree in 0..=p {
        compositions(&mut current, 0, degree, p, q, &mut out);
    }
    Ok(out)
}

fn q_norm(gamma: &[u32], q: f64) -> f64 {
    let s: f64 = gamma.iter().map(|g| (*g as f64).powf(q)).sum();
    s.powf(1.0 / q)
}

fn compositions(
    current: &mut Vec<u32>,
    pos: usize,
    remaining: u32,
    p: u32,
    q: f64,
    out: &mut Vec<MultiIndex>,
) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        if q_norm(current, q) <= p as f64 + 1e-9 {
            out.push(MultiIndex(current.clone()));
        }
        current[pos] = 0;
        return;
    }
    for d in (0..=remaining).rev() {
        current[pos] = d;
        compositions(current, pos + 1, remaining - d, p, q, out);
    }
    current[pos] = 0;
}

/// Univariate orthonormal family with its standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UnivariateFamily {
    /// Legendre polynomials, orthonormal w.r.t. U(lo, hi) after mapping the
    /// input affinely onto [-1, 1].
    Legendre { lo: f64, hi: f64 },
    /// Probabilists' Hermite polynomials normalized by 1/sqrt(k!), on the
    /// standardized variable.
    Hermite { mean: f64, std: f64 },
    /// Orthonormal polynomials of the standardized empirical measure, built
    /// by the Stieltjes procedure. Inputs are clamped to the observed range.
    Stieltjes {
        mean: f64,
        scale: f64,
        clamp_lo: f64,
        clamp_hi: f64,
        /// Monic recurrence centers a_k.
        alpha: Vec<f64>,
        /// sqrt(b_k) for the normalized recurrence, b_0 unused.
        sqrt_beta: Vec<f64>,
    },
}

impl UnivariateFamily {
    /// Builds the family matching a marginal, able to evaluate degrees up to
    /// `max_degree`.
    pub fn from_marginal(marg: &Marginal, max_degree: usize) -> Result<Self> {
        match marg.family() {
            Family::Uniform { lo, hi } => Ok(UnivariateFamily::Legendre { lo: *lo, hi: *hi }),
            Family::Gaussian { mean, std } => {
                Ok(UnivariateFamily::Hermite { mean: *mean, std: *std })
            }
            Family::Empirical { values } => stieltjes_family(values, max_degree),
        }
    }

    /// Evaluates orthonormal degrees `0..=deg` at `x` into `out`.
    pub fn eval_all(&self, x: f64, deg: usize, out: &mut [f64]) {
        debug_assert!(out.len() > deg);
        match self {
            UnivariateFamily::Legendre { lo, hi } => {
                let t = 2.0 * (x - lo) / (hi - lo) - 1.0;
                // Standard recurrence, then orthonormal scaling sqrt(2k+1)
                // (w.r.t. the uniform density on [-1, 1]).
                out[0] = 1.0;
                if deg >= 1 {
                    out[1] = t;
                }
                for k in 1..deg {
                    out[k + 1] =
                        ((2 * k + 1) as f64 * t * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
                }
                let mut norm;
                for (k, o) in out.iter_mut().enumerate().take(deg + 1) {
                    norm = ((2 * k + 1) as f64).sqrt();
                    *o *= norm;
                }
            }
            UnivariateFamily::Hermite { mean, std } => {
                let z = (x - mean) / std;
                out[0] = 1.0;
                if deg >= 1 {
                    out[1] = z;
                }
                for k in 1..deg {
                    out[k + 1] = z * out[k] - k as f64 * out[k - 1];
                }
                let mut fact = 1.0;
                for (k, o) in out.iter_mut().enumerate().take(deg + 1).skip(1) {
                    fact *= k as f64;
                    *o /= fact.sqrt();
                }
            }
            UnivariateFamily::Stieltjes { mean, scale, clamp_lo, clamp_hi, alpha, sqrt_beta } => {
                let z = (x.clamp(*clamp_lo, *clamp_hi) - mean) / scale;
                out[0] = 1.0;
                if deg >= 1 {
                    out[1] = (z - alpha[0]) / sqrt_beta[1];
                }
                for k in 1..deg {
                    out[k + 1] =
                        ((z - alpha[k]) * out[k] - sqrt_beta[k] * out[k - 1]) / sqrt_beta[k + 1];
                }
            }
        }
    }

    /// Largest degree this family can evaluate (unbounded for the closed
    /// families).
    pub fn max_degree(&self) -> usize {
        match self {
            UnivariateFamily::Stieltjes { sqrt_beta, .. } => sqrt_beta.len() - 1,
            _ => usize::MAX,
        }
    }
}

/// Discrete Stieltjes procedure on the standardized sample.
fn stieltjes_family(values: &[f64], max_degree: usize) -> Result<UnivariateFamily> {
    let n = values.len();
    let distinct = values.windows(2).filter(|w| w[0] != w[1]).count() + 1;
    if distinct <= max_degree {
        return Err(CoreError::InvalidParameter(format!(
            "empirical marginal has {distinct} distinct values; degree {max_degree} \
             orthonormal polynomials need at least {}",
            max_degree + 1
        )));
    }
    let mean = crate::stats::mean(values);
    let scale = crate::stats::pairwise_std(values);
    let z: Vec<f64> = values.iter().map(|v| (v - mean) / scale).collect();
    let w = 1.0 / n as f64;

    let mut alpha = vec![0.0; max_degree + 1];
    let mut beta = vec![0.0; max_degree + 1]; // beta[0] unused
    let mut p_prev = vec![0.0; n];
    let mut p_cur = vec![1.0; n];
    let mut norm_prev = 1.0; // <pi_0, pi_0> with unit weights summing to 1

    for k in 0..=max_degree {
        let zp2: f64 = z.iter().zip(&p_cur).map(|(zi, pi)| w * zi * pi * pi).sum();
        alpha[k] = zp2 / norm_prev;
        if k == max_degree {
            break;
        }
        let mut p_next = vec![0.0; n];
        for i in 0..n {
            p_next[i] = (z[i] - alpha[k]) * p_cur[i]
                - if k > 0 { beta[k] * p_prev[i] } else { 0.0 };
        }
        let norm_next: f64 = p_next.iter().map(|p| w * p * p).sum();
        if norm_next <= 1e-14 * norm_prev.max(1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "empirical measure degenerates at degree {}; reduce p_max",
                k + 1
            )));
        }
        beta[k + 1] = norm_next / norm_prev;
        p_prev = std::mem::take(&mut p_cur);
        p_cur = p_next;
        norm_prev = norm_next;
    }

    let sqrt_beta = beta.iter().map(|b| b.sqrt()).collect();
    let (clamp_lo, clamp_hi) = (values[0], *values.last().unwrap());
    Ok(UnivariateFamily::Stieltjes { mean, scale, clamp_lo, clamp_hi, alpha, sqrt_beta })
}

/// Multivariate orthonormal basis: an ordered index set plus one univariate
/// family per input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    pub indices: Vec<MultiIndex>,
    pub families: Vec<UnivariateFamily>,
    pub max_degree: usize,
}

impl BasisSet {
    /// Hyperbolic-truncated basis for the space's marginals.
    pub fn hyperbolic(space: &InputSpace, p: u32, q: f64) -> Result<Self> {
        let indices = hyperbolic_index_set(space.dim(), p, q)?;
        let families = space
            .marginals()
            .iter()
            .map(|m| UnivariateFamily::from_marginal(m, p as usize))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { indices, families, max_degree: p as usize })
    }

    pub fn cardinality(&self) -> usize {
        self.indices.len()
    }

    pub fn dim(&self) -> usize {
        self.families.len()
    }
}

/// Per-point table of univariate values for all dimensions and degrees;
/// reused when assembling designs for several index sets.
pub struct UnivariateTable {
    /// n x m x (deg + 1), flattened row-major.
    values: Vec<f64>,
    n: usize,
    m: usize,
    deg1: usize,
}

impl UnivariateTable {
    pub fn build(families: &[UnivariateFamily], pts: &ArrayView2<'_, f64>, deg: usize) -> Self {
        let (n, m) = (pts.nrows(), pts.ncols());
        let deg1 = deg + 1;
        let mut values = vec![0.0; n * m * deg1];
        for (i, row) in pts.outer_iter().enumerate() {
            for (j, fam) in families.iter().enumerate() {
                let off = (i * m + j) * deg1;
                fam.eval_all(row[j], deg, &mut values[off..off + deg1]);
            }
        }
        Self { values, n, m, deg1 }
    }

    #[inline]
    fn get(&self, i: usize, j: usize, d: u32) -> f64 {
        self.values[(i * self.m + j) * self.deg1 + d as usize]
    }

    /// Assembles the design matrix for an index set.
    pub fn design(&self, indices: &[MultiIndex]) -> Array2<f64> {
        let mut f = Array2::ones((self.n, indices.len()));
        for (c, gamma) in indices.iter().enumerate() {
            for (j, d) in gamma.0.iter().enumerate() {
                if *d > 0 {
                    for i in 0..self.n {
                        f[[i, c]] *= self.get(i, j, *d);
                    }
                }
            }
        }
        f
    }
}

/// n x P design matrix `F_ic = Psi_c(x_i)`; column 0 is the constant term.
pub fn eval_basis(basis: &BasisSet, pts: &ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if pts.ncols() != basis.dim() {
        return Err(CoreError::DimensionMismatch { expected: basis.dim(), got: pts.ncols() });
    }
    let table = UnivariateTable::build(&basis.families, pts, basis.max_degree);
    Ok(table.design(&basis.indices))
}
