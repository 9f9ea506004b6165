//! Seeded sampling: i.i.d. designs, feature grids, and pick-freeze matrices.
//!
//! All randomness is counter-based: the value at element index `t` of a
//! `(seed, stream)` pair is a pure function of `(seed, stream, t)`, so
//! designs are bit-identical regardless of how generation is chunked across
//! workers. Every consumer in the crate draws from its own stream constant,
//! which means adding a new metric never perturbs another metric's sample.

use crate::error::{CoreError, Result};
use crate::space::{InputSpace, Marginal};
use ndarray::Array2;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed stream offsets from the root seed. Documented constants so reports
/// are reproducible from metadata alone.
pub mod streams {
    /// Shared complement sample reused across all ICE features of one run.
    pub const ICE_COMPLEMENT: u64 = 1;
    /// Pick-freeze `A` matrix.
    pub const SOBOL_A: u64 = 2;
    /// Pick-freeze `B` matrix.
    pub const SOBOL_B: u64 = 3;
    /// Shapley evaluation points.
    pub const SHAP_POINTS: u64 = 4;
    /// Shapley background sample.
    pub const SHAP_BACKGROUND: u64 = 5;
    /// Surrogate training design.
    pub const PCE_TRAIN: u64 = 6;
    /// Surrogate validation design.
    pub const PCE_VALIDATION: u64 = 7;
    /// Independent dense sample for brute-force oracles.
    pub const ORACLE_DENSE: u64 = 8;
    /// Random function generation in the verification suites.
    pub const VERIFY_FUNCTIONS: u64 = 9;
}

const U53: f64 = 1.0 / 9007199254740992.0; // 2^-53

/// Fills `out` with uniforms on the open interval (0, 1), starting at the
/// given element index of the `(seed, stream)` counter sequence.
pub fn uniform01_fill(seed: u64, stream: u64, start: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // ChaCha words are 32-bit; each u64 draw consumes two.
    rng.set_word_pos(start as u128 * 2);
    for v in out.iter_mut() {
        *v = ((rng.next_u64() >> 11) as f64 + 0.5) * U53;
    }
}

/// Deterministic random permutation of `0..n`: indices sorted by their
/// counter-stream keys.
pub fn uniform01_shuffle(n: usize, seed: u64, stream: u64) -> Vec<usize> {
    let mut keys = vec![0.0; n];
    uniform01_fill(seed, stream, 0, &mut keys);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|a, b| keys[*a].total_cmp(&keys[*b]));
    idx
}

/// An n x m design in physical units, tagged with its provenance.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    pub values: Array2<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl SampleMatrix {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }
}

/// Draws `n` i.i.d. points from the input space via inverse-CDF transforms
/// of the counter stream. Element `(i, j)` consumes counter index `i*m + j`.
pub fn draw_iid(space: &InputSpace, n: usize, seed: u64, stream: u64) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(CoreError::EmptyDesign);
    }
    let m = space.dim();
    let mut u = vec![0.0; n * m];
    uniform01_fill(seed, stream, 0, &mut u);
    for (idx, v) in u.iter_mut().enumerate() {
        *v = space.marginal(idx % m).quantile(*v);
    }
    let values = Array2::from_shape_vec((n, m), u).expect("shape matches construction");
    Ok(SampleMatrix { values, seed, stream })
}

/// Grid placement rule for a feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScheme {
    /// Midpoint quantiles: values at probabilities `(k - 0.5) / K`.
    Quantile,
    /// `K` evenly spaced points across a bounded support, endpoints included.
    Equispaced,
}

/// Evaluation grid for one feature, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrid {
    pub feature: usize,
    pub values: Vec<f64>,
}

impl FeatureGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds a K-point grid for feature `j`.
pub fn feature_grid(
    space: &InputSpace,
    j: usize,
    k: usize,
    scheme: GridScheme,
) -> Result<FeatureGrid> {
    if j >= space.dim() {
        return Err(CoreError::InvalidParameter(format!(
            "feature index {j} out of range for {}-dimensional space",
            space.dim()
        )));
    }
    if k < 2 {
        return Err(CoreError::DegenerateGrid { min: 2, got: k });
    }
    let marg: &Marginal = space.marginal(j);
    let values: Vec<f64> = match scheme {
        GridScheme::Quantile => (1..=k)
            .map(|i| marg.quantile((i as f64 - 0.5) / k as f64))
            .collect(),
        GridScheme::Equispaced => {
            if !marg.is_bounded() {
                return Err(CoreError::UnsupportedScheme { feature: j });
            }
            let (lo, hi) = marg.support();
            (0..k)
                .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
                .collect()
        }
    };
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::InvalidParameter(format!(
            "grid for feature {j} is not strictly increasing (duplicate quantiles; reduce K)"
        )));
    }
    Ok(FeatureGrid { feature: j, values })
}

/// Pick-freeze design: two independent base matrices. The `AB_j` matrices
/// are derived on demand to avoid materializing `m` copies.
#[derive(Debug, Clone)]
pub struct SaltelliDesign {
    pub a: SampleMatrix,
    pub b: SampleMatrix,
}

impl SaltelliDesign {
    /// `A` with column `j` replaced by `B`'s column `j`.
    pub fn ab(&self, j: usize) -> Array2<f64> {
        let mut ab = self.a.values.clone();
        ab.column_mut(j).assign(&self.b.values.column(j));
        ab
    }

    /// `A` with columns `i` and `j` replaced by `B`'s.
    pub fn ab_pair(&self, i: usize, j: usize) -> Array2<f64> {
        let mut ab = self.a.values.clone();
        ab.column_mut(i).assign(&self.b.values.column(i));
        ab.column_mut(j).assign(&self.b.values.column(j));
        ab
    }
}

/// Draws the `(A, B)` pair on streams [`streams::SOBOL_A`] / [`streams::SOBOL_B`].
/// Estimating first and total indices costs `n_base * (m + 2)` evaluations.
pub fn saltelli_design(space: &InputSpace, n_base: usize, seed: u64) -> Result<SaltelliDesign> {
    if n_base < 2 {
        return Err(CoreError::InvalidParameter(format!(
            "saltelli design requires n_base >= 2, got {n_base}"
        )));
    }
    Ok(SaltelliDesign {
        a: draw_iid(space, n_base, seed, streams::SOBOL_A)?,
        b: draw_iid(space, n_base, seed, streams::SOBOL_B)?,
    })
}
