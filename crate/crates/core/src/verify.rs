//! Brute-force oracles and property suites for the estimator-level
//! inequality between PDP- and ICE-based importances.

use crate::error::{CoreError, Result};
use crate::evaluator::{Evaluator, FnEvaluator};
use crate::metrics::{i_pdp, ice_importances, mu_sigma_ice};
use crate::pdp::compute_ice_with_sample;
use crate::sampling::{draw_iid, streams, uniform01_fill, FeatureGrid, GridScheme};
use crate::space::InputSpace;
use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

/// Structure tag of a randomly generated separable function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparableStructure {
    /// `g(x_j) + h(x_C)`
    Additive,
    /// `g(x_j) * h(x_C)^2`
    MultiplicativeNonneg,
    /// `g(x_j) * h(x_C)`, h signed
    MultiplicativeSigned,
    /// `sum_l g_l(x_j) h_l(x_C)`
    GeneralSum,
}

impl SeparableStructure {
    pub const ALL: [SeparableStructure; 4] = [
        SeparableStructure::Additive,
        SeparableStructure::MultiplicativeNonneg,
        SeparableStructure::MultiplicativeSigned,
        SeparableStructure::GeneralSum,
    ];
}

/// A univariate polynomial by coefficients, low degree first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// A multivariate polynomial over the complement variables: a sum of
/// monomial terms `(coef, exponents)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplementPoly {
    pub terms: Vec<(f64, Vec<u32>)>,
    /// When set, the evaluated value is squared (nonneg construction).
    pub squared: bool,
}

impl ComplementPoly {
    pub fn eval(&self, xc: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (x, e) in xc.iter().zip(exps) {
                for _ in 0..*e {
                    t *= x;
                }
            }
            acc += t;
        }
        if self.squared {
            acc * acc
        } else {
            acc
        }
    }
}

/// Specification of a random separable function
/// `f(x) = sum_l g_l(x_j) h_l(x_C)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableSpec {
    pub m: usize,
    pub feature: usize,
    pub structure: SeparableStructure,
    pub terms: Vec<(Poly, ComplementPoly)>,
}

impl SeparableSpec {
    pub fn eval_point(&self, x: ArrayView1<'_, f64>) -> f64 {
        let j = self.feature;
        let xj = x[j];
        let xc: Vec<f64> = (0..self.m).filter(|k| *k != j).map(|k| x[k]).collect();
        self.terms.iter().map(|(g, h)| g.eval(xj) * h.eval(&xc)).sum()
    }

    pub fn evaluator(self) -> FnEvaluator<impl Fn(ArrayView1<'_, f64>) -> f64 + Sync + Send> {
        let spec = self;
        FnEvaluator::new(spec.m, move |row| spec.eval_point(row))
    }
}

struct CoeffStream {
    seed: u64,
    cursor: u64,
}

impl CoeffStream {
    fn next(&mut self) -> f64 {
        let mut buf = [0.0];
        uniform01_fill(self.seed, streams::VERIFY_FUNCTIONS, self.cursor, &mut buf);
        self.cursor += 1;
        2.0 * buf[0] - 1.0 // symmetric on (-1, 1)
    }

    fn next_usize(&mut self, bound: usize) -> usize {
        ((self.next() * 0.5 + 0.5) * bound as f64) as usize % bound.max(1)
    }
}

fn random_poly(rng: &mut CoeffStream, max_deg: u32) -> Poly {
    let deg = rng.next_usize(max_deg as usize + 1);
    Poly((0..=deg).map(|_| rng.next()).collect())
}

fn random_complement_poly(
    rng: &mut CoeffStream,
    dims: usize,
    max_deg: u32,
    squared: bool,
) -> ComplementPoly {
    let n_terms = 1 + rng.next_usize(3);
    let terms = (0..n_terms)
        .map(|_| {
            let coef = rng.next();
            let exps = (0..dims).map(|_| rng.next_usize(max_deg as usize + 1) as u32).collect();
            (coef, exps)
        })
        .collect();
    ComplementPoly { terms, squared }
}

/// Generates a random separable function on U(-1,1)^m with the requested
/// structure. Identical seeds reproduce the function bit-exactly.
pub fn random_separable(
    m: usize,
    k: usize,
    max_deg: u32,
    structure: SeparableStructure,
    seed: u64,
) -> Result<(SeparableSpec, InputSpace)> {
    if m < 2 {
        return Err(CoreError::InvalidParameter("separable functions need m >= 2".into()));
    }
    if k == 0 {
        return Err(CoreError::InvalidParameter("need at least one term".into()));
    }
    let mut rng = CoeffStream { seed, cursor: 0 };
    let feature = rng.next_usize(m);
    let comp_dims = m - 1;
    let terms = match structure {
        SeparableStructure::Additive => {
            // g(x_j) + h(x_C): [ (g, 1), (1, h) ]
            let g = random_poly(&mut rng, max_deg.max(1));
            let h = random_complement_poly(&mut rng, comp_dims, max_deg, false);
            vec![
                (g, ComplementPoly { terms: vec![(1.0, vec![0; comp_dims])], squared: false }),
                (Poly(vec![1.0]), h),
            ]
        }
        SeparableStructure::MultiplicativeNonneg => {
            let g = random_poly(&mut rng, max_deg.max(1));
            let h = random_complement_poly(&mut rng, comp_dims, max_deg, true);
            vec![(g, h)]
        }
        SeparableStructure::MultiplicativeSigned => {
            let g = random_poly(&mut rng, max_deg.max(1));
            // Odd monomials only: E[h] = 0 under the symmetric marginals,
            // which maximizes the mean-absolute gap the theorem predicts.
            let mut h = random_complement_poly(&mut rng, comp_dims, max_deg, false);
            for (_, exps) in h.terms.iter_mut() {
                let mut any_odd = false;
                for e in exps.iter_mut() {
                    if *e % 2 == 1 {
                        any_odd = true;
                    }
                }
                if !any_odd && comp_dims > 0 {
                    exps[0] += 1;
                }
            }
            vec![(g, h)]
        }
        SeparableStructure::GeneralSum => (0..k)
            .map(|_| {
                (
                    random_poly(&mut rng, max_deg.max(1)),
                    random_complement_poly(&mut rng, comp_dims, max_deg, false),
                )
            })
            .collect(),
    };
    let marginals = (0..m)
        .map(|i| crate::space::Marginal::uniform(format!("x{}", i + 1), -1.0, 1.0).unwrap())
        .collect();
    let space = InputSpace::new(marginals)?;
    Ok((SeparableSpec { m, feature, structure, terms }, space))
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub mu_ice: f64,
    pub i_pdp: f64,
    /// `mu_ice - i_pdp` on the primary seed.
    pub gap: f64,
    /// Three seed-replication standard deviations of the gap.
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `mu_ice >= i_pdp - tolerance` on shared samples, with the
/// tolerance calibrated as three standard deviations of the gap across
/// seed replicates.
pub fn check_inequality(
    ev: &dyn Evaluator,
    space: &InputSpace,
    j: usize,
    n_mc: usize,
    k_grid: usize,
    seed: u64,
    replicates: usize,
) -> Result<InequalityCheck> {
    let replicates = replicates.max(2);
    let grid = crate::sampling::feature_grid(space, j, k_grid, GridScheme::Quantile)?;
    let mut gaps = Vec::with_capacity(replicates);
    let mut primary = None;
    for rep in 0..replicates {
        let sample = draw_iid(space, n_mc, seed.wrapping_add(rep as u64), streams::ICE_COMPLEMENT)?;
        let ens = compute_ice_with_sample(ev, space, j, &grid, &sample)?;
        let ip = i_pdp(&ens)?;
        let (mu, _) = mu_sigma_ice(&ice_importances(&ens)?)?;
        gaps.push(mu - ip);
        if rep == 0 {
            primary = Some((mu, ip));
        }
    }
    let (mu_ice, ipdp) = primary.expect("at least one replicate");
    let tolerance = 3.0 * crate::stats::pairwise_std(&gaps);
    let gap = gaps[0];
    Ok(InequalityCheck { mu_ice, i_pdp: ipdp, gap, tolerance, pass: gap >= -tolerance })
}

/// Semidefinite-tolerant Cholesky: pivots in `[-1e-10, 0]` are clamped to
/// zero; anything more negative rejects the matrix.
fn psd_cholesky(a: &ArrayView2<'_, f64>) -> Result<Vec<Vec<f64>>> {
    let k = a.nrows();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for t in 0..j {
                s -= l[i][t] * l[j][t];
            }
            if i == j {
                if s < -1e-10 {
                    return Err(CoreError::NotPositiveSemidefinite { index: i, pivot: s });
                }
                l[i][i] = s.max(0.0).sqrt();
            } else if l[j][j] > 0.0 {
                l[i][j] = s / l[j][j];
            } else {
                l[i][j] = 0.0;
            }
        }
    }
    Ok(l)
}

/// Verifies the Jensen-type bound `E[sqrt(z' A z)] >= sqrt(zbar' A zbar)`
/// for a symmetric PSD matrix over a sample of vectors.
pub fn jensen_psd_check(a: &ArrayView2<'_, f64>, z: &ArrayView2<'_, f64>) -> Result<bool> {
    if a.nrows() != a.ncols() {
        return Err(CoreError::InvalidParameter("matrix must be square".into()));
    }
    if z.ncols() != a.nrows() {
        return Err(CoreError::DimensionMismatch { expected: a.nrows(), got: z.ncols() });
    }
    for i in 0..a.nrows() {
        for j in 0..i {
            if (a[[i, j]] - a[[j, i]]).abs() > 1e-10 * a[[i, i]].abs().max(1.0) {
                return Err(CoreError::InvalidParameter("matrix must be symmetric".into()));
            }
        }
    }
    psd_cholesky(a)?;
    let quad = |v: &[f64]| -> f64 {
        let k = a.nrows();
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                acc += v[i] * a[[i, j]] * v[j];
            }
        }
        acc.max(0.0)
    };
    let n = z.nrows();
    let mut mean_sqrt = 0.0;
    let mut zbar = vec![0.0; z.ncols()];
    for row in z.outer_iter() {
        let v: Vec<f64> = row.to_vec();
        mean_sqrt += quad(&v).sqrt();
        for (b, x) in zbar.iter_mut().zip(&v) {
            *b += x;
        }
    }
    mean_sqrt /= n as f64;
    for b in zbar.iter_mut() {
        *b /= n as f64;
    }
    Ok(mean_sqrt >= quad(&zbar).sqrt() - 1e-12)
}

/// Reference PDP by plain Monte Carlo at an independent, denser sample.
/// Implemented directly (no shared code with the production path) so it can
/// serve as a consistency oracle.
pub fn bruteforce_pdp(
    ev: &dyn Evaluator,
    space: &InputSpace,
    j: usize,
    grid: &FeatureGrid,
    n_dense: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_dense < 10 {
        return Err(CoreError::InvalidParameter("oracle needs n_dense >= 10".into()));
    }
    let m = space.dim();
    let sample = draw_iid(space, n_dense, seed, streams::ORACLE_DENSE)?;
    let mut pdp = vec![0.0; grid.len()];
    let mut pts = Array2::zeros((n_dense, m));
    for (k, g) in grid.values.iter().enumerate() {
        pts.assign(&sample.values);
        pts.column_mut(j).fill(*g);
        let out = ev.eval_unchecked(pts.view());
        pdp[k] = out.sum() / n_dense as f64;
    }
    Ok(pdp)
}

/// One trial record of the verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub structure: SeparableStructure,
    pub m: usize,
    pub feature: usize,
    pub seed: u64,
    pub mu_ice: f64,
    pub i_pdp: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// JSON-serializable outcome of a property suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub trials: Vec<TrialRecord>,
    pub passed: usize,
    pub failed: usize,
}

/// Runs `trials` random separable functions (cycling the four structures,
/// m in 2..=6) through [`check_inequality`].
pub fn run_separable_suite(trials: usize, n_mc: usize, k_grid: usize, seed: u64) -> Result<VerificationReport> {
    let mut records = Vec::with_capacity(trials);
    for t in 0..trials {
        let structure = SeparableStructure::ALL[t % 4];
        let m = 2 + (t / 4) % 5;
        let fn_seed = seed.wrapping_add(t as u64);
        let (spec, space) = random_separable(m, 1 + t % 3, 4, structure, fn_seed)?;
        let feature = spec.feature;
        let ev = spec.evaluator();
        let check = check_inequality(&ev, &space, feature, n_mc, k_grid, fn_seed, 3)?;
        records.push(TrialRecord {
            trial: t,
            structure,
            m,
            feature,
            seed: fn_seed,
            mu_ice: check.mu_ice,
            i_pdp: check.i_pdp,
            gap: check.gap,
            tolerance: check.tolerance,
            pass: check.pass,
        });
    }
    let passed = records.iter().filter(|r| r.pass).count();
    let failed = records.len() - passed;
    Ok(VerificationReport { suite: "appendix".into(), trials: records, passed, failed })
}
