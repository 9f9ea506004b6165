//! Input spaces: independent marginal distributions with an anchor point.

use crate::error::{CoreError, Result};
use crate::stats::quantile_sorted;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Distribution family of a single input variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, std: f64 },
    /// Data-driven marginal backed by a sorted sample; quantiles interpolate
    /// the order statistics linearly.
    Empirical { values: Vec<f64> },
}

/// One named input variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    name: String,
    family: Family,
}

impl Marginal {
    pub fn uniform(name: impl Into<String>, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CoreError::InvalidParameter(format!(
                "uniform marginal requires finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { name: name.into(), family: Family::Uniform { lo, hi } })
    }

    pub fn gaussian(name: impl Into<String>, mean: f64, std: f64) -> Result<Self> {
        if !(mean.is_finite() && std.is_finite() && std > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "gaussian marginal requires finite mean and std > 0, got ({mean}, {std})"
            )));
        }
        Ok(Self { name: name.into(), family: Family::Gaussian { mean, std } })
    }

    pub fn empirical(name: impl Into<String>, mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "empirical marginal sample contains non-finite values".into(),
            ));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        let distinct = values.windows(2).filter(|w| w[0] != w[1]).count() + 1;
        if values.len() < 2 || distinct < 2 {
            return Err(CoreError::InvalidParameter(
                "empirical marginal requires at least 2 distinct sample values".into(),
            ));
        }
        Ok(Self { name: name.into(), family: Family::Empirical { values } })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Quantile function; `p` is clamped to `[0, 1]`. Monotone non-decreasing.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match &self.family {
            Family::Uniform { lo, hi } => lo + p * (hi - lo),
            Family::Gaussian { mean, std } => {
                // Normal::inverse_cdf returns +-inf at the endpoints; callers
                // sample p strictly inside (0, 1).
                let n = Normal::new(*mean, *std).expect("validated at construction");
                n.inverse_cdf(p)
            }
            Family::Empirical { values } => quantile_sorted(values, p),
        }
    }

    /// Distribution mean (sample mean for empirical marginals).
    pub fn mean(&self) -> f64 {
        match &self.family {
            Family::Uniform { lo, hi } => 0.5 * (lo + hi),
            Family::Gaussian { mean, .. } => *mean,
            Family::Empirical { values } => crate::stats::mean(values),
        }
    }

    /// Support bounds; gaussian marginals are unbounded.
    pub fn support(&self) -> (f64, f64) {
        match &self.family {
            Family::Uniform { lo, hi } => (*lo, *hi),
            Family::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Empirical { values } => (values[0], *values.last().unwrap()),
        }
    }

    pub fn is_bounded(&self) -> bool {
        let (lo, hi) = self.support();
        lo.is_finite() && hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x >= lo && x <= hi
    }
}

/// Ordered list of independent marginals plus an anchor point.
///
/// The joint density is the product of the marginals; the anchor defaults to
/// the vector of per-marginal means and is the reference point used when
/// centering ICE curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpace {
    marginals: Vec<Marginal>,
    anchor: Vec<f64>,
}

impl InputSpace {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(CoreError::InvalidParameter(
                "input space requires at least one marginal".into(),
            ));
        }
        let anchor = marginals.iter().map(Marginal::mean).collect();
        Ok(Self { marginals, anchor })
    }

    pub fn with_anchor(mut self, anchor: Vec<f64>) -> Result<Self> {
        if anchor.len() != self.marginals.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.marginals.len(),
                got: anchor.len(),
            });
        }
        for (j, (a, marg)) in anchor.iter().zip(&self.marginals).enumerate() {
            if !a.is_finite() || !marg.contains(*a) {
                return Err(CoreError::InvalidParameter(format!(
                    "anchor[{j}] = {a} outside the support of marginal '{}'",
                    marg.name()
                )));
            }
        }
        self.anchor = anchor;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn marginal(&self, j: usize) -> &Marginal {
        &self.marginals[j]
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn names(&self) -> Vec<String> {
        self.marginals.iter().map(|m| m.name().to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_quantile_affine() {
        let m = Marginal::uniform("x", -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(m.quantile(0.5), 0.0);
        assert_abs_diff_eq!(m.quantile(0.0), -1.0);
        assert_abs_diff_eq!(m.quantile(1.0), 1.0);
        assert!(m.contains(m.quantile(0.5)));
    }

    #[test]
    fn gaussian_quantile_symmetry() {
        let m = Marginal::gaussian("g", 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(m.quantile(0.5), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.quantile(5.0 / 6.0), 0.967_421_566_101_7, epsilon = 1e-7);
        assert_abs_diff_eq!(m.quantile(1.0 / 6.0), -m.quantile(5.0 / 6.0), epsilon = 1e-9);
    }

    #[test]
    fn quantile_monotone() {
        let samples = vec![3.0, 1.0, 2.0, 2.0, 5.0];
        let m = Marginal::empirical("e", samples).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=20 {
            let q = m.quantile(k as f64 / 20.0);
            assert!(q >= prev);
            prev = q;
        }
        assert_abs_diff_eq!(m.mean(), 13.0 / 5.0);
    }

    #[test]
    fn invalid_marginals_rejected() {
        assert!(Marginal::uniform("x", 1.0, 1.0).is_err());
        assert!(Marginal::gaussian("x", 0.0, 0.0).is_err());
        assert!(Marginal::empirical("x", vec![2.0, 2.0]).is_err());
        assert!(Marginal::empirical("x", vec![2.0]).is_err());
    }

    #[test]
    fn anchor_defaults_to_means() {
        let space = InputSpace::new(vec![
            Marginal::uniform("a", 0.0, 1.0).unwrap(),
            Marginal::gaussian("b", 2.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(space.anchor(), &[0.5, 2.0]);
        assert!(space.clone().with_anchor(vec![2.0, 0.0]).is_err());
        assert!(space.with_anchor(vec![0.25, -3.0]).is_ok());
    }
}
