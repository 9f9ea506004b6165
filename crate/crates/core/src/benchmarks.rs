//! Analytical benchmark functions with their input spaces.

use crate::error::{CoreError, Result};
use crate::evaluator::Evaluator;
use crate::space::{InputSpace, Marginal};
use ndarray::{Array1, ArrayView2};
use std::fmt;
use std::str::FromStr;

/// Three-variable interaction benchmark on U(-1,1)^3:
/// `y = 0.2 x1 - 5 x2 + 10 x2 1{x3 >= 0}`.
///
/// The indicator uses the closed inequality, so `x3 = 0` counts as active.
/// The strong x2-x3 interaction makes the x2 and x3 PDPs nearly flat.
#[derive(Debug, Clone, Copy)]
pub struct Goldstein3;

impl Evaluator for Goldstein3 {
    fn arity(&self) -> usize {
        3
    }

    fn eval_unchecked(&self, pts: ArrayView2<'_, f64>) -> Array1<f64> {
        Array1::from_iter(pts.outer_iter().map(|r| {
            let ind = if r[2] >= 0.0 { 1.0 } else { 0.0 };
            0.2 * r[0] - 5.0 * r[1] + 10.0 * r[1] * ind
        }))
    }
}

/// Five-variable Friedman benchmark on U(0,1)^5:
/// `y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 - 5 x5`.
#[derive(Debug, Clone, Copy)]
pub struct Friedman5;

impl Evaluator for Friedman5 {
    fn arity(&self) -> usize {
        5
    }

    fn eval_unchecked(&self, pts: ArrayView2<'_, f64>) -> Array1<f64> {
        Array1::from_iter(pts.outer_iter().map(|r| {
            10.0 * (std::f64::consts::PI * r[0] * r[1]).sin()
                + 20.0 * (r[2] - 0.5) * (r[2] - 0.5)
                + 10.0 * r[3]
                - 5.0 * r[4]
        }))
    }
}

/// Returns the 3-variable benchmark and its input space.
pub fn builtin_goldstein3() -> (Goldstein3, InputSpace) {
    let marginals = (1..=3)
        .map(|i| Marginal::uniform(format!("x{i}"), -1.0, 1.0).unwrap())
        .collect();
    (Goldstein3, InputSpace::new(marginals).unwrap())
}

/// Returns the 5-variable benchmark and its input space.
pub fn builtin_friedman5() -> (Friedman5, InputSpace) {
    let marginals = (1..=5)
        .map(|i| Marginal::uniform(format!("x{i}"), 0.0, 1.0).unwrap())
        .collect();
    (Friedman5, InputSpace::new(marginals).unwrap())
}

/// Named builtin benchmarks, as selectable from a run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Goldstein3,
    Friedman5,
}

impl Builtin {
    pub fn instantiate(&self) -> (Box<dyn Evaluator>, InputSpace) {
        match self {
            Builtin::Goldstein3 => {
                let (ev, space) = builtin_goldstein3();
                (Box::new(ev), space)
            }
            Builtin::Friedman5 => {
                let (ev, space) = builtin_friedman5();
                (Box::new(ev), space)
            }
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Goldstein3 => write!(f, "goldstein3"),
            Builtin::Friedman5 => write!(f, "friedman5"),
        }
    }
}

impl FromStr for Builtin {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "goldstein3" => Ok(Builtin::Goldstein3),
            "friedman5" => Ok(Builtin::Friedman5),
            other => Err(CoreError::InvalidParameter(format!(
                "unknown builtin '{other}' (expected goldstein3 or friedman5)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn goldstein_hand_values() {
        let (ev, _) = builtin_goldstein3();
        let pts = array![
            [0.0, 0.0, 0.0],
            [1.0, 1.0, 1.0],
            [0.5, 0.2, -0.3],
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 1.0],
        ];
        let y = ev.eval_batch(pts.view()).unwrap();
        assert_abs_diff_eq!(y[0], 0.0);
        assert_abs_diff_eq!(y[1], 5.2, epsilon = 1e-12);
        assert_abs_diff_eq!(y[2], -0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(y[3], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y[4], -0.2, epsilon = 1e-12);
    }

    #[test]
    fn friedman_hand_values() {
        let (ev, space) = builtin_friedman5();
        assert_eq!(space.dim(), 5);
        let pts = array![
            [0.5, 0.5, 0.5, 0.5, 0.5],
            [0.0, 0.0, 0.5, 0.0, 0.0],
            [1.0, 0.5, 0.5, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, 1.0],
        ];
        let y = ev.eval_batch(pts.view()).unwrap();
        assert_abs_diff_eq!(y[0], 10.0 * (std::f64::consts::PI / 4.0).sin() + 5.0 - 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(y[0], 9.5711, epsilon = 1e-4);
        assert_abs_diff_eq!(y[1], 0.0);
        assert_abs_diff_eq!(y[2], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y[3], 10.0, epsilon = 1e-12);
    }

    #[test]
    fn goldstein_indicator_sign_classes() {
        let (ev, _) = builtin_goldstein3();
        // Invariant to x3 except through the sign class of x3.
        let pts = array![
            [0.3, -0.7, 0.1],
            [0.3, -0.7, 0.9],
            [0.3, -0.7, 0.0],
            [0.3, -0.7, -0.4],
            [0.3, -0.7, -1.0],
        ];
        let y = ev.eval_batch(pts.view()).unwrap();
        assert_eq!(y[0], y[1]);
        assert_eq!(y[0], y[2]);
        assert_eq!(y[3], y[4]);
        assert!(y[0] != y[3]);
    }

    #[test]
    fn friedman_additive_at_x1_zero() {
        // With x1 = 0 the sine term vanishes, leaving an additive function.
        let (ev, _) = builtin_friedman5();
        let base = array![[0.0, 0.3, 0.2, 0.6, 0.1]];
        let dx3 = array![[0.0, 0.3, 0.7, 0.6, 0.1]];
        let dx4 = array![[0.0, 0.3, 0.2, 0.9, 0.1]];
        let both = array![[0.0, 0.3, 0.7, 0.9, 0.1]];
        let f = |p: &ndarray::Array2<f64>| ev.eval_batch(p.view()).unwrap()[0];
        assert_abs_diff_eq!(
            f(&both) - f(&base),
            (f(&dx3) - f(&base)) + (f(&dx4) - f(&base)),
            epsilon = 1e-12
        );
    }

    #[test]
    fn builtin_parse_roundtrip() {
        assert_eq!("goldstein3".parse::<Builtin>().unwrap(), Builtin::Goldstein3);
        assert_eq!("friedman5".parse::<Builtin>().unwrap(), Builtin::Friedman5);
        assert!("nope".parse::<Builtin>().is_err());
    }
}
