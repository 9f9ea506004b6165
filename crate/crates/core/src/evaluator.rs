//! The black-box evaluator contract.

use crate::error::{CoreError, Result};
use ndarray::{Array1, ArrayView1, ArrayView2};

/// A pure, deterministic mapping from batches of points to scalar outputs.
///
/// Implementations must be row-order independent: evaluating a permuted
/// batch yields the permuted outputs. Evaluators are stateless and safe to
/// call concurrently.
pub trait Evaluator: Sync + Send {
    /// Number of input columns the evaluator expects.
    fn arity(&self) -> usize;

    /// Row-wise evaluation without precondition checks. Callers are expected
    /// to have validated shape and finiteness.
    fn eval_unchecked(&self, pts: ArrayView2<'_, f64>) -> Array1<f64>;

    /// Validated batch evaluation: checks arity, input finiteness, and that
    /// every output is finite.
    fn eval_batch(&self, pts: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if pts.ncols() != self.arity() {
            return Err(CoreError::DimensionMismatch {
                expected: self.arity(),
                got: pts.ncols(),
            });
        }
        for (row, r) in pts.outer_iter().enumerate() {
            for (col, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(CoreError::NonFiniteInput { row, col });
                }
            }
        }
        let out = self.eval_unchecked(pts);
        if let Some(row) = out.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::EvaluatorFailure { instance: row, grid: 0 });
        }
        Ok(out)
    }
}

/// Adapts a closure over a single point into an [`Evaluator`].
pub struct FnEvaluator<F> {
    arity: usize,
    f: F,
}

impl<F> FnEvaluator<F>
where
    F: Fn(ArrayView1<'_, f64>) -> f64 + Sync + Send,
{
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<F> Evaluator for FnEvaluator<F>
where
    F: Fn(ArrayView1<'_, f64>) -> f64 + Sync + Send,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval_unchecked(&self, pts: ArrayView2<'_, f64>) -> Array1<f64> {
        Array1::from_iter(pts.outer_iter().map(|row| (self.f)(row)))
    }
}

impl Evaluator for Box<dyn Evaluator> {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn eval_unchecked(&self, pts: ArrayView2<'_, f64>) -> Array1<f64> {
        (**self).eval_unchecked(pts)
    }
}
