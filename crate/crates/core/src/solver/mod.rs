//! Fixed-point iteration machinery.
//!
//! A solve is a [`ResidualFunction`] plus an [`IterationMethod`] driven by
//! [`fixed_point_solve`]. Methods are registered by name in a
//! [`MethodRegistry`]: the fractional pseudo-Newton step (`"fpn"`) and a
//! classical Newton baseline with a finite-difference Jacobian (`"newton"`).

mod aitken;
mod driver;
mod jacobian;
mod method;
mod order;
mod settings;
mod sweep;

use thiserror::Error;

pub use aitken::{aitken_accelerate, AITKEN_DENOMINATOR_FLOOR};
pub use driver::{fixed_point_solve, solve_fpn, IterationTrace, SolveOutcome, SolveStatus};
pub use jacobian::{default_step, fd_jacobian};
pub use method::{
    fpn_step, fpn_step_with, newton_step, ClassicalNewton, FractionalPseudoNewton,
    IterationMethod, MethodFactory, MethodRegistry, StepError,
};
pub use order::{estimate_order, OrderError};
pub use settings::{SettingsError, SolverSettings};
pub use sweep::{
    alpha_sweep, alpha_sweep_with, default_grid, grid_with_step, Root, RootSet, SkippedAlpha,
    DEFAULT_DEDUP_TOLERANCE, DEFAULT_GRID_STEP, INTEGER_BAND,
};

/// Why a residual could not be evaluated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvaluationError {
    #[error("non-real evaluation: {0}")]
    NonReal(String),
    #[error("degenerate evaluation: {0}")]
    Degenerate(String),
    #[error("residual has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `f: ℝⁿ → ℝⁿ`. Must be deterministic.
pub trait ResidualFunction: Sync {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvaluationError>;
}

impl<F> ResidualFunction for F
where
    F: Fn(&[f64]) -> Result<Vec<f64>, EvaluationError> + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvaluationError> {
        self(x)
    }
}

/// Adapter for residuals that cannot fail.
pub struct Infallible<F>(pub F);

impl<F> ResidualFunction for Infallible<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvaluationError> {
        Ok((self.0)(x))
    }
}

/// Evaluates `f` and checks the output length.
pub(crate) fn evaluate_checked(
    f: &dyn ResidualFunction,
    x: &[f64],
) -> Result<Vec<f64>, EvaluationError> {
    let fx = f.evaluate(x)?;
    if fx.len() != x.len() {
        return Err(EvaluationError::DimensionMismatch { expected: x.len(), got: fx.len() });
    }
    Ok(fx)
}

/// Euclidean norm.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `‖a − b‖₂`.
pub fn distance2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
