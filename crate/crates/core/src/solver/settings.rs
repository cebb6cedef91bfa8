use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::FractionalOrder;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SettingsError {
    #[error("{name} must be finite and strictly positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("max_iter must be at least 1")]
    ZeroIterations,
}

/// Everything the driver needs besides the residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub alpha: FractionalOrder,
    pub epsilon: f64,
    /// Threshold on `‖xₙ − xₙ₋₁‖₂`.
    pub tol_step: f64,
    /// Threshold on `‖f(xₙ)‖₂`.
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Abort when `‖xᵢ‖₂` exceeds this.
    pub divergence_bound: f64,
    /// Restarted Δ² extrapolation every three iterates.
    pub aitken: bool,
    pub record_trace: bool,
}

impl SolverSettings {
    pub const DEFAULT_EPSILON: f64 = 1e-4;
    pub const DEFAULT_TOL_STEP: f64 = 1e-5;
    pub const DEFAULT_TOL_RESIDUAL: f64 = 1e-4;
    pub const DEFAULT_MAX_ITER: usize = 500;
    pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e10;

    pub fn new(alpha: FractionalOrder) -> Self {
        Self {
            alpha,
            epsilon: Self::DEFAULT_EPSILON,
            tol_step: Self::DEFAULT_TOL_STEP,
            tol_residual: Self::DEFAULT_TOL_RESIDUAL,
            max_iter: Self::DEFAULT_MAX_ITER,
            divergence_bound: Self::DEFAULT_DIVERGENCE_BOUND,
            aitken: false,
            record_trace: false,
        }
    }

    pub fn with_alpha(&self, alpha: FractionalOrder) -> Self {
        Self { alpha, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), SettingsError> {
        let positive = [
            ("epsilon", self.epsilon),
            ("tol_step", self.tol_step),
            ("tol_residual", self.tol_residual),
            ("divergence_bound", self.divergence_bound),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(SettingsError::NotPositive { name, value });
            }
        }
        if self.max_iter == 0 {
            return Err(SettingsError::ZeroIterations);
        }
        Ok(())
    }

    /// Both stopping predicates.
    pub fn is_converged(&self, step_norm: f64, residual_norm: f64) -> bool {
        step_norm <= self.tol_step && residual_norm <= self.tol_residual
    }
}
