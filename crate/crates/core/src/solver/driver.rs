use std::fmt;

use serde::{Deserialize, Serialize};

use super::aitken::aitken_accelerate;
use super::method::{FractionalPseudoNewton, IterationMethod};
use super::{distance2, evaluate_checked, norm2, ResidualFunction, SettingsError, SolverSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
    EvaluationFailed,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIterations => "MaxIterations",
            SolveStatus::Diverged => "Diverged",
            SolveStatus::EvaluationFailed => "EvaluationFailed",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accepted iterates `x₀ … xₙ` with their norms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iterates: Vec<Vec<f64>>,
    /// `‖xᵢ − xᵢ₋₁‖₂`, one shorter than `iterates`.
    pub step_norms: Vec<f64>,
    /// `‖f(xᵢ)‖₂`, same length as `iterates`.
    pub residual_norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Last accepted iterate.
    pub x_final: Vec<f64>,
    /// Steps taken.
    pub iterations: usize,
    /// `NaN` if no step was taken.
    pub final_step_norm: f64,
    /// `NaN` if `f(x₀)` could not be evaluated.
    pub final_residual_norm: f64,
    /// Reason for a non-converged status.
    pub message: Option<String>,
    pub trace: Option<IterationTrace>,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

struct Recorder {
    trace: Option<IterationTrace>,
}

impl Recorder {
    fn push(&mut self, x: &[f64], step_norm: Option<f64>, residual_norm: f64) {
        if let Some(trace) = self.trace.as_mut() {
            trace.iterates.push(x.to_vec());
            if let Some(s) = step_norm {
                trace.step_norms.push(s);
            }
            trace.residual_norms.push(residual_norm);
        }
    }
}

/// Runs `xᵢ₊₁ = Φ(xᵢ)` until both tolerances hold or a guard trips.
///
/// The outcome status encodes every failure mode; only invalid settings are
/// an `Err`.
pub fn fixed_point_solve(
    method: &dyn IterationMethod,
    f: &dyn ResidualFunction,
    x0: &[f64],
    settings: &SolverSettings,
) -> Result<SolveOutcome, SettingsError> {
    settings.validate()?;
    let mut recorder = Recorder { trace: settings.record_trace.then(IterationTrace::default) };

    let finish = |status, x: Vec<f64>, iterations, step, residual, message, recorder: Recorder| {
        SolveOutcome {
            status,
            x_final: x,
            iterations,
            final_step_norm: step,
            final_residual_norm: residual,
            message,
            trace: recorder.trace,
        }
    };

    let mut x = x0.to_vec();
    let x0_norm = norm2(&x);
    if !(x0_norm <= settings.divergence_bound) {
        let message = format!("‖x₀‖₂ = {x0_norm:e} exceeds divergence bound");
        return Ok(finish(SolveStatus::Diverged, x, 0, f64::NAN, f64::NAN, Some(message), recorder));
    }
    let mut fx = match evaluate_checked(f, &x) {
        Ok(v) => v,
        Err(e) => {
            let message = Some(e.to_string());
            return Ok(finish(SolveStatus::EvaluationFailed, x, 0, f64::NAN, f64::NAN, message, recorder));
        }
    };
    let mut residual = norm2(&fx);
    let mut step_norm = f64::NAN;
    recorder.push(&x, None, residual);

    let mut window: Vec<Vec<f64>> = vec![x.clone()];
    for iteration in 1..=settings.max_iter {
        let mut next = match method.step(f, &x, &fx) {
            Ok(v) => v,
            Err(e) => {
                let message = Some(e.to_string());
                return Ok(finish(
                    SolveStatus::EvaluationFailed,
                    x,
                    iteration - 1,
                    step_norm,
                    residual,
                    message,
                    recorder,
                ));
            }
        };
        if settings.aitken {
            window.push(next.clone());
            if window.len() == 3 {
                next = aitken_accelerate(&window[0], &window[1], &window[2]);
                window.clear();
                window.push(next.clone());
            }
        }

        let next_norm = norm2(&next);
        if !(next_norm <= settings.divergence_bound) {
            let message = format!("‖x‖₂ = {next_norm:e} exceeds divergence bound at step {iteration}");
            return Ok(finish(
                SolveStatus::Diverged,
                x,
                iteration - 1,
                step_norm,
                residual,
                Some(message),
                recorder,
            ));
        }
        let next_fx = match evaluate_checked(f, &next) {
            Ok(v) => v,
            Err(e) => {
                let message = Some(format!("{e} at step {iteration}"));
                return Ok(finish(
                    SolveStatus::EvaluationFailed,
                    x,
                    iteration - 1,
                    step_norm,
                    residual,
                    message,
                    recorder,
                ));
            }
        };

        step_norm = distance2(&next, &x);
        residual = norm2(&next_fx);
        x = next;
        fx = next_fx;
        recorder.push(&x, Some(step_norm), residual);

        if settings.is_converged(step_norm, residual) {
            return Ok(finish(SolveStatus::Converged, x, iteration, step_norm, residual, None, recorder));
        }
    }

    let message = Some(format!("no convergence within {} iterations", settings.max_iter));
    Ok(finish(
        SolveStatus::MaxIterations,
        x,
        settings.max_iter,
        step_norm,
        residual,
        message,
        recorder,
    ))
}

/// Fractional pseudo-Newton solve with the default kernel.
pub fn solve_fpn(
    f: &dyn ResidualFunction,
    x0: &[f64],
    settings: &SolverSettings,
) -> Result<SolveOutcome, SettingsError> {
    let method = FractionalPseudoNewton::new(settings.alpha, settings.epsilon);
    fixed_point_solve(&method, f, x0, settings)
}
