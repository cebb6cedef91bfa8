//! Expansion and closing thresholds of the Dixit-Pindyck investment model.
//!
//! The four-equation system in `(H, L, A, B)` is reduced to two equations in
//! `(H, L)`; `A` and `B` follow by back-substitution. The reduced residual is
//! expressed in the units of the four-equation system, i.e. each component is
//! multiplied through by `a₅`:
//!
//! ```text
//! f₁ = a₅ x₁ − a₆ + a₅ N₁ / D
//! f₂ = a₅ x₂ − a₇ + a₅ N₂ / D
//! D  = a₁ a₂ (x₁^(a₃+a₄) − x₂^(a₃+a₄))
//! N₁ = a₁ x₁^a₂ (x₂^a₃ − x₁^a₃) + a₂ x₁ x₂^a₃ (x₁^a₄ − x₂^a₄)
//! N₂ = a₁ x₂^a₂ (x₂^a₃ − x₁^a₃) + a₂ x₁^a₃ x₂ (x₁^a₄ − x₂^a₄)
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::{
    fixed_point_solve, norm2, EvaluationError, FractionalPseudoNewton, IterationMethod,
    ResidualFunction, SettingsError, SolveOutcome, SolverSettings,
};

/// `|x₁^(a₃+a₄) − x₂^(a₃+a₄)|` below this is a degenerate threshold pair.
pub const DEGENERACY_FLOOR: f64 = 1e-30;

/// Tolerance on the structural identities of directly supplied constants.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid economic primitives: {0}")]
    InvalidPrimitives(String),
    #[error("invalid model constants: {0}")]
    InvalidConstants(String),
    #[error("non-real evaluation: {0}")]
    NonRealEvaluation(String),
    #[error("degenerate thresholds: x₁^(a₃+a₄) and x₂^(a₃+a₄) coincide at ({0}, {1})")]
    DegenerateThresholds(f64, f64),
    #[error("threshold solve did not converge: {}", .0.status)]
    NotConverged(Box<SolveOutcome>),
    #[error(transparent)]
    Settings(#[from] SettingsError),
}

impl From<ModelError> for EvaluationError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonRealEvaluation(msg) => EvaluationError::NonReal(msg),
            other => EvaluationError::Degenerate(other.to_string()),
        }
    }
}

/// Income process and cost parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconomicPrimitives {
    /// Mean growth rate of income.
    pub mu: f64,
    /// Income volatility.
    pub sigma: f64,
    /// Long-run real interest rate.
    pub l: f64,
    /// Annual production cost.
    pub c: f64,
    /// Sunk cost of expanding.
    pub kappa: f64,
    /// Cost of reducing or closing.
    pub chi: f64,
}

impl EconomicPrimitives {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("mu", self.mu),
            ("sigma", self.sigma),
            ("l", self.l),
            ("c", self.c),
            ("kappa", self.kappa),
            ("chi", self.chi),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ModelError::InvalidPrimitives(format!("{name} is not finite")));
        }
        let bad = |msg: &str| Err(ModelError::InvalidPrimitives(msg.to_string()));
        if self.sigma <= 0.0 {
            return bad("sigma must be positive");
        }
        if self.l <= 0.0 {
            return bad("l must be positive");
        }
        if self.l <= self.mu {
            return bad("l must exceed mu");
        }
        if self.c < 0.0 || self.kappa < 0.0 || self.chi < 0.0 {
            return bad("c, kappa and chi must be non-negative");
        }
        Ok(())
    }
}

/// `a₁ … a₇` and `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub a7: f64,
    pub rho: f64,
}

impl ModelConstants {
    /// Published structural constants (`a₁ … a₅`) of the worked example, with
    /// scenario-specific `a₆`, `a₇`.
    pub fn reference(a6: f64, a7: f64) -> Self {
        Self::from_direct([0.5355, 1.5808, 1.5355, 0.5808, 18.9753, a6, a7])
            .expect("reference constants are valid")
    }

    /// Accepts `a₁ … a₇` directly; `ρ = (a₁ + a₂) / 2`.
    pub fn from_direct(a: [f64; 7]) -> Result<Self, ModelError> {
        let [a1, a2, a3, a4, a5, a6, a7] = a;
        if let Some(i) = a.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::InvalidConstants(format!("a{} is not finite", i + 1)));
        }
        let bad = |msg: String| Err(ModelError::InvalidConstants(msg));
        if a1 <= 0.0 || a2 <= 0.0 {
            return bad("a1 and a2 must be positive".into());
        }
        if a5 <= 0.0 {
            return bad("a5 must be positive".into());
        }
        if (a3 - a1 - 1.0).abs() > IDENTITY_TOLERANCE {
            return bad(format!("a3 - a1 = {} (expected 1)", a3 - a1));
        }
        if (a2 - a4 - 1.0).abs() > IDENTITY_TOLERANCE {
            return bad(format!("a2 - a4 = {} (expected 1)", a2 - a4));
        }
        Ok(Self { a1, a2, a3, a4, a5, a6, a7, rho: 0.5 * (a1 + a2) })
    }

    /// Constants from the economic primitives.
    pub fn derive(p: &EconomicPrimitives) -> Result<Self, ModelError> {
        p.validate()?;
        let drift = p.mu / (p.sigma * p.sigma);
        let rho = ((drift - 0.5).powi(2) + 2.0 * p.l / (p.sigma * p.sigma)).sqrt();
        let base = p.c / p.l;
        Ok(Self {
            a1: drift - 0.5 + rho,
            a2: -drift + 0.5 + rho,
            a3: drift + 0.5 + rho,
            a4: -drift - 0.5 + rho,
            a5: 1.0 / (p.l - p.mu),
            a6: base + p.kappa,
            a7: base - p.chi,
            rho,
        })
    }

    /// Copy with a different scenario pair.
    pub fn with_scenario(self, a6: f64, a7: f64) -> Self {
        Self { a6, a7, ..self }
    }
}

pub fn derive_constants(p: &EconomicPrimitives) -> Result<ModelConstants, ModelError> {
    ModelConstants::derive(p)
}

fn check_positive(x: &[f64]) -> Result<(), ModelError> {
    if let Some(i) = x.iter().position(|v| !(*v > 0.0)) {
        return Err(ModelError::NonRealEvaluation(format!(
            "component {} = {} is not positive",
            i + 1,
            x[i]
        )));
    }
    Ok(())
}

/// Shared powers at one `(x₁, x₂)`.
struct Powers {
    x1: f64,
    x2: f64,
    x1_a3: f64,
    x2_a3: f64,
    x1_a4: f64,
    x2_a4: f64,
    /// `x₁^(a₃+a₄) − x₂^(a₃+a₄)`
    gap: f64,
}

impl Powers {
    fn new(k: &ModelConstants, x1: f64, x2: f64) -> Result<Self, ModelError> {
        check_positive(&[x1, x2])?;
        let s = k.a3 + k.a4;
        let gap = x1.powf(s) - x2.powf(s);
        if !(gap.abs() >= DEGENERACY_FLOOR) {
            return Err(ModelError::DegenerateThresholds(x1, x2));
        }
        Ok(Self {
            x1,
            x2,
            x1_a3: x1.powf(k.a3),
            x2_a3: x2.powf(k.a3),
            x1_a4: x1.powf(k.a4),
            x2_a4: x2.powf(k.a4),
            gap,
        })
    }
}

/// Two-variable residual of the reduced system (scaled by `a₅`).
pub fn reduced_residual(k: &ModelConstants, x: [f64; 2]) -> Result<[f64; 2], ModelError> {
    let p = Powers::new(k, x[0], x[1])?;
    let denominator = k.a1 * k.a2 * p.gap;
    let spread_a3 = p.x2_a3 - p.x1_a3;
    let spread_a4 = p.x1_a4 - p.x2_a4;
    let n1 = k.a1 * p.x1.powf(k.a2) * spread_a3 + k.a2 * p.x1 * p.x2_a3 * spread_a4;
    let n2 = k.a1 * p.x2.powf(k.a2) * spread_a3 + k.a2 * p.x1_a3 * p.x2 * spread_a4;
    let f1 = p.x1 - k.a6 / k.a5 + n1 / denominator;
    let f2 = p.x2 - k.a7 / k.a5 + n2 / denominator;
    Ok([k.a5 * f1, k.a5 * f2])
}

/// `(A, B)` from the thresholds.
pub fn back_substitute(k: &ModelConstants, x: [f64; 2]) -> Result<(f64, f64), ModelError> {
    let p = Powers::new(k, x[0], x[1])?;
    let a = k.a5 * (p.x1_a3 - p.x2_a3) / (k.a2 * p.gap);
    let b = k.a5 * (p.x1 * p.x2).powf(k.a3) * (p.x1_a4 - p.x2_a4) / (k.a1 * p.gap);
    Ok((a, b))
}

/// The four equations in `(H, L, A, B)`.
pub fn full_residual(k: &ModelConstants, h: f64, l: f64, a: f64, b: f64) -> Result<[f64; 4], ModelError> {
    check_positive(&[h, l])?;
    Ok([
        k.a5 * h + b * h.powf(-k.a1) - a * h.powf(k.a2) - k.a6,
        -k.a1 * b * h.powf(-k.a3) - k.a2 * a * h.powf(k.a4) + k.a5,
        k.a5 * l + b * l.powf(-k.a1) - a * l.powf(k.a2) - k.a7,
        -k.a1 * b * l.powf(-k.a3) - k.a2 * a * l.powf(k.a4) + k.a5,
    ])
}

/// `‖r‖₂ / (1 + |a₆| + |a₇| + 2|a₅| max(H, L))`.
pub fn relative_full_residual(k: &ModelConstants, residual: &[f64; 4], h: f64, l: f64) -> f64 {
    norm2(residual) / (1.0 + k.a6.abs() + k.a7.abs() + 2.0 * k.a5.abs() * h.max(l))
}

/// [`reduced_residual`] as a solver residual.
#[derive(Debug, Clone, Copy)]
pub struct ReducedSystem {
    pub constants: ModelConstants,
}

impl ResidualFunction for ReducedSystem {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvaluationError> {
        if x.len() != 2 {
            return Err(EvaluationError::DimensionMismatch { expected: 2, got: x.len() });
        }
        Ok(reduced_residual(&self.constants, [x[0], x[1]])?.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProblem {
    pub constants: ModelConstants,
    /// `(H₀, L₀)`
    pub x0: [f64; 2],
}

impl ThresholdProblem {
    pub fn new(constants: ModelConstants, x0: [f64; 2]) -> Result<Self, ModelError> {
        if !(constants.a6 > constants.a7) {
            return Err(ModelError::InvalidConstants(format!(
                "a6 ({}) must exceed a7 ({})",
                constants.a6, constants.a7
            )));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidConstants("initial condition is not finite".into()));
        }
        Ok(Self { constants, x0 })
    }

    pub fn residual(&self) -> ReducedSystem {
        ReducedSystem { constants: self.constants }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSolution {
    /// Expansion threshold.
    pub h: f64,
    /// Closing threshold.
    pub l: f64,
    pub a: f64,
    pub b: f64,
    pub reduced_residual_norm: f64,
    pub full_residual_norm: f64,
    /// Normalized full residual, see [`relative_full_residual`].
    pub relative_full_residual: f64,
    /// The iteration converged with `x₁ < x₂` and was relabeled.
    pub swapped: bool,
    pub outcome: SolveOutcome,
}

/// Fractional pseudo-Newton solve of the reduced system with the default kernel.
pub fn solve_thresholds(
    problem: &ThresholdProblem,
    settings: &SolverSettings,
) -> Result<ThresholdSolution, ModelError> {
    let method = FractionalPseudoNewton::new(settings.alpha, settings.epsilon);
    solve_thresholds_with(&method, problem, settings)
}

/// Solve with any iteration method, then back-substitute and verify.
pub fn solve_thresholds_with(
    method: &dyn IterationMethod,
    problem: &ThresholdProblem,
    settings: &SolverSettings,
) -> Result<ThresholdSolution, ModelError> {
    let residual = problem.residual();
    let outcome = fixed_point_solve(method, &residual, &problem.x0, settings)?;
    if !outcome.converged() {
        return Err(ModelError::NotConverged(Box::new(outcome)));
    }
    let k = &problem.constants;
    let (x1, x2) = (outcome.x_final[0], outcome.x_final[1]);
    let swapped = x1 < x2;
    let (h, l) = if swapped { (x2, x1) } else { (x1, x2) };
    let (a, b) = back_substitute(k, [h, l])?;
    let reduced = reduced_residual(k, [h, l])?;
    let full = full_residual(k, h, l, a, b)?;
    Ok(ThresholdSolution {
        h,
        l,
        a,
        b,
        reduced_residual_norm: norm2(&reduced),
        full_residual_norm: norm2(&full),
        relative_full_residual: relative_full_residual(k, &full, h, l),
        swapped,
        outcome,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Expand,
    Continue,
    ReduceOrClose,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Expand => "expand",
            Decision::Continue => "continue",
            Decision::ReduceOrClose => "reduce-or-close",
        })
    }
}

/// Both thresholds are inclusive triggers.
pub fn classify_income(income: f64, solution: &ThresholdSolution) -> Decision {
    if income >= solution.h {
        Decision::Expand
    } else if income <= solution.l {
        Decision::ReduceOrClose
    } else {
        Decision::Continue
    }
}
