use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use thiserror::Error;

use super::jacobian::fd_jacobian;
use super::{evaluate_checked, EvaluationError, ResidualFunction, SolverSettings};
use crate::kernel::{p_matrix_with, AbsRiemannLiouville, FractionalOrder, Kernel, KernelError};

/// Reciprocal condition number below which a Jacobian counts as singular.
const MIN_RECIPROCAL_CONDITION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("jacobian is singular (reciprocal condition {reciprocal_condition:e})")]
    SingularJacobian { reciprocal_condition: f64 },
}

/// One iteration function `Φ`, given `x` and the already evaluated `f(x)`.
pub trait IterationMethod: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    fn step(&self, f: &dyn ResidualFunction, x: &[f64], fx: &[f64]) -> Result<Vec<f64>, StepError>;
}

/// `xᵢ₊₁ = xᵢ − P_{ε,β}(xᵢ) f(xᵢ)`.
#[derive(Clone)]
pub struct FractionalPseudoNewton {
    pub alpha: FractionalOrder,
    pub epsilon: f64,
    pub kernel: Arc<dyn Kernel>,
}

impl FractionalPseudoNewton {
    pub fn new(alpha: FractionalOrder, epsilon: f64) -> Self {
        Self { alpha, epsilon, kernel: Arc::new(AbsRiemannLiouville) }
    }

    pub fn with_kernel(mut self, kernel: Arc<dyn Kernel>) -> Self {
        self.kernel = kernel;
        self
    }
}

impl fmt::Debug for FractionalPseudoNewton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FractionalPseudoNewton")
            .field("alpha", &self.alpha)
            .field("epsilon", &self.epsilon)
            .field("kernel", &self.kernel.name())
            .finish()
    }
}

impl IterationMethod for FractionalPseudoNewton {
    fn name(&self) -> &'static str {
        "fpn"
    }

    fn step(&self, _f: &dyn ResidualFunction, x: &[f64], fx: &[f64]) -> Result<Vec<f64>, StepError> {
        let p = p_matrix_with(self.kernel.as_ref(), self.alpha, x, self.epsilon)?;
        Ok(x.iter().zip(p.apply(fx)).map(|(xk, d)| xk - d).collect())
    }
}

/// `x − J⁻¹ f(x)` with a central-difference Jacobian.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClassicalNewton {
    /// Finite-difference step; `None` uses [`super::default_step`].
    pub h: Option<f64>,
}

impl IterationMethod for ClassicalNewton {
    fn name(&self) -> &'static str {
        "newton"
    }

    fn step(&self, f: &dyn ResidualFunction, x: &[f64], fx: &[f64]) -> Result<Vec<f64>, StepError> {
        let jac = fd_jacobian(f, x, self.h)?;
        let singular = jac.singular_values();
        let largest = singular.max();
        let reciprocal_condition = if largest > 0.0 { singular.min() / largest } else { 0.0 };
        if !(reciprocal_condition >= MIN_RECIPROCAL_CONDITION) {
            return Err(StepError::SingularJacobian { reciprocal_condition });
        }
        let rhs = DVector::from_column_slice(fx);
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or(StepError::SingularJacobian { reciprocal_condition })?;
        Ok(x.iter().zip(delta.iter()).map(|(xk, d)| xk - d).collect())
    }
}

/// One fractional pseudo-Newton step with the default kernel.
pub fn fpn_step(
    f: &dyn ResidualFunction,
    x: &[f64],
    alpha: FractionalOrder,
    epsilon: f64,
) -> Result<Vec<f64>, StepError> {
    fpn_step_with(&AbsRiemannLiouville, f, x, alpha, epsilon)
}

pub fn fpn_step_with(
    kernel: &dyn Kernel,
    f: &dyn ResidualFunction,
    x: &[f64],
    alpha: FractionalOrder,
    epsilon: f64,
) -> Result<Vec<f64>, StepError> {
    let fx = evaluate_checked(f, x)?;
    let p = p_matrix_with(kernel, alpha, x, epsilon)?;
    Ok(x.iter().zip(p.apply(&fx)).map(|(xk, d)| xk - d).collect())
}

/// One classical Newton step.
pub fn newton_step(f: &dyn ResidualFunction, x: &[f64]) -> Result<Vec<f64>, StepError> {
    let fx = evaluate_checked(f, x)?;
    ClassicalNewton::default().step(f, x, &fx)
}

/// Builds a method from solver settings and a kernel.
pub type MethodFactory = fn(&SolverSettings, Arc<dyn Kernel>) -> Box<dyn IterationMethod>;

/// Iteration methods selectable by name.
#[derive(Clone)]
pub struct MethodRegistry {
    factories: BTreeMap<&'static str, MethodFactory>,
}

impl MethodRegistry {
    pub const DEFAULT: &'static str = "fpn";

    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, factory: MethodFactory) {
        self.factories.insert(name, factory);
    }

    pub fn build(
        &self,
        name: &str,
        settings: &SolverSettings,
        kernel: Arc<dyn Kernel>,
    ) -> Option<Box<dyn IterationMethod>> {
        self.factories.get(name).map(|factory| factory(settings, kernel))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }
}

impl Default for MethodRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register("fpn", |settings, kernel| {
            Box::new(FractionalPseudoNewton::new(settings.alpha, settings.epsilon).with_kernel(kernel))
        });
        registry.register("newton", |_, _| Box::new(ClassicalNewton::default()));
        registry
    }
}

impl fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}
