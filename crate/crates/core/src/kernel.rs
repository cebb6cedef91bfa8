//! Fractional derivative of the unit constant and the diagonal step matrix.
//!
//! The Riemann-Liouville derivative of order `β` (base point 0) of the
//! constant function 1 is `x^(-β) / Γ(1 - β)`. It is non-zero for
//! non-integer `β`, and the pseudo-Newton step uses it as a per-component
//! multiplier. How the kernel is extended to negative components is a
//! strategy: see [`Kernel`] and [`KernelRegistry`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{gamma, GammaError};

/// Minimum distance from the nearest integer for a valid fractional order.
pub const INTEGER_EXCLUSION: f64 = 1e-12;

/// Bounds of the admissible fractional order.
pub const ORDER_MIN: f64 = -2.0;
pub const ORDER_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("derivative of order {beta} of a constant is singular at x = 0")]
    Domain { beta: f64 },
    #[error("fractional order {0} is outside [-2, 2] or too close to an integer")]
    InvalidOrder(f64),
    #[error("epsilon must be finite and positive, got {0}")]
    InvalidEpsilon(f64),
}

/// A real order `α ∈ [-2, 2] \ ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(value: f64) -> Result<Self, KernelError> {
        if !value.is_finite()
            || !(ORDER_MIN..=ORDER_MAX).contains(&value)
            || (value - value.round()).abs() <= INTEGER_EXCLUSION
        {
            return Err(KernelError::InvalidOrder(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = KernelError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(order: FractionalOrder) -> f64 {
        order.0
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Order actually applied to one component: `α` away from zero, `1` at zero.
pub fn beta_select(alpha: FractionalOrder, component: f64) -> f64 {
    if component.abs() != 0.0 {
        alpha.value()
    } else {
        1.0
    }
}

/// Evaluates the order-`β` derivative of the unit constant at `x`.
///
/// Implementations must return exactly `0` for `β = 1` without touching the
/// gamma function, and agree with `x^(-β) / Γ(1 - β)` for `x > 0`.
pub trait Kernel: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    fn constant_derivative(&self, beta: f64, x: f64) -> Result<f64, KernelError>;
}

fn check_pre(beta: f64, x: f64) -> Result<Option<f64>, KernelError> {
    if beta == 1.0 {
        return Ok(Some(0.0));
    }
    if x == 0.0 {
        return Err(KernelError::Domain { beta });
    }
    Ok(None)
}

/// `|x|^(-β) / Γ(1 - β)`: symmetric in the sign of `x`. The default.
#[derive(Debug, Clone, Copy, Default)]
pub struct AbsRiemannLiouville;

impl Kernel for AbsRiemannLiouville {
    fn name(&self) -> &'static str {
        "rl-abs"
    }

    fn constant_derivative(&self, beta: f64, x: f64) -> Result<f64, KernelError> {
        if let Some(v) = check_pre(beta, x)? {
            return Ok(v);
        }
        Ok(x.abs().powf(-beta) / gamma(1.0 - beta)?)
    }
}

/// Real part of the principal branch: for `x < 0`,
/// `Re((-|x|)^(-β)) = |x|^(-β) cos(πβ)`. Identical to [`AbsRiemannLiouville`]
/// on positive components.
#[derive(Debug, Clone, Copy, Default)]
pub struct RealPartRiemannLiouville;

impl Kernel for RealPartRiemannLiouville {
    fn name(&self) -> &'static str {
        "rl-real"
    }

    fn constant_derivative(&self, beta: f64, x: f64) -> Result<f64, KernelError> {
        if let Some(v) = check_pre(beta, x)? {
            return Ok(v);
        }
        let magnitude = x.abs().powf(-beta) / gamma(1.0 - beta)?;
        if x > 0.0 {
            Ok(magnitude)
        } else {
            Ok(magnitude * (PI * beta).cos())
        }
    }
}

/// Kernels selectable by name.
#[derive(Clone)]
pub struct KernelRegistry {
    kernels: BTreeMap<&'static str, Arc<dyn Kernel>>,
}

impl KernelRegistry {
    pub const DEFAULT: &'static str = "rl-abs";

    pub fn empty() -> Self {
        Self { kernels: BTreeMap::new() }
    }

    pub fn register(&mut self, kernel: Arc<dyn Kernel>) {
        self.kernels.insert(kernel.name(), kernel);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Kernel>> {
        self.kernels.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.kernels.keys().copied()
    }

    pub fn default_kernel(&self) -> Arc<dyn Kernel> {
        self.get(Self::DEFAULT).unwrap_or_else(|| Arc::new(AbsRiemannLiouville))
    }
}

impl Default for KernelRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Arc::new(AbsRiemannLiouville));
        registry.register(Arc::new(RealPartRiemannLiouville));
        registry
    }
}

impl fmt::Debug for KernelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.kernels.keys()).finish()
    }
}

/// Default-kernel evaluation of the constant's fractional derivative.
pub fn constant_frac_deriv(beta: f64, x: f64) -> Result<f64, KernelError> {
    AbsRiemannLiouville.constant_derivative(beta, x)
}

/// Diagonal of the step matrix `P_{ε,β}(x)`.
///
/// Off-diagonal entries are zero by construction and are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PDiagonal {
    entries: Vec<f64>,
    order_used: Vec<f64>,
}

impl PDiagonal {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// The `β` applied to each component.
    pub fn order_used(&self) -> &[f64] {
        &self.order_used
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Row-major dense `n × n` copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.entries.len();
        (0..n)
            .map(|j| (0..n).map(|k| if j == k { self.entries[k] } else { 0.0 }).collect())
            .collect()
    }

    /// `P f` for a diagonal `P`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries.iter().zip(v).map(|(p, vk)| p * vk).collect()
    }
}

/// Builds `P_{ε,β}(x)` with the default kernel.
pub fn p_matrix(alpha: FractionalOrder, x: &[f64], epsilon: f64) -> Result<PDiagonal, KernelError> {
    p_matrix_with(&AbsRiemannLiouville, alpha, x, epsilon)
}

pub fn p_matrix_with(
    kernel: &dyn Kernel,
    alpha: FractionalOrder,
    x: &[f64],
    epsilon: f64,
) -> Result<PDiagonal, KernelError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(KernelError::InvalidEpsilon(epsilon));
    }
    let mut entries = Vec::with_capacity(x.len());
    let mut order_used = Vec::with_capacity(x.len());
    for &xk in x {
        let beta = beta_select(alpha, xk);
        entries.push(kernel.constant_derivative(beta, xk)? + epsilon);
        order_used.push(beta);
    }
    Ok(PDiagonal { entries, order_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(0.26131).is_ok());
        assert!(FractionalOrder::new(-1.999).is_ok());
        for bad in [0.0, 1.0, -2.0, 2.0, 2.5, -3.1, 1.0 + 1e-13, f64::NAN] {
            assert!(FractionalOrder::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn beta_rule() {
        assert_eq!(beta_select(order(0.26131), 15.0), 0.26131);
        assert_eq!(beta_select(order(0.26131), 0.0), 1.0);
        assert_eq!(beta_select(order(0.26131), -0.0), 1.0);
        assert_eq!(beta_select(order(-1.5), -3.7), -1.5);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(constant_frac_deriv(1.0, 0.0).unwrap(), 0.0);
        assert!(rel(constant_frac_deriv(0.5, 1.0).unwrap(), 0.564_189_583_547_756_286_95) < 1e-14);
        assert!(rel(constant_frac_deriv(0.5, 4.0).unwrap(), 0.282_094_791_773_878_143_47) < 1e-14);
    }

    #[test]
    fn kernel_singular_at_zero() {
        assert!(matches!(constant_frac_deriv(0.5, 0.0), Err(KernelError::Domain { .. })));
        assert!(matches!(
            RealPartRiemannLiouville.constant_derivative(-0.3, 0.0),
            Err(KernelError::Domain { .. })
        ));
    }

    #[test]
    fn integer_order_two_hits_pole() {
        assert!(matches!(constant_frac_deriv(2.0, 1.0), Err(KernelError::Gamma(_))));
    }

    #[test]
    fn p_matrix_examples() {
        let p = p_matrix(order(0.5), &[1.0, 0.0], 1e-4).unwrap();
        assert!(rel(p.entries()[0], 0.564_289_583_547_756_286_95) < 1e-14);
        assert_eq!(p.entries()[1], 1e-4);
        assert_eq!(p.order_used(), &[0.5, 1.0]);

        let p = p_matrix(order(0.5), &[0.0, 0.0], 1e-4).unwrap();
        assert_eq!(p.entries(), &[1e-4, 1e-4]);

        // First-step multipliers of the first threshold scenario.
        let p = p_matrix(order(0.26131), &[15.0, 20.0], 1e-4).unwrap();
        assert!(rel(p.entries()[0], 0.397_279_681_713_376_462_72) < 1e-12);
        assert!(rel(p.entries()[1], 0.368_516_677_969_280_953) < 1e-12);
    }

    #[test]
    fn p_matrix_rejects_bad_epsilon() {
        assert!(p_matrix(order(0.5), &[1.0], 0.0).is_err());
        assert!(p_matrix(order(0.5), &[1.0], -1e-4).is_err());
    }

    #[test]
    fn dense_form_is_diagonal() {
        let p = p_matrix(order(0.7), &[1.0, -2.0, 0.0, 3.5], 1e-3).unwrap();
        let dense = p.to_dense();
        for (j, row) in dense.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if j == k {
                    assert_eq!(*v, p.entries()[k]);
                } else {
                    assert_eq!(*v, 0.0);
                }
            }
        }
    }

    #[test]
    fn real_part_kernel_agrees_on_positive_side() {
        for &(beta, x) in &[(0.3, 2.0), (-1.4, 0.01), (1.7, 123.0)] {
            assert_eq!(
                RealPartRiemannLiouville.constant_derivative(beta, x).unwrap(),
                AbsRiemannLiouville.constant_derivative(beta, x).unwrap()
            );
        }
        let neg = RealPartRiemannLiouville.constant_derivative(0.5, -4.0).unwrap();
        assert!(neg.abs() < 1e-16, "cos(π/2) factor should vanish, got {neg}");
    }

    #[test]
    fn registry_lookup() {
        let registry = KernelRegistry::default();
        assert_eq!(registry.names().collect::<Vec<_>>(), vec!["rl-abs", "rl-real"]);
        assert_eq!(registry.default_kernel().name(), "rl-abs");
        assert!(registry.get("caputo").is_none());
    }

    fn non_integer_order() -> impl Strategy<Value = f64> {
        (-2.0f64..2.0).prop_filter("non-integer", |b| (b - b.round()).abs() > 1e-6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn zero_component_gives_epsilon(alpha in non_integer_order(), eps in 1e-8f64..1.0, n in 1usize..6, k in 0usize..6) {
            let k = k % n;
            let mut x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
            x[k] = 0.0;
            let p = p_matrix(order(alpha), &x, eps).unwrap();
            prop_assert_eq!(p.entries()[k], eps);
            prop_assert_eq!(p.order_used()[k], 1.0);
        }

        #[test]
        fn sign_symmetry(alpha in non_integer_order(), x in 1e-3f64..1e4, eps in 1e-8f64..1.0) {
            let a = p_matrix(order(alpha), &[x], eps).unwrap();
            let b = p_matrix(order(alpha), &[-x], eps).unwrap();
            prop_assert_eq!(a.entries(), b.entries());
        }

        #[test]
        fn kernel_identity(beta in non_integer_order(), x in prop_oneof![-1e4f64..-1e-3, 1e-3f64..1e4]) {
            let value = constant_frac_deriv(beta, x).unwrap();
            let product = value * gamma(1.0 - beta).unwrap() * x.abs().powf(beta);
            prop_assert!((product - 1.0).abs() < 1e-10, "product = {}", product);
        }

        #[test]
        fn gamma_recurrence(z in 0.1f64..2.9) {
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            prop_assert!(((lhs - rhs) / rhs).abs() < 1e-10);
        }
    }
}
