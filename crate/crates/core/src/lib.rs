//! Fractional pseudo-Newton root finding.
//!
//! The iteration `xᵢ₊₁ = xᵢ − P_{ε,β}(xᵢ) f(xᵢ)` uses a diagonal matrix built
//! from fractional derivatives of the unit constant, so it needs no
//! derivatives of `f`. Sweeping the fractional order from a single start can
//! reach several roots.
//!
//! * [`kernel`]: gamma-based kernel, `β` rule and the diagonal step matrix.
//! * [`solver`]: fixed-point driver, pseudo-Newton and Newton steps, Aitken
//!   acceleration, order sweeps, convergence-order estimates.
//! * [`dixit_pindyck`]: investment expansion/closing thresholds.
//! * [`reference`]: published scenario data for the threshold model.

// `!(a <= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference constants are kept with every published digit.
#![allow(clippy::excessive_precision)]

pub mod dixit_pindyck;
pub mod gamma;
pub mod kernel;
pub mod reference;
pub mod solver;

pub use gamma::gamma;
pub use kernel::{FractionalOrder, Kernel, KernelRegistry};
pub use solver::{
    fixed_point_solve, IterationMethod, MethodRegistry, ResidualFunction, SolveOutcome,
    SolveStatus, SolverSettings,
};
