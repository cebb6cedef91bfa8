//! Published inputs and results of the worked threshold example.
//!
//! Structural constants `a₁ … a₅` live in [`ModelConstants::reference`].
//! Thousands separators in the printed tables are dropped here.

use crate::dixit_pindyck::{ModelConstants, ThresholdProblem};
use crate::kernel::FractionalOrder;
use crate::solver::SolverSettings;

/// Step-matrix regularization used for every published row.
pub const REFERENCE_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub row: usize,
    pub a6: f64,
    pub a7: f64,
    pub x0: [f64; 2],
    /// Printed `‖f(x₀)‖₂`.
    pub initial_residual_norm: f64,
    pub alpha: f64,
    /// Printed `(xₙ)₁, (xₙ)₂`.
    pub solution: [f64; 2],
    pub step_norm: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl ReferenceRow {
    pub fn constants(&self) -> ModelConstants {
        ModelConstants::reference(self.a6, self.a7)
    }

    pub fn problem(&self) -> ThresholdProblem {
        ThresholdProblem::new(self.constants(), self.x0).expect("reference scenario is valid")
    }

    pub fn settings(&self) -> SolverSettings {
        let alpha = FractionalOrder::new(self.alpha).expect("reference order is valid");
        SolverSettings { epsilon: REFERENCE_EPSILON, ..SolverSettings::new(alpha) }
    }
}

pub const REFERENCE_ROWS: [ReferenceRow; 5] = [
    ReferenceRow {
        row: 1,
        a6: 451_474.0,
        a7: 396_499.0,
        x0: [15.0, 20.0],
        initial_residual_norm: 6.003_79e5,
        alpha: 0.26131,
        solution: [41_844.570_904_43, 11_857.321_265_93],
        step_norm: 6.940_46e-6,
        residual_norm: 6.964_14e-5,
        iterations: 78,
    },
    ReferenceRow {
        row: 2,
        a6: 706_975.0,
        a7: 652_000.0,
        x0: [17.0, 18.0],
        initial_residual_norm: 9.612_32e5,
        alpha: 0.25628,
        solution: [60_324.435_087_7, 20_727.995_322_23],
        step_norm: 5.036_27e-6,
        residual_norm: 8.617_88e-5,
        iterations: 85,
    },
    ReferenceRow {
        row: 3,
        a6: 598_655.0,
        a7: 582_680.0,
        x0: [9.0, 16.0],
        initial_residual_norm: 8.350_72e5,
        alpha: 0.23116,
        solution: [43_561.703_160_13, 20_925.422_391_62],
        step_norm: 7.216_78e-6,
        residual_norm: 8.663_93e-5,
        iterations: 128,
    },
    ReferenceRow {
        row: 4,
        a6: 506_975.0,
        a7: 452_000.0,
        x0: [5.0, 19.0],
        initial_residual_norm: 6.789_51e5,
        alpha: 0.27136,
        solution: [45_951.773_943_32, 13_741.036_947_19],
        step_norm: 4.603_53e-6,
        residual_norm: 8.717_23e-5,
        iterations: 105,
    },
    ReferenceRow {
        row: 5,
        a6: 633_603.0,
        a7: 578_628.0,
        x0: [11.0, 12.0],
        initial_residual_norm: 8.577_33e5,
        alpha: 0.24623,
        solution: [55_117.715_629_61, 18_133.159_251_18],
        step_norm: 6.199_23e-6,
        residual_norm: 9.269_36e-5,
        iterations: 83,
    },
];
