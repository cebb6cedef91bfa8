//! Real gamma function.
//!
//! Lanczos approximation (g = 7, nine coefficients) on `[0.5, ∞)`. Arguments
//! below 0.5 are shifted upward with the recurrence `Γ(z) = Γ(z + 1) / z`,
//! which keeps full relative accuracy close to the poles because each
//! `z + k` near zero is formed exactly. Very negative arguments fall back to
//! the reflection formula.

use std::f64::consts::PI;

use thiserror::Error;

/// Distance from a non-positive integer below which an argument is a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// Below this the upward recurrence would need too many factors.
const REFLECTION_THRESHOLD: f64 = -20.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GammaError {
    #[error("gamma has a pole at {0} (non-positive integer)")]
    PoleArgument(f64),
    #[error("gamma argument is not finite: {0}")]
    NonFinite(f64),
}

/// Returns `Γ(z)`.
pub fn gamma(z: f64) -> Result<f64, GammaError> {
    if !z.is_finite() {
        return Err(GammaError::NonFinite(z));
    }
    if z <= 0.0 && (z - z.round()).abs() < POLE_TOLERANCE {
        return Err(GammaError::PoleArgument(z));
    }
    if z >= 0.5 {
        return Ok(lanczos(z));
    }
    if z < REFLECTION_THRESHOLD {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        return Ok(PI / ((PI * z).sin() * lanczos(1.0 - z)));
    }

    let mut shifted = z;
    let mut denominator = 1.0;
    while shifted < 0.5 {
        denominator *= shifted;
        shifted += 1.0;
    }
    Ok(lanczos(shifted) / denominator)
}

fn lanczos(z: f64) -> f64 {
    let z = z - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let series = LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (z + i as f64));
    // t^(z+0.5) split in two halves to delay overflow for large z.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * series
}
