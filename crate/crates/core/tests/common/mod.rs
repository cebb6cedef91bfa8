//! Test-only helpers shared by the integration targets.
#![allow(dead_code)]

use std::f64::consts::PI;

// B₂ₖ / (2k (2k − 1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Gamma via the asymptotic Stirling series after shifting the argument
/// above 25 with the recurrence. Independent of the library's Lanczos path.
pub fn oracle_gamma(z: f64) -> f64 {
    let mut w = z;
    let mut product = 1.0;
    while w < 25.0 {
        product *= w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in STIRLING {
        series += c * power;
        power *= inv2;
    }
    let ln_gamma = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    ln_gamma.exp() / product
}

/// `|x|^(-β) / Γ(1 − β)` through the oracle.
pub fn oracle_kernel(beta: f64, x: f64) -> f64 {
    (-beta * x.abs().ln()).exp() / oracle_gamma(1.0 - beta)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Row-major `n × n` product `M v`.
pub fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|j| (0..n).map(|k| m[j * n + k] * v[k]).sum()).collect()
}
