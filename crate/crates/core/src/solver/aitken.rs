/// Components whose second difference is smaller than this pass through.
pub const AITKEN_DENOMINATOR_FLOOR: f64 = 1e-30;

/// Component-wise Aitken Δ² extrapolation of three consecutive iterates.
///
/// `x₀ − (x₁ − x₀)² / (x₂ − 2x₁ + x₀)`; degenerate components are taken
/// unchanged from `x₂`.
pub fn aitken_accelerate(x0: &[f64], x1: &[f64], x2: &[f64]) -> Vec<f64> {
    x0.iter()
        .zip(x1)
        .zip(x2)
        .map(|((&a, &b), &c)| {
            let denominator = c - 2.0 * b + a;
            if denominator.abs() < AITKEN_DENOMINATOR_FLOOR || !denominator.is_finite() {
                c
            } else {
                a - (b - a) * (b - a) / denominator
            }
        })
        .collect()
}
