use nalgebra::DMatrix;

use super::{evaluate_checked, EvaluationError, ResidualFunction};

/// `max(1e-6, 1e-8 ‖x‖∞)`.
pub fn default_step(x: &[f64]) -> f64 {
    let inf_norm = x.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    (1e-8 * inf_norm).max(1e-6)
}

/// Central-difference Jacobian; column `k` is `(f(x + h eₖ) − f(x − h eₖ)) / 2h`.
pub fn fd_jacobian(
    f: &dyn ResidualFunction,
    x: &[f64],
    h: Option<f64>,
) -> Result<DMatrix<f64>, EvaluationError> {
    let n = x.len();
    let h = h.unwrap_or_else(|| default_step(x));
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    for k in 0..n {
        probe[k] = x[k] + h;
        let forward = evaluate_checked(f, &probe)?;
        probe[k] = x[k] - h;
        let backward = evaluate_checked(f, &probe)?;
        probe[k] = x[k];
        for j in 0..n {
            jac[(j, k)] = (forward[j] - backward[j]) / (2.0 * h);
        }
    }
    Ok(jac)
}
