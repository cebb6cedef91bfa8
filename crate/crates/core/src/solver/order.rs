use thiserror::Error;

const MIN_TERMS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrderError {
    #[error("need at least {MIN_TERMS} terms, got {0}")]
    InsufficientData(usize),
    #[error("trailing terms are not strictly positive and strictly decreasing")]
    NonMonotone,
}

/// Empirical order of convergence from an error (or step-norm) sequence.
///
/// Uses the last three terms: `p ≈ ln(eₖ₊₁/eₖ) / ln(eₖ/eₖ₋₁)`. The last four
/// terms must be positive and strictly decreasing.
pub fn estimate_order(errors: &[f64]) -> Result<f64, OrderError> {
    if errors.len() < MIN_TERMS {
        return Err(OrderError::InsufficientData(errors.len()));
    }
    let tail = &errors[errors.len() - MIN_TERMS..];
    let usable = tail.iter().all(|e| e.is_finite() && *e > 0.0)
        && tail.windows(2).all(|w| w[1] < w[0]);
    if !usable {
        return Err(OrderError::NonMonotone);
    }
    let [_, prev, cur, next] = [tail[0], tail[1], tail[2], tail[3]];
    Ok((next / cur).ln() / (cur / prev).ln())
}
