//! Multi-root discovery by sweeping the fractional order from one start.

use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::driver::{fixed_point_solve, SolveOutcome, SolveStatus};
use super::method::FractionalPseudoNewton;
use super::{distance2, norm2, ResidualFunction, SettingsError, SolverSettings};
use crate::kernel::{AbsRiemannLiouville, FractionalOrder, Kernel, ORDER_MAX, ORDER_MIN};

pub const DEFAULT_GRID_STEP: f64 = 0.05;
/// Half-width of the band excluded around each integer.
pub const INTEGER_BAND: f64 = 0.01;
/// Relative to `max(1, ‖root‖₂)`.
pub const DEFAULT_DEDUP_TOLERANCE: f64 = 1e-3;

/// `k · step` over `[-2, 2]`, minus the integer bands.
pub fn grid_with_step(step: f64) -> Vec<FractionalOrder> {
    if !(step.is_finite() && step > 0.0) {
        return Vec::new();
    }
    let lo = (ORDER_MIN / step).ceil() as i64;
    let hi = (ORDER_MAX / step).floor() as i64;
    (lo..=hi)
        .map(|k| k as f64 * step)
        .filter(|a| (a - a.round()).abs() > INTEGER_BAND + 1e-12)
        .filter_map(|a| FractionalOrder::new(a).ok())
        .collect()
}

pub fn default_grid() -> Vec<FractionalOrder> {
    grid_with_step(DEFAULT_GRID_STEP)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: Vec<f64>,
    /// Order whose solve produced `x`.
    pub alpha: FractionalOrder,
    /// Every order that converged to this root, ascending.
    pub found_by: Vec<FractionalOrder>,
    pub outcome: SolveOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedAlpha {
    pub alpha: FractionalOrder,
    pub status: SolveStatus,
    pub reason: String,
}

/// Distinct roots in lexicographic order, plus the orders that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub skipped: Vec<SkippedAlpha>,
    pub dedup_tolerance: f64,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// The stored root nearest to `target`, if any lies within `tol`.
    pub fn find_near(&self, target: &[f64], tol: f64) -> Option<&Root> {
        self.roots
            .iter()
            .map(|r| (distance2(&r.x, target), r))
            .filter(|(d, _)| *d <= tol)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, r)| r)
    }

    fn same_root(&self, a: &[f64], b: &[f64]) -> bool {
        distance2(a, b) <= self.dedup_tolerance * norm2(a).max(1.0)
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Sweep with the default kernel and deduplication tolerance.
pub fn alpha_sweep(
    f: &dyn ResidualFunction,
    x0: &[f64],
    grid: &[FractionalOrder],
    template: &SolverSettings,
) -> Result<RootSet, SettingsError> {
    alpha_sweep_with(f, x0, grid, template, Arc::new(AbsRiemannLiouville), DEFAULT_DEDUP_TOLERANCE)
}

/// Solves from `x0` once per grid order and merges the converged points.
///
/// Grid points run in parallel. The result depends only on the set of grid
/// orders: hits are sorted by `(x, α)` before clustering, and each cluster is
/// represented by its lexicographically smallest member.
pub fn alpha_sweep_with(
    f: &dyn ResidualFunction,
    x0: &[f64],
    grid: &[FractionalOrder],
    template: &SolverSettings,
    kernel: Arc<dyn Kernel>,
    dedup_tolerance: f64,
) -> Result<RootSet, SettingsError> {
    template.validate()?;
    let outcomes: Vec<(FractionalOrder, SolveOutcome)> = grid
        .par_iter()
        .map(|&alpha| {
            let settings = template.with_alpha(alpha);
            let method = FractionalPseudoNewton::new(alpha, settings.epsilon).with_kernel(kernel.clone());
            fixed_point_solve(&method, f, x0, &settings).map(|out| (alpha, out))
        })
        .collect::<Result<_, _>>()?;

    let (mut hits, misses): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(|(_, o)| o.converged());
    hits.sort_by(|a, b| {
        lexicographic(&a.1.x_final, &b.1.x_final).then_with(|| a.0.value().total_cmp(&b.0.value()))
    });

    let mut set = RootSet { roots: Vec::new(), skipped: Vec::new(), dedup_tolerance };
    for (alpha, outcome) in hits {
        match set.roots.iter().position(|r| set.same_root(&r.x, &outcome.x_final)) {
            Some(i) => set.roots[i].found_by.push(alpha),
            None => set.roots.push(Root {
                x: outcome.x_final.clone(),
                alpha,
                found_by: vec![alpha],
                outcome,
            }),
        }
    }
    for root in &mut set.roots {
        root.found_by.sort_by(|a, b| a.value().total_cmp(&b.value()));
    }

    set.skipped = misses
        .into_iter()
        .map(|(alpha, o)| SkippedAlpha {
            alpha,
            status: o.status,
            reason: o.message.unwrap_or_else(|| o.status.to_string()),
        })
        .collect();
    set.skipped.sort_by(|a, b| a.alpha.value().total_cmp(&b.alpha.value()));
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Infallible;

    fn template() -> SolverSettings {
        SolverSettings::new(FractionalOrder::new(0.5).unwrap())
    }

    #[test]
    fn default_grid_shape() {
        let grid = default_grid();
        assert_eq!(grid.len(), 76);
        assert!(grid.iter().all(|a| (a.value() - a.value().round()).abs() > INTEGER_BAND));
        assert!((grid[0].value() + 1.95).abs() < 1e-12);
        assert!((grid.last().unwrap().value() - 1.95).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_can_be_empty() {
        assert!(grid_with_step(1.0).is_empty());
        assert!(grid_with_step(0.0).is_empty());
        assert_eq!(grid_with_step(0.5).len(), 4);
    }

    #[test]
    fn unique_root_collapses() {
        let f = Infallible(|x: &[f64]| vec![x[0] - 3.0]);
        let grid: Vec<_> = [0.2, 0.4, 0.6, 0.8].iter().map(|a| FractionalOrder::new(*a).unwrap()).collect();
        let set = alpha_sweep(&f, &[1.0], &grid, &template()).unwrap();
        assert_eq!(set.len(), 1);
        assert!((set.roots[0].x[0] - 3.0).abs() < 1e-4);
        assert_eq!(set.roots[0].found_by.len() + set.skipped.len(), 4);
    }

    #[test]
    fn roots_are_sorted_and_separated() {
        let f = Infallible(|x: &[f64]| vec![x[0] * x[0] - 1.0]);
        let mut settings = template();
        settings.aitken = true;
        let set = alpha_sweep(&f, &[2.0], &default_grid(), &settings).unwrap();
        for pair in set.roots.windows(2) {
            assert_eq!(lexicographic(&pair[0].x, &pair[1].x), Ordering::Less);
        }
        for (i, a) in set.roots.iter().enumerate() {
            for b in &set.roots[i + 1..] {
                assert!(!set.same_root(&a.x, &b.x));
            }
        }
    }

    #[test]
    fn skipped_orders_carry_reasons() {
        let f = Infallible(|x: &[f64]| vec![x[0] * x[0] - 1.0]);
        let grid = [FractionalOrder::new(-1.5).unwrap(), FractionalOrder::new(0.5).unwrap()];
        let set = alpha_sweep(&f, &[2.0], &grid, &template()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.skipped.len(), 1);
        assert_eq!(set.skipped[0].status, SolveStatus::Diverged);
        assert!(!set.skipped[0].reason.is_empty());
    }
}
