//! Scenario configuration files.
//!
//! TOML with the sections `[primitives]` or `[constants]` (exactly one),
//! `[initial]`, `[solver]`, `[sweep]` and `[output]`. Command-line flags
//! override file values, which override built-in defaults.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fracroot::dixit_pindyck::{EconomicPrimitives, ModelConstants, ThresholdProblem};
use fracroot::kernel::{FractionalOrder, Kernel, KernelRegistry};
use fracroot::solver::{grid_with_step, IterationMethod, MethodRegistry, SolverSettings, DEFAULT_GRID_STEP};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub primitives: Option<EconomicPrimitives>,
    pub constants: Option<DirectConstants>,
    pub initial: Option<InitialCondition>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub a7: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub h0: f64,
    pub l0: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub tol_step: Option<f64>,
    pub tol_residual: Option<f64>,
    pub max_iter: Option<usize>,
    pub divergence_bound: Option<f64>,
    pub aitken: Option<bool>,
    pub method: Option<String>,
    pub kernel: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub grid_step: Option<f64>,
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Structured,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<OutputFormat>,
    pub trace: Option<bool>,
    pub out: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_iter: Option<usize>,
    pub trace: bool,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub grid_step: Option<f64>,
}

/// A validated configuration with every default applied.
#[derive(Clone)]
pub struct Scenario {
    pub problem: ThresholdProblem,
    /// `alpha` is a placeholder when the method does not use it.
    pub settings: SolverSettings,
    pub alpha_given: bool,
    pub method_name: String,
    pub kernel: Arc<dyn Kernel>,
    pub method: Arc<dyn IterationMethod>,
    pub grid_step: f64,
    pub grid: Option<Vec<f64>>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_str_named(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), source: Box::new(e) })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_str_named(&text, path)
    }

    pub fn resolve(&self, overrides: &Overrides) -> Result<Scenario, ConfigError> {
        let constants = match (&self.primitives, &self.constants) {
            (Some(_), Some(_)) => {
                return Err(invalid("primitives/constants", "give exactly one of [primitives] or [constants]"))
            }
            (None, None) => {
                return Err(invalid("primitives/constants", "missing: give [primitives] or [constants]"))
            }
            (Some(p), None) => ModelConstants::derive(p).map_err(|e| invalid("primitives", e.to_string()))?,
            (None, Some(c)) => ModelConstants::from_direct([c.a1, c.a2, c.a3, c.a4, c.a5, c.a6, c.a7])
                .map_err(|e| invalid("constants", e.to_string()))?,
        };
        let initial = self.initial.ok_or_else(|| invalid("initial", "missing section [initial] with h0, l0"))?;
        let problem = ThresholdProblem::new(constants, [initial.h0, initial.l0])
            .map_err(|e| invalid("constants", e.to_string()))?;

        let s = &self.solver;
        let alpha_value = overrides.alpha.or(s.alpha);
        let alpha = match alpha_value {
            Some(a) => FractionalOrder::new(a).map_err(|e| invalid("solver.alpha", e.to_string()))?,
            None => FractionalOrder::new(0.5).expect("valid placeholder"),
        };
        let mut settings = SolverSettings::new(alpha);
        settings.epsilon = overrides.epsilon.or(s.epsilon).unwrap_or(settings.epsilon);
        settings.tol_step = s.tol_step.unwrap_or(settings.tol_step);
        settings.tol_residual = s.tol_residual.unwrap_or(settings.tol_residual);
        settings.max_iter = overrides.max_iter.or(s.max_iter).unwrap_or(settings.max_iter);
        settings.divergence_bound = s.divergence_bound.unwrap_or(settings.divergence_bound);
        settings.aitken = s.aitken.unwrap_or(false);
        settings.record_trace = overrides.trace || self.output.trace.unwrap_or(false);
        settings.validate().map_err(|e| invalid("solver", e.to_string()))?;

        let kernels = KernelRegistry::default();
        let kernel_name = s.kernel.as_deref().unwrap_or(KernelRegistry::DEFAULT);
        let kernel = kernels.get(kernel_name).ok_or_else(|| {
            invalid("solver.kernel", format!("unknown kernel {kernel_name:?} (known: {})", join(kernels.names())))
        })?;
        let methods = MethodRegistry::default();
        let method_name = s.method.clone().unwrap_or_else(|| MethodRegistry::DEFAULT.to_string());
        let method = methods.build(&method_name, &settings, kernel.clone()).ok_or_else(|| {
            invalid("solver.method", format!("unknown method {method_name:?} (known: {})", join(methods.names())))
        })?;

        let grid_step = overrides.grid_step.or(self.sweep.grid_step).unwrap_or(DEFAULT_GRID_STEP);
        if !(grid_step.is_finite() && grid_step > 0.0) {
            return Err(invalid("sweep.grid_step", format!("must be positive, got {grid_step}")));
        }

        Ok(Scenario {
            problem,
            settings,
            alpha_given: alpha_value.is_some(),
            method_name,
            kernel,
            method: Arc::from(method),
            grid_step,
            grid: if overrides.grid_step.is_some() { None } else { self.sweep.grid.clone() },
            format: overrides.format.or(self.output.format).unwrap_or_default(),
            out: overrides.out.clone().or_else(|| self.output.out.clone()),
        })
    }
}

impl Scenario {
    /// Orders to sweep: the explicit list if given, else the stepped grid.
    pub fn sweep_grid(&self) -> Result<Vec<FractionalOrder>, ConfigError> {
        let grid = match &self.grid {
            Some(values) => values
                .iter()
                .map(|&a| FractionalOrder::new(a).map_err(|e| invalid("sweep.grid", e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
            None => grid_with_step(self.grid_step),
        };
        if grid.is_empty() {
            return Err(invalid("sweep", "grid is empty after excluding integer bands"));
        }
        Ok(grid)
    }
}

fn join<'a>(names: impl Iterator<Item = &'a str>) -> String {
    names.collect::<Vec<_>>().join(", ")
}
