//! Subcommand implementations. Each returns the process exit code and writes
//! only to the sinks it is given.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use fracroot::dixit_pindyck::{
    back_substitute, full_residual, reduced_residual, relative_full_residual, solve_thresholds_with,
    ModelError, ThresholdProblem, ThresholdSolution,
};
use fracroot::reference::{ReferenceRow, REFERENCE_ROWS};
use fracroot::solver::{alpha_sweep_with, norm2, FractionalPseudoNewton, SolveOutcome, DEFAULT_DEDUP_TOLERANCE};

use crate::config::{ConfigError, OutputFormat, Overrides, Scenario, ScenarioConfig};
use crate::report::{
    to_json, write_csv, CsvRecord, OutcomeReport, SkippedReport, SolutionReport, SolveReport, SweepReport,
    SweepRootReport, TextTable,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_NONCONVERGENCE: u8 = 2;

/// Bounds checked by `reproduce-tables`.
pub const INITIAL_RESIDUAL_TOLERANCE: f64 = 1e-5;
pub const SOLUTION_TOLERANCE: f64 = 1e-4;
pub const FINAL_RESIDUAL_BOUND: f64 = 1e-4;

pub struct Io<'a> {
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn load(config: &Path, overrides: &Overrides) -> Result<Scenario, ConfigError> {
    ScenarioConfig::load(config)?.resolve(overrides)
}

fn config_failure(io: &mut Io<'_>, err: impl std::fmt::Display) -> u8 {
    let _ = writeln!(io.stderr, "error: {err}");
    EXIT_CONFIG
}

/// Sends machine-readable output to `--out`, or to stdout when no file is
/// given and a machine format was requested.
fn emit(io: &mut Io<'_>, scenario: &Scenario, csv: &[CsvRecord], json: impl FnOnce() -> String) -> io::Result<()> {
    let render = |format: OutputFormat, sink: &mut dyn Write| -> io::Result<()> {
        match format {
            OutputFormat::Structured => sink.write_all(json().as_bytes()),
            _ => write_csv(sink, csv).map_err(io::Error::other),
        }
    };
    match (&scenario.out, scenario.format) {
        (Some(path), format) => render(format, &mut File::create(path)?),
        (None, OutputFormat::Table) => Ok(()),
        (None, format) => render(format, io.stdout),
    }
}

fn fmt_opt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        "-".into()
    }
}

pub fn cmd_solve(config: &Path, overrides: &Overrides, io: &mut Io<'_>) -> u8 {
    let scenario = match load(config, overrides) {
        Ok(s) => s,
        Err(e) => return config_failure(io, e),
    };
    if scenario.method_name == "fpn" && !scenario.alpha_given {
        return config_failure(io, "solver.alpha: required for method \"fpn\" (set it in the file or pass --alpha)");
    }

    let problem = &scenario.problem;
    let (outcome, solution) =
        match solve_thresholds_with(scenario.method.as_ref(), problem, &scenario.settings) {
            Ok(sol) => (sol.outcome.clone(), Some(sol)),
            Err(ModelError::NotConverged(outcome)) => (*outcome, None),
            Err(e) => return config_failure(io, e),
        };
    let alpha = (scenario.method_name == "fpn").then_some(scenario.settings.alpha.value());

    if scenario.format == OutputFormat::Table {
        let _ = io.stdout.write_all(solve_table(&scenario, alpha, &outcome, solution.as_ref()).as_bytes());
    }
    let record = CsvRecord::new(1, &problem.constants, problem.x0, alpha, &outcome, solution.as_ref());
    let report = || {
        to_json(&SolveReport {
            constants: problem.constants,
            x0: problem.x0,
            method: scenario.method_name.clone(),
            kernel: scenario.kernel.name().to_string(),
            alpha,
            epsilon: scenario.settings.epsilon,
            outcome: OutcomeReport::from(&outcome),
            solution: solution.as_ref().map(SolutionReport::from),
        })
    };
    if let Err(e) = emit(io, &scenario, &[record], report) {
        return config_failure(io, format!("writing output: {e}"));
    }

    if let Some(sol) = &solution {
        if sol.swapped {
            let _ = writeln!(io.stderr, "warning: iterate converged with x1 < x2; relabeled so that H > L");
        }
        EXIT_OK
    } else {
        let _ = writeln!(
            io.stderr,
            "solve did not converge: {} ({})",
            outcome.status,
            outcome.message.as_deref().unwrap_or("")
        );
        EXIT_NONCONVERGENCE
    }
}

fn solve_table(
    scenario: &Scenario,
    alpha: Option<f64>,
    outcome: &SolveOutcome,
    solution: Option<&ThresholdSolution>,
) -> String {
    let k = &scenario.problem.constants;
    let mut lines = vec![
        format!("method        {} (kernel {})", scenario.method_name, scenario.kernel.name()),
        format!("alpha         {}", alpha.map(|a| a.to_string()).unwrap_or_else(|| "-".into())),
        format!("epsilon       {:e}", scenario.settings.epsilon),
        format!("a6, a7        {}, {}", k.a6, k.a7),
        format!("x0            ({}, {})", scenario.problem.x0[0], scenario.problem.x0[1]),
        format!("status        {}", outcome.status),
        format!("iterations    {}", outcome.iterations),
    ];
    match solution {
        Some(s) => {
            lines.push(format!("H             {:.8}", s.h));
            lines.push(format!("L             {:.8}", s.l));
            lines.push(format!("A             {:.10e}", s.a));
            lines.push(format!("B             {:.10e}", s.b));
        }
        None => {
            let x: Vec<String> = outcome.x_final.iter().map(|v| format!("{v:.8}")).collect();
            lines.push(format!("last iterate  ({})", x.join(", ")));
        }
    }
    lines.push(format!("|x_n-x_n-1|_2 {}", fmt_opt(outcome.final_step_norm)));
    lines.push(format!("|f(x_n)|_2    {}", fmt_opt(outcome.final_residual_norm)));
    if let Some(s) = solution {
        lines.push(format!("full system   {} (relative {})", fmt_opt(s.full_residual_norm), fmt_opt(s.relative_full_residual)));
    }
    if let Some(msg) = &outcome.message {
        lines.push(format!("note          {msg}"));
    }
    if let Some(trace) = &outcome.trace {
        lines.push(String::new());
        let mut t = TextTable::new(["i", "x1", "x2", "step_norm", "residual_norm"]);
        for (i, x) in trace.iterates.iter().enumerate() {
            let step = if i == 0 { "-".to_string() } else { format!("{:.6e}", trace.step_norms[i - 1]) };
            t.push([
                i.to_string(),
                format!("{:.8}", x[0]),
                format!("{:.8}", x[1]),
                step,
                format!("{:.6e}", trace.residual_norms[i]),
            ]);
        }
        lines.push(t.render());
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// Recomputed published rows.
pub struct ReproducedRow {
    pub reference: ReferenceRow,
    pub initial_residual_norm: f64,
    pub outcome: SolveOutcome,
    pub solution: Option<ThresholdSolution>,
}

impl ReproducedRow {
    pub fn initial_deviation(&self) -> f64 {
        rel_dev(self.initial_residual_norm, self.reference.initial_residual_norm)
    }

    pub fn solution_deviation(&self) -> Option<(f64, f64)> {
        self.solution.as_ref().map(|s| {
            (rel_dev(s.h, self.reference.solution[0]), rel_dev(s.l, self.reference.solution[1]))
        })
    }

    pub fn within_bounds(&self) -> bool {
        self.initial_deviation() <= INITIAL_RESIDUAL_TOLERANCE
            && self.outcome.converged()
            && self.outcome.final_residual_norm <= FINAL_RESIDUAL_BOUND
            && self
                .solution_deviation()
                .is_some_and(|(h, l)| h <= SOLUTION_TOLERANCE && l <= SOLUTION_TOLERANCE)
    }
}

fn rel_dev(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

pub fn reproduce_rows() -> Vec<ReproducedRow> {
    REFERENCE_ROWS
        .iter()
        .map(|row| {
            let problem = row.problem();
            let initial = reduced_residual(&problem.constants, row.x0).map(|r| norm2(&r)).unwrap_or(f64::NAN);
            let settings = row.settings();
            let method = FractionalPseudoNewton::new(settings.alpha, settings.epsilon);
            let (outcome, solution) = match solve_thresholds_with(&method, &problem, &settings) {
                Ok(sol) => (sol.outcome.clone(), Some(sol)),
                Err(ModelError::NotConverged(o)) => (*o, None),
                Err(e) => (
                    SolveOutcome {
                        status: fracroot::SolveStatus::EvaluationFailed,
                        x_final: row.x0.to_vec(),
                        iterations: 0,
                        final_step_norm: f64::NAN,
                        final_residual_norm: f64::NAN,
                        message: Some(e.to_string()),
                        trace: None,
                    },
                    None,
                ),
            };
            ReproducedRow { reference: *row, initial_residual_norm: initial, outcome, solution }
        })
        .collect()
}

pub fn cmd_reproduce_tables(out: Option<&Path>, io: &mut Io<'_>) -> u8 {
    let rows = reproduce_rows();

    let mut t1 = TextTable::new(["row", "a6", "a7", "x0_1", "x0_2", "|f(x0)|_2", "published", "rel dev"]);
    for r in &rows {
        let p = &r.reference;
        t1.push([
            p.row.to_string(),
            p.a6.to_string(),
            p.a7.to_string(),
            p.x0[0].to_string(),
            p.x0[1].to_string(),
            format!("{:.6e}", r.initial_residual_norm),
            format!("{:.5e}", p.initial_residual_norm),
            format!("{:.2e}", r.initial_deviation()),
        ]);
    }
    let mut t2 = TextTable::new([
        "row", "alpha", "H", "published H", "rel dev", "L", "published L", "rel dev", "step_norm", "residual_norm", "n",
        "published n",
    ]);
    let mut t3 = TextTable::new(["row", "A", "B", "full residual (rel)", "status"]);
    for r in &rows {
        let p = &r.reference;
        let (h, l) = r.solution.as_ref().map(|s| (s.h, s.l)).unwrap_or((f64::NAN, f64::NAN));
        let (dh, dl) = r.solution_deviation().unwrap_or((f64::NAN, f64::NAN));
        t2.push([
            p.row.to_string(),
            p.alpha.to_string(),
            format!("{h:.8}"),
            format!("{:.8}", p.solution[0]),
            format!("{dh:.2e}"),
            format!("{l:.8}"),
            format!("{:.8}", p.solution[1]),
            format!("{dl:.2e}"),
            fmt_opt(r.outcome.final_step_norm),
            fmt_opt(r.outcome.final_residual_norm),
            r.outcome.iterations.to_string(),
            p.iterations.to_string(),
        ]);
        let (a, b, rel) = r
            .solution
            .as_ref()
            .map(|s| (format!("{:.10e}", s.a), format!("{:.10e}", s.b), fmt_opt(s.relative_full_residual)))
            .unwrap_or_else(|| ("-".into(), "-".into(), "-".into()));
        t3.push([p.row.to_string(), a, b, rel, r.outcome.status.to_string()]);
    }

    let all_ok = rows.iter().all(ReproducedRow::within_bounds);
    let _ = write!(
        io.stdout,
        "Scenario inputs and initial residuals\n\n{}\nSolutions (epsilon = 1e-4)\n\n{}\nBack-substituted coefficients\n\n{}\n{}\n",
        t1.render(),
        t2.render(),
        t3.render(),
        if all_ok { "all bounds hold" } else { "BOUNDS VIOLATED" }
    );

    if let Some(path) = out {
        let records: Vec<CsvRecord> = rows
            .iter()
            .map(|r| {
                let p = &r.reference;
                CsvRecord::new(p.row, &p.constants(), p.x0, Some(p.alpha), &r.outcome, r.solution.as_ref())
            })
            .collect();
        let written = File::create(path).map_err(csv::Error::from).and_then(|f| write_csv(f, &records));
        if let Err(e) = written {
            return config_failure(io, format!("writing {}: {e}", path.display()));
        }
    }
    if all_ok {
        EXIT_OK
    } else {
        EXIT_NONCONVERGENCE
    }
}

fn thresholds_at(problem: &ThresholdProblem, x: &[f64]) -> Option<SolutionReport> {
    let k = &problem.constants;
    let (h, l) = if x[0] >= x[1] { (x[0], x[1]) } else { (x[1], x[0]) };
    let (a, b) = back_substitute(k, [h, l]).ok()?;
    let reduced = reduced_residual(k, [h, l]).ok()?;
    let full = full_residual(k, h, l, a, b).ok()?;
    Some(SolutionReport {
        h,
        l,
        a,
        b,
        reduced_residual_norm: norm2(&reduced),
        full_residual_norm: norm2(&full),
        relative_full_residual: relative_full_residual(k, &full, h, l),
        swapped: x[0] < x[1],
    })
}

pub fn cmd_sweep(config: &Path, overrides: &Overrides, io: &mut Io<'_>) -> u8 {
    let scenario = match load(config, overrides) {
        Ok(s) => s,
        Err(e) => return config_failure(io, e),
    };
    let grid = match scenario.sweep_grid() {
        Ok(g) => g,
        Err(e) => return config_failure(io, e),
    };
    let problem = &scenario.problem;
    let residual = problem.residual();
    let set = match alpha_sweep_with(
        &residual,
        &problem.x0,
        &grid,
        &scenario.settings,
        scenario.kernel.clone(),
        DEFAULT_DEDUP_TOLERANCE,
    ) {
        Ok(set) => set,
        Err(e) => return config_failure(io, e),
    };

    let roots: Vec<SweepRootReport> = set
        .roots
        .iter()
        .map(|r| SweepRootReport {
            x: r.x.clone(),
            solution: thresholds_at(problem, &r.x),
            alpha: r.alpha.value(),
            found_by: r.found_by.iter().map(|a| a.value()).collect(),
            iterations: r.outcome.iterations,
        })
        .collect();

    if scenario.format == OutputFormat::Table {
        let mut t = TextTable::new(["root", "H", "L", "A", "B", "iters", "found by alpha"]).left_align(6);
        for (i, r) in roots.iter().enumerate() {
            let (h, l, a, b) = r
                .solution
                .as_ref()
                .map(|s| (format!("{:.8}", s.h), format!("{:.8}", s.l), format!("{:.6e}", s.a), format!("{:.6e}", s.b)))
                .unwrap_or_else(|| (format!("{:.8}", r.x[0]), format!("{:.8}", r.x[1]), "-".into(), "-".into()));
            let alphas: Vec<String> = r.found_by.iter().map(|a| format!("{a:.4}")).collect();
            t.push([(i + 1).to_string(), h, l, a, b, r.iterations.to_string(), alphas.join(" ")]);
        }
        let mut s = TextTable::new(["alpha", "status", "reason"]).left_align(1).left_align(2);
        for k in &set.skipped {
            s.push([format!("{:.4}", k.alpha.value()), k.status.to_string(), k.reason.clone()]);
        }
        let _ = write!(
            io.stdout,
            "{} orders swept from x0 = ({}, {}) with kernel {}\n\nDistinct roots\n\n{}\nSkipped orders\n\n{}",
            grid.len(),
            problem.x0[0],
            problem.x0[1],
            scenario.kernel.name(),
            t.render(),
            s.render()
        );
    }

    let mut records = Vec::new();
    for r in &set.roots {
        let solution = thresholds_at(problem, &r.x);
        let mut record = CsvRecord::new(0, &problem.constants, problem.x0, Some(r.alpha.value()), &r.outcome, None);
        if let Some(s) = solution {
            record.h = Some(s.h);
            record.l = Some(s.l);
            record.a = Some(s.a);
            record.b = Some(s.b);
        }
        records.push(record);
    }
    // Skipped orders are listed without an outcome.
    for k in &set.skipped {
        records.push(CsvRecord {
            row: 0,
            a6: problem.constants.a6,
            a7: problem.constants.a7,
            x0_1: problem.x0[0],
            x0_2: problem.x0[1],
            alpha: Some(k.alpha.value()),
            h: None,
            l: None,
            a: None,
            b: None,
            step_norm: None,
            residual_norm: None,
            iters: 0,
            status: k.status,
        });
    }
    for (i, r) in records.iter_mut().enumerate() {
        r.row = i + 1;
    }
    let report = || {
        to_json(&SweepReport {
            constants: problem.constants,
            x0: problem.x0,
            kernel: scenario.kernel.name().to_string(),
            grid: grid.iter().map(|a| a.value()).collect(),
            dedup_tolerance: set.dedup_tolerance,
            roots: roots.clone(),
            skipped: set
                .skipped
                .iter()
                .map(|k| SkippedReport { alpha: k.alpha.value(), status: k.status, reason: k.reason.clone() })
                .collect(),
        })
    };
    if let Err(e) = emit(io, &scenario, &records, report) {
        return config_failure(io, format!("writing output: {e}"));
    }

    if set.is_empty() {
        let _ = writeln!(io.stderr, "no order in the grid converged");
        EXIT_NONCONVERGENCE
    } else {
        EXIT_OK
    }
}
