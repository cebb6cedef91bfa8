//! Human-readable tables, CSV rows and structured (JSON) reports.

use std::io::{self, Write};

use fracroot::dixit_pindyck::{ModelConstants, ThresholdSolution};
use fracroot::solver::{IterationTrace, SolveOutcome, SolveStatus};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 14] = [
    "row", "a6", "a7", "x0_1", "x0_2", "alpha", "H", "L", "A", "B", "step_norm", "residual_norm", "iters", "status",
];

/// One machine-readable result line. Missing values are empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub row: usize,
    pub a6: f64,
    pub a7: f64,
    pub x0_1: f64,
    pub x0_2: f64,
    pub alpha: Option<f64>,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub step_norm: Option<f64>,
    pub residual_norm: Option<f64>,
    pub iters: usize,
    pub status: SolveStatus,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl CsvRecord {
    /// From a solve; on non-convergence `H`, `L` carry the last iterate.
    pub fn new(
        row: usize,
        constants: &ModelConstants,
        x0: [f64; 2],
        alpha: Option<f64>,
        outcome: &SolveOutcome,
        solution: Option<&ThresholdSolution>,
    ) -> Self {
        let (h, l, a, b) = match solution {
            Some(s) => (Some(s.h), Some(s.l), Some(s.a), Some(s.b)),
            None => (outcome.x_final.first().copied(), outcome.x_final.get(1).copied(), None, None),
        };
        Self {
            row,
            a6: constants.a6,
            a7: constants.a7,
            x0_1: x0[0],
            x0_2: x0[1],
            alpha,
            h,
            l,
            a,
            b,
            step_norm: finite(outcome.final_step_norm),
            residual_norm: finite(outcome.final_residual_norm),
            iters: outcome.iterations,
            status: outcome.status,
        }
    }

    fn fields(&self) -> Vec<String> {
        let num = |v: f64| format!("{v:.16e}");
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        vec![
            self.row.to_string(),
            num(self.a6),
            num(self.a7),
            num(self.x0_1),
            num(self.x0_2),
            opt(self.alpha),
            opt(self.h),
            opt(self.l),
            opt(self.a),
            opt(self.b),
            opt(self.step_norm),
            opt(self.residual_norm),
            self.iters.to_string(),
            self.status.to_string(),
        ]
    }
}

/// Writes the header and records; numbers carry 17 significant digits.
pub fn write_csv<W: Write>(out: W, records: &[CsvRecord]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for record in records {
        writer.write_record(record.fields())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> csv::Result<Vec<CsvRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// JSON mirror of a solve outcome; non-finite norms become `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeReport {
    pub status: SolveStatus,
    pub x_final: Vec<f64>,
    pub iterations: usize,
    pub final_step_norm: Option<f64>,
    pub final_residual_norm: Option<f64>,
    pub message: Option<String>,
    pub trace: Option<IterationTrace>,
}

impl From<&SolveOutcome> for OutcomeReport {
    fn from(o: &SolveOutcome) -> Self {
        Self {
            status: o.status,
            x_final: o.x_final.clone(),
            iterations: o.iterations,
            final_step_norm: finite(o.final_step_norm),
            final_residual_norm: finite(o.final_residual_norm),
            message: o.message.clone(),
            trace: o.trace.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub reduced_residual_norm: f64,
    pub full_residual_norm: f64,
    pub relative_full_residual: f64,
    pub swapped: bool,
}

impl From<&ThresholdSolution> for SolutionReport {
    fn from(s: &ThresholdSolution) -> Self {
        Self {
            h: s.h,
            l: s.l,
            a: s.a,
            b: s.b,
            reduced_residual_norm: s.reduced_residual_norm,
            full_residual_norm: s.full_residual_norm,
            relative_full_residual: s.relative_full_residual,
            swapped: s.swapped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub constants: ModelConstants,
    pub x0: [f64; 2],
    pub method: String,
    pub kernel: String,
    pub alpha: Option<f64>,
    pub epsilon: f64,
    pub outcome: OutcomeReport,
    pub solution: Option<SolutionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRootReport {
    pub x: Vec<f64>,
    pub solution: Option<SolutionReport>,
    pub alpha: f64,
    pub found_by: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedReport {
    pub alpha: f64,
    pub status: SolveStatus,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub constants: ModelConstants,
    pub x0: [f64; 2],
    pub kernel: String,
    pub grid: Vec<f64>,
    pub dedup_tolerance: f64,
    pub roots: Vec<SweepRootReport>,
    pub skipped: Vec<SkippedReport>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

/// Plain text table, right-aligned unless told otherwise.
#[derive(Debug, Default)]
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    left: Vec<usize>,
}

impl TextTable {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(header: I) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new(), left: Vec::new() }
    }

    /// Left-aligns column `col`; columns are right-aligned otherwise.
    pub fn left_align(mut self, col: usize) -> Self {
        self.left.push(col);
        self
    }

    pub fn push<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| {
                std::iter::once(&self.header)
                    .chain(&self.rows)
                    .filter_map(|r| r.get(c))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    if self.left.contains(&i) {
                        format!("{:<w$}", s, w = widths[i])
                    } else {
                        format!("{:>w$}", s, w = widths[i])
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1)));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(row: usize, scale: f64) -> CsvRecord {
        CsvRecord {
            row,
            a6: 451_474.0,
            a7: 396_499.0,
            x0_1: 15.0,
            x0_2: 20.0,
            alpha: Some(0.26131),
            h: Some(41_844.570_904_43 * scale),
            l: Some(0.1 + 0.2),
            a: Some(1.0 / 3.0 * scale),
            b: Some(std::f64::consts::PI * 1e7),
            step_norm: Some(6.942_284_851_194_468e-6),
            residual_norm: None,
            iters: 78,
            status: SolveStatus::Converged,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let records = vec![record(1, 1.0), record(2, 1.0 + f64::EPSILON), record(3, -7.25e-300)];
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("row,a6,a7,x0_1,x0_2,alpha,H,L,A,B,step_norm,residual_norm,iters,status\n"));
        assert!(!text.contains("41,844"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn table_alignment() {
        let mut t = TextTable::new(["a", "bbb"]);
        t.push(["1234", "5"]);
        let text = t.render();
        assert_eq!(text, "   a  bbb\n---------\n1234    5\n");
        let mut t = TextTable::new(["a", "bbb"]).left_align(1);
        t.push(["1234", "5"]);
        assert_eq!(t.render(), "   a  bbb\n---------\n1234  5\n");
    }
}
