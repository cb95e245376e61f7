use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

/// How `measured` is judged against `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured − expected| ≤ tolerance`.
    AbsWithin,
    /// `|measured − expected| ≤ tolerance·|expected|`.
    RelWithin,
    /// `measured ≤ expected·(1 + tolerance)`.
    AtMost,
    /// Recorded without an assertion.
    Report,
}

impl Comparison {
    fn as_str(self) -> &'static str {
        match self {
            Self::AbsWithin => "abs_within",
            Self::RelWithin => "rel_within",
            Self::AtMost => "at_most",
            Self::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case: String,
    pub inputs: String,
    pub measured: f64,
    pub expected: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Row {
    pub fn new(
        case: impl Into<String>,
        inputs: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let abs_err = (measured - expected).abs();
        let rel_err = if expected != 0.0 { abs_err / expected.abs() } else { abs_err };
        let pass = match comparison {
            Comparison::AbsWithin => abs_err <= tolerance,
            Comparison::RelWithin => abs_err <= tolerance * expected.abs(),
            Comparison::AtMost => measured <= expected * (1.0 + tolerance),
            Comparison::Report => measured.is_finite(),
        };
        Self {
            case: case.into(),
            inputs: inputs.into(),
            measured,
            expected,
            abs_err,
            rel_err,
            tolerance,
            comparison,
            pass,
        }
    }

    pub fn report(case: impl Into<String>, inputs: impl Into<String>, measured: f64) -> Self {
        Self::new(case, inputs, measured, measured, 0.0, Comparison::Report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    pub passed: bool,
    pub wall_time_s: f64,
}

pub const CSV_HEADER: [&str; 10] =
    ["experiment", "case", "inputs", "measured", "expected", "abs_err", "rel_err", "tolerance", "comparison", "pass"];

/// 17 significant digits, which round-trips every finite double.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Report {
    pub fn new(config: ExperimentConfig, rows: Vec<Row>, wall_time_s: f64) -> Self {
        let passed = rows.iter().all(|r| r.pass);
        Self { experiment: config.experiment.clone(), config, rows, passed, wall_time_s }
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    /// Serialized report without the wall-time field.
    pub fn payload(&self, format: Format) -> Result<Vec<u8>, CliError> {
        let stripped = Report { wall_time_s: 0.0, ..self.clone() };
        let mut buf = Vec::new();
        stripped.emit(&mut buf, format)?;
        Ok(buf)
    }

    pub fn emit(&self, out: &mut impl Write, format: Format) -> Result<(), CliError> {
        let err = |e: &dyn std::fmt::Display| CliError::Output(e.to_string());
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self).map_err(|e| err(&e))?;
                writeln!(out).map_err(|e| err(&e))
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(CSV_HEADER).map_err(|e| err(&e))?;
                for r in &self.rows {
                    w.write_record([
                        self.experiment.clone(),
                        r.case.clone(),
                        r.inputs.clone(),
                        num(r.measured),
                        num(r.expected),
                        num(r.abs_err),
                        num(r.rel_err),
                        num(r.tolerance),
                        r.comparison.as_str().to_string(),
                        r.pass.to_string(),
                    ])
                    .map_err(|e| err(&e))?;
                }
                w.flush().map_err(|e| err(&e))
            }
        }
    }
}
