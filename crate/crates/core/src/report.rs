//! Report rendering: plain-text tables and a byte-stable structured (JSON)
//! format.
//!
//! Structured output serializes every real with 15 significant digits via a
//! custom formatter, so identical inputs and seeds always produce identical
//! bytes and parsed values recover the printed precision. Matrices appear as
//! row-major arrays of `[re, im]` pairs.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::expansion::{ChannelSpec, Invertibility, TransformationOperator};
use crate::operators::Operator;
use crate::protocol::{RunMode, TeleportReport};
use crate::verify::Check;

/// serde_json formatter printing floats with 15 significant digits.
struct SigFig15;

impl serde_json::ser::Formatter for SigFig15 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.14e}")
    }
}

/// Serializes any report value as compact JSON with fixed float formatting,
/// newline-terminated.
pub fn to_json_bytes<T: Serialize>(value: &T) -> io::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFig15);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    out.push(b'\n');
    Ok(out)
}

fn matrix_pairs(op: &Operator) -> Vec<[f64; 2]> {
    op.entries().iter().map(|e| [e.re, e.im]).collect()
}

/// One transformation operator in wire form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaJson {
    pub i: u8,
    pub j: u8,
    /// Row-major [re, im] pairs of the 4×4 matrix.
    pub matrix: Vec<[f64; 2]>,
}

/// `extract` mode payload: the channel and all 16 operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaTableJson {
    pub channel: [f64; 4],
    pub sigmas: Vec<SigmaJson>,
}

impl SigmaTableJson {
    pub fn build(channel: &ChannelSpec, table: &[TransformationOperator]) -> Self {
        Self {
            channel: channel.coeffs(),
            sigmas: table
                .iter()
                .map(|s| SigmaJson {
                    i: s.i,
                    j: s.j,
                    matrix: matrix_pairs(&s.matrix),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub i: u8,
    pub j: u8,
    pub probability: f64,
    pub success_given_outcome: f64,
}

/// `run-*` mode payload mirroring [`TeleportReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    pub invertibility: String,
    pub outcomes: Vec<OutcomeJson>,
    pub total_success: f64,
    pub fidelity_on_success: f64,
}

impl ReportJson {
    pub fn build(report: &TeleportReport) -> Self {
        Self {
            mode: match report.mode {
                RunMode::Exhaustive => "exhaustive".to_string(),
                RunMode::Sampled { .. } => "sampled".to_string(),
            },
            seed: report.seed,
            trials: report.trials,
            invertibility: report.invertibility.name().to_string(),
            outcomes: report
                .per_outcome
                .iter()
                .map(|r| OutcomeJson {
                    i: r.message.i(),
                    j: r.message.j(),
                    probability: r.probability,
                    success_given_outcome: r.success_given_outcome,
                })
                .collect(),
            total_success: report.total_success,
            fidelity_on_success: report.fidelity_on_success,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `verify` mode payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub channel: [f64; 4],
    pub invertibility: String,
    pub checks: Vec<CheckJson>,
    pub all_pass: bool,
}

impl VerifyJson {
    pub fn build(channel: &ChannelSpec, invertibility: Invertibility, checks: &[Check]) -> Self {
        Self {
            channel: channel.coeffs(),
            invertibility: invertibility.name().to_string(),
            checks: checks
                .iter()
                .map(|c| CheckJson {
                    name: c.name.clone(),
                    value: c.value,
                    tolerance: c.tolerance,
                    pass: c.pass,
                })
                .collect(),
            all_pass: checks.iter().all(|c| c.pass),
        }
    }
}

fn write_matrix(out: &mut String, op: &Operator) {
    for r in 0..op.dim() {
        out.push_str("    ");
        for c in 0..op.dim() {
            let e = op.get(r, c);
            out.push_str(&format!("{:>+12.6}{:+.6}i  ", e.re, e.im));
        }
        out.push('\n');
    }
}

pub fn sigma_table_text(channel: &ChannelSpec, table: &[TransformationOperator]) -> String {
    let [al, be, ga, de] = channel.coeffs();
    let mut out =
        format!("transformation operators for channel ({al:.12}, {be:.12}, {ga:.12}, {de:.12})\n");
    for sigma in table {
        out.push_str(&format!("  sigma[{},{}]:\n", sigma.i, sigma.j));
        write_matrix(&mut out, &sigma.matrix);
    }
    out
}

pub fn report_text(report: &TeleportReport) -> String {
    let mut out = String::new();
    match report.mode {
        RunMode::Exhaustive => out.push_str("mode: exhaustive\n"),
        RunMode::Sampled { seed, trials } => {
            out.push_str(&format!("mode: sampled (seed {seed}, trials {trials})\n"))
        }
    }
    out.push_str(&format!("channel class: {}\n", report.invertibility.name()));
    out.push_str("  i  j   probability      p(success|ij)\n");
    for row in &report.per_outcome {
        out.push_str(&format!(
            "  {}  {}   {:<14.12}   {:<14.12}\n",
            row.message.i(),
            row.message.j(),
            row.probability,
            row.success_given_outcome
        ));
    }
    out.push_str(&format!(
        "total success probability: {:.12}\n",
        report.total_success
    ));
    out.push_str(&format!(
        "fidelity on success (worst branch): {:.12}\n",
        report.fidelity_on_success
    ));
    out
}

pub fn verify_text(
    channel: &ChannelSpec,
    invertibility: Invertibility,
    checks: &[Check],
) -> String {
    let [al, be, ga, de] = channel.coeffs();
    let mut out = format!("verification for channel ({al:.12}, {be:.12}, {ga:.12}, {de:.12})\n");
    out.push_str(&format!("channel class: {}\n", invertibility.name()));
    for check in checks {
        out.push_str(&format!(
            "{}  {:<52} max err {:.3e}  (tol {:.1e})\n",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.value,
            check.tolerance
        ));
    }
    out.push_str(if checks.iter().all(|c| c.pass) {
        "all checks passed\n"
    } else {
        "SOME CHECKS FAILED\n"
    });
    out
}

/// Writes report bytes to stdout or a file, per the `--out` flag.
pub fn write_output(bytes: &[u8], out_path: Option<&std::path::Path>) -> io::Result<()> {
    match out_path {
        Some(path) => std::fs::write(path, bytes),
        None => io::stdout().write_all(bytes),
    }
}
