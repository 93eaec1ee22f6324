//! Command-line front end.
//!
//! One binary, four modes selected with `--mode`:
//!
//! - `extract`       dump the 16 transformation operators of a channel
//! - `verify`        run the numeric check battery for a channel
//! - `run-exhaustive` enumerate all outcomes of a protocol run exactly
//! - `run-sampled`   Monte-Carlo the protocol with `--trials` and `--seed`
//!
//! Exit codes: 0 success, 1 runtime/I-O error, 2 usage error. Output is
//! byte-stable for identical configuration and seed.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::expansion::{sigma_table, ChannelSpec, InputState};
use crate::protocol::{run_protocol, RunMode};
use crate::report::{
    report_text, sigma_table_text, to_json_bytes, verify_text, write_output, ReportJson,
    SigmaTableJson, VerifyJson,
};
use crate::verify::run_checks;

/// Accepted decimal roundoff on user-entered unit vectors.
const ENTRY_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Dump the 16 transformation operators.
    Extract,
    /// Run the verification battery.
    Verify,
    /// Exact enumeration of all 16 outcomes.
    RunExhaustive,
    /// Seeded Monte-Carlo run.
    RunSampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Human-readable tables.
    Text,
    /// Machine-readable JSON with 15-significant-digit reals.
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "bellport",
    version,
    about = "Bell-measurement teleportation toolkit: operator extraction, verification, and protocol simulation"
)]
struct Cli {
    /// Channel coefficients alpha,beta,gamma,delta (nonnegative; must have
    /// unit norm up to decimal roundoff unless --normalize is given)
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    channel: Vec<f64>,

    /// Input state to teleport: 4 reals or 8 interleaved re,im values
    /// (unit norm up to decimal roundoff). Defaults to a random normalized
    /// state drawn from --seed.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    input: Option<Vec<f64>>,

    #[arg(long, value_enum)]
    mode: Mode,

    /// Trial count for run-sampled
    #[arg(long, default_value_t = 100_000)]
    trials: u64,

    /// Seed for sampling and for the default random input
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Rescale the channel vector to unit norm before validating
    #[arg(long)]
    normalize: bool,

    /// Write the report to this path instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub channel: ChannelSpec,
    /// None means "draw a random input from the seed".
    pub input: Option<InputState>,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// Argument-level failure: either a flag parse error or a value that failed
/// validation. Both map to exit code 2.
#[derive(Debug)]
pub enum CliError {
    Flags(clap::Error),
    Invalid(Error),
}

fn build_channel(raw: &[f64], normalize: bool) -> Result<ChannelSpec> {
    if raw.len() != 4 {
        return Err(Error::Validation(format!(
            "--channel needs exactly 4 comma-separated values, got {}: {raw:?}",
            raw.len()
        )));
    }
    for &v in raw {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Validation(format!(
                "channel coefficient {v} must be a nonnegative finite real"
            )));
        }
    }
    let norm_sq: f64 = raw.iter().map(|v| v * v).sum();
    if !normalize && (norm_sq - 1.0).abs() > ENTRY_NORM_TOL {
        return Err(Error::Validation(format!(
            "channel {raw:?} has square sum {norm_sq}; pass --normalize to rescale"
        )));
    }
    // exact rescale also absorbs the permitted decimal roundoff
    ChannelSpec::from_unnormalized([raw[0], raw[1], raw[2], raw[3]])
}

fn build_input(raw: &[f64]) -> Result<InputState> {
    let amps: Vec<Complex64> = match raw.len() {
        4 => raw.iter().map(|&re| Complex64::new(re, 0.0)).collect(),
        8 => raw
            .chunks(2)
            .map(|pair| Complex64::new(pair[0], pair[1]))
            .collect(),
        n => {
            return Err(Error::Validation(format!(
                "--input needs 4 reals or 8 interleaved re,im values, got {n}: {raw:?}"
            )))
        }
    };
    let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > ENTRY_NORM_TOL {
        return Err(Error::Validation(format!(
            "input state has square sum {norm_sq}, expected 1 within {ENTRY_NORM_TOL:.0e}"
        )));
    }
    let norm = norm_sq.sqrt();
    InputState::from_array([
        amps[0] / norm,
        amps[1] / norm,
        amps[2] / norm,
        amps[3] / norm,
    ])
}

impl RunConfig {
    fn from_cli(cli: Cli) -> Result<Self> {
        let channel = build_channel(&cli.channel, cli.normalize)?;
        let input = cli.input.as_deref().map(build_input).transpose()?;
        if cli.mode == Mode::RunSampled && cli.trials == 0 {
            return Err(Error::Validation(
                "--trials must be at least 1 in run-sampled mode".into(),
            ));
        }
        Ok(Self {
            channel,
            input,
            mode: cli.mode,
            trials: cli.trials,
            seed: cli.seed,
            format: cli.format,
            out: cli.out,
        })
    }
}

/// Deterministic flag-to-config mapping; rejects unknown flags and invalid
/// values with a diagnostic naming the offending value.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Flags)?;
    RunConfig::from_cli(cli).map_err(CliError::Invalid)
}

/// Runs the configured mode and returns the rendered report bytes.
pub fn execute(config: &RunConfig) -> Result<Vec<u8>> {
    let input = match config.input {
        Some(input) => input,
        None => {
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            InputState::random(&mut rng)
        }
    };
    let json_err = |e: std::io::Error| Error::Validation(format!("serialization failed: {e}"));
    match config.mode {
        Mode::Extract => {
            let table = sigma_table(&config.channel)?;
            Ok(match config.format {
                OutputFormat::Text => sigma_table_text(&config.channel, &table).into_bytes(),
                OutputFormat::Structured => {
                    to_json_bytes(&SigmaTableJson::build(&config.channel, &table))
                        .map_err(json_err)?
                }
            })
        }
        Mode::Verify => {
            let (invertibility, checks) = run_checks(&config.channel, &input, config.seed)?;
            Ok(match config.format {
                OutputFormat::Text => {
                    verify_text(&config.channel, invertibility, &checks).into_bytes()
                }
                OutputFormat::Structured => {
                    to_json_bytes(&VerifyJson::build(&config.channel, invertibility, &checks))
                        .map_err(json_err)?
                }
            })
        }
        Mode::RunExhaustive | Mode::RunSampled => {
            let mode = match config.mode {
                Mode::RunExhaustive => RunMode::Exhaustive,
                _ => RunMode::Sampled {
                    seed: config.seed,
                    trials: config.trials,
                },
            };
            let report = run_protocol(&input, &config.channel, mode)?;
            Ok(match config.format {
                OutputFormat::Text => report_text(&report).into_bytes(),
                OutputFormat::Structured => {
                    to_json_bytes(&ReportJson::build(&report)).map_err(json_err)?
                }
            })
        }
    }
}

/// Full CLI entry point; returns the process exit code.
pub fn run_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(config) => config,
        Err(CliError::Flags(e)) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
        Err(CliError::Invalid(e)) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&config) {
        Ok(bytes) => match write_output(&bytes, config.out.as_deref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(rest: &str) -> Vec<String> {
        std::iter::once("bellport".to_string())
            .chain(rest.split_whitespace().map(str::to_string))
            .collect()
    }

    #[test]
    fn parses_the_uniform_exhaustive_run() {
        let config = parse_args(args("--channel 0.5,0.5,0.5,0.5 --mode run-exhaustive")).unwrap();
        assert_eq!(config.mode, Mode::RunExhaustive);
        assert_eq!(config.channel.coeffs(), [0.5, 0.5, 0.5, 0.5]);
        assert_eq!(config.format, OutputFormat::Text);
        assert!(config.input.is_none());
    }

    #[test]
    fn parses_the_listed_precision_channel() {
        let config = parse_args(args(
            "--channel 0.6,0.4,0.5,0.4795831523 --mode extract --format structured",
        ))
        .unwrap();
        assert_eq!(config.mode, Mode::Extract);
        assert_eq!(config.format, OutputFormat::Structured);
        let sq: f64 = config.channel.coeffs().iter().map(|v| v * v).sum();
        assert!((sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parses_sampled_mode_knobs() {
        let config = parse_args(args(
            "--channel 0.5,0.5,0.5,0.5 --mode run-sampled --trials 100000 --seed 42",
        ))
        .unwrap();
        assert_eq!(config.trials, 100_000);
        assert_eq!(config.seed, 42);
    }

    #[test]
    fn rejects_malformed_channels() {
        assert!(matches!(
            parse_args(args("--channel 0.5,0.5,0.5 --mode extract")),
            Err(CliError::Invalid(Error::Validation(_)))
        ));
        assert!(matches!(
            parse_args(args("--channel 0.5,0.5,0.5,x --mode extract")),
            Err(CliError::Flags(_))
        ));
        assert!(matches!(
            parse_args(args("--channel -0.5,0.5,0.5,0.5 --mode extract")),
            Err(CliError::Invalid(Error::Validation(_)))
        ));
        // off-norm without --normalize is refused, with it accepted
        assert!(matches!(
            parse_args(args("--channel 3,2,1,4 --mode extract")),
            Err(CliError::Invalid(Error::Validation(_)))
        ));
        let config = parse_args(args("--channel 3,2,1,4 --mode extract --normalize")).unwrap();
        let sq: f64 = config.channel.coeffs().iter().map(|v| v * v).sum();
        assert!((sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_flags_and_bad_trials() {
        assert!(matches!(
            parse_args(args("--channel 0.5,0.5,0.5,0.5 --mode extract --what")),
            Err(CliError::Flags(_))
        ));
        assert!(matches!(
            parse_args(args(
                "--channel 0.5,0.5,0.5,0.5 --mode run-sampled --trials 0"
            )),
            Err(CliError::Invalid(Error::Validation(_)))
        ));
    }

    #[test]
    fn accepts_real_and_complex_inputs() {
        let config = parse_args(args(
            "--channel 0.5,0.5,0.5,0.5 --input 0.5,0.5,0.5,0.5 --mode run-exhaustive",
        ))
        .unwrap();
        let amps = config.input.unwrap().amplitudes();
        assert!((amps[0].re - 0.5).abs() < 1e-12);

        let config = parse_args(args(
            "--channel 0.5,0.5,0.5,0.5 --input 0.5,0,0,0.5,0.5,0,0,-0.5 --mode run-exhaustive",
        ))
        .unwrap();
        let amps = config.input.unwrap().amplitudes();
        assert!((amps[1].im - 0.5).abs() < 1e-12);
        assert!((amps[3].im + 0.5).abs() < 1e-12);

        assert!(matches!(
            parse_args(args(
                "--channel 0.5,0.5,0.5,0.5 --input 1,2,3 --mode run-exhaustive"
            )),
            Err(CliError::Invalid(Error::Validation(_)))
        ));
        assert!(matches!(
            parse_args(args(
                "--channel 0.5,0.5,0.5,0.5 --input 1,1,1,1 --mode run-exhaustive"
            )),
            Err(CliError::Invalid(Error::Validation(_)))
        ));
    }

    #[test]
    fn execute_is_byte_deterministic() {
        for mode in ["extract", "verify", "run-exhaustive", "run-sampled"] {
            let line = format!(
                "--channel 0.6,0.4,0.5,0.4795831523 --mode {mode} --format structured --seed 42 --trials 2000"
            );
            let config = parse_args(args(&line)).unwrap();
            let a = execute(&config).unwrap();
            let b = execute(&config).unwrap();
            assert_eq!(a, b, "mode {mode}");
        }
    }

    #[test]
    fn structured_extract_round_trips() {
        let config = parse_args(args(
            "--channel 0.6,0.4,0.5,0.4795831523 --mode extract --format structured",
        ))
        .unwrap();
        let bytes = execute(&config).unwrap();
        let parsed: crate::report::SigmaTableJson = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(parsed.sigmas.len(), 16);
        let table = sigma_table(&config.channel).unwrap();
        for (wire, sigma) in parsed.sigmas.iter().zip(&table) {
            assert_eq!((wire.i, wire.j), (sigma.i, sigma.j));
            for (pair, entry) in wire.matrix.iter().zip(sigma.matrix.entries()) {
                assert!((pair[0] - entry.re).abs() < 1e-14);
                assert!((pair[1] - entry.im).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn run_main_reports_usage_and_runtime_codes() {
        assert_eq!(run_main(args("--mode extract")), 2); // missing channel
        let out = std::env::temp_dir().join("bellport-cli-test-does-not-exist");
        let _ = std::fs::remove_dir_all(&out);
        let line = format!(
            "--channel 0.5,0.5,0.5,0.5 --mode extract --out {}/x.json",
            out.display()
        );
        assert_eq!(run_main(args(&line)), 1); // unwritable path
    }
}
