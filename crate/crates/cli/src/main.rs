use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rank1det::{
    cmd_bench, cmd_det, cmd_erratum, cmd_fscheck, cmd_verify, demo_instance, fscheck_points,
    pretty_bench, pretty_det, pretty_erratum, pretty_fscheck, pretty_verify, Outcome, VERIFY_MAX_N,
};
use rank1det_core::scalar::ScalarKind;
use rank1det_core::text::{parse_any, parse_chart, AnyInput, AnyRank1};
use serde::Serialize;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "rank1det",
    version,
    about = "Determinants of diagonal-plus-rank-one matrices"
)]
struct Cli {
    /// Also print a human-readable summary on standard error.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Q,
    F64,
}

#[derive(Subcommand)]
enum Command {
    /// Check every formula against the dense oracles on seeded random instances.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long = "max-n", default_value_t = 8, value_parser = clap::value_parser!(u64).range(0..=VERIFY_MAX_N as u64))]
        max_n: u64,
        #[arg(long, value_enum, default_value = "q")]
        kind: VerifyKind,
    },
    /// Compare the corrected, misprinted and dense determinants.
    Erratum {
        /// `rank1` instance file; the built-in counterexample when omitted.
        file: Option<PathBuf>,
    },
    /// Finite-difference check that the Fubini-Study Ricci form is (n+1) H.
    Fscheck {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        points: u64,
        #[arg(long, default_value_t = 1e-4, value_parser = positive_f64)]
        step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check the single point in this `chart` file instead of sampling.
        #[arg(long)]
        point: Option<PathBuf>,
    },
    /// Time the O(n) log-determinant against dense pivoted elimination.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "64,256,1024", value_parser = clap::value_parser!(u64).range(1..))]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        repeats: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Determinant(s) of a `dense` or `rank1` file.
    Det { file: PathBuf },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err(format!("must be a positive finite number, got `{s}`")),
        Err(e) => Err(e.to_string()),
    }
}

fn emit<T: Serialize>(report: &T, pretty: Option<String>) {
    println!(
        "{}",
        serde_json::to_string_pretty(report).expect("reports serialize")
    );
    if let Some(text) = pretty {
        eprint!("{text}");
    }
}

fn exit(outcome: Outcome) -> ExitCode {
    match outcome {
        Outcome::Pass => ExitCode::SUCCESS,
        Outcome::CheckFailed => ExitCode::from(EXIT_CHECK_FAILED),
    }
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    match cli.command {
        Command::Verify {
            seed,
            trials,
            max_n,
            kind,
        } => {
            let kind = match kind {
                VerifyKind::Q => ScalarKind::Q,
                VerifyKind::F64 => ScalarKind::F64,
            };
            let (report, outcome) = cmd_verify(seed, trials as usize, max_n as usize, kind);
            if let Some(m) = &report.first_mismatch {
                eprintln!(
                    "mismatch at trial {} for instance:\n{}",
                    m.trial, m.instance
                );
            }
            emit(&report, pretty.then(|| pretty_verify(&report)));
            exit(outcome)
        }
        Command::Erratum { file } => {
            let instance = match file {
                None => AnyRank1::Q(demo_instance()),
                Some(path) => {
                    let text = match read(&path) {
                        Ok(t) => t,
                        Err(e) => return usage_error(e),
                    };
                    match parse_any(&text) {
                        Ok(AnyInput::Rank1(s)) => s,
                        Ok(AnyInput::Dense(_)) => {
                            return usage_error(format!(
                                "{}: line 1, column 1: expected a rank1 file",
                                path.display()
                            ))
                        }
                        Err(e) => return usage_error(format!("{}: {e}", path.display())),
                    }
                }
            };
            let (report, outcome) = cmd_erratum(&instance);
            emit(&report, pretty.then(|| pretty_erratum(&report)));
            exit(outcome)
        }
        Command::Fscheck {
            n,
            points,
            step,
            seed,
            point,
        } => {
            let pts = match point {
                Some(path) => {
                    let text = match read(&path) {
                        Ok(t) => t,
                        Err(e) => return usage_error(e),
                    };
                    match parse_chart::<f64>(&text) {
                        Ok(p) => vec![p],
                        Err(e) => return usage_error(format!("{}: {e}", path.display())),
                    }
                }
                None => fscheck_points(n as usize, points as usize, seed),
            };
            match cmd_fscheck(&pts, step, seed) {
                Ok((report, outcome)) => {
                    emit(&report, pretty.then(|| pretty_fscheck(&report)));
                    exit(outcome)
                }
                Err(e) => usage_error(e),
            }
        }
        Command::Bench {
            sizes,
            repeats,
            seed,
        } => {
            let sizes: Vec<usize> = sizes.into_iter().map(|n| n as usize).collect();
            match cmd_bench(&sizes, repeats as usize, seed) {
                Ok(report) => {
                    emit(&report, pretty.then(|| pretty_bench(&report)));
                    ExitCode::SUCCESS
                }
                Err(failure) => {
                    eprintln!("error: {}", failure.error);
                    emit(&*failure, None);
                    ExitCode::from(EXIT_CHECK_FAILED)
                }
            }
        }
        Command::Det { file } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(e) => return usage_error(e),
            };
            match parse_any(&text) {
                Ok(input) => {
                    let (report, outcome) = cmd_det(&input);
                    emit(&report, pretty.then(|| pretty_det(&report)));
                    exit(outcome)
                }
                Err(e) => usage_error(format!("{}: {e}", file.display())),
            }
        }
    }
}
