//! Scenario runner: executes JSON configs, parameter sweeps, and the
//! self-check suite, emitting CSV/JSON result files.

use clap::{Parser, Subcommand};
use phasespace::run::{parse_config, run, suite, sweep, RunConfig};
use phasespace::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "phasespace", version, about = "Phase-space quantum mechanics scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config and write result files.
    Run {
        /// Path to the JSON config.
        config: PathBuf,
        /// Output directory (default: current directory).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Emit a frame CSV every N output samples (0 = none).
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Run the invariant batteries of all modules.
    Suite,
    /// Run a config once per value of one numeric parameter.
    Sweep {
        config: PathBuf,
        /// Parameter name to vary (e.g. dphi, tau, b_field).
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Exit statuses: 2 for config/validation problems, 3 for numerical
/// admission failures, 1 for anything else.
fn exit_for(e: &Error) -> u8 {
    match e {
        Error::ParseError(_) | Error::ValidationError { .. } => 2,
        Error::GridTooSmall { .. }
        | Error::AliasingDetected { .. }
        | Error::TruncationOverflow { .. }
        | Error::TruncationTooSevere { .. }
        | Error::BandwidthExceeded { .. }
        | Error::StabilityViolation { .. }
        | Error::QuadratureDivergence
        | Error::NonHermitian { .. }
        | Error::FormalismMismatch { .. }
        | Error::IncommensurateMomentum { .. } => 3,
        _ => 1,
    }
}

fn load_config(path: &PathBuf, stride: Option<usize>) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = stride {
        cfg.stride = s;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out, stride } => load_config(&config, stride).and_then(|cfg| {
            let summary = run(&cfg, &out)?;
            for f in &summary.formalisms {
                println!(
                    "{}: phase {:+.6} (closed form {:+.6}, dev {:.3e}), P(tau) {:.6e}",
                    f.formalism,
                    f.extracted_phase,
                    f.closed_form_phase,
                    f.abs_phase_deviation,
                    f.prob_at_tau
                );
            }
            if let Some(dev) = summary.cross_formalism_phase_deviation {
                println!("cross-formalism phase deviation: {dev:.3e}");
            }
            println!("results written to {}", out.display());
            Ok(())
        }),
        Command::Suite => {
            let checks = suite();
            let mut failed = 0usize;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} - {}", c.name, c.detail);
                if !c.passed {
                    failed += 1;
                }
            }
            println!("{} passed, {} failed", checks.len() - failed, failed);
            if failed > 0 {
                return ExitCode::from(1);
            }
            Ok(())
        }
        Command::Sweep { config, param, values, out } => {
            load_config(&config, None).and_then(|cfg| {
                if values.is_empty() {
                    return Err(Error::ValidationError {
                        field: "values".into(),
                        reason: "sweep needs at least one value".into(),
                    });
                }
                let entries = sweep(&cfg, &param, &values, &out)?;
                for e in &entries {
                    let phase = e
                        .summary
                        .formalisms
                        .first()
                        .map(|f| format!("phase {:+.6}, P(tau) {:.4e}", f.extracted_phase, f.prob_at_tau))
                        .unwrap_or_else(|| "-".into());
                    println!("{param}={}: {phase}", e.value);
                }
                println!("sweep summary written to {}", out.join("sweep_summary.json").display());
                Ok(())
            })
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
