//! `qecwb`: command-line front end for the quantum error correction workbench.

mod commands;
mod grid_arg;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qecwb_core::grid::{linspace, small_gamma_window};
use qecwb_core::linalg::C64;

use commands::{Certificate, RecoveryChoice};
use grid_arg::parse_grid;
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "qecwb", version, about = "Exact and approximate quantum error correction workbench")]
#[command(propagate_version = true, subcommand_required = true, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// parameter grid: `start:stop:count`, `log:start:stop:count` or a comma list
    #[arg(long, global = true)]
    grid: Option<String>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// tolerance for trace-preservation and completeness certificates
    #[arg(long, global = true, env = "QECWB_TOL", default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// repetition code under bit flips: fidelity, baseline and thresholds (default grid 0:1:101)
    Bitflip,
    /// Leung code under amplitude damping with a chosen recovery, plus a quadratic fit
    AdFidelity {
        #[arg(long, value_enum)]
        recovery: RecoveryChoice,
        /// Fletcher parameters `a_re,a_im,b_re,b_im` (default: the closed-form optimum per rate)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
        /// scan resolution of the numeric Fletcher optimization
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
    },
    /// classify all 28 self-complementary codeword pairs
    Enumerate,
    /// the three recovery fidelities and their truncated series on [0, gamma-max]
    Fig1 {
        #[arg(long, default_value_t = 1e-2)]
        gamma_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// polar decomposition and residue of the no-damping AD operator on the Leung code
    AppendixA {
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
    },
    /// channel and recovery completeness certificates (default grid 0:1:11)
    Certify,
}

/// Resolved options for one invocation.
#[derive(Debug)]
struct RunConfig {
    command: Command,
    grid: Option<Vec<f64>>,
    out: Option<PathBuf>,
    format: Format,
    tol: f64,
}

impl TryFrom<Cli> for RunConfig {
    type Error = anyhow::Error;

    fn try_from(cli: Cli) -> Result<Self> {
        if !(cli.tol.is_finite() && cli.tol > 0.0) {
            bail!("tolerance must be positive and finite, got {}", cli.tol);
        }
        Ok(Self {
            grid: cli.grid.as_deref().map(parse_grid).transpose()?,
            command: cli.command,
            out: cli.out,
            format: cli.format,
            tol: cli.tol,
        })
    }
}

fn run(cfg: RunConfig) -> Result<commands::Report> {
    let grid = |default: Vec<f64>| cfg.grid.clone().unwrap_or(default);
    match &cfg.command {
        Command::Bitflip => commands::bitflip(&grid(linspace(0.0, 1.0, 101)), cfg.tol),
        Command::AdFidelity {
            recovery,
            params,
            resolution,
        } => {
            let params = match params.as_deref() {
                None => None,
                Some(&[a_re, a_im, b_re, b_im]) => {
                    if *recovery != RecoveryChoice::Fletcher {
                        bail!("--params only applies to --recovery fletcher");
                    }
                    Some((C64::new(a_re, a_im), C64::new(b_re, b_im)))
                }
                Some(other) => bail!("--params takes four numbers, got {}", other.len()),
            };
            commands::ad_fidelity(&grid(small_gamma_window()), *recovery, params, *resolution, cfg.tol)
        }
        Command::Enumerate => commands::enumerate(),
        Command::Fig1 { gamma_max, points } => commands::fig1(&grid(linspace(0.0, *gamma_max, *points)), cfg.tol),
        Command::AppendixA { gamma } => commands::appendix_a(*gamma, cfg.tol),
        Command::Certify => commands::certify(&grid(linspace(0.0, 1.0, 11)), cfg.tol),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::try_from(cli).and_then(|cfg| {
        let (format, out) = (cfg.format, cfg.out.clone());
        let report = run(cfg)?;
        emit(&report.table.render(format), out.as_ref())?;
        Ok(report.certificates)
    });
    match result {
        Ok(certificates) => {
            let failed: Vec<&Certificate> = certificates.iter().filter(|c| !c.passed).collect();
            for c in &failed {
                eprintln!("certificate failed: {}: {}", c.name, c.detail);
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
