//! `canon`: batch front-end for the canonical basis workbench.
//!
//! Exit codes: 0 success, 1 config error, 2 solver failure, 3 property violation.

mod commands;
mod config;
mod output;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use canon_core::precanon::Mode;
use clap::{Parser, Subcommand, ValueEnum};

use config::JobConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] canon_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use canon_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Core(E::InvalidCartan(_) | E::InvalidWeight(_) | E::OutOfRange(_) | E::Unsupported(_) | E::NotFiniteType) => 1,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "canon", version, about = "Canonical and dual canonical bases: batch jobs and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON job configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Truncation order recorded for series-valued quantities.
    #[arg(long, global = true)]
    truncation: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tensor product: stringy standards, canonical and dual bases per weight space.
    Tensor,
    /// Kazhdan–Lusztig basis of the Hecke algebra of S_n.
    Hecke,
    /// KLR relations in the polynomial representation and the affine sl2 example.
    KlrSelftest,
    /// Stabilization of E^(a)F^(b)1_n acting on v_{-λ} ⊗ v_μ.
    Udot,
    /// Dual standard and canonical bases, dual structure, balanced positivity.
    Dual,
    /// Render a report JSON file as text.
    Report {
        /// Report produced by another subcommand.
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Gs,
    Triangular,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(violations) if violations.is_empty() => ExitCode::SUCCESS,
        Ok(violations) => {
            for v in &violations {
                eprintln!("property violation: {v}");
            }
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<commands::Violations, CliError> {
    if let Command::Report { path } = &cli.command {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let rendered = render::render(&value)?;
        print!("{rendered}");
        if let Some(dir) = &cli.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("report.txt"), &rendered)?;
        }
        return Ok(vec![]);
    }
    let mut cfg = JobConfig::load(cli.config.as_deref())?;
    // flags override config keys
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(t) = cli.truncation {
        cfg.truncation = Some(t);
    }
    if let Some(m) = cli.mode {
        cfg.mode = Some(match m {
            ModeArg::Gs => Mode::Gs,
            ModeArg::Triangular => Mode::Triangular,
        });
    }
    if let Some(o) = cli.out {
        cfg.out = Some(o);
    }
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("canon-out"));
    std::fs::create_dir_all(&out)?;
    dispatch(&cli.command, &cfg, &out)
}

fn dispatch(cmd: &Command, cfg: &JobConfig, out: &Path) -> Result<commands::Violations, CliError> {
    match cmd {
        Command::Tensor => commands::tensor(cfg, out),
        Command::Hecke => commands::hecke(cfg, out),
        Command::KlrSelftest => commands::klr_selftest(cfg, out),
        Command::Udot => commands::udot(cfg, out),
        Command::Dual => commands::dual(cfg, out),
        Command::Report { .. } => unreachable!("handled above"),
    }
}
