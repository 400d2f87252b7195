//! `doorway`: Monte Carlo and closed-form survival curves as CSV, with a
//! JSON manifest per run.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 1 I/O failure.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Failure::Io(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl From<doorway::Error> for Failure {
    fn from(e: doorway::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "doorway", version, about = "Doorway-state survival probability: Monte Carlo and closed forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file (`-` for stdin); a manifest.json also works
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads: 1 serial, 0 all cores
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory
    #[arg(long, global = true, default_value = "doorway-out")]
    out_dir: PathBuf,
    /// Largest acceptable quadrature error estimate before a warning
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Monte Carlo survival curve, mean IPR and optional LDOS histogram
    Mc,
    /// Closed-form survival curves over λ and τ grids
    Analytic,
    /// Join two curves (MC or closed form) on a τ grid, with z-scores
    Compare,
    /// Mean IPR closed forms and asymptotes over a λ grid
    IprSweep,
    /// Sampled R(k, s) against the closed-form kernel
    KernelCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Mc => "mc",
            Command::Analytic => "analytic",
            Command::Compare => "compare",
            Command::IprSweep => "ipr-sweep",
            Command::KernelCheck => "kernel-check",
        }
    }
}

fn run(cli: Cli) -> Result<output::RunManifest, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => config::load(path)?,
        None => config::Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(Failure::config("--tol must be positive"));
        }
        cfg.tol = t;
    }
    let mut out = output::Run::new(&cli.out_dir, cli.command.name(), &cfg)?;
    match cli.command {
        Command::Mc => commands::mc(&cfg, &mut out)?,
        Command::Analytic => commands::analytic(&cfg, &mut out)?,
        Command::Compare => commands::compare(&cfg, &mut out)?,
        Command::IprSweep => commands::ipr_sweep(&cfg, &mut out)?,
        Command::KernelCheck => commands::kernel_check(&cfg, &mut out)?,
    }
    out.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = cli.out_dir.clone();
    match run(cli) {
        Ok(m) => {
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            for f in &m.outputs {
                println!("{}", dir.join(&f.path).display());
            }
            println!("{}", dir.join("manifest.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("doorway: {e}");
            ExitCode::from(e.code())
        }
    }
}
