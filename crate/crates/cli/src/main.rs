//! `kexcess`: analysis, sweeps, simulated experiments, bound verification and
//! local filtering for two-qubit states.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 bound violation.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Violation(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<kexcess::Error> for CliError {
    fn from(e: kexcess::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "kexcess",
    version,
    about = "Knowledge excesses, Bell-factor bounds and simulated coincidence experiments"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// RNG seed for simulated counts and fuzzing.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; a `<out>.manifest.json` is written next to it. Default: standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file or a run manifest. Flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Bloch form, canonical form, B_max and the canonical-pair excesses of a state file.
    Analyze(commands::AnalyzeArgs),
    /// Knowledge excess along a meter-angle grid, as CSV.
    Sweep(commands::SweepArgs),
    /// ΔK² + ΔK'² over a two-angle grid with the (B_max/2)² bound, as CSV.
    Surface(commands::SurfaceArgs),
    /// Simulated coincidence counts, estimates and the Bell-factor estimate, as JSON.
    Simulate(commands::SimulateArgs),
    /// Random search for violations of the excess-sum bounds.
    Verify(commands::VerifyArgs),
    /// Local filtering to the Bell-diagonal normal form, then saturation.
    Filter(commands::FilterArgs),
}

fn main() -> ExitCode {
    // Usage errors exit 1; clap's default of 2 is reserved for violations here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&cli.common, a),
        Command::Sweep(a) => commands::sweep(&cli.common, a),
        Command::Surface(a) => commands::surface(&cli.common, a),
        Command::Simulate(a) => commands::simulate(&cli.common, a),
        Command::Verify(a) => commands::verify(&cli.common, a),
        Command::Filter(a) => commands::filter(&cli.common, a),
    };
    if let Err(e) = &result {
        match e {
            CliError::Input(msg) => eprintln!("error: {msg}"),
            CliError::Violation(msg) => eprintln!("violation: {msg}"),
        }
    }
    ExitCode::from(exit_code(&result))
}

fn exit_code(result: &Result<(), CliError>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(CliError::Input(_)) => 1,
        Err(CliError::Violation(_)) => 2,
    }
}
