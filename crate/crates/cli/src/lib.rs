//! Command-line front end for `locc-core`.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 infeasible conversion,
//! 3 verification failure.

pub mod commands;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{CliError, Format, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "locc",
    version,
    about = "Feasibility, synthesis, verification and simulation of LOCC conversions between bipartite pure states"
)]
pub struct Cli {
    /// Tolerance threaded to every numerical predicate.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print Schmidt spectra, the rank condition and the maximal probability.
    Check { a: PathBuf, b: PathBuf },
    /// Synthesize, verify and write a protocol converting A into B.
    Synth {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a protocol file against its source and target states.
    Verify {
        protocol: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Monte-Carlo run of a protocol on its source state.
    Simulate {
        protocol: PathBuf,
        a: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads; the output does not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Move a contraction on Bob's side of PSI to Alice's side.
    Lopopescu {
        m: PathBuf,
        psi: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct Target {
    /// Target success probability.
    #[arg(long)]
    pub prob: Option<f64>,
    /// Use the maximal success probability (the default).
    #[arg(long)]
    pub max: bool,
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage(anyhow::anyhow!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    let s = Settings {
        tol: cli.tol,
        format: cli.format,
    };
    match &cli.command {
        Command::Check { a, b } => commands::check(a, b, s, out, err),
        Command::Synth {
            a,
            b,
            target,
            out: path,
        } => commands::synth(a, b, target.prob, path, s, out, err),
        Command::Verify { protocol, a, b } => commands::verify_cmd(protocol, a, b, s, out, err),
        Command::Simulate {
            protocol,
            a,
            trials,
            seed,
            workers,
        } => commands::simulate_cmd(protocol, a, *trials, *seed, *workers, s, out, err),
        Command::Lopopescu { m, psi, out: path } => {
            commands::lopopescu_cmd(m, psi, path, s, out, err)
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 1;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match run(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
