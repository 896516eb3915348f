use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coherence_cli::commands::{self, CliError};
use coherence_cli::figure1::DEFAULT_STEPS;
use coherence_core::DETECTION_TOL;

/// l1-norm coherence and coherence-based entanglement checks.
#[derive(Parser)]
#[command(name = "qcoh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the l1 norm of coherence of a QSTATE file.
    Coherence { file: PathBuf },
    /// Run every applicable check and print the verdict.
    Classify {
        file: PathBuf,
        /// QSTATE `mixed`/`product` file giving the ensemble.
        decomposition: Option<PathBuf>,
        #[arg(long, default_value_t = DETECTION_TOL)]
        tol: f64,
    },
    /// Sweep a0 over [0, 1/√2] and write the coherence-vs-bound CSV.
    Figure1 {
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DETECTION_TOL)]
        tol: f64,
    },
    /// Reproduce every worked example; exit 1 if any row fails.
    Examples,
    /// Print the reduced density matrix on the kept subsystems.
    Reduce {
        file: PathBuf,
        /// Comma-separated subsystem indices, 0-based.
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    /// Run a brute-force oracle suite: product-law, convexity, soundness or all.
    Oracle {
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli, out: &mut impl Write) -> Result<bool, CliError> {
    match cli.command {
        Command::Coherence { file } => commands::coherence(&file, out).map(|_| true),
        Command::Classify { file, decomposition, tol } => {
            commands::classify(&file, decomposition.as_deref(), tol, out).map(|_| true)
        }
        Command::Figure1 { steps, out: path, tol } => commands::figure1(steps, path.as_deref(), tol, out).map(|_| true),
        Command::Examples => commands::examples(out),
        Command::Reduce { file, keep } => commands::reduce(&file, &keep, out).map(|_| true),
        Command::Oracle { suite, trials, seed } => commands::oracle(&suite, trials, seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
