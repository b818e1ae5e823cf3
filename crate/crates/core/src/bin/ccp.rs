use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coherent_conditional::cli::{self, Outcome, EXIT_INPUT};

/// Coherence checking and conditional probability synthesis for
/// interval-valued assessments on conditional events.
#[derive(Parser)]
#[command(name = "ccp", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide g-coherence; exit 0 if g-coherent, 1 if not.
    Check { file: PathBuf },
    /// Print the least-committal correction as an assessment file.
    Correct { file: PathBuf },
    /// Print the coherent extension bounds for one more conditional event.
    Bounds {
        file: PathBuf,
        #[arg(long)]
        event: String,
        #[arg(long)]
        given: String,
    },
    /// Build and verify a full conditional probability; prints JSON.
    Synthesize {
        file: PathBuf,
        /// File with one precise value per assess line.
        #[arg(long)]
        precise: Option<PathBuf>,
        /// Include every linear program solved.
        #[arg(long)]
        trace: bool,
    },
    /// Re-run the verification suite on a stored result document.
    Verify { result: PathBuf },
}

fn read(path: &PathBuf) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome {
        exit_code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("error: {}: {e}\n", path.display()),
    })
}

fn dispatch(command: Command) -> Result<Outcome, Outcome> {
    Ok(match command {
        Command::Check { file } => cli::cmd_check(&read(&file)?),
        Command::Correct { file } => cli::cmd_correct(&read(&file)?),
        Command::Bounds { file, event, given } => cli::cmd_bounds(&read(&file)?, &event, &given),
        Command::Synthesize {
            file,
            precise,
            trace,
        } => {
            let precise = precise.as_ref().map(read).transpose()?;
            cli::cmd_synthesize(&read(&file)?, precise.as_deref(), trace)
        }
        Command::Verify { result } => cli::cmd_verify(&read(&result)?),
    })
}

fn main() -> ExitCode {
    let outcome = dispatch(Args::parse().command).unwrap_or_else(|o| o);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.exit_code as u8)
}
