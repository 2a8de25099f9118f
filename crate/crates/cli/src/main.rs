//! Batch front-end for the certificate pipeline. An experiment file names an
//! algebra, a point space, and a test-function recipe; each command runs one
//! construction or check, writes its certificate or report plus a
//! human-readable table into the output directory, and exits by outcome:
//! 0 when everything passed, 1 when a certificate failed, 2 for anything
//! wrong with the input, 3 when a library precondition blocked the run.

mod commands;
mod experiment;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use experiment::{CommandKind, Experiment};

#[derive(Parser)]
#[command(
    name = "banachlab",
    version,
    about = "Certified approximate diagonals and derivation reports for finite Banach algebra experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandName,

    /// Experiment file (JSON)
    #[arg(long, global = true, value_name = "FILE")]
    spec: Option<PathBuf>,

    /// Output directory for certificates, reports, and tables
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Override the generator seed named in the experiment file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Scalar field of the run
    #[arg(long, global = true, value_parser = ["real", "complex"])]
    field: Option<String>,

    /// Override the target accuracy
    #[arg(long, global = true)]
    eps: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum CommandName {
    /// Build a certified approximate diagonal for functions into the base algebra
    BuildDiagonal,
    /// Re-verify the diagonal stored in the output directory against fresh test functions
    Certify,
    /// Sweep random tensors and compare the exact projective norm against its certified bounds
    GrothendieckCheck,
    /// Compute the derivation space of an algebra and report weak amenability
    Derivations,
    /// Check that weak amenability transfers from the base algebra to the function algebra
    TransferCheck,
}

impl CommandName {
    fn kind(self) -> CommandKind {
        match self {
            CommandName::BuildDiagonal => CommandKind::BuildDiagonal,
            CommandName::Certify => CommandKind::Certify,
            CommandName::GrothendieckCheck => CommandKind::GrothendieckCheck,
            CommandName::Derivations => CommandKind::Derivations,
            CommandName::TransferCheck => CommandKind::TransferCheck,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let loaded = Experiment::load(
        cli.command.kind(),
        cli.spec.as_deref(),
        cli.out.as_deref(),
        cli.seed,
        cli.field.as_deref(),
        cli.eps,
    );
    let outcome = loaded.and_then(|exp| commands::dispatch(&exp));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
