use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use clifford_dynamics_cli::commands::EXIT_USAGE;
use clifford_dynamics_cli::{cmd_check, cmd_derive, cmd_simulate, cmd_verify};

/// Lagrangian dynamics on the flat Clifford-Kähler space R^{8n}.
#[derive(Parser)]
#[command(name = "ckdyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check J^2 = -Id, metric compatibility and 2-form antisymmetry for
    /// J1..J6, and print the composition table.
    Verify,
    /// Print the eight Euler-Lagrange equations for one structure.
    Derive {
        #[arg(long, allow_negative_numbers = true)]
        structure: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        n: i64,
    },
    /// Integrate the semispray from a JSON config and write a CSV trajectory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for the velocity at one state and print residual diagnostics.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated list of 8n reals.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
    },
}

fn run(cli: Cli) -> io::Result<i32> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    let code = match cli.command {
        Command::Verify => cmd_verify(&mut out)?,
        Command::Derive { structure, n } => cmd_derive(structure, n, &mut out, &mut err)?,
        Command::Simulate { config, out: path } => {
            cmd_simulate(&config, path.as_deref(), &mut out, &mut err)?
        }
        Command::Check { config, state } => cmd_check(&config, &state, &mut out, &mut err)?,
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
