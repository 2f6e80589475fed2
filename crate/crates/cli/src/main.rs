mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{error_code, CommandResult, EXIT_INPUT};

fn run(cli: &Cli) -> CommandResult {
    match &cli.command {
        Command::Check(job) => commands::check(job),
        Command::Moments { job, n_report } => commands::moments(job, *n_report, cli.seed),
        Command::Reconstruct { measure, space, n } => commands::reconstruct_cmd(measure, space, n),
        Command::Witness(w) => commands::witness(w),
        Command::Oracle { kernel, space, radius, graph, tol } => {
            commands::oracle(kernel, space.as_ref(), *radius, graph.as_deref(), *tol)
        }
        Command::Median { graph, checks, s_grid, measures, tol } => {
            commands::median(graph, checks, s_grid, *measures, *tol, cli.seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT as u8),
            };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.document).expect("documents serialize");
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_INPUT as u8);
                    }
                }
                None => {
                    // A closed pipe downstream is not an error of ours.
                    let _ = writeln!(std::io::stdout().lock(), "{text}");
                }
            }
            eprintln!("{}", outcome.summary);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e) as u8)
        }
    }
}
