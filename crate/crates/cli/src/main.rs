//! `cauchon`: enumerate Cauchon diagrams, restore their matrices, classify
//! them by rank and check the results against the closed-form counts.

mod commands;
mod output;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::EnumerateOptions;
use crate::output::{open_sink, CliError, CliResult, Format};
use crate::verify::Suite;

#[derive(Parser, Debug)]
#[command(name = "cauchon", version, about = "Torus-invariant primes of quantum matrices, computed exactly")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "ascii")]
    format: Format,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Lift the default size limits (up to 10 for counts, 4 for symbolic work, 6 for restore).
    #[arg(long, global = true)]
    allow_large: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form counts per rank and the three total formulas.
    Count {
        #[arg(long)]
        n: usize,
    },
    /// List the diagrams of the n x n grid in canonical order.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Keep only diagrams of this rank (implies --classify).
        #[arg(long)]
        rank: Option<usize>,
        /// Annotate every diagram with its rank classification.
        #[arg(long)]
        classify: bool,
        /// JSON-lines file of classification records, read and extended.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Print the restored matrix of a diagram.
    Restore {
        #[arg(long)]
        n: usize,
        /// Rows separated by '/', e.g. 011/011/001.
        #[arg(long)]
        diagram: String,
    },
    /// Compare the w_(r,gamma) family with the diagrams surviving localization at r.
    Localized {
        #[arg(long)]
        n: usize,
        /// Comma-separated strictly increasing list; empty for t = 0.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Run invariant suites and report pass/fail.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

fn run(cli: &Cli) -> CliResult<bool> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut out = open_sink(cli.output.as_deref())?;
    let format = cli.format;
    let passed = match &cli.command {
        Command::Count { n } => commands::count(*n, cli.allow_large, format, &mut out)?,
        Command::Enumerate { n, rank, classify, cache } => {
            let opts = EnumerateOptions {
                n: *n,
                rank: *rank,
                classify: *classify,
                cache: cache.as_deref(),
                allow_large: cli.allow_large,
            };
            commands::enumerate(&opts, format, &mut out)?
        }
        Command::Restore { n, diagram } => commands::restore_cmd(*n, diagram, cli.allow_large, format, &mut out)?,
        Command::Localized { n, r } => commands::localized(*n, r, cli.allow_large, format, &mut out)?,
        Command::Verify { n, suite } => verify::verify(*n, *suite, cli.allow_large, format, &mut out)?,
    };
    out.flush()?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let code = e.exit_code();
            if code != 0 {
                eprintln!("error: {e}");
            }
            ExitCode::from(code as u8)
        }
    }
}
