use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holonomy_cli::corpus::cmd_corpus;
use holonomy_cli::summary::cmd_report;
use holonomy_cli::verify::{cmd_verify, parse_stages, RunConfig};
use holonomy_cli::{configure_threads, Outcome};
use holonomy_core::probe::ProbeTolerances;

#[derive(Parser)]
#[command(
    name = "holonomy",
    version,
    about = "Verify that centralizers of g-symmetric operators are holonomy algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline on a spec file or a directory of spec files.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated subset of canonical,berger,realize,probe.
        #[arg(long, default_value = "canonical,berger,realize,probe")]
        stages: String,
        /// Report file, or a directory when the input is a directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the random loop basepoints.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also export the realized metric (file, or directory for batch input).
        #[arg(long)]
        metric_out: Option<PathBuf>,
        #[arg(long, default_value_t = ProbeTolerances::default().membership_tol)]
        membership_tol: f64,
        #[arg(long, default_value_t = ProbeTolerances::default().rank_threshold)]
        rank_threshold: f64,
        /// Include per-stage wall-clock timings (reports are then not reproducible byte for byte).
        #[arg(long)]
        timings: bool,
    },
    /// Write every nilpotent single-eigenvalue spec up to a dimension.
    Corpus {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize report files as a table, failing rows first.
    Report {
        files: Vec<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn exit(outcome: Outcome) -> ExitCode {
    ExitCode::from(outcome.code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit(Outcome::InputError) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads(std::env::var("HOLONOMY_THREADS").ok().as_deref()) {
        eprintln!("error: {e}");
        return exit(Outcome::InputError);
    }
    match cli.command {
        Command::Verify { input, stages, out, seed, metric_out, membership_tol, rank_threshold, timings } => {
            let stages = match parse_stages(&stages) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit(Outcome::InputError);
                }
            };
            let config = RunConfig {
                input,
                stages,
                tolerances: ProbeTolerances { membership_tol, rank_threshold },
                out,
                metric_out,
                seed,
                timings,
            };
            exit(cmd_verify(&config).0)
        }
        Command::Corpus { max_n, out } => match cmd_corpus(max_n, &out) {
            Ok(paths) => {
                println!("wrote {} specs to {}", paths.len(), out.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit(Outcome::InputError)
            }
        },
        Command::Report { files, csv } => {
            let (outcome, _, table) = cmd_report(&files, csv.as_deref());
            print!("{table}");
            exit(outcome)
        }
    }
}
