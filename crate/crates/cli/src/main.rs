//! Command-line pipeline over a portfolio workspace.
//!
//! Three composable subcommands: `ingest` reduces backlink data to a
//! relation snapshot, `analyze` turns a snapshot into reports and network
//! files, `validate` checks a configuration without touching anything.
//!
//! Exit codes: 1 usage, 2 configuration, 3 io, 4 provider.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};

use config::Overrides;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Io(String),
    Provider(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Provider(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Io(m) | CliError::Provider(m) => {
                m
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "colink",
    version,
    about = "Co-link analysis of backlinks to a portfolio of project websites"
)]
struct Cli {
    /// Pipeline configuration file (TOML).
    #[arg(short, long, global = true, default_value = "colink.toml")]
    config: PathBuf,

    /// Snapshot date (YYYY-MM-DD); overrides the config file.
    #[arg(long, global = true)]
    snapshot_date: Option<NaiveDate>,

    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Clustering resolution; overrides the config file.
    #[arg(long, global = true)]
    cluster_resolution: Option<f64>,

    /// Clustering seed; overrides the config file.
    #[arg(long, global = true)]
    cluster_seed: Option<u64>,

    /// Clustering restarts; overrides the config file.
    #[arg(long, global = true)]
    cluster_restarts: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read backlink sources and write a relation snapshot.
    #[command(arg_required_else_help = false)]
    Ingest {
        /// Backlink export CSV; repeatable.
        #[arg(long = "from-csv", value_name = "PATH")]
        from_csv: Vec<PathBuf>,

        /// Query the configured provider API for every portfolio project.
        #[arg(long)]
        fetch: bool,
    },
    /// Filter, classify, measure and export networks from a snapshot.
    Analyze,
    /// Check the configuration and portfolio for problems.
    Validate,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outcomes, everything else is
            // a usage error.
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        snapshot_date: cli.snapshot_date,
        output_dir: cli.output_dir,
        cluster_resolution: cli.cluster_resolution,
        cluster_seed: cli.cluster_seed,
        cluster_restarts: cli.cluster_restarts,
    };
    match cli.command {
        Command::Ingest { from_csv, fetch } => {
            if from_csv.is_empty() && !fetch {
                return Err(CliError::Usage(
                    "ingest needs at least one source: --from-csv <PATH> or --fetch".into(),
                ));
            }
            let config = config::PipelineConfig::load(&cli.config, &overrides)?;
            commands::ingest::run(&config, &from_csv, fetch)
        }
        Command::Analyze => {
            let config = config::PipelineConfig::load(&cli.config, &overrides)?;
            commands::analyze::run(&config)
        }
        Command::Validate => commands::validate::run(&cli.config, &overrides),
    }
}
