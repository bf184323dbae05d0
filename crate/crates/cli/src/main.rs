//! `blindlab`: compile, run, attack, audit and report from the command line.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 a checked property failed.

mod commands;
mod error;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Outcome;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "blindlab", version, about = "Compile, run and attack multi-server blind delegation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory for written artifacts.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct Setup {
    /// `N=,K=,m=,W=,p=` and optionally `masks=replicate|enumerate`.
    #[arg(long, default_value = "N=4,K=4")]
    pub params: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile and obfuscate a circuit into public.json and secret.json.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        setup: Setup,
        #[command(flatten)]
        out: Output,
    },
    /// Compile and execute once; writes run.json and transcripts.jsonl.
    Run {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        setup: Setup,
        #[command(flatten)]
        out: Output,
    },
    /// Play the distinguishing game for a circuit pair; writes attack.json.
    Attack {
        /// Two circuit files, `c0.json,c1.json`.
        #[arg(long, value_delimiter = ',', num_args = 1..=2, required = true)]
        pair: Vec<PathBuf>,
        /// Server ids such as `A1,A2,B3`, or `all`.
        #[arg(long)]
        colluders: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = blindlab_core::adversary::DEFAULT_REHEARSALS)]
        rehearsals: usize,
        #[command(flatten)]
        setup: Setup,
        #[command(flatten)]
        out: Output,
    },
    /// Every colluder template against the built-in corpus or one pair;
    /// writes audit.json.
    Audit {
        #[arg(long, value_delimiter = ',', num_args = 1..=2)]
        pair: Option<Vec<PathBuf>>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = blindlab_core::adversary::DEFAULT_REHEARSALS)]
        rehearsals: usize,
        #[command(flatten)]
        setup: Setup,
        #[command(flatten)]
        out: Output,
    },
    /// Gate counts, overhead bounds and leak-time estimate for a compiled
    /// program.
    Report {
        /// Defaults to `<out-dir>/public.json`.
        #[arg(long)]
        public: Option<PathBuf>,
        /// Mean time between single-server leaks.
        #[arg(long, default_value_t = 1.0)]
        leak_interval: f64,
        #[arg(long, default_value = "days")]
        unit: String,
        #[command(flatten)]
        out: Output,
    },
}

fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Compile { circuit, setup, out } => commands::compile(&circuit, &setup, &out),
        Command::Run { circuit, setup, out } => commands::run(&circuit, &setup, &out),
        Command::Attack {
            pair,
            colluders,
            trials,
            rehearsals,
            setup,
            out,
        } => commands::attack(&pair, &colluders, trials, rehearsals, &setup, &out),
        Command::Audit {
            pair,
            trials,
            rehearsals,
            setup,
            out,
        } => commands::audit(pair.as_deref(), trials, rehearsals, &setup, &out),
        Command::Report {
            public,
            leak_interval,
            unit,
            out,
        } => {
            let public = public.unwrap_or_else(|| out.out_dir.join("public.json"));
            commands::report(&public, leak_interval, &unit, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(if outcome.violation { 3 } else { 0 })
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
