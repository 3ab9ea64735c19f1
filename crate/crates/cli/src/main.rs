//! `compact-routing`: generate graphs, preprocess routing schemes, route
//! messages and evaluate stretch and storage.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::is_invariant_violation;
use config::Config;

const AFTER_HELP: &str = "\
Settings are resolved as: command-line flag, then the `--config` file, then
the built-in default. The config file holds one `key = value` per line, with
keys named like the long flags (`seed = 7`, `k = 3`, `budget = 2.5`).

Exit codes: 0 on success, 1 on usage or input errors, 2 when a scheme
invariant is violated (missing tree record, wrong delivery, stretch bound
exceeded).";

#[derive(Debug, Parser)]
#[command(name = "compact-routing", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// key=value file with defaults for any long flag
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random weighted graph
    Gen(GenArgs),
    /// Build a hierarchy and routing tables for one scheme
    Preprocess(PreprocessArgs),
    /// Route one message and compare with the shortest path
    Route(RouteArgs),
    /// Route many pairs in both directions and write a CSV report
    Eval(EvalArgs),
    /// Stretch bounds of the average scheme for a list of k
    Bounds(BoundsArgs),
    /// Storage summary over a directory of state files
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// erdos-renyi, random-geometric or directed-strongly-connected [default: erdos-renyi]
    #[arg(long)]
    pub kind: Option<String>,
    /// Number of vertices
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability, or radius for random-geometric [default: depends on kind]
    #[arg(long)]
    pub density: Option<f64>,
    /// Smallest edge weight [default: 1]
    #[arg(long)]
    pub wmin: Option<u64>,
    /// Largest edge weight [default: 100]
    #[arg(long)]
    pub wmax: Option<u64>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file [default: stdout]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// undirected-rt, directed-7, directed-hop or average
    #[arg(long)]
    pub scheme: Option<String>,
    /// Number of hierarchy levels [default: 3]
    #[arg(long)]
    pub k: Option<usize>,
    /// Sampling seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bunch size budget factor [default: 3.0]
    #[arg(long)]
    pub budget: Option<f64>,
    /// Connect a disconnected input through a heavy dummy vertex
    #[arg(long)]
    pub augment: bool,
    /// Input graph
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output state file
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Source vertex
    #[arg(short)]
    pub s: usize,
    /// Destination vertex
    #[arg(short)]
    pub t: usize,
    /// Write the hop-by-hop trace to this file
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// `all` or `sample:<count>:<seed>` [default: all]
    #[arg(long)]
    pub pairs: Option<String>,
    /// Output CSV
    #[arg(short, long)]
    pub output: PathBuf,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write the full report as JSON
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Hop limit per message [default: 8·k·n]
    #[arg(long)]
    pub hop_budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Comma-separated k values, each at least 2 [default: 4,6,8,10,20,100]
    #[arg(long)]
    pub k_list: Option<String>,
    /// Output CSV [default: stdout]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Directory of state files (`*.json`)
    #[arg(long)]
    pub states: PathBuf,
    /// Output CSV [default: stdout]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = Config::load(cli.config.as_deref()).and_then(|cfg| match &cli.command {
        Command::Gen(a) => commands::gen(&cfg, a),
        Command::Preprocess(a) => commands::preprocess(&cfg, a),
        Command::Route(a) => commands::route(&cfg, a),
        Command::Eval(a) => commands::eval(&cfg, a),
        Command::Bounds(a) => commands::bounds(&cfg, a),
        Command::Stats(a) => commands::stats(&cfg, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_invariant_violation(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
