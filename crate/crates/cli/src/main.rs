mod commands;
mod inputs;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::report::{CliError, Outcome, RunReport};

/// Local orthogonality toolkit for multipartite Bell scenarios.
#[derive(Debug, Parser)]
#[command(name = "lo", version)]
struct Cli {
    /// Print a single JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the orthogonality graph of a scenario.
    Graph(GraphArgs),
    /// Enumerate maximal cliques (LO inequalities).
    Cliques(CliquesArgs),
    /// Group inequalities into classes up to relabeling and NS equivalence.
    Classify(ClassifyArgs),
    /// Evaluate an inequality on a box or a product of copies.
    Eval(EvalArgs),
    /// Search for an LO inequality violated by a box.
    Witness(WitnessArgs),
    /// Exact maximum of an inequality over the no-signaling polytope.
    Nsmax(NsmaxArgs),
    /// Noise level above which copies of the noisy PR box violate an inequality.
    Threshold(ThresholdArgs),
    /// Inspect a distributed guessing problem.
    Dgp(DgpArgs),
    /// CSV grid of the PR / local / noise mixture family for plotting.
    Fig4(Fig4Args),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Scenario as `n,m,d`.
    #[arg(long)]
    pub scenario: String,
    /// Write the graph as text (one `id: event` line per vertex, one `u v` line per edge).
    #[arg(long, value_name = "FILE")]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CliquesArgs {
    #[arg(long)]
    pub scenario: String,
    /// Restrict to the support of this behavior (JSON file).
    #[arg(long, value_name = "FILE")]
    pub support: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub min_size: usize,
    /// Stop after this many cliques.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Print cliques in lexicographic order of event indices.
    #[arg(long)]
    pub sorted: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub scenario: String,
    /// Inequalities to classify; all maximal cliques when absent.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Canonical form used to compare inequalities.
    #[arg(long, value_enum, default_value_t = FormArg::Signature)]
    pub form: FormArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FormArg {
    Signature,
    Reduced,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// `pr`, `noisy:q`, `fig4:xi,gamma`, or a behavior JSON file.
    #[arg(long = "box", value_name = "BOX")]
    pub behavior: String,
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    #[arg(long, value_name = "FILE")]
    pub ineq: PathBuf,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long = "box", value_name = "BOX")]
    pub behavior: String,
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
}

#[derive(Debug, Args)]
pub struct NsmaxArgs {
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub ineq: PathBuf,
    /// Write an optimal no-signaling box as JSON.
    #[arg(long, value_name = "FILE")]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_name = "FILE")]
    pub ineq: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    /// Bracket width, as a rational or decimal.
    #[arg(long, default_value = "1/1000000")]
    pub tolerance: String,
}

#[derive(Debug, Args)]
pub struct DgpArgs {
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    /// Compute the best classical winning probability.
    #[arg(long)]
    pub classical_value: bool,
}

#[derive(Debug, Args)]
pub struct Fig4Args {
    #[arg(long, value_name = "FILE")]
    pub ineq: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    /// Grid points per axis.
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let result = match &cli.command {
        Command::Graph(a) => commands::graph(a),
        Command::Cliques(a) => commands::cliques(a, cli.json),
        Command::Classify(a) => commands::classify(a),
        Command::Eval(a) => commands::eval(a),
        Command::Witness(a) => commands::witness(a),
        Command::Nsmax(a) => commands::nsmax(a),
        Command::Threshold(a) => commands::threshold(a),
        Command::Dgp(a) => commands::dgp(a),
        Command::Fig4(a) => commands::fig4(a),
    };
    match result {
        Ok(outcome) => {
            emit(&cli, outcome, start);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(cli: &Cli, outcome: Outcome, start: Instant) {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if cli.json {
        let report = RunReport {
            command: command_name(&cli.command),
            scenario: outcome.scenario,
            inputs: outcome.inputs,
            results: outcome.results,
            wall_time: start.elapsed().as_secs_f64(),
        };
        let _ = writeln!(out, "{}", report.to_json());
    } else {
        let _ = out.write_all(outcome.text.as_bytes());
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Graph(_) => "graph",
        Command::Cliques(_) => "cliques",
        Command::Classify(_) => "classify",
        Command::Eval(_) => "eval",
        Command::Witness(_) => "witness",
        Command::Nsmax(_) => "nsmax",
        Command::Threshold(_) => "threshold",
        Command::Dgp(_) => "dgp",
        Command::Fig4(_) => "fig4",
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
