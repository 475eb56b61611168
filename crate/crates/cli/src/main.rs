use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use albo_cli::{run, RunConfig, TraceMode};
use albo_core::engine::Blocking;
use albo_core::search::{Limits, Strategy};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Bfs,
    DfsId,
    DfsAhb,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TraceArg {
    Text,
    Dot,
}

/// Decide satisfiability of an ALBO^id problem file.
#[derive(Debug, Parser)]
#[command(name = "albo", version)]
struct Args {
    /// Problem file (.albo).
    input: PathBuf,
    /// Expansion strategy.
    #[arg(long, value_enum, default_value = "dfs-id")]
    strategy: StrategyArg,
    /// First per-branch step bound for dfs-id.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    id_initial: u64,
    /// Bound increment between dfs-id passes.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    id_increment: u64,
    /// Total rule applications over the whole search.
    #[arg(long)]
    max_steps: Option<u64>,
    /// Rule applications allowed on a single branch.
    #[arg(long)]
    max_branch_steps: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Print the derivation as numbered text or as a DOT graph.
    #[arg(long, value_enum)]
    trace: Option<TraceArg>,
    /// Write the trace here instead of standard error.
    #[arg(long, requires = "trace")]
    trace_out: Option<PathBuf>,
    /// Write the model of a satisfiable problem here.
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Override the problem's unique name assumption.
    #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    una: Option<bool>,
    /// Debugging: run without the (ub) rule. May not terminate.
    #[arg(long)]
    no_ub: bool,
    /// Explore the distinct child of (ub) before the merge child.
    #[arg(long)]
    distinct_first: bool,
}

fn main() {
    let args = Args::parse();
    let timeout = match args.timeout {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            eprintln!("albo: --timeout must be a nonnegative number of seconds");
            std::process::exit(albo_cli::EXIT_INPUT);
        }
        t => t.map(Duration::from_secs_f64),
    };
    let config = RunConfig {
        input: args.input,
        strategy: match args.strategy {
            StrategyArg::Bfs => Strategy::BreadthFirst,
            StrategyArg::DfsId => Strategy::IterativeDeepening {
                initial: args.id_initial,
                increment: args.id_increment,
            },
            StrategyArg::DfsAhb => Strategy::AvoidHugeBranch,
        },
        limits: Limits {
            max_branch_steps: args.max_branch_steps,
            max_total_steps: args.max_steps,
            timeout,
        },
        trace: args.trace.map(|t| match t {
            TraceArg::Text => TraceMode::Text,
            TraceArg::Dot => TraceMode::Dot,
        }),
        trace_out: args.trace_out,
        model_out: args.model_out,
        una: args.una,
        blocking: if args.no_ub {
            Blocking::Disabled
        } else {
            Blocking::Eager
        },
        merge_first: !args.distinct_first,
    };
    let status = run(&config, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(status);
}
