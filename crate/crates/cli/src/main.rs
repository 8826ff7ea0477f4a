//! `dwindle` — plan, verify, and simulate data protection for storage
//! networks whose nodes fail one by one and are never replaced.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dwindle_core::lp::Arithmetic;
use dwindle_core::model::StrategyTag;
use dwindle_core::Rat;

mod cmds;
mod dot;
mod format;
mod plan_json;

use cmds::Failure;
use format::parse_rational;

#[derive(Parser)]
#[command(
    name = "dwindle",
    version,
    long_version = concat!(env!("CARGO_PKG_VERSION"), " (plan-json v1, constraints-csv v1, sweep-csv v1)"),
    about = "Bandwidth-optimal data protection planning for shrinking storage networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_strategy(s: &str) -> Result<StrategyTag, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Arithmetic, String> {
    match s {
        "exact" => Ok(Arithmetic::Exact),
        "float" => Ok(Arithmetic::Float),
        other => Err(format!("mode must be 'exact' or 'float', got '{other}'")),
    }
}

fn parse_rat_arg(s: &str) -> Result<Rat, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct PlanArgs {
    /// Initial node count.
    #[arg(long)]
    n: u32,
    /// Terminal survivor count.
    #[arg(long)]
    k: u32,
    /// Total data size M (rational, e.g. 1 or 3/2).
    #[arg(long, default_value = "1", value_parser = parse_rat_arg)]
    data_size: Rat,
    /// op | ms | mrb
    #[arg(long, default_value = "op", value_parser = parse_strategy)]
    strategy: StrategyTag,
    /// exact | float
    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mode: Arithmetic,
    /// Storage tie-break weight for the op objective (rational).
    #[arg(long, value_parser = parse_rat_arg)]
    epsilon: Option<Rat>,
    /// Write the plan JSON here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Print the assembled LP rows before solving.
    #[arg(long)]
    dump_lp: bool,
    /// Warn on stderr when the cut family exceeds this many constraints.
    #[arg(long, default_value_t = 1_000_000)]
    cut_warn_limit: u128,
}

#[derive(Args)]
struct SweepArgs {
    /// Node count or inclusive range, e.g. 10 or 6..12.
    #[arg(long)]
    n: String,
    /// Survivor count or range, e.g. 1..9. Mutually exclusive with --losses.
    #[arg(long)]
    k: Option<String>,
    /// Loss count or range; each cell uses k = n - losses.
    #[arg(long)]
    losses: Option<String>,
    /// Single strategy (alternative to --strategies).
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<StrategyTag>,
    /// Comma-separated list, e.g. op,ms,mrb (the default).
    #[arg(long)]
    strategies: Option<String>,
    /// exact | float
    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mode: Arithmetic,
    #[arg(long, value_parser = parse_rat_arg)]
    epsilon: Option<Rat>,
    /// Write the CSV here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads; output order is deterministic regardless.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Plan JSON file to check.
    plan: PathBuf,
    /// Also run the max-flow oracle per stage.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Plan JSON file; alternatively give --n/--k/--strategy.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<StrategyTag>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Base seed; trial i uses seed + i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Field order: 256 or 65536.
    #[arg(long, default_value_t = 256)]
    field: u32,
    /// Cap on the packet count G (the profile-denominator lcm is used when
    /// it fits; otherwise G = cap with ceiling rounding).
    #[arg(long, default_value_t = 4096)]
    max_packets: u64,
}

#[derive(Args)]
struct ConstraintsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Restrict to the single stage where this many nodes remain.
    #[arg(long)]
    stage: Option<u32>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Warn on stderr when the cut family exceeds this many constraints.
    #[arg(long, default_value_t = 1_000_000)]
    cut_warn_limit: u128,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<StrategyTag>,
    /// Stage to build: the remaining-node count m.
    #[arg(long)]
    stage: u32,
    /// Emit Graphviz DOT (otherwise a one-line summary).
    #[arg(long)]
    dot: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a protection plan and its metrics.
    Plan(PlanArgs),
    /// Tabulate strategies over ranges of n and k as CSV.
    Sweep(SweepArgs),
    /// Check a plan file against every constraint (optionally the oracle).
    Verify(VerifyArgs),
    /// Execute a plan with random linear coding and report decodability.
    Simulate(SimulateArgs),
    /// Dump the cut-constraint family as CSV.
    Constraints(ConstraintsArgs),
    /// Build one stage's information flow network.
    Graph(GraphArgs),
}

fn run(cli: Cli) -> cmds::CmdResult {
    match cli.command {
        Command::Plan(a) => cmds::cmd_plan(
            a.n,
            a.k,
            &a.data_size,
            a.strategy,
            a.mode,
            a.epsilon.as_ref(),
            cmds::output_path(&a.output),
            a.dump_lp,
            a.cut_warn_limit,
        ),
        Command::Sweep(a) => cmds::cmd_sweep(
            &a.n,
            a.k.as_deref(),
            a.losses.as_deref(),
            a.strategy,
            a.strategies.as_deref(),
            a.mode,
            a.epsilon.as_ref(),
            cmds::output_path(&a.output),
            a.jobs,
        ),
        Command::Verify(a) => cmds::cmd_verify(&a.plan, a.oracle),
        Command::Simulate(a) => cmds::cmd_simulate(
            a.plan.as_deref(),
            a.n,
            a.k,
            a.strategy,
            a.trials,
            a.seed,
            a.field,
            a.max_packets,
        ),
        Command::Constraints(a) => {
            cmds::cmd_constraints(a.n, a.k, a.stage, cmds::output_path(&a.output), a.cut_warn_limit)
        }
        Command::Graph(a) => cmds::cmd_graph(
            a.plan.as_deref(),
            a.n,
            a.k,
            a.strategy,
            a.stage,
            a.dot,
            cmds::output_path(&a.output),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
