use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use asl::cli::{Command, RunConfig, DEFAULT_TRACE_STEPS};
use asl_core::ProofConfig;
use clap::{Args, Parser, Subcommand};

/// Proof-relevant resolution for Horn clause modules.
#[derive(Parser)]
#[command(name = "asl", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prove every `lemma` and `auto` declaration of a module.
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Small-step resolution trace of a goal against the module's axioms.
    Trace {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = DEFAULT_TRACE_STEPS)]
        steps: usize,
        #[command(flatten)]
        opts: Opts,
    },
    /// Compare the loop of a goal with the unfolding of its corecursive proof.
    Obs {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(short = 'n', default_value_t = 5)]
        n: usize,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// Emit JSON on stdout.
    #[arg(long)]
    json: bool,
    /// Print the small-step trace of each ground goal.
    #[arg(long)]
    trace: bool,
    /// Steps shown by --trace.
    #[arg(long, default_value_t = DEFAULT_TRACE_STEPS)]
    trace_steps: usize,
    /// Print resolution trees, critical triples and candidate lemmas.
    #[arg(long)]
    explain: bool,
    /// Check observational equivalence of each lemma's loop for N points.
    #[arg(long, value_name = "N")]
    obs_check: Option<usize>,
    /// Resolution steps per attempt.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: Option<u64>,
    /// Depth bound of resolution trees.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    /// Node bound of resolution trees.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    nodes: Option<u64>,
    /// Lemma rounds per `auto` goal.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    rounds: Option<u64>,
}

fn config(file: PathBuf, command: Command, o: Opts) -> RunConfig {
    let d = ProofConfig::default();
    let pick = |v: Option<u64>, dflt: usize| v.map_or(dflt, |v| v as usize);
    let proof = ProofConfig {
        fuel: pick(o.fuel, d.fuel),
        max_lemma_rounds: pick(o.rounds, d.max_lemma_rounds),
        tree_depth: pick(o.depth, d.tree_depth),
        tree_nodes: pick(o.nodes, d.tree_nodes),
        abstract_fuel: d.abstract_fuel,
    };
    RunConfig {
        input: file,
        command,
        proof,
        trace: o.trace,
        trace_steps: o.trace_steps,
        explain: o.explain,
        obs_check: o.obs_check,
        json: o.json,
    }
}

fn main() -> ExitCode {
    let cfg = match Cli::parse().command {
        Cmd::Check { file, opts } => config(file, Command::Check, opts),
        Cmd::Trace { file, goal, steps, opts } => config(file, Command::Trace { goal, steps }, opts),
        Cmd::Obs { file, goal, n, opts } => config(file, Command::Obs { goal, n }, opts),
    };
    let out = asl::run(&cfg);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
