mod experiment;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use rulingset::{AlgoConfig, GeneratorSpec};

use experiment::{GraphSource, Harness, Plan};

/// Compute 2-ruling sets on generated or loaded graphs and write JSON traces
/// plus CSV summaries.
#[derive(Parser, Debug)]
#[command(name = "rulingset", version)]
struct Args {
    /// Edge-list file (`u v` per line, optional `n <count>` header).
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    graph: Option<PathBuf>,

    /// Generator spec, e.g. `erdos-renyi:n=4096,avg=16`.
    #[arg(long)]
    gen: Option<String>,

    /// JSON config with gamma, c, alpha, seed, budget_K, d_min.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = HarnessArg::None)]
    harness: HarnessArg,

    #[arg(long, default_value_t = 1)]
    trials: u64,

    /// Base seed; trial `t` uses `seed + t` for the algorithm and, with
    /// `--gen`, for the graph. Defaults to the config seed.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Also run the lemma-level checks and include their reports.
    #[arg(long)]
    check_lemmas: bool,

    /// Ruling distance to validate against. Only 2 is supported.
    #[arg(long, default_value_t = 2)]
    beta: usize,

    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HarnessArg {
    Stream,
    Clique,
    None,
}

fn plan(args: &Args) -> Result<Plan> {
    if args.beta != 2 {
        bail!("--beta {} is not supported; the pipeline builds 2-ruling sets", args.beta);
    }
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let config = match &args.config {
        Some(path) => AlgoConfig::load(path).with_context(|| format!("loading config {}", path.display()))?,
        None => AlgoConfig::default(),
    };
    let source = match (&args.gen, &args.graph) {
        (Some(spec), _) => GraphSource::Generated(
            spec.parse::<GeneratorSpec>()
                .with_context(|| format!("parsing generator spec `{spec}`"))?,
        ),
        (None, Some(path)) => GraphSource::File(path.clone()),
        (None, None) => bail!("one of --graph or --gen is required"),
    };
    Ok(Plan {
        source,
        base_seed: args.seed.unwrap_or(config.seed),
        config,
        harness: match args.harness {
            HarnessArg::Stream => Harness::Stream,
            HarnessArg::Clique => Harness::Clique,
            HarnessArg::None => Harness::None,
        },
        trials: args.trials,
        check_lemmas: args.check_lemmas,
        beta: args.beta,
    })
}

fn run(args: Args) -> Result<bool> {
    let plan = plan(&args)?;
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let trials = experiment::run_all(&plan)?;
    report::write_all(&args.out, &trials)?;
    let invalid = trials.iter().filter(|t| !t.valid).count();
    eprintln!(
        "{} trials, {} valid, reports in {}",
        trials.len(),
        trials.len() - invalid,
        args.out.display()
    );
    Ok(invalid == 0)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
