//! `swapcluster` command line: generate instances, run the swap search and
//! the exact oracles, verify the partition machinery, and benchmark.
//!
//! Exit codes: 0 on success, 2 when the input fails validation, 1 on an
//! internal error. All results go to stdout as JSON unless `--out` is given.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use swapcluster::analysis::{analyze, theory_rho, AnalyzeOptions, RhoVariant};
use swapcluster::harness::{generate, run_bench, BenchConfig, GeneratorKind, GeneratorSpec};
use swapcluster::oracle;
use swapcluster::{
    format, load_instance, local_search_gkm, local_search_lq, local_search_ufl, Acceptance,
    Improvement, InitPolicy, Instance, ObjectiveSpec, SearchConfig, SearchTrace,
};

#[derive(Parser)]
#[command(name = "swapcluster", version, about = "Swap-based local search for discrete clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance and print it in clusterspec format.
    Gen(GenArgs),
    /// Run the swap local search on an instance file.
    Solve(SolveArgs),
    /// Exact optimum by exhaustive enumeration (small instances).
    Oracle(OracleArgs),
    /// Filtering and randomized-partition verification against the oracle.
    Analyze(AnalyzeArgs),
    /// Run an algorithm matrix from a config file and emit a report.
    Bench(BenchArgs),
    /// Report log10 of the guarantee-grade swap size for given parameters.
    TheoryRho(TheoryRhoArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    UniformCube,
    GaussianMixture,
    Line,
    LloydAdversarial,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Lq,
    Ufl,
    Gkm,
}

#[derive(Clone, Copy, ValueEnum)]
enum AcceptanceArg {
    Strict,
    Scaled,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Arbitrary,
    FirstK,
    Dsampling,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Euclidean,
    Doubling,
    Lq,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Mixture components (gaussian-mixture only).
    #[arg(long, default_value_t = 3)]
    centers: usize,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "lq")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Constant opening cost stamped on every candidate.
    #[arg(long, default_value_t = 0.0)]
    opening_cost: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Override the objective family stored in the instance file.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    rho: usize,
    #[arg(long, value_enum, default_value = "strict")]
    acceptance: AcceptanceArg,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "dsampling")]
    init: InitArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    best_improvement: bool,
    #[arg(long)]
    parallel: bool,
    /// Include the full move-by-move trace in the output.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = oracle::DEFAULT_SUBSET_LIMIT)]
    limit: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 2)]
    rho: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = oracle::DEFAULT_SUBSET_LIMIT)]
    limit: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the CSV rows to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryRhoArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value = "euclidean")]
    variant: VariantArg,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Validation(String),
    Internal(String),
}

impl From<swapcluster::Error> for CliError {
    fn from(e: swapcluster::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn emit(value: &serde_json::Value, out: &Option<PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn objective_from_args(
    objective: ObjectiveArg,
    q: f64,
    k: usize,
) -> ObjectiveSpec {
    match objective {
        ObjectiveArg::Lq => ObjectiveSpec::Lq { q, k },
        ObjectiveArg::Ufl => ObjectiveSpec::Ufl,
        ObjectiveArg::Gkm => ObjectiveSpec::Gkm { k },
    }
}

fn run_gen(args: &GenArgs) -> Result<(), CliError> {
    let kind = match args.kind {
        KindArg::UniformCube => GeneratorKind::UniformCube { d: args.d, n: args.n },
        KindArg::GaussianMixture => GeneratorKind::GaussianMixture {
            d: args.d,
            n: args.n,
            centers: args.centers,
            sigma: args.sigma,
        },
        KindArg::Line => GeneratorKind::Line { n: args.n },
        KindArg::LloydAdversarial => GeneratorKind::LloydAdversarial { n: args.n },
    };
    let objective = objective_from_args(args.objective, args.q, args.k);
    let mut instance = generate(&GeneratorSpec { kind, seed: args.seed }, objective)?;
    if args.opening_cost != 0.0 {
        for c in &mut instance.candidates {
            c.opening_cost = args.opening_cost;
        }
        instance.validate()?;
    }
    let text = format::format_instance(&instance);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_with_overrides(
    path: &PathBuf,
    objective: Option<ObjectiveArg>,
    q: Option<f64>,
    k: Option<usize>,
    seed: Option<u64>,
) -> Result<Instance, CliError> {
    let mut instance = load_instance(path)?;
    if let Some(obj) = objective {
        let q = q.unwrap_or(2.0);
        let k = k.unwrap_or(1);
        instance.objective = objective_from_args(obj, q, k);
    } else {
        if let (ObjectiveSpec::Lq { q: oq, .. }, Some(nq)) = (&mut instance.objective, q) {
            *oq = nq;
        }
        if let Some(nk) = k {
            match &mut instance.objective {
                ObjectiveSpec::Lq { k: ok, .. } | ObjectiveSpec::Gkm { k: ok } => *ok = nk,
                ObjectiveSpec::Ufl => {}
            }
        }
    }
    if let Some(s) = seed {
        instance.rng_seed = s;
    }
    instance.validate()?;
    Ok(instance)
}

fn trace_json(trace: &SearchTrace, include_moves: bool) -> serde_json::Value {
    let mut value = json!({
        "final_cost": trace.final_solution.total_cost,
        "connection_cost": trace.final_solution.connection_cost,
        "opening_cost": trace.final_solution.opening_cost,
        "open": trace.final_solution.open,
        "iterations": trace.iterations.len(),
        "certified_local_opt": trace.certified_local_opt,
    });
    if include_moves {
        value["trace"] = serde_json::to_value(&trace.iterations).unwrap_or_default();
    }
    value
}

fn run_solve(args: &SolveArgs) -> Result<(), CliError> {
    let instance = load_with_overrides(&args.instance, args.objective, args.q, args.k, args.seed)?;
    let config = SearchConfig {
        rho: args.rho,
        acceptance: match args.acceptance {
            AcceptanceArg::Strict => Acceptance::Strict,
            AcceptanceArg::Scaled => Acceptance::Scaled { epsilon: args.epsilon },
        },
        max_iterations: args.max_iterations,
        improvement: if args.best_improvement {
            Improvement::Best
        } else {
            Improvement::First
        },
        parallel_moves: args.parallel,
        init: match args.init {
            InitArg::Arbitrary => InitPolicy::Arbitrary,
            InitArg::FirstK => InitPolicy::FirstK,
            InitArg::Dsampling => InitPolicy::DSampling,
        },
    };
    let trace = match instance.objective {
        ObjectiveSpec::Lq { .. } => local_search_lq(&instance, &config, None)?,
        ObjectiveSpec::Ufl => local_search_ufl(&instance, &config, None)?,
        ObjectiveSpec::Gkm { .. } => local_search_gkm(&instance, &config, None)?,
    };
    emit(&trace_json(&trace, args.trace), &args.out)
}

fn run_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let instance = load_instance(&args.instance)?;
    let result = match instance.objective {
        ObjectiveSpec::Lq { .. } => oracle::exact_lq(&instance, args.limit)?,
        ObjectiveSpec::Ufl => oracle::exact_ufl(&instance, args.limit)?,
        ObjectiveSpec::Gkm { .. } => oracle::exact_gkm(&instance, args.limit)?,
    };
    emit(&serde_json::to_value(&result)?, &args.out)
}

fn run_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let instance = load_instance(&args.instance)?;
    let options = AnalyzeOptions {
        rho: args.rho,
        epsilon: args.epsilon,
        trials: args.trials,
        seed: args.seed.unwrap_or(instance.rng_seed),
        oracle_limit: args.limit,
    };
    let report = analyze(&instance, &options)?;
    emit(&serde_json::to_value(&report)?, &args.out)
}

fn run_bench_cmd(args: &BenchArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.config.display())))?;
    let config: BenchConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid bench config: {e}")))?;
    let report = run_bench(&config)?;
    if let Some(path) = &args.csv {
        std::fs::write(path, report.to_csv())
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(&serde_json::to_value(&report)?, &args.out)
}

fn run_theory(args: &TheoryRhoArgs) -> Result<(), CliError> {
    let variant = match args.variant {
        VariantArg::Euclidean => RhoVariant::Euclidean,
        VariantArg::Doubling => RhoVariant::Doubling,
        VariantArg::Lq => RhoVariant::Lq { q: args.q },
    };
    let rho = theory_rho(args.epsilon, args.d, variant)?;
    // RhoVariant serializes as {"variant": ..., "q"?: ...}; merge the rest in
    let mut value = serde_json::to_value(variant)?;
    let map = value.as_object_mut().expect("variant serializes to an object");
    map.insert("epsilon".into(), json!(args.epsilon));
    map.insert("d".into(), json!(args.d));
    map.insert("log10_rho".into(), json!(rho.log10_rho));
    map.insert("o_form".into(), json!(rho.o_form));
    emit(&value, &args.out)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(args) => run_solve(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Bench(args) => run_bench_cmd(args),
        Command::TheoryRho(args) => run_theory(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
