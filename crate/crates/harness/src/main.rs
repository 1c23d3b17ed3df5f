use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::SystemTime;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use sparse_qubo::instance::{Instance, InstanceParams, DEFAULT_ITERATIONS, DEFAULT_STEP};
use sparse_qubo::{build_sparse_coding_qubo, FixedPointFormat};
use sparse_qubo_harness::formats::{
    write_matrix_csv, write_qubo_coo, write_qubo_dense, write_vector_csv,
};
use sparse_qubo_harness::{
    emit_outputs, presets, run_experiment, ExperimentGrid, Method, Overrides, SweepAxis,
    WORKERS_ENV,
};

#[derive(Parser)]
#[command(
    name = "sparse-qubo",
    version,
    about = "L0-regularized sparse coding as QUBO: experiments and export"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid (JSON file or preset name).
    Run(RunArgs),
    /// List bundled presets.
    ListPresets,
    /// Generate one instance and write its QUBO, A, b and x_true.
    ExportQubo(ExportArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Config file path, or the name of a bundled preset.
    config: String,
    #[arg(long)]
    sweep: Option<SweepAxis>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated methods: qubo_sa, exhaustive, omp, lasso.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Csv,
    Coo,
}

#[derive(clap::Args)]
struct ExportArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c_min: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, value_enum, default_value_t = ExportFormat::Csv)]
    format: ExportFormat,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::ListPresets => {
            for name in presets::names() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportQubo(args) => export(args).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}

fn load_grid(config: &str) -> anyhow::Result<ExperimentGrid> {
    let path = Path::new(config);
    if path.exists() {
        return Ok(ExperimentGrid::load(path)?);
    }
    Ok(presets::load(config)?)
}

fn workers() -> anyhow::Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{WORKERS_ENV}={v:?} is not a thread count"))?;
            Ok((n > 0).then_some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let mut grid = load_grid(&args.config)?;
    grid.apply(&Overrides {
        sweep: args.sweep,
        values: args.values,
        repetitions: args.reps,
        methods: args.methods,
        seed: args.seed,
    })?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("cannot start worker pool")?;

    let started = SystemTime::now();
    let outcome = pool.install(|| run_experiment(&grid))?;
    let aggregates = emit_outputs(&grid, &outcome, &args.out, started)?;

    for a in &aggregates {
        println!(
            "{:<10} tuned_for={:<14} {}={:<8} rec={:.4}±{:.4} supp={:.3}±{:.3} (n={})",
            a.method,
            a.tuned_for.name(),
            grid.sweep.axis.name(),
            a.sweep_value,
            a.reconstruction_mean,
            a.reconstruction_stderr,
            a.support_mean,
            a.support_stderr,
            a.count
        );
    }
    for f in &outcome.failures {
        let method = f
            .method
            .map(|m| m.to_string())
            .unwrap_or_else(|| "instance".into());
        eprintln!(
            "failed: value={} rep={} {method}: {}",
            f.sweep_value, f.repetition, f.message
        );
    }
    println!("wrote {}", args.out.display());
    Ok(if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn export(args: ExportArgs) -> anyhow::Result<()> {
    if args.m == 0 {
        bail!("--m must be positive");
    }
    let format = FixedPointFormat::uniform(args.n, args.c_min, args.d, args.p)?;
    let params = InstanceParams {
        rows: args.m,
        cols: args.n,
        sparsity: args.k,
        sigma: args.sigma,
        step: args.step,
        iterations: args.iterations,
    };
    let instance = Instance::generate(&params, &format, args.seed)?;
    let problem = build_sparse_coding_qubo(instance.a.matrix(), &instance.b, &format, args.lambda)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    write_matrix_csv(&args.out.join("A.csv"), instance.a.matrix())?;
    write_vector_csv(&args.out.join("b.csv"), &instance.b)?;
    write_vector_csv(&args.out.join("x_true.csv"), &instance.x_true)?;
    match args.format {
        ExportFormat::Csv => write_qubo_dense(&args.out, "qubo", &problem)?,
        ExportFormat::Coo => write_qubo_coo(&args.out.join("qubo.coo"), &problem)?,
    }
    println!(
        "{} spins ({} ancilla), offset {}, written to {}",
        problem.dim(),
        problem.n_ancilla(),
        problem.offset(),
        args.out.display()
    );
    Ok(())
}
