//! The `tilegemm` command line: map generation, single runs, verification,
//! ratio sweeps, and communication simulation.
//!
//! Every randomized behavior takes an explicit `--seed`, so runs are
//! reproducible end to end. Exit codes: 0 success, 1 verification failure,
//! 2 usage error.

use std::fs;
use std::num::NonZeroUsize;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use tilegemm_core::commsim::{simulate_summa, ProcessGrid, SimOptions};
use tilegemm_core::graph::{flop_report, TaskGraph};
use tilegemm_core::kernels::GemmScalars;
use tilegemm_core::pmap::{generate_ratio_map, RatioSpec};

use crate::bench::{bench_run, oracle_dense, prepare_workload, results_to_csv, BenchConfig};
use crate::parallel::execute_parallel;
use crate::verify::relative_fro_error;

#[derive(Parser)]
#[command(
    name = "tilegemm",
    about = "Tile-centric mixed-precision GEMM engine",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a per-tile precision map file (and optionally a heatmap).
    GenMap(GenMapArgs),
    /// Run one mixed-precision GEMM and report timing and accuracy.
    Gemm(GemmArgs),
    /// Check the engine against the FP64 oracle; nonzero exit on failure.
    Verify(VerifyArgs),
    /// Sweep precision ratios and emit a CSV of time/speedup/error.
    Bench(BenchArgs),
    /// Simulate SUMMA communication on a virtual process grid.
    Sim(SimArgs),
}

fn parse_ratio(s: &str) -> Result<RatioSpec, String> {
    RatioSpec::parse(s).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<ProcessGrid, String> {
    let (p, q) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid must have the form PxQ, got {s:?}"))?;
    let p: usize = p.parse().map_err(|_| format!("bad grid rows {p:?}"))?;
    let q: usize = q.parse().map_err(|_| format!("bad grid cols {q:?}"))?;
    if p == 0 || q == 0 {
        return Err("grid dimensions must be at least 1".into());
    }
    Ok(ProcessGrid::new(p, q))
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

#[derive(Args)]
struct GenMapArgs {
    /// Tile-grid rows.
    #[arg(long)]
    mt: usize,
    /// Tile-grid columns.
    #[arg(long)]
    nt: usize,
    /// Precision split a:b (a% FP64, b% FP32), e.g. 80:20.
    #[arg(long, value_parser = parse_ratio)]
    ratio: RatioSpec,
    #[arg(long)]
    seed: u64,
    /// Map file destination.
    #[arg(long)]
    out: std::path::PathBuf,
    /// Optional heatmap destination; `.csv` writes CSV, anything else PGM.
    #[arg(long)]
    heatmap: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct GemmArgs {
    /// Rows of C (and A).
    #[arg(long)]
    m: usize,
    /// Columns of C (and B).
    #[arg(long)]
    n: usize,
    /// Reduction dimension.
    #[arg(long)]
    k: usize,
    /// Tile size; must divide m, n, and k.
    #[arg(long)]
    nb: usize,
    #[arg(long, value_parser = parse_ratio)]
    ratio: RatioSpec,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = default_threads())]
    threads: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Square size (M = N = K).
    #[arg(long)]
    n: usize,
    #[arg(long)]
    nb: usize,
    #[arg(long, value_parser = parse_ratio)]
    ratio: RatioSpec,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = default_threads())]
    threads: usize,
    /// Relative-error bound for mixed configurations (all-FP64 must be
    /// bitwise exact regardless).
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    nb: usize,
    /// Comma-separated ratio list; the 100:0 baseline is always included.
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio)]
    ratios: Option<Vec<RatioSpec>>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = default_threads())]
    threads: usize,
    /// Repetitions per config; best time is reported.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// C tile-grid rows.
    #[arg(long)]
    mt: usize,
    /// C tile-grid columns.
    #[arg(long)]
    nt: usize,
    /// Reduction depth in tiles.
    #[arg(long)]
    kt: usize,
    #[arg(long)]
    nb: usize,
    /// Process grid PxQ.
    #[arg(long, value_parser = parse_grid, conflicts_with = "ranks")]
    grid: Option<ProcessGrid>,
    /// Rank count; the grid is chosen as square as possible.
    #[arg(long)]
    ranks: Option<usize>,
    #[arg(long, value_parser = parse_ratio)]
    ratio: RatioSpec,
    #[arg(long)]
    seed: u64,
    /// Re-send tiles on every iteration instead of caching per rank.
    #[arg(long)]
    rebroadcast_per_iter: bool,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

/// Parses `argv` and runs; the program's whole behavior lives here so tests
/// can drive it.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::GenMap(args) => gen_map(args),
        Command::Gemm(args) => gemm(args),
        Command::Verify(args) => verify(args),
        Command::Bench(args) => bench(args),
        Command::Sim(args) => sim(args),
    }
}

fn gen_map(args: GenMapArgs) -> Result<ExitCode, String> {
    if args.mt == 0 || args.nt == 0 {
        return Err("mt and nt must be at least 1".into());
    }
    let map = generate_ratio_map(args.mt, args.nt, args.ratio, args.seed);
    fs::write(&args.out, map.serialize()).map_err(|e| e.to_string())?;
    if let Some(path) = &args.heatmap {
        let body = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            map.heatmap_csv()
        } else {
            map.heatmap_pgm()
        };
        fs::write(path, body).map_err(|e| e.to_string())?;
    }
    let stats = map.stats();
    println!(
        "wrote {} ({} FP64, {} FP32 cells)",
        args.out.display(),
        stats.count_fp64,
        stats.count_fp32
    );
    Ok(ExitCode::SUCCESS)
}

fn gemm(args: GemmArgs) -> Result<ExitCode, String> {
    let scalars = GemmScalars::new(args.alpha, args.beta);
    let w = prepare_workload(args.m, args.n, args.k, args.nb, args.ratio, args.seed, scalars)
        .map_err(|e| e.to_string())?;
    let mut c = w.c0.clone();
    let start = Instant::now();
    execute_parallel(&w.graph, &w.a, &w.b, &mut c, args.threads.max(1));
    let elapsed = start.elapsed().as_secs_f64();

    let c_ref = oracle_dense(args.m, args.n, args.k, args.nb, args.seed, scalars)
        .map_err(|e| e.to_string())?;
    let rel_err = relative_fro_error(&c.to_dense_f64(), &c_ref).map_err(|e| e.to_string())?;

    let flops = flop_report(&w.graph, c.map(), args.nb);
    let total = 2.0 * args.m as f64 * args.n as f64 * args.k as f64;
    println!("config        {}", args.ratio);
    println!("elapsed_s     {elapsed:.6}");
    println!("gflops        {:.3}", total / elapsed / 1e9);
    println!("rel_err       {rel_err:e}");
    println!("tasks_fp64    {}", flops.tasks_fp64);
    println!("tasks_fp32    {}", flops.tasks_fp32);
    println!("flops_fp64    {}", flops.flops_fp64);
    println!("flops_fp32    {}", flops.flops_fp32);
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let scalars = GemmScalars::new(1.0, 1.0);
    let (m, n, k) = (args.n, args.n, args.n);
    let w = prepare_workload(m, n, k, args.nb, args.ratio, args.seed, scalars)
        .map_err(|e| e.to_string())?;

    let mut c_par = w.c0.clone();
    execute_parallel(&w.graph, &w.a, &w.b, &mut c_par, args.threads.max(1));
    let mut c_seq = w.c0.clone();
    tilegemm_core::graph::execute_sequential(&w.graph, &w.a, &w.b, &mut c_seq);
    let deterministic = c_par == c_seq;
    println!(
        "parallel-vs-sequential bitwise: {}",
        if deterministic { "ok" } else { "MISMATCH" }
    );

    let c_ref = oracle_dense(m, n, k, args.nb, args.seed, scalars).map_err(|e| e.to_string())?;
    let rel_err = relative_fro_error(&c_par.to_dense_f64(), &c_ref).map_err(|e| e.to_string())?;
    println!("rel_err vs FP64 oracle: {rel_err:e}");

    let accuracy_ok = if args.ratio.d_percent() == 100 {
        println!("all-FP64 config: requiring exact oracle match");
        rel_err == 0.0
    } else {
        rel_err < args.tol
    };
    if deterministic && accuracy_ok {
        println!("verify: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verify: FAIL");
        Ok(ExitCode::from(1))
    }
}

fn bench(args: BenchArgs) -> Result<ExitCode, String> {
    let config = BenchConfig {
        m: args.m,
        n: args.n,
        k: args.k,
        nb: args.nb,
        ratios: args.ratios.unwrap_or_else(BenchConfig::default_ratios),
        seed: args.seed,
        workers: args.threads.max(1),
        repetitions: args.reps.max(1),
        scalars: GemmScalars::new(1.0, 1.0),
    };
    let rows = bench_run(&config).map_err(|e| e.to_string())?;
    let csv = results_to_csv(&rows);
    match &args.out {
        Some(path) => fs::write(path, csv).map_err(|e| e.to_string())?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn sim(args: SimArgs) -> Result<ExitCode, String> {
    let grid = match (args.grid, args.ranks) {
        (Some(grid), _) => grid,
        (None, Some(ranks)) if ranks >= 1 => tilegemm_core::commsim::default_grid(ranks),
        (None, Some(_)) => return Err("ranks must be at least 1".into()),
        (None, None) => return Err("one of --grid or --ranks is required".into()),
    };
    let a_map = generate_ratio_map(args.mt, args.kt, args.ratio, args.seed.wrapping_add(1));
    let b_map = generate_ratio_map(args.kt, args.nt, args.ratio, args.seed.wrapping_add(2));
    let g = TaskGraph::from_extents(args.mt, args.nt, args.kt, args.nb, GemmScalars::new(1.0, 1.0));
    let report = simulate_summa(
        &g,
        grid,
        &a_map,
        &b_map,
        args.nb,
        SimOptions { rebroadcast_per_iter: args.rebroadcast_per_iter },
    )
    .map_err(|e| e.to_string())?;
    let csv = report.to_csv();
    match &args.out {
        Some(path) => fs::write(path, csv).map_err(|e| e.to_string())?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
