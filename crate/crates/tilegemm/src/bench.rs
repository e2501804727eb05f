//! Benchmark harness: sweeps `aD:bS` precision ratios over one GEMM shape
//! and reports wall time, effective Gflop/s, speedup against the all-FP64
//! baseline, and end-to-end relative error against the FP64 oracle.
//!
//! Seed derivation from the base seed: precision maps for A/B/C use
//! `base+1`/`base+2`/`base+3`, element data uses `base+4`/`base+5`/`base+6`.
//! Data seeds do not depend on the ratio, and the FP64 value stream does not
//! depend on the precision map, so every ratio computes on the same
//! pre-truncation values and the oracle result is shared across the sweep.

use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use tilegemm_core::graph::{build_task_graph, GraphError, TaskGraph};
use tilegemm_core::kernels::GemmScalars;
use tilegemm_core::pmap::{generate_ratio_map, PrecisionMap, RatioSpec};
use tilegemm_core::tile::{MatrixError, Precision, TiledMatrix};

use crate::parallel::execute_parallel;
use crate::verify::{reference_gemm_f64, relative_fro_error, VerifyError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// One benchmark sweep: shape, tile size, the ratios to visit, and run knobs.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub nb: usize,
    pub ratios: Vec<RatioSpec>,
    pub seed: u64,
    pub workers: usize,
    pub repetitions: usize,
    pub scalars: GemmScalars,
}

impl BenchConfig {
    /// The ratio set used throughout the measurements this harness mirrors.
    pub fn default_ratios() -> Vec<RatioSpec> {
        [(100, 0), (80, 20), (50, 50), (20, 80), (0, 100)]
            .into_iter()
            .map(|(d, s)| RatioSpec::new(d, s).expect("sums to 100"))
            .collect()
    }
}

/// One row of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub label: String,
    pub elapsed_seconds: f64,
    /// `2*M*N*K / elapsed / 1e9` for every config, so speedups reflect time
    /// only.
    pub gflops_effective: f64,
    /// Ratio of the all-FP64 elapsed time to this config's; exactly 1.0 for
    /// the `100D:0S` row.
    pub speedup_vs_alldp: f64,
    pub rel_fro_error: f64,
}

/// A filled problem instance plus its task graph.
pub struct Workload {
    pub a: TiledMatrix,
    pub b: TiledMatrix,
    /// Pristine output matrix; execution clones it so reruns start equal.
    pub c0: TiledMatrix,
    pub graph: TaskGraph,
}

/// Builds matrices for one `(shape, ratio, seed)` and the task graph over
/// them, using the seed-derivation rule described at module level.
pub fn prepare_workload(
    m: usize,
    n: usize,
    k: usize,
    nb: usize,
    ratio: RatioSpec,
    seed: u64,
    scalars: GemmScalars,
) -> Result<Workload, BenchError> {
    let a_map = generate_ratio_map(m / nb.max(1), k / nb.max(1), ratio, seed.wrapping_add(1));
    let b_map = generate_ratio_map(k / nb.max(1), n / nb.max(1), ratio, seed.wrapping_add(2));
    let c_map = generate_ratio_map(m / nb.max(1), n / nb.max(1), ratio, seed.wrapping_add(3));
    let mut a = TiledMatrix::new(m, k, nb, a_map)?;
    let mut b = TiledMatrix::new(k, n, nb, b_map)?;
    let mut c0 = TiledMatrix::new(m, n, nb, c_map)?;
    a.fill_random(seed.wrapping_add(4));
    b.fill_random(seed.wrapping_add(5));
    c0.fill_random(seed.wrapping_add(6));
    let graph = build_task_graph(&a, &b, &c0, scalars)?;
    Ok(Workload { a, b, c0, graph })
}

/// The oracle result for a shape and seed: dense pre-truncation FP64 data
/// (independent of any ratio) pushed through the reference GEMM with the
/// engine's summation order (`k_block = nb`).
pub fn oracle_dense(
    m: usize,
    n: usize,
    k: usize,
    nb: usize,
    seed: u64,
    scalars: GemmScalars,
) -> Result<Vec<f64>, BenchError> {
    let dense_fp64 = |rows: usize, cols: usize, data_seed: u64| -> Result<Vec<f64>, BenchError> {
        let map = PrecisionMap::uniform(rows / nb, cols / nb, Precision::Fp64);
        let mut m = TiledMatrix::new(rows, cols, nb, map)?;
        m.fill_random(data_seed);
        Ok(m.to_dense_f64())
    };
    let a = dense_fp64(m, k, seed.wrapping_add(4))?;
    let b = dense_fp64(k, n, seed.wrapping_add(5))?;
    let mut c = dense_fp64(m, n, seed.wrapping_add(6))?;
    reference_gemm_f64(scalars, &a, &b, &mut c, m, n, k, nb)?;
    Ok(c)
}

/// Runs the sweep. The `100D:0S` baseline is always measured (prepended when
/// absent from `ratios`) and anchors the speedup column. Timing is
/// best-of-`repetitions`; the computed output is identical across
/// repetitions by construction.
pub fn bench_run(config: &BenchConfig) -> Result<Vec<BenchResult>, BenchError> {
    let all_d = RatioSpec::new(100, 0).expect("valid ratio");
    let mut ratios = config.ratios.clone();
    if !ratios.contains(&all_d) {
        ratios.insert(0, all_d);
    }

    let c_ref = oracle_dense(config.m, config.n, config.k, config.nb, config.seed, config.scalars)?;

    let mut rows = Vec::new();
    let mut baseline_elapsed = None;
    for ratio in ratios {
        let w = prepare_workload(
            config.m,
            config.n,
            config.k,
            config.nb,
            ratio,
            config.seed,
            config.scalars,
        )?;
        let mut best = f64::INFINITY;
        let mut result = None;
        for _ in 0..config.repetitions.max(1) {
            let mut c = w.c0.clone();
            let start = Instant::now();
            execute_parallel(&w.graph, &w.a, &w.b, &mut c, config.workers);
            best = best.min(start.elapsed().as_secs_f64());
            result = Some(c);
        }
        let c = result.expect("at least one repetition");
        let rel_err = relative_fro_error(&c.to_dense_f64(), &c_ref)?;
        if ratio == all_d {
            baseline_elapsed = Some(best);
        }
        let speedup = if ratio == all_d {
            1.0
        } else {
            baseline_elapsed.expect("baseline runs first") / best
        };
        let flops = 2.0 * config.m as f64 * config.n as f64 * config.k as f64;
        rows.push(BenchResult {
            label: ratio.label(),
            elapsed_seconds: best,
            gflops_effective: flops / best / 1e9,
            speedup_vs_alldp: speedup,
            rel_fro_error: rel_err,
        });
    }
    Ok(rows)
}

/// CSV with the fixed schema `label,elapsed_s,gflops,speedup,rel_err`.
pub fn results_to_csv(rows: &[BenchResult]) -> String {
    let mut out = String::from("label,elapsed_s,gflops,speedup,rel_err\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.3},{:.4},{:e}",
            r.label, r.elapsed_seconds, r.gflops_effective, r.speedup_vs_alldp, r.rel_fro_error
        );
    }
    out
}
