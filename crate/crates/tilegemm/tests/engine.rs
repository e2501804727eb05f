//! End-to-end engine checks against the dense FP64 oracle.

use tilegemm::bench::{oracle_dense, prepare_workload};
use tilegemm::parallel::execute_parallel;
use tilegemm::verify::relative_fro_error;
use tilegemm_core::kernels::GemmScalars;
use tilegemm_core::pmap::RatioSpec;

fn run(
    n: usize,
    nb: usize,
    ratio: (u8, u8),
    seed: u64,
    workers: usize,
    scalars: GemmScalars,
) -> (Vec<f64>, Vec<f64>) {
    let ratio = RatioSpec::new(ratio.0, ratio.1).unwrap();
    let w = prepare_workload(n, n, n, nb, ratio, seed, scalars).unwrap();
    let mut c = w.c0.clone();
    execute_parallel(&w.graph, &w.a, &w.b, &mut c, workers);
    let c_ref = oracle_dense(n, n, n, nb, seed, scalars).unwrap();
    (c.to_dense_f64(), c_ref)
}

#[test]
fn all_fp64_is_bitwise_exact() {
    for seed in [1u64, 7, 1234] {
        let (c, c_ref) = run(64, 16, (100, 0), seed, 3, GemmScalars::new(1.0, 1.0));
        assert_eq!(c, c_ref, "seed {seed}");
    }
}

#[test]
fn all_fp64_exact_with_nontrivial_scalars() {
    let (c, c_ref) = run(48, 8, (100, 0), 5, 2, GemmScalars::new(-1.75, 0.5));
    assert_eq!(c, c_ref);
}

#[test]
fn mixed_error_is_small_and_nonzero() {
    let (c, c_ref) = run(128, 16, (50, 50), 3, 4, GemmScalars::new(1.0, 1.0));
    let err = relative_fro_error(&c, &c_ref).unwrap();
    assert!(err > 0.0);
    assert!(err < 1e-4, "err = {err}");
}

#[test]
fn all_fp32_error_within_bound() {
    let (c, c_ref) = run(128, 16, (0, 100), 9, 4, GemmScalars::new(1.0, 1.0));
    let err = relative_fro_error(&c, &c_ref).unwrap();
    assert!(err > 0.0);
    assert!(err < 1e-4, "err = {err}");
}
