//! Runtime, verification, and benchmarking for the tile-centric
//! mixed-precision GEMM engine.
//!
//! The algorithmic core (tiles, precision maps, kernels, task graph,
//! communication simulator) lives in [`tilegemm_core`] and is re-exported
//! here. This crate adds what needs `std`: the dependency-driven parallel
//! executor, the dense FP64 reference oracle and error metrics, the benchmark
//! harness, and the `tilegemm` command-line tool.

pub use tilegemm_core as core;

pub mod bench;
pub mod cli;
pub mod parallel;
pub mod verify;

pub use bench::{bench_run, BenchConfig, BenchResult};
pub use parallel::{execute_parallel, ExecStats};
pub use verify::{reference_gemm_f64, relative_fro_error, VerifyError};
