//! Core of a tile-centric mixed-precision GEMM engine.
//!
//! Matrices are partitioned into square `nb x nb` tiles, and every tile is
//! independently stored in FP64 or FP32. `C <- alpha*A*B + beta*C` is expressed
//! as a SUMMA-style task graph: one multiply-accumulate task per
//! `(i, j, l)` triple, with the tasks of a given `C(i, j)` tile serialized over
//! the reduction index `l`. Operands travel in their stored precision and are
//! converted at the consuming task (receiver-side conversion); the task itself
//! computes in the precision of its output tile.
//!
//! This crate is `no_std` (with `alloc`) and holds everything that does not
//! need threads or IO: the tiled-matrix data model, precision-map generation
//! and (de)serialization, the per-tile kernels, the task graph with its
//! sequential executor, and a virtual distributed-memory communication
//! simulator over a 2D block-cyclic process grid. The companion `tilegemm`
//! crate adds the parallel executor, the FP64 verification oracle, the
//! benchmark harness, and the CLI.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod commsim;
pub mod graph;
pub mod kernels;
pub mod pmap;
pub mod rng;
pub mod tile;

pub use commsim::{
    default_grid, owner, simulate_summa, CommRecord, CommReport, MatrixTag, ProcessGrid,
    SimError, SimOptions,
};
pub use graph::{build_task_graph, execute_sequential, FlopReport, GemmTask, GraphError, TaskGraph};
pub use kernels::{convert_tile, gemm_tile, mixed_gemm_task, GemmScalars, KernelError};
pub use pmap::{generate_ratio_map, MapParseError, MapStats, PrecisionMap, RatioSpec};
pub use rng::Rng64;
pub use tile::{MatrixError, Precision, Tile, TileIndex, TiledMatrix};
