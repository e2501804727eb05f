//! The SUMMA task graph: one multiply-accumulate task per `(i, j, l)`, with
//! the tasks of each `C(i, j)` tile serialized over the reduction index `l`.
//!
//! The reduction chain carries `C(i, j)` through successive `l` in increasing
//! order; `beta` is applied by the first task of a chain and subsequent tasks
//! accumulate with `beta = 1`, so the whole graph computes
//! `C <- alpha*A*B + beta*C` once. Chains over distinct `C` tiles are
//! independent, which is what makes parallel execution bitwise-reproducible.

use core::fmt;

use crate::kernels::{mixed_gemm_task, GemmScalars};
use crate::tile::TiledMatrix;

/// One multiply-accumulate task: reads `A(i, l)` and `B(l, j)`,
/// read-modify-writes `C(i, j)`. Task `(i, j, l)` depends on `(i, j, l-1)`
/// for `l >= 1`; tasks with distinct `(i, j)` are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GemmTask {
    pub i: usize,
    pub j: usize,
    pub l: usize,
}

/// The implicit task set `{(i, j, l) : i < mt, j < nt, l < kt}` plus the
/// scalars; tasks are generated on the fly rather than materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskGraph {
    mt: usize,
    nt: usize,
    kt: usize,
    nb: usize,
    scalars: GemmScalars,
}

/// Errors from task-graph construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Tile-grid shapes do not conform (A is mt x kt, B kt x nt, C mt x nt).
    ShapeMismatch {
        a: (usize, usize),
        b: (usize, usize),
        c: (usize, usize),
    },
    /// The three matrices do not share one tile size.
    TileSizeMismatch { a: usize, b: usize, c: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::ShapeMismatch { a, b, c } => write!(
                f,
                "tile grids do not conform: A {}x{}, B {}x{}, C {}x{}",
                a.0, a.1, b.0, b.1, c.0, c.1
            ),
            GraphError::TileSizeMismatch { a, b, c } => {
                write!(f, "tile sizes disagree: A nb={a}, B nb={b}, C nb={c}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

impl TaskGraph {
    /// Graph over bare extents, for callers (like the communication
    /// simulator) that have no materialized matrices.
    pub fn from_extents(mt: usize, nt: usize, kt: usize, nb: usize, scalars: GemmScalars) -> Self {
        TaskGraph { mt, nt, kt, nb, scalars }
    }

    #[inline]
    pub fn mt(&self) -> usize {
        self.mt
    }

    #[inline]
    pub fn nt(&self) -> usize {
        self.nt
    }

    #[inline]
    pub fn kt(&self) -> usize {
        self.kt
    }

    #[inline]
    pub fn nb(&self) -> usize {
        self.nb
    }

    #[inline]
    pub fn scalars(&self) -> GemmScalars {
        self.scalars
    }

    /// Total task count, `mt * nt * kt`.
    pub fn task_count(&self) -> usize {
        self.mt * self.nt * self.kt
    }

    /// Effective scalars for chain step `l`: `beta` applies only to the
    /// first step, later steps accumulate onto the carried value.
    #[inline]
    pub fn step_scalars(&self, l: usize) -> GemmScalars {
        GemmScalars {
            alpha: self.scalars.alpha,
            beta: if l == 0 { self.scalars.beta } else { 1.0 },
        }
    }
}

/// Validates shapes and builds the task graph for `C <- alpha*A*B + beta*C`.
pub fn build_task_graph(
    a: &TiledMatrix,
    b: &TiledMatrix,
    c: &TiledMatrix,
    scalars: GemmScalars,
) -> Result<TaskGraph, GraphError> {
    if a.nb() != b.nb() || a.nb() != c.nb() {
        return Err(GraphError::TileSizeMismatch { a: a.nb(), b: b.nb(), c: c.nb() });
    }
    let conforms = a.nt() == b.mt() && a.mt() == c.mt() && b.nt() == c.nt();
    if !conforms {
        return Err(GraphError::ShapeMismatch {
            a: (a.mt(), a.nt()),
            b: (b.mt(), b.nt()),
            c: (c.mt(), c.nt()),
        });
    }
    Ok(TaskGraph::from_extents(c.mt(), c.nt(), a.nt(), a.nb(), scalars))
}

/// Runs the graph in the literal sequential order `l -> i -> j`. This is the
/// bitwise oracle for the parallel executor.
pub fn execute_sequential(g: &TaskGraph, a: &TiledMatrix, b: &TiledMatrix, c: &mut TiledMatrix) {
    debug_assert_eq!((c.mt(), c.nt()), (g.mt, g.nt));
    debug_assert_eq!(a.nt(), g.kt);
    for l in 0..g.kt {
        let scalars = g.step_scalars(l);
        for i in 0..g.mt {
            for j in 0..g.nt {
                mixed_gemm_task(scalars, a.tile(i, l), b.tile(l, j), c.tile_mut(i, j));
            }
        }
    }
}

/// Flop and task counts split by operational precision (the precision of the
/// task's `C` tile).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlopReport {
    pub flops_fp64: u64,
    pub flops_fp32: u64,
    pub tasks_fp64: u64,
    pub tasks_fp32: u64,
}

impl FlopReport {
    pub fn total_flops(&self) -> u64 {
        self.flops_fp64 + self.flops_fp32
    }
}

/// Counts tasks and flops per precision: each of the `kt` chain steps of a
/// `C` cell is one task of `2*nb^3` flops in that cell's precision.
pub fn flop_report(g: &TaskGraph, c_map: &crate::pmap::PrecisionMap, nb: usize) -> FlopReport {
    debug_assert_eq!(c_map.shape(), (g.mt, g.nt));
    let stats = c_map.stats();
    let tasks_fp64 = (g.kt * stats.count_fp64) as u64;
    let tasks_fp32 = (g.kt * stats.count_fp32) as u64;
    let per_task = 2 * (nb as u64).pow(3);
    FlopReport {
        flops_fp64: per_task * tasks_fp64,
        flops_fp32: per_task * tasks_fp32,
        tasks_fp64,
        tasks_fp32,
    }
}
