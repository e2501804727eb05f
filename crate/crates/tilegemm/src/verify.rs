//! Dense FP64 reference oracle and accuracy metrics.
//!
//! The oracle computes `C <- alpha*A*B + beta*C` entirely in FP64 with a
//! pinned summation order so that an all-FP64 run of the tiled engine matches
//! it bit for bit. The engine folds the reduction in blocks of the tile size:
//! for every output element, each block's partial dot product (inner index
//! increasing) is combined as `alpha*partial + c`, with `beta` applied by the
//! first block only. `k_block` selects that fold width; passing `k_block = K`
//! gives the textbook naive triple loop.

use thiserror::Error;

use tilegemm_core::kernels::GemmScalars;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("dimension mismatch: A is {m}x{k}, B is {k2}x{n}, C is {m2}x{n2}")]
    DimensionMismatch {
        m: usize,
        k: usize,
        k2: usize,
        n: usize,
        m2: usize,
        n2: usize,
    },
    #[error("reference norm is zero; relative error is undefined")]
    ZeroReferenceNorm,
}

/// In-place dense FP64 GEMM with a pinned, `k_block`-wide summation order.
/// `a` is `m x k`, `b` is `k x n`, `c` is `m x n`, all row-major.
#[allow(clippy::too_many_arguments)]
pub fn reference_gemm_f64(
    scalars: GemmScalars,
    a: &[f64],
    b: &[f64],
    c: &mut [f64],
    m: usize,
    n: usize,
    k: usize,
    k_block: usize,
) -> Result<(), VerifyError> {
    if a.len() != m * k || b.len() != k * n || c.len() != m * n {
        return Err(VerifyError::DimensionMismatch {
            m,
            k,
            k2: b.len().checked_div(n).unwrap_or(0),
            n,
            m2: c.len().checked_div(n).unwrap_or(0),
            n2: n,
        });
    }
    let k_block = k_block.max(1).min(k.max(1));
    for r in 0..m {
        for j in 0..n {
            let mut out = c[r * n + j];
            let mut first = true;
            let mut p0 = 0;
            while p0 < k {
                let p1 = (p0 + k_block).min(k);
                let mut acc = 0.0f64;
                for p in p0..p1 {
                    acc += a[r * k + p] * b[p * n + j];
                }
                let beta = if first { scalars.beta } else { 1.0 };
                out = scalars.alpha * acc + beta * out;
                first = false;
                p0 = p1;
            }
            c[r * n + j] = out;
        }
    }
    Ok(())
}

/// Relative Frobenius error `||test - reference||_F / ||reference||_F`, both
/// norms accumulated in FP64.
pub fn relative_fro_error(c_test: &[f64], c_ref: &[f64]) -> Result<f64, VerifyError> {
    assert_eq!(c_test.len(), c_ref.len());
    let mut diff_sq = 0.0f64;
    let mut ref_sq = 0.0f64;
    for (t, r) in c_test.iter().zip(c_ref) {
        let d = t - r;
        diff_sq += d * d;
        ref_sq += r * r;
    }
    if ref_sq == 0.0 {
        return Err(VerifyError::ZeroReferenceNorm);
    }
    Ok(diff_sq.sqrt() / ref_sq.sqrt())
}
