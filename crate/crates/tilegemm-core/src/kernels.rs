//! Per-tile numerical kernels: precision conversion, single-precision-class
//! GEMM, and the mixed-operand task kernel with receiver-side conversion.
//!
//! The summation order is fixed: for each output element, the dot product is
//! accumulated over the reduction index in increasing order, then folded into
//! `C` as `alpha*acc + beta*c`. Every kernel is bit-deterministic.

use alloc::borrow::Cow;
use alloc::vec;
use core::fmt;

use crate::tile::{Precision, Tile, TileBuf};

/// The `alpha`/`beta` coefficients of `C <- alpha*A*B + beta*C`, kept in FP64
/// and narrowed (round-to-nearest-even) when a task computes in FP32.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GemmScalars {
    pub alpha: f64,
    pub beta: f64,
}

impl GemmScalars {
    pub fn new(alpha: f64, beta: f64) -> Self {
        GemmScalars { alpha, beta }
    }
}

/// Errors from the strict-precision tile kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelError {
    /// An input tile's precision differs from the output tile's.
    PrecisionMismatch { a: Precision, b: Precision, c: Precision },
    /// Tile edge lengths disagree.
    SizeMismatch { a: usize, b: usize, c: usize },
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::PrecisionMismatch { a, b, c } => {
                write!(f, "operand precisions A={a}, B={b} do not match C={c}")
            }
            KernelError::SizeMismatch { a, b, c } => {
                write!(f, "tile sizes disagree: A nb={a}, B nb={b}, C nb={c}")
            }
        }
    }
}

impl core::error::Error for KernelError {}

/// Converts a tile to `target` precision. Same-precision conversion is a
/// value-preserving copy; FP64->FP32 rounds to nearest-even (overflowing to
/// infinity per the standard narrowing rules); FP32->FP64 embeds exactly.
pub fn convert_tile(t: &Tile, target: Precision) -> Tile {
    match (t.buf(), target) {
        (TileBuf::F64(_), Precision::Fp64) | (TileBuf::F32(_), Precision::Fp32) => t.clone(),
        (TileBuf::F64(v), Precision::Fp32) => {
            Tile::from_f32(t.nb(), v.iter().map(|&x| x as f32).collect())
        }
        (TileBuf::F32(v), Precision::Fp64) => {
            Tile::from_f64(t.nb(), v.iter().map(|&x| x as f64).collect())
        }
    }
}

/// Borrowing variant of [`convert_tile`]: no copy when the precision already
/// matches.
fn converted<'a>(t: &'a Tile, target: Precision) -> Cow<'a, Tile> {
    if t.precision() == target {
        Cow::Borrowed(t)
    } else {
        Cow::Owned(convert_tile(t, target))
    }
}

macro_rules! gemm_block {
    ($name:ident, $ty:ty) => {
        /// `C <- alpha*A*B + beta*C` on contiguous row-major `nb x nb`
        /// blocks, fixed summation order (reduction index increasing).
        fn $name(alpha: $ty, a: &[$ty], b: &[$ty], beta: $ty, c: &mut [$ty], nb: usize) {
            let mut acc = vec![0.0 as $ty; nb];
            for (r, c_row) in c.chunks_exact_mut(nb).enumerate() {
                acc.fill(0.0);
                let a_row = &a[r * nb..(r + 1) * nb];
                for (p, &a_rp) in a_row.iter().enumerate() {
                    let b_row = &b[p * nb..(p + 1) * nb];
                    for (acc_c, &b_pc) in acc.iter_mut().zip(b_row) {
                        *acc_c += a_rp * b_pc;
                    }
                }
                for (c_el, &acc_c) in c_row.iter_mut().zip(acc.iter()) {
                    *c_el = alpha * acc_c + beta * *c_el;
                }
            }
        }
    };
}

gemm_block!(gemm_block_f64, f64);
gemm_block!(gemm_block_f32, f32);

/// Strict-precision tile GEMM: all three tiles must share `C`'s precision
/// (callers convert with [`convert_tile`] first). The per-element summation
/// order is: accumulate `A[r,p]*B[p,c]` over increasing `p`, then
/// `C[r,c] <- alpha*acc + beta*C[r,c]`, all in `C`'s precision.
pub fn gemm_tile(
    alpha: f64,
    a: &Tile,
    b: &Tile,
    beta: f64,
    c: &mut Tile,
) -> Result<(), KernelError> {
    let nb = c.nb();
    if a.nb() != nb || b.nb() != nb {
        return Err(KernelError::SizeMismatch { a: a.nb(), b: b.nb(), c: nb });
    }
    if a.precision() != c.precision() || b.precision() != c.precision() {
        return Err(KernelError::PrecisionMismatch {
            a: a.precision(),
            b: b.precision(),
            c: c.precision(),
        });
    }
    match (a.buf(), b.buf(), c.buf_mut()) {
        (TileBuf::F64(av), TileBuf::F64(bv), TileBuf::F64(cv)) => {
            gemm_block_f64(alpha, av, bv, beta, cv, nb);
        }
        (TileBuf::F32(av), TileBuf::F32(bv), TileBuf::F32(cv)) => {
            gemm_block_f32(alpha as f32, av, bv, beta as f32, cv, nb);
        }
        _ => unreachable!("precision checked above"),
    }
    Ok(())
}

/// The mixed-precision task kernel. The task's operational precision is the
/// precision of its `C` tile: `A` and `B` are converted to it on arrival
/// (receiver side; a no-op when they already match), then the strict kernel
/// runs. `A` and `B` are never mutated.
pub fn mixed_gemm_task(scalars: GemmScalars, a: &Tile, b: &Tile, c: &mut Tile) {
    let target = c.precision();
    let a = converted(a, target);
    let b = converted(b, target);
    gemm_tile(scalars.alpha, &a, &b, scalars.beta, c)
        .expect("operands converted to C's precision");
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn identity(nb: usize, p: Precision) -> Tile {
        let mut t = Tile::zeros(nb, p);
        for r in 0..nb {
            t.set_from_f64(r, r, 1.0);
        }
        t
    }

    fn random_tile(nb: usize, p: Precision, seed: u64) -> Tile {
        let mut rng = crate::rng::Rng64::new(seed);
        let mut t = Tile::zeros(nb, p);
        for r in 0..nb {
            for c in 0..nb {
                t.set_from_f64(r, c, rng.next_uniform());
            }
        }
        t
    }

    #[test]
    fn convert_exact_values() {
        let t = Tile::from_f64(1, vec![0.5]);
        let s = convert_tile(&t, Precision::Fp32);
        assert_eq!(s.get_f64(0, 0), 0.5);
        let t = Tile::from_f64(2, vec![0.5, -0.25, 1.0, -1.0]);
        let s = convert_tile(&t, Precision::Fp32);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(s.get_f64(r, c), t.get_f64(r, c));
            }
        }
    }

    #[test]
    fn convert_rounds_to_nearest_even() {
        let x = 1.0 + f64::powi(2.0, -30);
        let t = Tile::from_f64(1, vec![x]);
        assert_eq!(convert_tile(&t, Precision::Fp32).get_f64(0, 0), 1.0);
    }

    #[test]
    fn fp32_round_trip_identity() {
        let t = random_tile(8, Precision::Fp32, 3);
        let back = convert_tile(&convert_tile(&t, Precision::Fp64), Precision::Fp32);
        assert_eq!(t, back);
    }

    #[test]
    fn gemm_identity_left() {
        let a = identity(4, Precision::Fp64);
        let b = random_tile(4, Precision::Fp64, 5);
        let mut c = Tile::zeros(4, Precision::Fp64);
        gemm_tile(1.0, &a, &b, 0.0, &mut c).unwrap();
        assert_eq!(c, b);
    }

    #[test]
    fn gemm_alpha_zero_beta_one_is_noop() {
        let a = random_tile(4, Precision::Fp64, 1);
        let b = random_tile(4, Precision::Fp64, 2);
        let mut c = random_tile(4, Precision::Fp64, 3);
        let before = c.clone();
        gemm_tile(0.0, &a, &b, 1.0, &mut c).unwrap();
        assert_eq!(c, before);
    }

    #[test]
    fn gemm_scalar_case() {
        let a = Tile::from_f64(1, vec![2.0]);
        let b = Tile::from_f64(1, vec![3.0]);
        let mut c = Tile::from_f64(1, vec![1.0]);
        gemm_tile(1.0, &a, &b, 1.0, &mut c).unwrap();
        assert_eq!(c.get_f64(0, 0), 7.0);
    }

    // Scalar reference with the same per-element summation order; the block
    // kernel must agree bitwise.
    #[test]
    fn gemm_matches_naive_order() {
        for nb in [2usize, 3, 8] {
            let a = random_tile(nb, Precision::Fp64, 10 + nb as u64);
            let b = random_tile(nb, Precision::Fp64, 20 + nb as u64);
            let mut c = random_tile(nb, Precision::Fp64, 30 + nb as u64);
            let (alpha, beta) = (1.25, -0.5);
            let mut expected: Vec<f64> = Vec::new();
            for r in 0..nb {
                for j in 0..nb {
                    let mut acc = 0.0f64;
                    for p in 0..nb {
                        acc += a.get_f64(r, p) * b.get_f64(p, j);
                    }
                    expected.push(alpha * acc + beta * c.get_f64(r, j));
                }
            }
            gemm_tile(alpha, &a, &b, beta, &mut c).unwrap();
            for r in 0..nb {
                for j in 0..nb {
                    assert_eq!(c.get_f64(r, j), expected[r * nb + j]);
                }
            }
        }
    }

    #[test]
    fn gemm_rejects_precision_mismatch() {
        let a = random_tile(2, Precision::Fp32, 1);
        let b = random_tile(2, Precision::Fp64, 2);
        let mut c = random_tile(2, Precision::Fp64, 3);
        assert!(matches!(
            gemm_tile(1.0, &a, &b, 0.0, &mut c),
            Err(KernelError::PrecisionMismatch { .. })
        ));
    }

    #[test]
    fn mixed_task_all_fp64_equals_strict() {
        let a = random_tile(4, Precision::Fp64, 1);
        let b = random_tile(4, Precision::Fp64, 2);
        let mut c1 = random_tile(4, Precision::Fp64, 3);
        let mut c2 = c1.clone();
        mixed_gemm_task(GemmScalars::new(1.0, 1.0), &a, &b, &mut c1);
        gemm_tile(1.0, &a, &b, 1.0, &mut c2).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn mixed_task_truncates_before_multiply() {
        let a = Tile::from_f64(1, vec![1.0 + f64::powi(2.0, -30)]);
        let b = Tile::from_f32(1, vec![1.0]);
        let mut c = Tile::from_f32(1, vec![0.0]);
        mixed_gemm_task(GemmScalars::new(1.0, 0.0), &a, &b, &mut c);
        assert_eq!(c.get_f64(0, 0), 1.0);
    }

    #[test]
    fn mixed_task_upconverts_exactly() {
        let a = random_tile(4, Precision::Fp32, 6);
        let b = random_tile(4, Precision::Fp32, 7);
        let mut c = random_tile(4, Precision::Fp64, 8);
        let mut c_ref = c.clone();
        mixed_gemm_task(GemmScalars::new(1.0, 1.0), &a, &b, &mut c);
        let a64 = convert_tile(&a, Precision::Fp64);
        let b64 = convert_tile(&b, Precision::Fp64);
        gemm_tile(1.0, &a64, &b64, 1.0, &mut c_ref).unwrap();
        assert_eq!(c, c_ref);
    }

    #[test]
    fn mixed_task_leaves_sources_untouched() {
        let a = random_tile(4, Precision::Fp64, 1);
        let b = random_tile(4, Precision::Fp32, 2);
        let (a0, b0) = (a.clone(), b.clone());
        let mut c = random_tile(4, Precision::Fp32, 3);
        mixed_gemm_task(GemmScalars::new(2.0, 0.5), &a, &b, &mut c);
        assert_eq!(a, a0);
        assert_eq!(b, b0);
    }

    #[test]
    fn mixed_task_is_deterministic() {
        let a = random_tile(6, Precision::Fp64, 11);
        let b = random_tile(6, Precision::Fp32, 12);
        let base = random_tile(6, Precision::Fp32, 13);
        let mut c1 = base.clone();
        let mut c2 = base.clone();
        mixed_gemm_task(GemmScalars::new(1.0, 1.0), &a, &b, &mut c1);
        mixed_gemm_task(GemmScalars::new(1.0, 1.0), &a, &b, &mut c2);
        assert_eq!(c1, c2);
    }
}
