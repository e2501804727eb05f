//! Tiled-matrix data model: per-tile buffers tagged with a storage precision.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::pmap::PrecisionMap;
use crate::rng::Rng64;

/// Storage/compute precision of a tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Fp64,
    Fp32,
}

impl Precision {
    /// Element width in bytes.
    #[inline]
    pub fn width(self) -> usize {
        match self {
            Precision::Fp64 => 8,
            Precision::Fp32 => 4,
        }
    }

    /// Single-character tag used by the map file format.
    pub fn tag(self) -> char {
        match self {
            Precision::Fp64 => 'D',
            Precision::Fp32 => 'S',
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Fp64 => "FP64",
            Precision::Fp32 => "FP32",
        })
    }
}

/// Position of a tile in the tile grid (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileIndex {
    pub row: usize,
    pub col: usize,
}

impl TileIndex {
    pub fn new(row: usize, col: usize) -> Self {
        TileIndex { row, col }
    }
}

/// Element buffer of one tile, in the tile's storage precision.
#[derive(Debug, Clone, PartialEq)]
pub enum TileBuf {
    F64(Vec<f64>),
    F32(Vec<f32>),
}

/// A square `nb x nb` tile, row-major, stored in a single precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    nb: usize,
    buf: TileBuf,
}

impl Tile {
    /// Zero-filled tile.
    pub fn zeros(nb: usize, precision: Precision) -> Self {
        let buf = match precision {
            Precision::Fp64 => TileBuf::F64(vec![0.0; nb * nb]),
            Precision::Fp32 => TileBuf::F32(vec![0.0; nb * nb]),
        };
        Tile { nb, buf }
    }

    pub fn from_f64(nb: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nb * nb);
        Tile { nb, buf: TileBuf::F64(data) }
    }

    pub fn from_f32(nb: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), nb * nb);
        Tile { nb, buf: TileBuf::F32(data) }
    }

    #[inline]
    pub fn nb(&self) -> usize {
        self.nb
    }

    #[inline]
    pub fn precision(&self) -> Precision {
        match self.buf {
            TileBuf::F64(_) => Precision::Fp64,
            TileBuf::F32(_) => Precision::Fp32,
        }
    }

    #[inline]
    pub fn buf(&self) -> &TileBuf {
        &self.buf
    }

    #[inline]
    pub fn buf_mut(&mut self) -> &mut TileBuf {
        &mut self.buf
    }

    /// Stored size in bytes.
    pub fn bytes(&self) -> usize {
        self.nb * self.nb * self.precision().width()
    }

    /// Element at `(r, c)` widened to FP64 (exact for FP32 sources).
    #[inline]
    pub fn get_f64(&self, r: usize, c: usize) -> f64 {
        let idx = r * self.nb + c;
        match &self.buf {
            TileBuf::F64(v) => v[idx],
            TileBuf::F32(v) => v[idx] as f64,
        }
    }

    /// Stores an FP64 value at `(r, c)`, narrowing (round-to-nearest-even)
    /// when the tile is FP32.
    #[inline]
    pub fn set_from_f64(&mut self, r: usize, c: usize, value: f64) {
        let idx = r * self.nb + c;
        match &mut self.buf {
            TileBuf::F64(v) => v[idx] = value,
            TileBuf::F32(v) => v[idx] = value as f32,
        }
    }
}

/// Errors from tiled-matrix construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// `rows` or `cols` is not a multiple of `nb` (partial tiles are rejected).
    NotDivisible { rows: usize, cols: usize, nb: usize },
    /// The precision map's shape disagrees with the tile grid.
    MapShapeMismatch { expected: (usize, usize), got: (usize, usize) },
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::NotDivisible { rows, cols, nb } => write!(
                f,
                "matrix dimensions {rows}x{cols} are not divisible by tile size {nb}"
            ),
            MatrixError::MapShapeMismatch { expected, got } => write!(
                f,
                "precision map shape {}x{} does not match tile grid {}x{}",
                got.0, got.1, expected.0, expected.1
            ),
        }
    }
}

impl core::error::Error for MatrixError {}

/// A dense matrix stored as an `mt x nt` grid of square tiles, each tile in
/// its own precision. The global layout is tile-contiguous, not globally
/// row-major; [`TiledMatrix::to_dense_f64`] flattens explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct TiledMatrix {
    rows: usize,
    cols: usize,
    nb: usize,
    mt: usize,
    nt: usize,
    map: PrecisionMap,
    tiles: Vec<Tile>,
}

impl TiledMatrix {
    /// Allocates a zero-filled tiled matrix with per-tile precision taken
    /// from `map`. `rows` and `cols` must divide evenly by `nb`.
    pub fn new(
        rows: usize,
        cols: usize,
        nb: usize,
        map: PrecisionMap,
    ) -> Result<Self, MatrixError> {
        if nb == 0 || !rows.is_multiple_of(nb) || !cols.is_multiple_of(nb) {
            return Err(MatrixError::NotDivisible { rows, cols, nb });
        }
        let (mt, nt) = (rows / nb, cols / nb);
        if map.shape() != (mt, nt) {
            return Err(MatrixError::MapShapeMismatch {
                expected: (mt, nt),
                got: map.shape(),
            });
        }
        let mut tiles = Vec::with_capacity(mt * nt);
        for i in 0..mt {
            for j in 0..nt {
                tiles.push(Tile::zeros(nb, map.get(i, j)));
            }
        }
        Ok(TiledMatrix { rows, cols, nb, mt, nt, map, tiles })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn nb(&self) -> usize {
        self.nb
    }

    /// Tile-grid rows.
    #[inline]
    pub fn mt(&self) -> usize {
        self.mt
    }

    /// Tile-grid columns.
    #[inline]
    pub fn nt(&self) -> usize {
        self.nt
    }

    #[inline]
    pub fn map(&self) -> &PrecisionMap {
        &self.map
    }

    #[inline]
    pub fn tile(&self, i: usize, j: usize) -> &Tile {
        &self.tiles[i * self.nt + j]
    }

    #[inline]
    pub fn tile_mut(&mut self, i: usize, j: usize) -> &mut Tile {
        &mut self.tiles[i * self.nt + j]
    }

    /// All tiles, row-major over the tile grid.
    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tiles_mut(&mut self) -> &mut [Tile] {
        &mut self.tiles
    }

    /// Total stored bytes over all tiles.
    pub fn stored_bytes(&self) -> usize {
        self.tiles.iter().map(Tile::bytes).sum()
    }

    /// Fills the matrix with uniform `[-1, 1)` values from a single
    /// generator seeded with `seed`, visiting tiles in row-major tile order
    /// and elements row-major within each tile. Values are generated in FP64
    /// and then stored in each tile's precision, so the underlying FP64
    /// stream does not depend on the precision map: two matrices with the
    /// same seed and different maps hold the same pre-truncation values.
    pub fn fill_random(&mut self, seed: u64) {
        let mut rng = Rng64::new(seed);
        let nb = self.nb;
        for tile in &mut self.tiles {
            for r in 0..nb {
                for c in 0..nb {
                    tile.set_from_f64(r, c, rng.next_uniform());
                }
            }
        }
    }

    /// Flattens to a dense row-major FP64 buffer; FP32 elements widen exactly.
    pub fn to_dense_f64(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.rows * self.cols];
        for ti in 0..self.mt {
            for tj in 0..self.nt {
                let tile = self.tile(ti, tj);
                for r in 0..self.nb {
                    let gr = ti * self.nb + r;
                    for c in 0..self.nb {
                        dense[gr * self.cols + tj * self.nb + c] = tile.get_f64(r, c);
                    }
                }
            }
        }
        dense
    }

    /// Builds a tiled matrix from a dense row-major FP64 buffer, narrowing
    /// into FP32 tiles where the map says so.
    pub fn from_dense_f64(
        rows: usize,
        cols: usize,
        nb: usize,
        map: PrecisionMap,
        dense: &[f64],
    ) -> Result<Self, MatrixError> {
        assert_eq!(dense.len(), rows * cols);
        let mut m = TiledMatrix::new(rows, cols, nb, map)?;
        for ti in 0..m.mt {
            for tj in 0..m.nt {
                let tile = &mut m.tiles[ti * m.nt + tj];
                for r in 0..nb {
                    let gr = ti * nb + r;
                    for c in 0..nb {
                        tile.set_from_f64(r, c, dense[gr * cols + tj * nb + c]);
                    }
                }
            }
        }
        Ok(m)
    }
}
