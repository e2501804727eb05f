//! Per-tile precision assignments: generation from `aD:bS` ratio specs,
//! text (de)serialization, statistics, and heatmap export.
//!
//! Map file format: first line `"mt nt"`, then `mt` lines of exactly `nt`
//! characters from `{D, S}`, trailing newline required.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::rng::Rng64;
use crate::tile::Precision;

/// An `aD:bS` configuration: `a` percent of tiles in FP64, `b` percent in
/// FP32, with `a + b = 100`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatioSpec {
    d_percent: u8,
    s_percent: u8,
}

/// Errors constructing or parsing a [`RatioSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioError {
    /// The two percentages do not sum to 100.
    BadSum { d: u8, s: u8 },
    /// Not of the form `a:b` with decimal integers.
    Malformed,
}

impl fmt::Display for RatioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioError::BadSum { d, s } => write!(f, "ratio {d}:{s} does not sum to 100"),
            RatioError::Malformed => f.write_str("ratio must have the form a:b, e.g. 80:20"),
        }
    }
}

impl core::error::Error for RatioError {}

impl RatioSpec {
    pub fn new(d_percent: u8, s_percent: u8) -> Result<Self, RatioError> {
        if d_percent as u16 + s_percent as u16 != 100 {
            return Err(RatioError::BadSum { d: d_percent, s: s_percent });
        }
        Ok(RatioSpec { d_percent, s_percent })
    }

    pub fn d_percent(self) -> u8 {
        self.d_percent
    }

    pub fn s_percent(self) -> u8 {
        self.s_percent
    }

    /// Parses `"80:20"` style text.
    pub fn parse(text: &str) -> Result<Self, RatioError> {
        let (d, s) = text.split_once(':').ok_or(RatioError::Malformed)?;
        let d: u8 = d.trim().parse().map_err(|_| RatioError::Malformed)?;
        let s: u8 = s.trim().parse().map_err(|_| RatioError::Malformed)?;
        RatioSpec::new(d, s)
    }

    /// Display label, e.g. `100D:0S`.
    pub fn label(self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{}D:{}S", self.d_percent, self.s_percent);
        s
    }
}

impl fmt::Display for RatioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D:{}S", self.d_percent, self.s_percent)
    }
}

/// A 2D grid of per-tile precision tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionMap {
    mt: usize,
    nt: usize,
    cells: Vec<Precision>,
}

/// Exact per-precision cell counts of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapStats {
    pub count_fp64: usize,
    pub count_fp32: usize,
    pub fraction_fp64: f64,
}

/// Errors parsing the map file format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapParseError {
    BadHeader,
    WrongRowCount { expected: usize, got: usize },
    WrongRowLength { row: usize, expected: usize, got: usize },
    IllegalCharacter { row: usize, col: usize, ch: char },
}

impl fmt::Display for MapParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapParseError::BadHeader => f.write_str("bad header: expected \"mt nt\""),
            MapParseError::WrongRowCount { expected, got } => {
                write!(f, "expected {expected} rows, found {got}")
            }
            MapParseError::WrongRowLength { row, expected, got } => {
                write!(f, "row {row}: expected {expected} cells, found {got}")
            }
            MapParseError::IllegalCharacter { row, col, ch } => {
                write!(f, "row {row}, col {col}: illegal character {ch:?} (expected 'D' or 'S')")
            }
        }
    }
}

impl core::error::Error for MapParseError {}

impl PrecisionMap {
    /// Map with every cell at the same precision.
    pub fn uniform(mt: usize, nt: usize, precision: Precision) -> Self {
        PrecisionMap { mt, nt, cells: alloc::vec![precision; mt * nt] }
    }

    pub fn from_cells(mt: usize, nt: usize, cells: Vec<Precision>) -> Self {
        assert_eq!(cells.len(), mt * nt);
        PrecisionMap { mt, nt, cells }
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.mt, self.nt)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Precision {
        self.cells[i * self.nt + j]
    }

    pub fn cells(&self) -> &[Precision] {
        &self.cells
    }

    /// Exact counts and FP64 fraction.
    pub fn stats(&self) -> MapStats {
        let count_fp64 = self.cells.iter().filter(|p| **p == Precision::Fp64).count();
        let count_fp32 = self.cells.len() - count_fp64;
        MapStats {
            count_fp64,
            count_fp32,
            fraction_fp64: count_fp64 as f64 / self.cells.len() as f64,
        }
    }

    /// Serializes to the map file format.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(16 + self.mt * (self.nt + 1));
        let _ = writeln!(out, "{} {}", self.mt, self.nt);
        for i in 0..self.mt {
            for j in 0..self.nt {
                out.push(self.get(i, j).tag());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the map file format.
    pub fn parse(text: &str) -> Result<Self, MapParseError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(MapParseError::BadHeader)?;
        let (mt_s, nt_s) = header.split_once(' ').ok_or(MapParseError::BadHeader)?;
        let mt: usize = mt_s.parse().map_err(|_| MapParseError::BadHeader)?;
        let nt: usize = nt_s.parse().map_err(|_| MapParseError::BadHeader)?;
        let mut cells = Vec::with_capacity(mt * nt);
        let mut rows = 0usize;
        for (i, line) in lines.enumerate() {
            if rows == mt {
                // Trailing non-empty content counts as an extra row.
                if !line.is_empty() {
                    return Err(MapParseError::WrongRowCount { expected: mt, got: mt + 1 });
                }
                continue;
            }
            let got = line.chars().count();
            if got != nt {
                return Err(MapParseError::WrongRowLength { row: i, expected: nt, got });
            }
            for (j, ch) in line.chars().enumerate() {
                cells.push(match ch {
                    'D' => Precision::Fp64,
                    'S' => Precision::Fp32,
                    ch => return Err(MapParseError::IllegalCharacter { row: i, col: j, ch }),
                });
            }
            rows += 1;
        }
        if rows != mt {
            return Err(MapParseError::WrongRowCount { expected: mt, got: rows });
        }
        Ok(PrecisionMap { mt, nt, cells })
    }

    /// Heatmap as CSV: `mt` lines of `nt` comma-separated values, `64` for
    /// FP64 cells and `32` for FP32 cells.
    pub fn heatmap_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.mt {
            for j in 0..self.nt {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(match self.get(i, j) {
                    Precision::Fp64 => "64",
                    Precision::Fp32 => "32",
                });
            }
            out.push('\n');
        }
        out
    }

    /// Heatmap as plain-text PGM (P2): FP64 maps to 0 (dark), FP32 to 255.
    pub fn heatmap_pgm(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "P2\n{} {}\n255", self.nt, self.mt);
        for i in 0..self.mt {
            for j in 0..self.nt {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(match self.get(i, j) {
                    Precision::Fp64 => "0",
                    Precision::Fp32 => "255",
                });
            }
            out.push('\n');
        }
        out
    }
}

/// Generates a map with an exact FP64 cell count: `round(d/100 * mt*nt)`
/// cells FP64 (round half away from zero), the rest FP32. Cell selection is
/// a Fisher-Yates shuffle of the linear indices driven by [`Rng64`]; the
/// first `nd` shuffled indices become FP64. Deterministic in
/// `(mt, nt, ratio, seed)`.
pub fn generate_ratio_map(mt: usize, nt: usize, ratio: RatioSpec, seed: u64) -> PrecisionMap {
    let n = mt * nt;
    let nd = (ratio.d_percent() as usize * n + 50) / 100;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = Rng64::new(seed);
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    let mut cells = alloc::vec![Precision::Fp32; n];
    for &k in &idx[..nd] {
        cells[k] = Precision::Fp64;
    }
    PrecisionMap { mt, nt, cells }
}
