//! Fixed-point binary encoding of non-negative matrices.
//!
//! Every matrix entry is represented as `alpha * Σ_b 2^b q_b` over
//! `bits_per_value` binary variables, least-significant bit first. The bits
//! of all entries share one global index space so a whole matrix can live in
//! a single QUBO: entry `(r, c)` of an R×C matrix owns the contiguous bit
//! range starting at `(r*C + c) * bits_per_value`. Registers of distinct
//! entries are therefore disjoint by construction.

use crate::error::{CnmfError, Result};
use crate::matrix::DenseMatrix;

/// Fixed-point scheme: `bits_per_value` binary digits scaled by `alpha`.
///
/// Representable values are `{0, alpha, 2·alpha, …, (2^bits − 1)·alpha}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingScheme {
    alpha: f64,
    bits_per_value: u32,
}

impl EncodingScheme {
    /// Default precision: step 0.001, ten bits per value (levels 0..=1023).
    pub const DEFAULT_ALPHA: f64 = 0.001;
    pub const DEFAULT_BITS_PER_VALUE: u32 = 10;

    pub fn new(alpha: f64, bits_per_value: u32) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(CnmfError::Config(format!(
                "alpha must be finite and positive, got {alpha}"
            )));
        }
        if bits_per_value == 0 || bits_per_value > 52 {
            return Err(CnmfError::Config(format!(
                "bits_per_value must be in 1..=52, got {bits_per_value}"
            )));
        }
        Ok(Self { alpha, bits_per_value })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bits_per_value(&self) -> u32 {
        self.bits_per_value
    }

    /// Number of representable levels, `2^bits_per_value`.
    pub fn levels(&self) -> u64 {
        1u64 << self.bits_per_value
    }

    /// Largest representable value, `alpha · (2^bits − 1)`.
    pub fn max_value(&self) -> f64 {
        self.alpha * (self.levels() - 1) as f64
    }

    /// Weight of bit `b` of a value: `alpha · 2^b`.
    pub fn bit_weight(&self, bit: u32) -> f64 {
        debug_assert!(bit < self.bits_per_value);
        self.alpha * (1u64 << bit) as f64
    }

    /// Nearest representable level for `value`, clamped to the valid range.
    pub fn quantize_level(&self, value: f64) -> Result<u64> {
        if !value.is_finite() {
            return Err(CnmfError::Domain(format!("cannot quantize {value}")));
        }
        if value < 0.0 {
            return Err(CnmfError::Domain(format!(
                "cannot quantize negative value {value}"
            )));
        }
        let level = (value / self.alpha).round();
        Ok((level as u64).min(self.levels() - 1))
    }

    /// Value of a level: `alpha · level`, the exact inverse of bit weights
    /// summed over the set bits of `level`.
    pub fn decode_level(&self, level: u64) -> f64 {
        debug_assert!(level < self.levels());
        self.alpha * level as f64
    }

    /// Round `value` onto the representable grid.
    pub fn quantize_value(&self, value: f64) -> Result<f64> {
        Ok(self.decode_level(self.quantize_level(value)?))
    }
}

impl Default for EncodingScheme {
    fn default() -> Self {
        Self {
            alpha: Self::DEFAULT_ALPHA,
            bits_per_value: Self::DEFAULT_BITS_PER_VALUE,
        }
    }
}

/// Maps the entries of an R×C matrix onto a flat binary-variable space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitLayout {
    rows: usize,
    cols: usize,
    scheme: EncodingScheme,
}

impl BitLayout {
    pub fn new(rows: usize, cols: usize, scheme: EncodingScheme) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(CnmfError::Config(format!(
                "layout must be non-empty, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols, scheme })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scheme(&self) -> &EncodingScheme {
        &self.scheme
    }

    /// Total binary variables: `rows · cols · bits_per_value`.
    pub fn total_bits(&self) -> usize {
        self.rows * self.cols * self.scheme.bits_per_value as usize
    }

    /// Global index of bit `bit` of entry `(row, col)`.
    pub fn bit_index(&self, row: usize, col: usize, bit: u32) -> usize {
        debug_assert!(row < self.rows && col < self.cols);
        debug_assert!(bit < self.scheme.bits_per_value);
        (row * self.cols + col) * self.scheme.bits_per_value as usize + bit as usize
    }

    /// Inverse of `bit_index`: which `(row, col, bit)` a global index names.
    pub fn locate(&self, index: usize) -> (usize, usize, u32) {
        debug_assert!(index < self.total_bits());
        let bits = self.scheme.bits_per_value as usize;
        let entry = index / bits;
        (entry / self.cols, entry % self.cols, (index % bits) as u32)
    }

    /// Weight the global bit `index` contributes to its entry's value.
    pub fn weight(&self, index: usize) -> f64 {
        let (_, _, bit) = self.locate(index);
        self.scheme.bit_weight(bit)
    }

    /// Encode a non-negative matrix as a flat assignment, one `bool` per
    /// global bit index. Entries are quantized to the nearest level.
    pub fn encode(&self, m: &DenseMatrix) -> Result<Vec<bool>> {
        if m.shape() != (self.rows, self.cols) {
            return Err(CnmfError::Shape(format!(
                "layout is {}x{}, matrix is {}x{}",
                self.rows,
                self.cols,
                m.rows(),
                m.cols()
            )));
        }
        let mut bits = vec![false; self.total_bits()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let level = self.scheme.quantize_level(m.get(r, c))?;
                for b in 0..self.scheme.bits_per_value {
                    if level >> b & 1 == 1 {
                        bits[self.bit_index(r, c, b)] = true;
                    }
                }
            }
        }
        Ok(bits)
    }

    /// Decode a flat assignment back into a matrix.
    pub fn decode(&self, bits: &[bool]) -> Result<DenseMatrix> {
        if bits.len() != self.total_bits() {
            return Err(CnmfError::Shape(format!(
                "expected {} bits, got {}",
                self.total_bits(),
                bits.len()
            )));
        }
        let mut values = vec![0.0; self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let mut level = 0u64;
                for b in 0..self.scheme.bits_per_value {
                    if bits[self.bit_index(r, c, b)] {
                        level |= 1 << b;
                    }
                }
                values[r * self.cols + c] = self.scheme.decode_level(level);
            }
        }
        DenseMatrix::from_vec(self.rows, self.cols, values)
    }
}
