//! Dense real matrix arithmetic and the exact objective/penalty evaluators.
//!
//! Everything here operates on small dense matrices in 64-bit floating point.
//! `DenseMatrix` is an immutable value: operations borrow their inputs and
//! return fresh matrices, which keeps the QUBO builders pure and the test
//! oracles trivial to state.

use crate::error::{CnmfError, Result};

/// Row-major dense real matrix. Carrier for the data matrix `X`, the factor
/// matrices `W` (N×K) and `G` (K×N), and the Gram products derived from them.
///
/// Invariants: `values.len() == rows * cols` and every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    /// Build a matrix from a row-major value buffer.
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(CnmfError::Shape(format!(
                "expected {}x{}={} values, got {}",
                rows,
                cols,
                rows * cols,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CnmfError::Domain(format!("non-finite entry {v}")));
        }
        Ok(Self { rows, cols, values })
    }

    /// Build a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CnmfError::Shape("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Entry at (row, col). Panics when out of range, like slice indexing.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index out of range");
        self.values[row * self.cols + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.values[c * self.rows + r] = self.values[r * self.cols + c];
            }
        }
        out
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        assert!(row < self.rows, "row out of range");
        self.values[row * self.cols..(row + 1) * self.cols].iter().sum()
    }

    pub fn col_sum(&self, col: usize) -> f64 {
        assert!(col < self.cols, "col out of range");
        (0..self.rows).map(|r| self.values[r * self.cols + col]).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// True when some entry is strictly negative.
    pub fn has_negative_entry(&self) -> bool {
        self.values.iter().any(|&v| v < 0.0)
    }
}

/// Standard matrix product `a · b`.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(CnmfError::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = DenseMatrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        for k in 0..a.cols {
            let av = a.values[r * a.cols + k];
            if av == 0.0 {
                continue;
            }
            for c in 0..b.cols {
                out.values[r * b.cols + c] += av * b.values[k * b.cols + c];
            }
        }
    }
    Ok(out)
}

/// Gram matrix `XᵀX`: symmetric positive-semidefinite, cols×cols.
pub fn gram(x: &DenseMatrix) -> DenseMatrix {
    let n = x.cols;
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for m in 0..x.rows {
                s += x.values[m * n + i] * x.values[m * n + j];
            }
            out.values[i * n + j] = s;
            out.values[j * n + i] = s;
        }
    }
    out
}

/// Squared Frobenius norm, `Σ x_{mn}²`. Equals `trace(gram(x))`.
pub fn frobenius_sq(x: &DenseMatrix) -> f64 {
    x.values.iter().map(|v| v * v).sum()
}

/// Reconstruction objective `‖X − XWG‖²_F`, evaluated by direct residual.
pub fn objective(x: &DenseMatrix, w: &DenseMatrix, g: &DenseMatrix) -> Result<f64> {
    let xw = matmul(x, w)?;
    let xwg = matmul(&xw, g)?;
    if xwg.shape() != x.shape() {
        return Err(CnmfError::Shape(format!(
            "reconstruction is {}x{}, data is {}x{}",
            xwg.rows, xwg.cols, x.rows, x.cols
        )));
    }
    let mut s = 0.0;
    for (a, b) in x.values.iter().zip(xwg.values.iter()) {
        let d = a - b;
        s += d * d;
    }
    Ok(s)
}

/// Row-sum penalty on `G`: `Σ_k (1 − Σ_n g_{kn})²`.
pub fn penalty_g(g: &DenseMatrix) -> f64 {
    (0..g.rows)
        .map(|k| {
            let d = 1.0 - g.row_sum(k);
            d * d
        })
        .sum()
}

/// Column-sum penalty on `W`: `Σ_k (1 − Σ_n w_{nk})²`.
pub fn penalty_w(w: &DenseMatrix) -> f64 {
    (0..w.cols)
        .map(|k| {
            let d = 1.0 - w.col_sum(k);
            d * d
        })
        .sum()
}
