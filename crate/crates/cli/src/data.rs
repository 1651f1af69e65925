//! Synthetic dataset generation and CSV I/O shared by the subcommands.

use std::fs;
use std::path::Path;

use cnmf_core::{CnmfError, DenseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CliError, GenArgs};

/// Decimal formatting used for every real value written to CSV: 12
/// significant digits, enough that re-reading and re-writing a file is
/// byte-stable.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// A generated dataset: `points x dims` values (row per point) plus the
/// ground-truth blob index of each point.
pub struct Blobs {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

/// Draw `points` from `clusters` isotropic Gaussian blobs.
///
/// Centers are sampled uniformly in `[0,1]^dims`; point `n` belongs to blob
/// `n % clusters`, so the blobs are as balanced as the counts allow.
/// Deterministic per seed.
pub fn generate_blobs(
    points: usize,
    dims: usize,
    clusters: usize,
    spread: f64,
    seed: u64,
) -> Result<Blobs, CliError> {
    if clusters == 0 || points < clusters {
        return Err(CliError::Core(CnmfError::Config(format!(
            "need points >= clusters >= 1, got points={points} clusters={clusters}"
        ))));
    }
    if dims == 0 {
        return Err(CliError::Core(CnmfError::Config(
            "dims must be >= 1".into(),
        )));
    }
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(CliError::Core(CnmfError::Config(format!(
            "spread must be finite and >= 0, got {spread}"
        ))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..dims).map(|_| rng.random::<f64>()).collect())
        .collect();
    let mut rows = Vec::with_capacity(points);
    let mut labels = Vec::with_capacity(points);
    for n in 0..points {
        let c = n % clusters;
        labels.push(c);
        rows.push(
            centers[c]
                .iter()
                .map(|&center| {
                    let z: f64 = rng.sample(StandardNormal);
                    center + spread * z
                })
                .collect(),
        );
    }
    Ok(Blobs { rows, labels })
}

/// Render rows of values as CSV (no header, one row per line).
pub fn rows_to_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parse a headerless numeric CSV into a rectangular row-major table.
///
/// Blank lines are ignored; anything else is a parse error naming the
/// offending 1-based line.
pub fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                CliError::Core(CnmfError::Parse(format!(
                    "line {line_no}: invalid number {:?}",
                    field.trim()
                )))
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::Core(CnmfError::Parse(format!(
                    "line {line_no}: expected {} columns, found {}",
                    first.len(),
                    row.len()
                ))));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Core(CnmfError::Parse(
            "no data rows found".into(),
        )));
    }
    Ok(rows)
}

/// Load a CSV of observations (rows) and transpose it into the internal
/// X layout: dims x points, one data vector per column.
pub fn read_x_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let rows = parse_csv_rows(&text)?;
    let points = rows.len();
    let dims = rows[0].len();
    let mut values = Vec::with_capacity(points * dims);
    for d in 0..dims {
        for row in &rows {
            values.push(row[d]);
        }
    }
    DenseMatrix::from_vec(dims, points, values).map_err(CliError::Core)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let blobs = generate_blobs(args.points, args.dims, args.clusters, args.spread, args.seed)?;
    write_text(&args.out, &rows_to_csv(&blobs.rows))?;

    let mut labels_path = args.out.as_os_str().to_owned();
    labels_path.push(".labels");
    let labels_text: String = blobs
        .labels
        .iter()
        .map(|l| format!("{l}\n"))
        .collect();
    write_text(Path::new(&labels_path), &labels_text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spread_duplicates_center() {
        let b = generate_blobs(4, 2, 1, 0.0, 3).unwrap();
        assert_eq!(b.rows.len(), 4);
        for row in &b.rows[1..] {
            assert_eq!(row, &b.rows[0]);
        }
        assert_eq!(b.labels, vec![0, 0, 0, 0]);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_blobs(6, 3, 2, 0.1, 42).unwrap();
        let b = generate_blobs(6, 3, 2, 0.1, 42).unwrap();
        let c = generate_blobs(6, 3, 2, 0.1, 43).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_ne!(a.rows, c.rows);
        assert_eq!(a.labels, vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn csv_roundtrip_is_byte_stable() {
        let b = generate_blobs(5, 2, 2, 0.07, 9).unwrap();
        let text = rows_to_csv(&b.rows);
        let reread = parse_csv_rows(&text).unwrap();
        assert_eq!(rows_to_csv(&reread), text);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_csv_rows("1.0,2.0\n3.0,oops\n").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 2"), "unexpected message: {msg}");
        let err = parse_csv_rows("1.0,2.0\n3.0\n").unwrap_err();
        let msg = format!("{err}");
        assert!(
            msg.contains("line 2") && msg.contains("columns"),
            "unexpected message: {msg}"
        );
    }

    #[test]
    fn x_layout_is_transposed() {
        let rows = parse_csv_rows("1.0,2.0,3.0\n4.0,5.0,6.0\n").unwrap();
        assert_eq!(rows, vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        // Two observations in R^3 become X with 3 rows (dims) and 2 columns.
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        std::fs::write(&path, "1.0,2.0,3.0\n4.0,5.0,6.0\n").unwrap();
        let x = read_x_matrix(&path).unwrap();
        assert_eq!(x.shape(), (3, 2));
        assert_eq!(x.get(0, 1), 4.0);
        assert_eq!(x.get(2, 0), 3.0);
    }
}
