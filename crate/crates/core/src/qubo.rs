//! Quadratic unconstrained binary optimization models.
//!
//! A `QuboModel` is the finalized, immutable form: linear coefficients ψ(b),
//! upper-triangular quadratic coefficients ψ′(b,b′) with b<b′, and a constant
//! offset. The offset is part of the model on purpose — energies equal the
//! quantity being minimized absolutely, not merely up to a constant, so
//! cross-module equivalence checks can compare energies directly.
//!
//! Models are accumulated through `QuboBuilder` (coefficients sum; pair keys
//! are normalized to b<b′) and canonicalized by `finalize`, which drops
//! entries below 1e-15 in magnitude.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{CnmfError, Result};

/// Magnitude below which a finalized coefficient is treated as zero.
const COEFF_EPS: f64 = 1e-15;

/// Mutable accumulator for QUBO coefficients.
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    num_vars: usize,
    linear: Vec<f64>,
    quadratic: HashMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboBuilder {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: vec![0.0; num_vars],
            quadratic: HashMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Add `value` into ψ(b). Repeated calls accumulate.
    pub fn add_linear(&mut self, b: usize, value: f64) -> Result<()> {
        if b >= self.num_vars {
            return Err(CnmfError::Bounds(format!(
                "linear index {b} >= num_vars {}",
                self.num_vars
            )));
        }
        self.linear[b] += value;
        Ok(())
    }

    /// Add `value` into ψ′(b,b′). The key is normalized so b<b′; repeated
    /// calls accumulate.
    pub fn add_quadratic(&mut self, b: usize, b_prime: usize, value: f64) -> Result<()> {
        if b == b_prime {
            return Err(CnmfError::Bounds(format!(
                "quadratic pair needs distinct indices, got ({b},{b_prime})"
            )));
        }
        if b >= self.num_vars || b_prime >= self.num_vars {
            return Err(CnmfError::Bounds(format!(
                "quadratic pair ({b},{b_prime}) out of range for num_vars {}",
                self.num_vars
            )));
        }
        let key = (b.min(b_prime), b.max(b_prime));
        *self.quadratic.entry(key).or_insert(0.0) += value;
        Ok(())
    }

    /// Add a constant into the offset.
    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    /// Canonicalize: drop coefficients with |value| < 1e-15 and freeze.
    pub fn finalize(self) -> QuboModel {
        let linear = self.linear;
        let mut pairs: Vec<(usize, usize, f64)> = self
            .quadratic
            .into_iter()
            .filter(|(_, v)| v.abs() >= COEFF_EPS)
            .map(|((b, bp), v)| (b, bp, v))
            .collect();
        pairs.sort_unstable_by_key(|&(b, bp, _)| (b, bp));

        let mut neighbors = vec![Vec::new(); self.num_vars];
        for &(b, bp, v) in &pairs {
            neighbors[b].push((bp, v));
            neighbors[bp].push((b, v));
        }

        let linear_clean: Vec<f64> = linear
            .into_iter()
            .map(|v| if v.abs() < COEFF_EPS { 0.0 } else { v })
            .collect();

        QuboModel {
            num_vars: self.num_vars,
            linear: linear_clean,
            pairs,
            neighbors,
            offset: self.offset,
        }
    }
}

/// Finalized QUBO: `energy(q) = offset + Σ_b ψ(b)·q_b + Σ_{b<b′} ψ′(b,b′)·q_b·q_{b′}`.
///
/// Immutable after construction; safe to share across solver restarts.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_vars: usize,
    /// Dense ψ; exact zeros where no coefficient survives.
    linear: Vec<f64>,
    /// Sorted upper-triangular pairs (b, b′, ψ′) with b < b′.
    pairs: Vec<(usize, usize, f64)>,
    /// Per-variable view of `pairs`, both directions, for O(deg) flip deltas.
    neighbors: Vec<Vec<(usize, f64)>>,
    offset: f64,
}

impl QuboModel {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear_coeff(&self, b: usize) -> f64 {
        self.linear[b]
    }

    /// ψ′ for an unordered pair; zero when no entry is stored.
    pub fn quadratic_coeff(&self, b: usize, b_prime: usize) -> f64 {
        let key = (b.min(b_prime), b.max(b_prime));
        self.pairs
            .binary_search_by_key(&(key.0, key.1), |&(i, j, _)| (i, j))
            .map_or(0.0, |ix| self.pairs[ix].2)
    }

    /// Non-zero linear entries, ascending index.
    pub fn linear_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.linear
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(b, v)| (b, *v))
    }

    /// Stored quadratic entries, ascending (b, b′).
    pub fn quadratic_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn num_quadratic(&self) -> usize {
        self.pairs.len()
    }

    /// Largest |coefficient| over linear and quadratic terms (offset
    /// excluded); `None` when every coefficient is zero.
    pub fn max_abs_coefficient(&self) -> Option<f64> {
        self.linear_entries()
            .map(|(_, v)| v.abs())
            .chain(self.pairs.iter().map(|&(_, _, v)| v.abs()))
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Smallest non-zero |coefficient|; `None` when every coefficient is zero.
    pub fn min_abs_nonzero_coefficient(&self) -> Option<f64> {
        self.linear_entries()
            .map(|(_, v)| v.abs())
            .chain(self.pairs.iter().map(|&(_, _, v)| v.abs()))
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    fn check_len(&self, q: &[bool]) -> Result<()> {
        if q.len() != self.num_vars {
            return Err(CnmfError::Shape(format!(
                "assignment has {} bits, model has {}",
                q.len(),
                self.num_vars
            )));
        }
        Ok(())
    }

    /// Evaluate the full energy of an assignment.
    pub fn energy(&self, q: &[bool]) -> Result<f64> {
        self.check_len(q)?;
        let mut e = self.offset;
        for (b, v) in self.linear.iter().enumerate() {
            if q[b] {
                e += v;
            }
        }
        for &(b, bp, v) in &self.pairs {
            if q[b] && q[bp] {
                e += v;
            }
        }
        Ok(e)
    }

    /// Energy change from flipping bit `b`:
    /// `(1 − 2·q_b) · (ψ(b) + Σ_{b′} ψ′(b,b′)·q_{b′})`.
    /// Runs in time proportional to the number of pairs touching `b`.
    pub fn flip_delta(&self, q: &[bool], b: usize) -> Result<f64> {
        self.check_len(q)?;
        if b >= self.num_vars {
            return Err(CnmfError::Bounds(format!(
                "flip index {b} >= num_vars {}",
                self.num_vars
            )));
        }
        let mut local = self.linear[b];
        for &(other, v) in &self.neighbors[b] {
            if q[other] {
                local += v;
            }
        }
        let sign = if q[b] { -1.0 } else { 1.0 };
        Ok(sign * local)
    }

    /// Plain-text coefficient list: header `num_vars offset`, then one line
    /// per linear term (`b b value`) and one per quadratic term (`b b′ value`).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.num_vars, self.offset);
        for (b, v) in self.linear_entries() {
            let _ = writeln!(out, "{b} {b} {v}");
        }
        for (b, bp, v) in self.quadratic_entries() {
            let _ = writeln!(out, "{b} {bp} {v}");
        }
        out
    }

    /// Parse the text form produced by `to_text`. Duplicate entries
    /// accumulate; blank lines are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(ix, l)| (ix + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (_, header) = lines
            .next()
            .ok_or_else(|| CnmfError::Parse("empty coefficient list".into()))?;
        let mut parts = header.split_whitespace();
        let num_vars: usize = parts
            .next()
            .ok_or_else(|| CnmfError::Parse("header missing num_vars".into()))?
            .parse()
            .map_err(|e| CnmfError::Parse(format!("header num_vars: {e}")))?;
        let offset: f64 = parts
            .next()
            .ok_or_else(|| CnmfError::Parse("header missing offset".into()))?
            .parse()
            .map_err(|e| CnmfError::Parse(format!("header offset: {e}")))?;
        if parts.next().is_some() {
            return Err(CnmfError::Parse("header has trailing fields".into()));
        }

        let mut builder = QuboBuilder::new(num_vars);
        builder.add_offset(offset);
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(CnmfError::Parse(format!(
                    "line {line_no}: expected `b b′ value`, got {} fields",
                    fields.len()
                )));
            }
            let b: usize = fields[0]
                .parse()
                .map_err(|e| CnmfError::Parse(format!("line {line_no}: {e}")))?;
            let bp: usize = fields[1]
                .parse()
                .map_err(|e| CnmfError::Parse(format!("line {line_no}: {e}")))?;
            let value: f64 = fields[2]
                .parse()
                .map_err(|e| CnmfError::Parse(format!("line {line_no}: {e}")))?;
            let res = if b == bp {
                builder.add_linear(b, value)
            } else {
                builder.add_quadratic(b, bp, value)
            };
            res.map_err(|e| CnmfError::Parse(format!("line {line_no}: {e}")))?;
        }
        Ok(builder.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(rng: &mut ChaCha8Rng, num_vars: usize) -> QuboModel {
        let mut b = QuboBuilder::new(num_vars);
        b.add_offset(rng.random_range(-5.0..5.0));
        for i in 0..num_vars {
            if rng.random_bool(0.7) {
                b.add_linear(i, rng.random_range(-3.0..3.0)).unwrap();
            }
        }
        for i in 0..num_vars {
            for j in i + 1..num_vars {
                if rng.random_bool(0.4) {
                    b.add_quadratic(i, j, rng.random_range(-3.0..3.0)).unwrap();
                }
            }
        }
        b.finalize()
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
        (0..n).map(|_| rng.random_bool(0.5)).collect()
    }

    #[test]
    fn builder_accumulates_and_normalizes() {
        let mut b = QuboBuilder::new(3);
        b.add_linear(0, 1.5).unwrap();
        b.add_linear(0, 1.5).unwrap();
        b.add_quadratic(2, 1, 4.0).unwrap();
        let m = b.finalize();
        assert_eq!(m.linear_coeff(0), 3.0);
        assert_eq!(m.quadratic_coeff(1, 2), 4.0);
        assert_eq!(m.quadratic_coeff(2, 1), 4.0);
    }

    #[test]
    fn builder_rejects_bad_indices() {
        let mut b = QuboBuilder::new(2);
        assert!(matches!(b.add_linear(2, 1.0), Err(CnmfError::Bounds(_))));
        assert!(matches!(b.add_quadratic(0, 0, 1.0), Err(CnmfError::Bounds(_))));
        assert!(matches!(b.add_quadratic(0, 5, 1.0), Err(CnmfError::Bounds(_))));
    }

    #[test]
    fn finalize_drops_cancelled_and_tiny_entries() {
        let mut b = QuboBuilder::new(2);
        b.add_quadratic(0, 1, 1.0).unwrap();
        b.add_quadratic(0, 1, -1.0).unwrap();
        b.add_linear(0, 1e-16).unwrap();
        let m = b.finalize();
        assert_eq!(m.num_quadratic(), 0);
        assert_eq!(m.linear_coeff(0), 0.0);
        assert_eq!(m.linear_entries().count(), 0);
    }

    #[test]
    fn energy_hand_examples() {
        let mut b = QuboBuilder::new(2);
        b.add_linear(0, 1.0).unwrap();
        b.add_linear(1, 3.0).unwrap();
        b.add_quadratic(0, 1, 2.0).unwrap();
        let m = b.finalize();
        assert_eq!(m.energy(&[false, false]).unwrap(), 0.0);
        assert_eq!(m.energy(&[true, false]).unwrap(), 1.0);
        assert_eq!(m.energy(&[false, true]).unwrap(), 3.0);
        assert_eq!(m.energy(&[true, true]).unwrap(), 6.0);
    }

    #[test]
    fn energy_all_zeros_is_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = rng.random_range(1..=8);
            let m = random_model(&mut rng, n);
            assert_eq!(m.energy(&vec![false; n]).unwrap(), m.offset());
        }
    }

    #[test]
    fn energy_single_bit_is_offset_plus_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_model(&mut rng, 6);
        for b in 0..6 {
            let mut q = vec![false; 6];
            q[b] = true;
            assert_eq!(m.energy(&q).unwrap(), m.offset() + m.linear_coeff(b));
        }
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let m = QuboBuilder::new(3).finalize();
        assert!(matches!(m.energy(&[true, false]), Err(CnmfError::Shape(_))));
    }

    /// Energy must equal the matrix form qᵀΨq + offset with Ψ upper
    /// triangular (diagonal ψ, above-diagonal ψ′).
    #[test]
    fn energy_matches_matrix_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.random_range(1..=20);
            let m = random_model(&mut rng, n);
            let mut psi = vec![vec![0.0; n]; n];
            for (b, v) in m.linear_entries() {
                psi[b][b] = v;
            }
            for (b, bp, v) in m.quadratic_entries() {
                psi[b][bp] = v;
            }
            for _ in 0..20 {
                let q = random_state(&mut rng, n);
                let mut quad = m.offset();
                for i in 0..n {
                    for j in 0..n {
                        if q[i] && q[j] {
                            quad += psi[i][j];
                        }
                    }
                }
                let e = m.energy(&q).unwrap();
                assert!((e - quad).abs() <= 1e-9, "energy {e} vs matrix form {quad}");
            }
        }
    }

    #[test]
    fn flip_delta_on_zeros_is_linear_coeff() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = random_model(&mut rng, 7);
        let q = vec![false; 7];
        for b in 0..7 {
            assert_eq!(m.flip_delta(&q, b).unwrap(), m.linear_coeff(b));
        }
    }

    #[test]
    fn flip_delta_is_involutive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_model(&mut rng, 9);
        let mut q = random_state(&mut rng, 9);
        for b in 0..9 {
            let d1 = m.flip_delta(&q, b).unwrap();
            q[b] = !q[b];
            let d2 = m.flip_delta(&q, b).unwrap();
            q[b] = !q[b];
            assert_eq!(d1, -d2);
        }
    }

    /// 1000 random (model, state, bit) triples: flip_delta must match full
    /// recomputation within 1e-9.
    #[test]
    fn flip_delta_matches_recomputation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let n = rng.random_range(1..=12);
            let m = random_model(&mut rng, n);
            let mut q = random_state(&mut rng, n);
            let b = rng.random_range(0..n);
            let before = m.energy(&q).unwrap();
            let delta = m.flip_delta(&q, b).unwrap();
            q[b] = !q[b];
            let after = m.energy(&q).unwrap();
            assert!(
                (delta - (after - before)).abs() <= 1e-9,
                "delta {delta} vs recomputed {}",
                after - before
            );
        }
    }

    #[test]
    fn flip_delta_rejects_bad_bit() {
        let m = QuboBuilder::new(2).finalize();
        assert!(matches!(
            m.flip_delta(&[false, false], 2),
            Err(CnmfError::Bounds(_))
        ));
    }

    #[test]
    fn coefficient_extrema() {
        let mut b = QuboBuilder::new(3);
        b.add_linear(0, -4.0).unwrap();
        b.add_linear(1, 0.5).unwrap();
        b.add_quadratic(1, 2, 2.0).unwrap();
        let m = b.finalize();
        assert_eq!(m.max_abs_coefficient(), Some(4.0));
        assert_eq!(m.min_abs_nonzero_coefficient(), Some(0.5));

        let empty = QuboBuilder::new(2).finalize();
        assert_eq!(empty.max_abs_coefficient(), None);
        assert_eq!(empty.min_abs_nonzero_coefficient(), None);
    }

    #[test]
    fn text_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let n = rng.random_range(1..=10);
            let m = random_model(&mut rng, n);
            let text = m.to_text();
            let back = QuboModel::from_text(&text).unwrap();
            assert_eq!(back, m, "roundtrip changed the model:\n{text}");
        }
    }

    #[test]
    fn text_format_shape() {
        let mut b = QuboBuilder::new(3);
        b.add_offset(1.5);
        b.add_linear(0, 2.0).unwrap();
        b.add_quadratic(0, 2, -0.25).unwrap();
        let m = b.finalize();
        let text = m.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "3 1.5");
        assert_eq!(lines[1], "0 0 2");
        assert_eq!(lines[2], "0 2 -0.25");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn from_text_accumulates_duplicates_and_flags_garbage() {
        let m = QuboModel::from_text("2 0\n0 1 1.0\n1 0 2.0\n").unwrap();
        assert_eq!(m.quadratic_coeff(0, 1), 3.0);

        assert!(matches!(QuboModel::from_text(""), Err(CnmfError::Parse(_))));
        assert!(matches!(QuboModel::from_text("x 0\n"), Err(CnmfError::Parse(_))));
        assert!(matches!(
            QuboModel::from_text("2 0\n0 1\n"),
            Err(CnmfError::Parse(_))
        ));
        let err = QuboModel::from_text("2 0\n0 5 1.0\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
