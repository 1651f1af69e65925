//! Embedding-capacity arithmetic for Chimera-topology annealers.
//!
//! A Chimera processor is a `grid_rows × grid_cols` grid of bipartite cells
//! with `shore` qubits per side (the 2000Q generation: 16×16 cells, shore 4,
//! 2048 physical qubits). Its working graph is far from complete, so a dense
//! QUBO must be minor-embedded: each logical variable becomes a *chain* of
//! physical qubits. This module uses the standard triangle clique-embedding
//! cost model — chains of length `⌈L/shore⌉ + 1` for a complete graph on `L`
//! logical variables — to answer "how many real values fit?" for a given
//! bits-per-value encoding. No embedding search is performed.
//!
//! The formula is an upper-bound model. For the largest clique on a 16×16
//! shore-4 graph (L = 65) it gives chains of 18 and 1170 physical qubits,
//! while the boundary-optimized construction from the embedding literature
//! achieves 17 and 1105 ([`K65_OPTIMIZED_CHAIN_LENGTH`],
//! [`K65_OPTIMIZED_PHYSICAL_QUBITS`]); both numbers are exposed so reports
//! can quote either.

use crate::error::{CnmfError, Result};

/// Chain length the boundary-optimized K₆₅ construction achieves on a
/// 16×16, shore-4 graph; the formula in [`ChimeraSpec::clique_chain_length`]
/// yields 18 for the same clique.
pub const K65_OPTIMIZED_CHAIN_LENGTH: usize = 17;

/// Physical qubits of the boundary-optimized K₆₅ embedding (65 × 17); the
/// formula yields 1170.
pub const K65_OPTIMIZED_PHYSICAL_QUBITS: usize = 1105;

/// One row of the embedding-feasibility curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveRow {
    /// Real values encoded.
    pub reals: usize,
    /// Logical binary variables: `reals · bits_per_value`.
    pub logical_bits: usize,
    /// Physical qubits under the clique-embedding cost model.
    pub physical_qubits: usize,
    /// Whether a clique on `logical_bits` variables fits the processor.
    pub feasible: bool,
}

/// Cell-grid geometry of a Chimera processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChimeraSpec {
    grid_rows: usize,
    grid_cols: usize,
    shore: usize,
}

impl ChimeraSpec {
    pub fn new(grid_rows: usize, grid_cols: usize, shore: usize) -> Result<Self> {
        if grid_rows == 0 || grid_cols == 0 || shore == 0 {
            return Err(CnmfError::Config(format!(
                "chimera dimensions must be >= 1, got {grid_rows}x{grid_cols} shore {shore}"
            )));
        }
        Ok(Self {
            grid_rows,
            grid_cols,
            shore,
        })
    }

    /// The 2000Q-generation graph: 16×16 cells, shore 4.
    pub fn c16() -> Self {
        Self {
            grid_rows: 16,
            grid_cols: 16,
            shore: 4,
        }
    }

    pub fn grid_rows(&self) -> usize {
        self.grid_rows
    }

    pub fn grid_cols(&self) -> usize {
        self.grid_cols
    }

    pub fn shore(&self) -> usize {
        self.shore
    }

    /// Physical qubits on the chip: `grid_rows · grid_cols · 2 · shore`.
    pub fn total_qubits(&self) -> usize {
        self.grid_rows * self.grid_cols * 2 * self.shore
    }

    /// Largest clique embeddable at all: `shore · min(grid) + 1` logical
    /// variables.
    pub fn clique_bound(&self) -> usize {
        self.shore * self.grid_rows.min(self.grid_cols) + 1
    }

    /// Chain length of the triangle clique embedding of K_num_logical:
    /// `⌈num_logical / shore⌉ + 1`. An upper-bound model: a single variable
    /// trivially needs a chain of 1, and boundary-optimized constructions
    /// shave one qubit per chain at the maximum clique (see module docs).
    pub fn clique_chain_length(&self, num_logical: usize) -> usize {
        assert!(num_logical >= 1, "need at least one logical variable");
        num_logical.div_ceil(self.shore) + 1
    }

    /// Physical qubits to embed K_num_logical: one chain per variable.
    pub fn physical_qubits_for_clique(&self, num_logical: usize) -> usize {
        num_logical * self.clique_chain_length(num_logical)
    }

    /// Largest count of real values (at `bits_per_value` bits each) whose
    /// fully-connected QUBO fits the processor: the clique on
    /// `R·bits_per_value` logical variables must respect both the clique-size
    /// bound and the physical-qubit budget. Returns 0 when not even one real
    /// fits.
    pub fn max_direct_reals(&self, bits_per_value: usize) -> usize {
        assert!(bits_per_value >= 1, "need at least one bit per value");
        let mut best = 0;
        for reals in 1.. {
            let logical = reals * bits_per_value;
            if logical > self.clique_bound()
                || self.physical_qubits_for_clique(logical) > self.total_qubits()
            {
                break;
            }
            best = reals;
        }
        best
    }

    /// Feasibility curve for `reals = 1..=max_reals` at `bits_per_value`.
    pub fn qubit_curve(&self, bits_per_value: usize, max_reals: usize) -> Vec<CurveRow> {
        assert!(bits_per_value >= 1, "need at least one bit per value");
        let feasible_limit = self.max_direct_reals(bits_per_value);
        (1..=max_reals)
            .map(|reals| {
                let logical_bits = reals * bits_per_value;
                CurveRow {
                    reals,
                    logical_bits,
                    physical_qubits: self.physical_qubits_for_clique(logical_bits),
                    feasible: reals <= feasible_limit,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c16_totals() {
        let c = ChimeraSpec::c16();
        assert_eq!(c.total_qubits(), 2048);
        assert_eq!(c.clique_bound(), 65);
    }

    #[test]
    fn spec_rejects_degenerate_dimensions() {
        assert!(ChimeraSpec::new(0, 16, 4).is_err());
        assert!(ChimeraSpec::new(16, 16, 0).is_err());
    }

    #[test]
    fn chain_length_examples() {
        let c = ChimeraSpec::c16();
        assert_eq!(c.clique_chain_length(4), 2);
        assert_eq!(c.clique_chain_length(1), 2); // formula's upper bound
        assert_eq!(c.clique_chain_length(65), 18);
    }

    #[test]
    fn physical_qubits_examples() {
        let c = ChimeraSpec::c16();
        assert_eq!(c.physical_qubits_for_clique(4), 8);
        // Formula value; the boundary-optimized construction does better.
        assert_eq!(c.physical_qubits_for_clique(65), 1170);
        assert_eq!(K65_OPTIMIZED_CHAIN_LENGTH, 17);
        assert_eq!(K65_OPTIMIZED_PHYSICAL_QUBITS, 65 * 17);
    }

    #[test]
    fn physical_qubits_monotone_and_at_least_logical() {
        let c = ChimeraSpec::c16();
        let mut prev = 0;
        for l in 1..=200 {
            let p = c.physical_qubits_for_clique(l);
            assert!(p >= l);
            assert!(p >= prev, "not monotone at {l}");
            prev = p;
        }
    }

    #[test]
    fn max_direct_reals_examples() {
        let c = ChimeraSpec::c16();
        assert_eq!(c.max_direct_reals(1), 65);
        assert_eq!(c.max_direct_reals(10), 6);
        let tiny = ChimeraSpec::new(1, 1, 4).unwrap();
        assert_eq!(tiny.clique_bound(), 5);
        assert_eq!(tiny.max_direct_reals(10), 0);
    }

    #[test]
    fn max_direct_reals_monotonicity() {
        let c = ChimeraSpec::c16();
        let mut prev = usize::MAX;
        for bits in 1..=12 {
            let r = c.max_direct_reals(bits);
            assert!(r <= prev, "not non-increasing in bits at {bits}");
            prev = r;
        }
        let small = ChimeraSpec::new(8, 8, 4).unwrap();
        assert!(small.max_direct_reals(10) <= c.max_direct_reals(10));
    }

    #[test]
    fn curve_shape_and_feasibility_prefix() {
        let c = ChimeraSpec::c16();
        let curve = c.qubit_curve(10, 10);
        assert_eq!(curve.len(), 10);
        assert_eq!(curve[0].reals, 1);
        assert_eq!(curve[0].logical_bits, 10);
        let mut prev = 0;
        for row in &curve {
            assert!(row.physical_qubits >= prev);
            prev = row.physical_qubits;
        }
        let last_feasible = curve.iter().rev().find(|r| r.feasible).unwrap();
        assert_eq!(last_feasible.reals, 6);
        // Feasibility is a prefix of the curve.
        let first_infeasible = curve.iter().position(|r| !r.feasible).unwrap();
        assert!(curve[..first_infeasible].iter().all(|r| r.feasible));
        assert!(curve[first_infeasible..].iter().all(|r| !r.feasible));
    }
}
