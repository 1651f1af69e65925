//! Construction of the two alternating-subproblem QUBOs.
//!
//! With `X` (M×N) fixed, the penalized objective
//! `‖X − XWG‖²_F + λ·penalty` is a quadratic in whichever factor is free.
//! Expanding the trace form and substituting the fixed-point bit encoding of
//! the free factor yields a QUBO over that factor's bits.
//!
//! Solve-for-G (`W` fixed, `A = XᵀXW`, `B = WᵀXᵀXW`):
//! the quadratic couples only bits whose entries share a column `n` of `G`
//! (through `B`) or share a row `k` (through the row-sum penalty), so the
//! textbook expansion is complete and both cross-term modes coincide.
//!
//! Solve-for-W (`G` fixed, `C = GXᵀX`, `D = XᵀX`, `E = GGᵀ`):
//! the full quadratic `Σ D_{nn′}E_{k′k} w_{nk} w_{n′k′}` couples *every* pair
//! of entries. `Exact` mode emits the full sum, making QUBO energy equal the
//! penalized objective at every assignment. `Truncated` mode keeps only
//! the diagonal (n′=n, k′=k) and fully-mixed (n′≠n, k′≠k) objective terms,
//! dropping the two mixed families — a historical construction retained for
//! comparison; its energies deviate from the true objective whenever the
//! dropped terms are nonzero.
//!
//! Bit-layout convention: the G-QUBO lays out `G` (K×N) with
//! `BitLayout::new(K, N, scheme)` — bit `b` of `g_{kn}` has global index
//! `(k·N + n)·bits + b`. The W-QUBO lays out `W` (N×K) with
//! `BitLayout::new(N, K, scheme)`.

use crate::encoding::{BitLayout, EncodingScheme};
use crate::error::{CnmfError, Result};
use crate::matrix::{gram, matmul, DenseMatrix};
use crate::qubo::{QuboBuilder, QuboModel};

/// Which cross-entry objective couplings the W-subproblem builder emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossTermMode {
    /// Full quadratic form; QUBO energy equals the penalized objective.
    Exact,
    /// Drop the (same-n, different-k) and (same-k, different-n) objective
    /// couplings, keeping only diagonal and fully-mixed ones. Affects the
    /// W-subproblem only; the G-subproblem has no such terms to drop.
    Truncated,
}

/// Shared settings for both subproblem builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuilderConfig {
    k: usize,
    scheme: EncodingScheme,
    penalty_weight: f64,
    mode: CrossTermMode,
}

impl BuilderConfig {
    pub fn new(
        k: usize,
        scheme: EncodingScheme,
        penalty_weight: f64,
        mode: CrossTermMode,
    ) -> Result<Self> {
        if k == 0 {
            return Err(CnmfError::Config("cluster count k must be >= 1".into()));
        }
        if !(penalty_weight.is_finite() && penalty_weight >= 0.0) {
            return Err(CnmfError::Config(format!(
                "penalty weight must be finite and >= 0, got {penalty_weight}"
            )));
        }
        Ok(Self {
            k,
            scheme,
            penalty_weight,
            mode,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scheme(&self) -> &EncodingScheme {
        &self.scheme
    }

    pub fn penalty_weight(&self) -> f64 {
        self.penalty_weight
    }

    pub fn mode(&self) -> CrossTermMode {
        self.mode
    }
}

/// Binary variables needed to encode a rows×cols matrix under `scheme`.
pub fn subproblem_bit_count(rows: usize, cols: usize, scheme: &EncodingScheme) -> usize {
    rows * cols * scheme.bits_per_value() as usize
}

fn check_fixed_factor(
    name: &str,
    m: &DenseMatrix,
    want_rows: usize,
    want_cols: usize,
) -> Result<()> {
    if m.shape() != (want_rows, want_cols) {
        return Err(CnmfError::Shape(format!(
            "{name} must be {want_rows}x{want_cols}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.has_negative_entry() {
        return Err(CnmfError::Domain(format!("{name} has a negative entry")));
    }
    Ok(())
}

/// QUBO for the solve-for-G half-step: `W` (N×K, non-negative) is fixed and
/// the bits encode `G` (K×N). At every assignment `q`,
/// `energy(q) == ‖X − XW·decode(q)‖²_F + λ·penalty_g(decode(q))`
/// up to floating-point roundoff; the offset `Tr(XᵀX) + λ·K` makes the
/// equality absolute. Both cross-term modes produce identical models here.
pub fn build_g_qubo(x: &DenseMatrix, w: &DenseMatrix, cfg: &BuilderConfig) -> Result<QuboModel> {
    let n = x.cols();
    let k = cfg.k;
    check_fixed_factor("w", w, n, k)?;

    let xtx = gram(x);
    let a = matmul(&xtx, w)?; // N×K
    let b = matmul(&w.transpose(), &a)?; // K×K, symmetric up to roundoff

    let lam = cfg.penalty_weight;
    let bits = cfg.scheme.bits_per_value();
    let layout = BitLayout::new(k, n, cfg.scheme)?;
    let mut qb = QuboBuilder::new(layout.total_bits());
    qb.add_offset(xtx.trace() + lam * k as f64);

    // Per-entry terms: linear from −2(A_{nk}+λ)·g and the g² diagonal, plus
    // couplings between bits of the same register.
    for kk in 0..k {
        for nn in 0..n {
            let diag = b.get(kk, kk) + lam;
            let lin = -2.0 * (a.get(nn, kk) + lam);
            for bb in 0..bits {
                let beta = cfg.scheme.bit_weight(bb);
                let ix = layout.bit_index(kk, nn, bb);
                qb.add_linear(ix, lin * beta + diag * beta * beta)?;
                for bp in bb + 1..bits {
                    let beta_p = cfg.scheme.bit_weight(bp);
                    qb.add_quadratic(
                        ix,
                        layout.bit_index(kk, nn, bp),
                        2.0 * diag * beta * beta_p,
                    )?;
                }
            }
        }
    }

    // Cross-entry couplings: same column n across clusters (objective, via
    // B), same cluster row k across columns (row-sum penalty). Entries that
    // differ in both indices never couple in the G-subproblem.
    let entries = k * n;
    for e1 in 0..entries {
        let (k1, n1) = (e1 / n, e1 % n);
        for e2 in e1 + 1..entries {
            let (k2, n2) = (e2 / n, e2 % n);
            let coeff = if n1 == n2 {
                b.get(k1, k2) + b.get(k2, k1)
            } else if k1 == k2 {
                2.0 * lam
            } else {
                continue;
            };
            if coeff == 0.0 {
                continue;
            }
            for bb in 0..bits {
                let beta = cfg.scheme.bit_weight(bb);
                for bp in 0..bits {
                    qb.add_quadratic(
                        layout.bit_index(k1, n1, bb),
                        layout.bit_index(k2, n2, bp),
                        coeff * beta * cfg.scheme.bit_weight(bp),
                    )?;
                }
            }
        }
    }
    Ok(qb.finalize())
}

/// QUBO for the solve-for-W half-step: `G` (K×N, non-negative) is fixed and
/// the bits encode `W` (N×K). In `Exact` mode,
/// `energy(q) == ‖X − X·decode(q)·G‖²_F + λ·penalty_w(decode(q))` at every
/// assignment (up to roundoff). In `Truncated` mode the two mixed
/// cross-term families are omitted (see module docs) and energies deviate
/// from the true objective whenever those terms are nonzero.
pub fn build_w_qubo(x: &DenseMatrix, g: &DenseMatrix, cfg: &BuilderConfig) -> Result<QuboModel> {
    let n = x.cols();
    let k = cfg.k;
    check_fixed_factor("g", g, k, n)?;

    let d = gram(x); // N×N, exactly symmetric
    let c = matmul(g, &d)?; // K×N
    let e = matmul(g, &g.transpose())?; // K×K, symmetric up to roundoff

    let lam = cfg.penalty_weight;
    let bits = cfg.scheme.bits_per_value();
    let layout = BitLayout::new(n, k, cfg.scheme)?;
    let mut qb = QuboBuilder::new(layout.total_bits());
    qb.add_offset(d.trace() + lam * k as f64);

    for nn in 0..n {
        for kk in 0..k {
            let diag = d.get(nn, nn) * e.get(kk, kk) + lam;
            let lin = -2.0 * (c.get(kk, nn) + lam);
            for bb in 0..bits {
                let beta = cfg.scheme.bit_weight(bb);
                let ix = layout.bit_index(nn, kk, bb);
                qb.add_linear(ix, lin * beta + diag * beta * beta)?;
                for bp in bb + 1..bits {
                    let beta_p = cfg.scheme.bit_weight(bp);
                    qb.add_quadratic(
                        ix,
                        layout.bit_index(nn, kk, bp),
                        2.0 * diag * beta * beta_p,
                    )?;
                }
            }
        }
    }

    // Cross-entry couplings. The objective contributes
    // D_{nn′}·(E_{kk′}+E_{k′k}) for every unordered pair of distinct
    // entries; the column-sum penalty adds 2λ for same-k pairs.
    let entries = n * k;
    for e1 in 0..entries {
        let (n1, k1) = (e1 / k, e1 % k);
        for e2 in e1 + 1..entries {
            let (n2, k2) = (e2 / k, e2 % k);
            let objective_part = d.get(n1, n2) * (e.get(k1, k2) + e.get(k2, k1));
            let penalty_part = if k1 == k2 { 2.0 * lam } else { 0.0 };
            let coeff = match cfg.mode {
                CrossTermMode::Exact => objective_part + penalty_part,
                CrossTermMode::Truncated => {
                    // Keep only fully-mixed objective couplings; mixed pairs
                    // (one index shared) lose their objective part.
                    if n1 != n2 && k1 != k2 {
                        objective_part
                    } else {
                        penalty_part
                    }
                }
            };
            if coeff == 0.0 {
                continue;
            }
            for bb in 0..bits {
                let beta = cfg.scheme.bit_weight(bb);
                for bp in 0..bits {
                    qb.add_quadratic(
                        layout.bit_index(n1, k1, bb),
                        layout.bit_index(n2, k2, bp),
                        coeff * beta * cfg.scheme.bit_weight(bp),
                    )?;
                }
            }
        }
    }
    Ok(qb.finalize())
}
