//! Classical reference solver for the same penalized objective.
//!
//! Alternating projected gradient: with one factor fixed, take a gradient
//! step on `‖X − XWG‖²_F + λ·(active factor's penalty)`, projecting onto the
//! non-negative orthant *before* the Armijo test so accepted steps can never
//! increase the active objective. The inactive factor's penalty is constant
//! during a half-step, so the combined penalized objective is non-increasing
//! across the whole run — unlike the QUBO path, this solver has a true
//! Lyapunov function.
//!
//! Returns the same `FactorizationResult` as the QUBO driver (with the
//! solver-result fields absent) so the two paths can be benchmarked
//! side by side from identical seeds and initializations.

use std::time::Instant;

use crate::driver::{
    assign_clusters, centroids, init_w, max_col_sum_deviation, max_row_sum_deviation,
    FactorizationResult, PhaseTimings, TraceEntry,
};
use crate::encoding::EncodingScheme;
use crate::error::{CnmfError, Result};
use crate::matrix::{gram, matmul, objective, penalty_g, penalty_w, DenseMatrix};

/// Settings for the projected-gradient solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    k: usize,
    max_iters: usize,
    penalty_weight: f64,
    step_shrink: f64,
    armijo_c: f64,
    tol: f64,
    seed: u64,
    scheme: EncodingScheme,
}

impl BaselineConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k: usize,
        max_iters: usize,
        penalty_weight: f64,
        step_shrink: f64,
        armijo_c: f64,
        tol: f64,
        seed: u64,
        scheme: EncodingScheme,
    ) -> Result<Self> {
        if k == 0 {
            return Err(CnmfError::Config("cluster count k must be >= 1".into()));
        }
        if max_iters == 0 {
            return Err(CnmfError::Config("max_iters must be >= 1".into()));
        }
        if !(penalty_weight.is_finite() && penalty_weight >= 0.0) {
            return Err(CnmfError::Config(format!(
                "penalty weight must be finite and >= 0, got {penalty_weight}"
            )));
        }
        if !(step_shrink > 0.0 && step_shrink < 1.0) {
            return Err(CnmfError::Config(format!(
                "step_shrink must lie in (0,1), got {step_shrink}"
            )));
        }
        if !(armijo_c > 0.0 && armijo_c < 1.0) {
            return Err(CnmfError::Config(format!(
                "armijo_c must lie in (0,1), got {armijo_c}"
            )));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CnmfError::Config(format!("tol must be > 0, got {tol}")));
        }
        Ok(Self {
            k,
            max_iters,
            penalty_weight,
            step_shrink,
            armijo_c,
            tol,
            seed,
            scheme,
        })
    }

    /// Conventional settings: 200 iterations, λ=1, halving backtracks,
    /// Armijo constant 1e-4, relative tolerance 1e-10, default encoding for
    /// the (shared) initializer.
    pub fn with_defaults(k: usize, seed: u64) -> Result<Self> {
        Self::new(k, 200, 1.0, 0.5, 1e-4, 1e-10, seed, EncodingScheme::default())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn penalty_weight(&self) -> f64 {
        self.penalty_weight
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scheme(&self) -> &EncodingScheme {
        &self.scheme
    }
}

fn elementwise(a: &DenseMatrix, b: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> DenseMatrix {
    debug_assert_eq!(a.shape(), b.shape());
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| f(x, y))
        .collect();
    DenseMatrix::from_vec(a.rows(), a.cols(), values).expect("shape preserved")
}

fn inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum()
}

/// ∂/∂G of `‖X−XWG‖² + λ·penalty_g(G)`:
/// `−2WᵀXᵀX + 2WᵀXᵀXWG` minus `2λ(1−row-sum_k)` down each row.
pub fn grad_g(xtx: &DenseMatrix, w: &DenseMatrix, g: &DenseMatrix, lam: f64) -> Result<DenseMatrix> {
    let wt_xtx = matmul(&w.transpose(), xtx)?; // K×N
    let curvature = matmul(&matmul(&wt_xtx, w)?, g)?; // K×N
    let mut grad = elementwise(&curvature, &wt_xtx, |a, b| 2.0 * (a - b));
    let k = g.rows();
    let n = g.cols();
    let mut values = grad.values().to_vec();
    for kk in 0..k {
        let adjust = -2.0 * lam * (1.0 - g.row_sum(kk));
        for nn in 0..n {
            values[kk * n + nn] += adjust;
        }
    }
    grad = DenseMatrix::from_vec(k, n, values)?;
    Ok(grad)
}

/// ∂/∂W of `‖X−XWG‖² + λ·penalty_w(W)`:
/// `−2XᵀXGᵀ + 2XᵀXWGGᵀ` minus `2λ(1−col-sum_k)` down each column.
pub fn grad_w(xtx: &DenseMatrix, w: &DenseMatrix, g: &DenseMatrix, lam: f64) -> Result<DenseMatrix> {
    let xtx_gt = matmul(xtx, &g.transpose())?; // N×K
    let curvature = matmul(&matmul(xtx, w)?, &matmul(g, &g.transpose())?)?; // N×K
    let mut grad = elementwise(&curvature, &xtx_gt, |a, b| 2.0 * (a - b));
    let n = w.rows();
    let k = w.cols();
    let mut values = grad.values().to_vec();
    for kk in 0..k {
        let adjust = -2.0 * lam * (1.0 - w.col_sum(kk));
        for nn in 0..n {
            values[nn * k + kk] += adjust;
        }
    }
    grad = DenseMatrix::from_vec(n, k, values)?;
    Ok(grad)
}

/// One projected-gradient step with Armijo backtracking. The candidate is
/// projected first, then tested, so acceptance implies non-increase. Returns
/// the factor unchanged when 100 backtracks find no acceptable step.
fn armijo_step(
    y: &DenseMatrix,
    grad: &DenseMatrix,
    f: impl Fn(&DenseMatrix) -> Result<f64>,
    shrink: f64,
    c: f64,
) -> Result<DenseMatrix> {
    let f_y = f(y)?;
    let mut t = 1.0;
    for _ in 0..100 {
        let cand = elementwise(y, grad, |v, d| (v - t * d).max(0.0));
        let decrease_bound = inner(grad, &elementwise(&cand, y, |a, b| a - b));
        if f(&cand)? <= f_y + c * decrease_bound {
            return Ok(cand);
        }
        t *= shrink;
    }
    Ok(y.clone())
}

/// Alternating projected-gradient factorization. Initialization matches the
/// QUBO driver (`init_w` with the same seed; the starting `G` uses the
/// follow-up seed, transposed to row form) so benchmarks isolate the solver.
/// Stops when the relative decrease of the combined penalized objective
/// drops below `tol`, or after `max_iters` rounds.
pub fn solve_classical(x: &DenseMatrix, cfg: &BaselineConfig) -> Result<FactorizationResult> {
    let n = x.cols();
    let k = cfg.k;
    if n < k {
        return Err(CnmfError::Config(format!(
            "need at least k={k} data columns, got {n}"
        )));
    }
    let started = Instant::now();
    let mut timings = PhaseTimings::default();
    let lam = cfg.penalty_weight;
    let xtx = gram(x);

    let mut w = init_w(n, k, &cfg.scheme, cfg.seed);
    let mut g = init_w(n, k, &cfg.scheme, cfg.seed.wrapping_add(1)).transpose();

    let mut trace = vec![TraceEntry {
        label: "init".into(),
        objective: objective(x, &w, &g)?,
        penalty_g: penalty_g(&g),
        penalty_w: penalty_w(&w),
    }];
    let mut prev_total =
        trace[0].objective + lam * (trace[0].penalty_g + trace[0].penalty_w);

    for it in 1..=cfg.max_iters {
        let t = Instant::now();
        let dg = grad_g(&xtx, &w, &g, lam)?;
        g = armijo_step(
            &g,
            &dg,
            |cand| Ok(objective(x, &w, cand)? + lam * penalty_g(cand)),
            cfg.step_shrink,
            cfg.armijo_c,
        )?;
        timings.solve_g += t.elapsed();
        trace.push(TraceEntry {
            label: format!("g{it}"),
            objective: objective(x, &w, &g)?,
            penalty_g: penalty_g(&g),
            penalty_w: penalty_w(&w),
        });

        let t = Instant::now();
        let dw = grad_w(&xtx, &w, &g, lam)?;
        w = armijo_step(
            &w,
            &dw,
            |cand| Ok(objective(x, cand, &g)? + lam * penalty_w(cand)),
            cfg.step_shrink,
            cfg.armijo_c,
        )?;
        timings.solve_w += t.elapsed();
        let entry = TraceEntry {
            label: format!("w{it}"),
            objective: objective(x, &w, &g)?,
            penalty_g: penalty_g(&g),
            penalty_w: penalty_w(&w),
        };
        let total = entry.objective + lam * (entry.penalty_g + entry.penalty_w);
        trace.push(entry);

        if prev_total - total < cfg.tol * prev_total.abs().max(1.0) {
            break;
        }
        prev_total = total;
    }

    let labels = assign_clusters(&g);
    let cent = centroids(x, &w)?;
    let dev_g = max_row_sum_deviation(&g);
    let dev_w = max_col_sum_deviation(&w);
    timings.total = started.elapsed();

    Ok(FactorizationResult {
        w,
        g,
        objective_trace: trace,
        labels,
        centroids: cent,
        g_solve: None,
        w_solve: None,
        max_row_sum_deviation_g: dev_g,
        max_col_sum_deviation_w: dev_w,
        timings,
    })
}
