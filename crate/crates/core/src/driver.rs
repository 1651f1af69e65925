//! The alternating factorization loop.
//!
//! Starting from a random column-stochastic `W`, each iteration solves the
//! G-subproblem QUBO with `W` fixed, decodes the new `G`, then solves the
//! W-subproblem with `G` fixed. The objective and both penalty values are
//! recorded after every half-step. Sum-to-one is *encouraged* by the penalty
//! terms, never enforced by projection — the result reports the worst
//! row/column-sum deviation instead of correcting it.
//!
//! Everything is deterministic: the initializer is seeded, and the solver
//! seed for half-step `h` (0-based across iterations) is
//! `config.seed.wrapping_add(h)`, so runs are reproducible bit-for-bit
//! (timings aside).

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::{build_g_qubo, build_w_qubo, BuilderConfig};
use crate::encoding::{BitLayout, EncodingScheme};
use crate::error::{CnmfError, Result};
use crate::matrix::{matmul, objective, penalty_g, penalty_w, DenseMatrix};
use crate::qubo::QuboModel;
use crate::solvers::{default_schedule, solve_exhaustive, solve_sa, SaSchedule, SolveResult};

/// Which QUBO solver the driver uses for both half-steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverChoice {
    /// Full enumeration; every half-step is globally optimal over the
    /// encodable factor. Capacity-limited to 24 bits per subproblem.
    Exhaustive,
    /// Multi-restart simulated annealing. `None` derives a schedule from
    /// each subproblem's coefficients via [`default_schedule`].
    SimulatedAnnealing(Option<SaSchedule>),
}

/// Settings for one factorization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationConfig {
    k: usize,
    iterations: usize,
    builder: BuilderConfig,
    solver: SolverChoice,
    seed: u64,
}

impl FactorizationConfig {
    pub fn new(
        iterations: usize,
        builder: BuilderConfig,
        solver: SolverChoice,
        seed: u64,
    ) -> Result<Self> {
        if iterations == 0 {
            return Err(CnmfError::Config("iterations must be >= 1".into()));
        }
        Ok(Self {
            k: builder.k(),
            iterations,
            builder,
            solver,
            seed,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn builder(&self) -> &BuilderConfig {
        &self.builder
    }

    pub fn solver(&self) -> &SolverChoice {
        &self.solver
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Objective snapshot after one half-step (or at initialization).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    /// "init", then "g1", "w1", "g2", "w2", …
    pub label: String,
    /// `‖X − XWG‖²_F` with the factors as of this point.
    pub objective: f64,
    /// `Σ_k (1 − Σ_n g_{kn})²`.
    pub penalty_g: f64,
    /// `Σ_k (1 − Σ_n w_{nk})²`.
    pub penalty_w: f64,
}

/// Wall-clock time spent in each phase, accumulated over iterations.
///
/// The four phases tile the whole run: build segments absorb the setup
/// leading into them and solve segments absorb their half-step's decoding
/// and bookkeeping, so `total` equals the sum of the four phases exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub build_g: Duration,
    pub solve_g: Duration,
    pub build_w: Duration,
    pub solve_w: Duration,
    pub total: Duration,
}

/// Everything a factorization run produces.
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    /// N×K mixing factor; entries are α-grid values.
    pub w: DenseMatrix,
    /// K×N assignment factor; entries are α-grid values.
    pub g: DenseMatrix,
    /// "init" snapshot plus one entry per half-step.
    pub objective_trace: Vec<TraceEntry>,
    /// Cluster index per data column: argmax over G's rows.
    pub labels: Vec<usize>,
    /// `X·W` — cluster centroids in data space.
    pub centroids: DenseMatrix,
    /// Solver outcome of the last G half-step (`None` for solvers that do
    /// not go through QUBOs, e.g. the classical baseline).
    pub g_solve: Option<SolveResult>,
    /// Solver outcome of the last W half-step.
    pub w_solve: Option<SolveResult>,
    /// `max_k |1 − Σ_n g_{kn}|` of the final G.
    pub max_row_sum_deviation_g: f64,
    /// `max_k |1 − Σ_n w_{nk}|` of the final W.
    pub max_col_sum_deviation_w: f64,
    pub timings: PhaseTimings,
}

/// Worst deviation of a matrix's row sums from one.
pub fn max_row_sum_deviation(m: &DenseMatrix) -> f64 {
    (0..m.rows())
        .map(|r| (1.0 - m.row_sum(r)).abs())
        .fold(0.0, f64::max)
}

/// Worst deviation of a matrix's column sums from one.
pub fn max_col_sum_deviation(m: &DenseMatrix) -> f64 {
    (0..m.cols())
        .map(|c| (1.0 - m.col_sum(c)).abs())
        .fold(0.0, f64::max)
}

/// Random starting `W`: N×K entries uniform on [0,1], columns normalized to
/// sum one, then snapped to the encoding grid. A column that snaps to all
/// zeros gets its largest pre-quantization entry set to the smallest
/// representable positive value, so no cluster starts empty.
pub fn init_w(n: usize, k: usize, scheme: &EncodingScheme, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = vec![0.0f64; n * k];
    for v in raw.iter_mut() {
        *v = rng.random::<f64>();
    }
    for kk in 0..k {
        let sum: f64 = (0..n).map(|nn| raw[nn * k + kk]).sum();
        if sum == 0.0 {
            for nn in 0..n {
                raw[nn * k + kk] = 1.0 / n as f64;
            }
        } else {
            for nn in 0..n {
                raw[nn * k + kk] /= sum;
            }
        }
    }
    let mut values = vec![0.0f64; n * k];
    for (ix, &r) in raw.iter().enumerate() {
        values[ix] = scheme
            .quantize_value(r)
            .expect("normalized entries are finite and non-negative");
    }
    for kk in 0..k {
        if (0..n).all(|nn| values[nn * k + kk] == 0.0) {
            let largest = (0..n)
                .max_by(|&a, &b| {
                    raw[a * k + kk]
                        .partial_cmp(&raw[b * k + kk])
                        .expect("finite entries")
                })
                .expect("n >= 1");
            values[largest * k + kk] = scheme.decode_level(1);
        }
    }
    DenseMatrix::from_vec(n, k, values).expect("constructed in range")
}

/// Cluster label per column of `G`: the row index of the largest entry,
/// ties resolved toward the smallest index.
pub fn assign_clusters(g: &DenseMatrix) -> Vec<usize> {
    (0..g.cols())
        .map(|n| {
            let mut best = 0;
            for k in 1..g.rows() {
                if g.get(k, n) > g.get(best, n) {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Centroids in data space: `X·W`, each column a convex-like combination of
/// data columns.
pub fn centroids(x: &DenseMatrix, w: &DenseMatrix) -> Result<DenseMatrix> {
    matmul(x, w)
}

fn solve_model(
    model: &QuboModel,
    choice: &SolverChoice,
    seed: u64,
) -> Result<SolveResult> {
    match choice {
        SolverChoice::Exhaustive => solve_exhaustive(model),
        SolverChoice::SimulatedAnnealing(Some(schedule)) => solve_sa(model, schedule, seed),
        SolverChoice::SimulatedAnnealing(None) => {
            solve_sa(model, &default_schedule(model), seed)
        }
    }
}

/// Run the alternating loop: `iterations` rounds of solve-for-G then
/// solve-for-W, starting from a seeded random `W` (G starts at zero for the
/// "init" trace snapshot). Returns the final factors plus labels, centroids,
/// the objective trace, penalty-deviation summary, the last half-steps'
/// solver results, and per-phase timings.
pub fn run_factorization(
    x: &DenseMatrix,
    cfg: &FactorizationConfig,
) -> Result<FactorizationResult> {
    let n = x.cols();
    let k = cfg.k;
    if n < k {
        return Err(CnmfError::Config(format!(
            "need at least k={k} data columns, got {n}"
        )));
    }
    let scheme = *cfg.builder.scheme();
    let g_layout = BitLayout::new(k, n, scheme)?;
    let w_layout = BitLayout::new(n, k, scheme)?;

    // The four phase timers tile the run with no untimed gaps: each build
    // segment covers the setup leading into it (initialization before the
    // first G build), each solve segment covers decoding and objective
    // bookkeeping for its half-step, and the final label/centroid assembly
    // counts toward the last W solve. Total therefore equals the sum of the
    // four phases exactly, not merely up to measurement slack.
    let started = Instant::now();
    let mut cursor = started;
    let mut timings = PhaseTimings::default();
    macro_rules! close_segment {
        ($phase:ident) => {{
            let now = Instant::now();
            timings.$phase += now - cursor;
            cursor = now;
        }};
    }

    let mut w = init_w(n, k, &scheme, cfg.seed);
    let mut g = DenseMatrix::zeros(k, n);
    let mut trace = vec![TraceEntry {
        label: "init".into(),
        objective: objective(x, &w, &g)?,
        penalty_g: penalty_g(&g),
        penalty_w: penalty_w(&w),
    }];

    let mut g_solve = None;
    let mut w_solve = None;
    let mut half_step: u64 = 0;

    for it in 1..=cfg.iterations {
        let g_model = build_g_qubo(x, &w, &cfg.builder)?;
        close_segment!(build_g);

        let res = solve_model(&g_model, &cfg.solver, cfg.seed.wrapping_add(half_step))?;
        half_step += 1;
        g = g_layout.decode(&res.assignment)?;
        g_solve = Some(res);
        trace.push(TraceEntry {
            label: format!("g{it}"),
            objective: objective(x, &w, &g)?,
            penalty_g: penalty_g(&g),
            penalty_w: penalty_w(&w),
        });
        close_segment!(solve_g);

        let w_model = build_w_qubo(x, &g, &cfg.builder)?;
        close_segment!(build_w);

        let res = solve_model(&w_model, &cfg.solver, cfg.seed.wrapping_add(half_step))?;
        half_step += 1;
        w = w_layout.decode(&res.assignment)?;
        w_solve = Some(res);
        trace.push(TraceEntry {
            label: format!("w{it}"),
            objective: objective(x, &w, &g)?,
            penalty_g: penalty_g(&g),
            penalty_w: penalty_w(&w),
        });
        close_segment!(solve_w);
    }

    let labels = assign_clusters(&g);
    let cent = centroids(x, &w)?;
    let dev_g = max_row_sum_deviation(&g);
    let dev_w = max_col_sum_deviation(&w);
    close_segment!(solve_w);
    let _ = cursor;
    timings.total = timings.build_g + timings.solve_g + timings.build_w + timings.solve_w;

    Ok(FactorizationResult {
        w,
        g,
        objective_trace: trace,
        labels,
        centroids: cent,
        g_solve,
        w_solve,
        max_row_sum_deviation_g: dev_g,
        max_col_sum_deviation_w: dev_w,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::CrossTermMode;

    fn scheme(alpha: f64, bits: u32) -> EncodingScheme {
        EncodingScheme::new(alpha, bits).unwrap()
    }

    fn exhaustive_cfg(k: usize, s: EncodingScheme, lam: f64) -> FactorizationConfig {
        let b = BuilderConfig::new(k, s, lam, CrossTermMode::Exact).unwrap();
        FactorizationConfig::new(1, b, SolverChoice::Exhaustive, 42).unwrap()
    }

    #[test]
    fn init_w_is_deterministic_and_on_grid() {
        let s = scheme(0.001, 10);
        let a = init_w(5, 3, &s, 99);
        let b = init_w(5, 3, &s, 99);
        assert_eq!(a, b);
        let c = init_w(5, 3, &s, 100);
        assert_ne!(a, c);
        for &v in a.values() {
            assert!(v >= 0.0 && v <= s.max_value());
            assert_eq!(s.quantize_value(v).unwrap(), v, "entry {v} is off-grid");
        }
    }

    #[test]
    fn init_w_columns_nearly_stochastic() {
        let s = scheme(0.001, 10);
        for seed in 0..20 {
            let w = init_w(7, 2, &s, seed);
            for k in 0..2 {
                let dev = (1.0 - w.col_sum(k)).abs();
                // Each of the 7 entries moves by at most α/2 when snapped.
                assert!(dev <= 7.0 * 0.001 / 2.0 + 1e-12, "seed {seed}: deviation {dev}");
            }
        }
    }

    #[test]
    fn init_w_rescues_all_zero_columns() {
        // α=1, three levels {0,1,2,3}: normalized entries of a 5-row column
        // are ~0.2, all of which snap to zero.
        let s = scheme(1.0, 2);
        for seed in 0..20 {
            let w = init_w(5, 2, &s, seed);
            for k in 0..2 {
                let col: Vec<f64> = (0..5).map(|n| w.get(n, k)).collect();
                assert!(
                    col.iter().any(|&v| v > 0.0),
                    "seed {seed}: column {k} is all zero"
                );
            }
        }
    }

    #[test]
    fn assign_clusters_examples() {
        let i2 = DenseMatrix::identity(2);
        assert_eq!(assign_clusters(&i2), vec![0, 1]);

        let tie = DenseMatrix::from_rows(&[vec![0.4], vec![0.4]]).unwrap();
        assert_eq!(assign_clusters(&tie), vec![0]);

        let g = DenseMatrix::from_rows(&[vec![0.1, 0.9], vec![0.8, 0.2]]).unwrap();
        assert_eq!(assign_clusters(&g), vec![1, 0]);
        // Swapping the rows swaps the labels.
        let swapped = DenseMatrix::from_rows(&[vec![0.8, 0.2], vec![0.1, 0.9]]).unwrap();
        assert_eq!(assign_clusters(&swapped), vec![0, 1]);
    }

    #[test]
    fn centroid_examples() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 3.0], vec![2.0, 4.0]]).unwrap();
        // Selecting column 1.
        let sel = DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(centroids(&x, &sel).unwrap().values(), &[3.0, 4.0]);
        // Uniform weights give the column mean.
        let mean = DenseMatrix::from_rows(&[vec![0.5], vec![0.5]]).unwrap();
        assert_eq!(centroids(&x, &mean).unwrap().values(), &[2.0, 3.0]);
        // Hand product.
        let i2 = DenseMatrix::identity(2);
        let w = DenseMatrix::from_rows(&[vec![0.5, 0.0], vec![0.5, 1.0]]).unwrap();
        assert_eq!(centroids(&i2, &w).unwrap().values(), &[0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn run_rejects_more_clusters_than_columns() {
        let x = DenseMatrix::identity(2);
        let cfg = exhaustive_cfg(3, scheme(0.5, 1), 1.0);
        assert!(matches!(
            run_factorization(&x, &cfg),
            Err(CnmfError::Config(_))
        ));
    }

    /// With the exhaustive solver, the G half-step value is the global
    /// minimum of objective + λ·penalty_g over every encodable G, and in
    /// particular no worse than at the starting G = 0.
    #[test]
    fn exhaustive_g_half_step_is_globally_optimal() {
        let x = DenseMatrix::identity(2);
        let s = scheme(0.5, 1);
        let cfg = exhaustive_cfg(2, s, 1.0);
        let r = run_factorization(&x, &cfg).unwrap();

        let w0 = init_w(2, 2, &s, cfg.seed());
        let layout = BitLayout::new(2, 2, s).unwrap();
        let mut best = f64::INFINITY;
        for u in 0..1u64 << layout.total_bits() {
            let q: Vec<bool> = (0..layout.total_bits()).map(|b| u >> b & 1 == 1).collect();
            let g = layout.decode(&q).unwrap();
            let v = objective(&x, &w0, &g).unwrap() + penalty_g(&g);
            best = best.min(v);
        }
        let g_entry = &r.objective_trace[1];
        assert_eq!(g_entry.label, "g1");
        let achieved = g_entry.objective + g_entry.penalty_g;
        assert!(
            (achieved - best).abs() <= 1e-9 * (1.0 + best.abs()),
            "half-step value {achieved} vs enumerated optimum {best}"
        );
        let init = &r.objective_trace[0];
        assert!(achieved <= init.objective + init.penalty_g + 1e-9);
    }

    /// Duplicated columns are exactly reconstructable with one cluster when
    /// the penalty is off and the needed values sit on the encoding grid.
    #[test]
    fn duplicate_columns_reconstruct_exactly() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let cfg = exhaustive_cfg(1, scheme(0.5, 2), 0.0);
        let r = run_factorization(&x, &cfg).unwrap();
        let final_entry = r.objective_trace.last().unwrap();
        assert!(
            final_entry.objective <= 1e-18,
            "objective {} not driven to zero",
            final_entry.objective
        );
        assert_eq!(r.labels, vec![0, 0]);
    }

    #[test]
    fn run_is_deterministic() {
        let x = DenseMatrix::from_rows(&[vec![0.9, 0.1, 0.8], vec![0.2, 0.7, 0.3]]).unwrap();
        let cfg = exhaustive_cfg(2, scheme(0.5, 1), 1.0);
        let a = run_factorization(&x, &cfg).unwrap();
        let b = run_factorization(&x, &cfg).unwrap();
        assert_eq!(a.w, b.w);
        assert_eq!(a.g, b.g);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.objective_trace, b.objective_trace);
        assert_eq!(a.centroids, b.centroids);
        assert_eq!(
            a.g_solve.as_ref().unwrap().assignment,
            b.g_solve.as_ref().unwrap().assignment
        );
    }

    #[test]
    fn trace_and_result_shapes() {
        let x = DenseMatrix::from_rows(&[vec![0.9, 0.1, 0.8], vec![0.2, 0.7, 0.3]]).unwrap();
        let s = scheme(0.5, 1);
        let b = BuilderConfig::new(2, s, 1.0, CrossTermMode::Exact).unwrap();
        let cfg = FactorizationConfig::new(2, b, SolverChoice::Exhaustive, 7).unwrap();
        let r = run_factorization(&x, &cfg).unwrap();

        assert_eq!(r.w.shape(), (3, 2));
        assert_eq!(r.g.shape(), (2, 3));
        assert_eq!(r.centroids.shape(), (2, 2));
        assert_eq!(r.labels.len(), 3);
        let labels: Vec<&str> = r.objective_trace.iter().map(|t| t.label.as_str()).collect();
        assert_eq!(labels, vec!["init", "g1", "w1", "g2", "w2"]);
        // Deviation fields agree with the final factors.
        assert_eq!(r.max_row_sum_deviation_g, max_row_sum_deviation(&r.g));
        assert_eq!(r.max_col_sum_deviation_w, max_col_sum_deviation(&r.w));
        // Factors stay on the grid and non-negative.
        for &v in r.w.values().iter().chain(r.g.values()) {
            assert!(v >= 0.0 && v <= s.max_value());
            assert_eq!(s.quantize_value(v).unwrap(), v);
        }
        // The phase timers tile the run, so the identity is exact.
        let t = r.timings;
        assert_eq!(t.total, t.build_g + t.solve_g + t.build_w + t.solve_w);
        assert!(t.total > Duration::ZERO);
    }

    /// Two well-separated point groups are recovered by the annealing path.
    #[test]
    fn sa_driver_clusters_separated_groups() {
        // Two tight groups sitting on different rays from the origin. With one
        // group per axis direction, each point's best non-negative mixture of
        // the two centroids is strongly one-sided, so argmax labels are crisp
        // even after a single alternating iteration from a random W.
        let offsets = [[0.02, 0.01], [-0.01, 0.03], [0.00, -0.02], [-0.03, -0.01]];
        let mut cols = Vec::new();
        for o in &offsets {
            cols.push([0.85 + o[0], 0.15 + o[1]]);
        }
        for o in &offsets {
            cols.push([0.15 + o[0], 0.85 + o[1]]);
        }
        // X is dims × points.
        let mut values = Vec::new();
        for d in 0..2 {
            for c in &cols {
                values.push(c[d]);
            }
        }
        let x = DenseMatrix::from_vec(2, 8, values).unwrap();
        let b = BuilderConfig::new(2, scheme(0.001, 10), 1.0, CrossTermMode::Exact).unwrap();
        let cfg = FactorizationConfig::new(
            1,
            b,
            SolverChoice::SimulatedAnnealing(None),
            11,
        )
        .unwrap();
        let r = run_factorization(&x, &cfg).unwrap();
        let truth = [0, 0, 0, 0, 1, 1, 1, 1];
        let direct = r
            .labels
            .iter()
            .zip(truth.iter())
            .filter(|(a, b)| a == b)
            .count();
        let flipped = r
            .labels
            .iter()
            .zip(truth.iter())
            .filter(|(a, b)| **a != **b)
            .count();
        let correct = direct.max(flipped);
        assert!(correct >= 7, "only {correct}/8 labels match up to permutation");
    }
}
