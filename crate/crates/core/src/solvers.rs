//! QUBO solvers: an exhaustive oracle and a multi-restart simulated annealer.
//!
//! Both return a `SolveResult` whose `energy` field is the model's own
//! `energy()` of the returned assignment — the annealer re-evaluates its
//! best state from scratch at the end of each restart so incremental deltas
//! can never leak floating-point drift into the result.
//!
//! Determinism contract: identical `(model, schedule, seed)` always produce
//! identical results (wall time aside). Each restart draws from its own
//! counter-based RNG stream, and across restarts the winner is selected by
//! (energy, restart index, assignment-as-integer) — so the outcome does not
//! depend on how restarts are scheduled.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CnmfError, Result};
use crate::qubo::QuboModel;

/// Largest model `solve_exhaustive` accepts (2^24 ≈ 16.7M states).
pub const EXHAUSTIVE_MAX_VARS: usize = 24;

/// Cooling plan for the annealer. `t_initial ≥ t_final > 0`; temperatures
/// decay geometrically across `sweeps`; `restarts` independent runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaSchedule {
    t_initial: f64,
    t_final: f64,
    sweeps: u32,
    restarts: u32,
}

impl SaSchedule {
    pub fn new(t_initial: f64, t_final: f64, sweeps: u32, restarts: u32) -> Result<Self> {
        if !(t_final.is_finite() && t_initial.is_finite() && t_final > 0.0 && t_initial >= t_final)
        {
            return Err(CnmfError::Config(format!(
                "need t_initial >= t_final > 0, got t_initial={t_initial}, t_final={t_final}"
            )));
        }
        if sweeps == 0 || restarts == 0 {
            return Err(CnmfError::Config(format!(
                "sweeps and restarts must be >= 1, got sweeps={sweeps}, restarts={restarts}"
            )));
        }
        Ok(Self {
            t_initial,
            t_final,
            sweeps,
            restarts,
        })
    }

    pub fn t_initial(&self) -> f64 {
        self.t_initial
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn sweeps(&self) -> u32 {
        self.sweeps
    }

    pub fn restarts(&self) -> u32 {
        self.restarts
    }

    /// Temperature of sweep `s` (0-based): geometric interpolation from
    /// `t_initial` down to `t_final`; a single-sweep schedule runs at
    /// `t_initial`.
    fn temperature(&self, sweep: u32) -> f64 {
        if self.sweeps <= 1 {
            return self.t_initial;
        }
        let frac = sweep as f64 / (self.sweeps - 1) as f64;
        self.t_initial * (self.t_final / self.t_initial).powf(frac)
    }
}

/// Outcome of one solver call.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Best assignment found (globally optimal for the exhaustive solver).
    pub assignment: Vec<bool>,
    /// `model.energy(&assignment)`, evaluated exactly by the model.
    pub energy: f64,
    /// Energy/delta evaluations performed.
    pub evaluations: u64,
    /// Restarts executed (1 for the exhaustive solver).
    pub restarts_used: u32,
    /// Seed the run was keyed on (0 for the exhaustive solver).
    pub seed: u64,
    /// Wall-clock time of the call.
    pub wall_time: Duration,
}

/// Compare two assignments as little-endian unsigned integers
/// (bit `b` has weight 2^b).
fn assignment_integer_less(a: &[bool], b: &[bool]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return !a[i];
        }
    }
    false
}

/// Total order on restart outcomes: lower energy wins, then lower restart
/// index, then smaller assignment-as-integer. Makes the reduction
/// independent of restart execution order.
fn candidate_beats(
    cand: (f64, u32, &[bool]),
    incumbent: Option<(f64, u32, &[bool])>,
) -> bool {
    let Some(inc) = incumbent else { return true };
    if cand.0 != inc.0 {
        return cand.0 < inc.0;
    }
    if cand.1 != inc.1 {
        return cand.1 < inc.1;
    }
    assignment_integer_less(cand.2, inc.2)
}

/// Enumerate every assignment and return the global minimum. Ties are broken
/// toward the smallest assignment interpreted as an unsigned integer.
pub fn solve_exhaustive(model: &QuboModel) -> Result<SolveResult> {
    let n = model.num_vars();
    if n > EXHAUSTIVE_MAX_VARS {
        return Err(CnmfError::Capacity(format!(
            "exhaustive solver handles at most {EXHAUSTIVE_MAX_VARS} variables, model has {n}"
        )));
    }
    let start = Instant::now();
    let states: u64 = 1 << n;
    let mut q = vec![false; n];
    let mut best_q = q.clone();
    let mut best_e = model.energy(&q)?;
    // Ascending integer enumeration + strict improvement = smallest-integer
    // tie-break for free.
    for u in 1..states {
        for (b, qb) in q.iter_mut().enumerate() {
            *qb = u >> b & 1 == 1;
        }
        let e = model.energy(&q)?;
        if e < best_e {
            best_e = e;
            best_q.copy_from_slice(&q);
        }
    }
    Ok(SolveResult {
        assignment: best_q,
        energy: best_e,
        evaluations: states,
        restarts_used: 1,
        seed: 0,
        wall_time: start.elapsed(),
    })
}

/// Multi-restart simulated annealing.
///
/// Each restart seeds `ChaCha8` with `seed` on stream `restart_index`, draws
/// a uniform random initial state, then performs `sweeps` passes; each pass
/// proposes flipping every bit once in index order and accepts with the
/// Metropolis rule (downhill and zero-delta moves always accepted; an uphill
/// move draws one uniform variate and accepts when `u < exp(−Δ/T)`). The
/// best-so-far state within a restart is tracked and re-evaluated exactly at
/// restart end; across restarts the strictly smaller energy wins, earlier
/// restarts keeping ties.
pub fn solve_sa(model: &QuboModel, schedule: &SaSchedule, seed: u64) -> Result<SolveResult> {
    let n = model.num_vars();
    if n == 0 {
        return Err(CnmfError::Config("model has no variables".into()));
    }
    let start = Instant::now();
    let mut evaluations: u64 = 0;
    let mut overall: Option<(f64, u32, Vec<bool>)> = None;

    for restart in 0..schedule.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);

        let mut q: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let mut e = model.energy(&q)?;
        evaluations += 1;
        let mut best_q = q.clone();
        let mut best_e = e;

        for sweep in 0..schedule.sweeps {
            let t = schedule.temperature(sweep);
            for b in 0..n {
                let delta = model.flip_delta(&q, b)?;
                evaluations += 1;
                let accept = if delta <= 0.0 {
                    true
                } else {
                    // Draw only for uphill proposals so acceptance decisions
                    // of downhill moves never consume randomness.
                    rng.random::<f64>() < (-delta / t).exp()
                };
                if accept {
                    q[b] = !q[b];
                    e += delta;
                    if e < best_e {
                        best_e = e;
                        best_q.copy_from_slice(&q);
                    }
                }
            }
        }

        // Exact re-evaluation: the incremental `e` may carry roundoff.
        let exact = model.energy(&best_q)?;
        evaluations += 1;
        let incumbent = overall.as_ref().map(|(e, r, q)| (*e, *r, q.as_slice()));
        if candidate_beats((exact, restart, &best_q), incumbent) {
            overall = Some((exact, restart, best_q));
        }
    }

    let (energy, _, assignment) = overall.expect("at least one restart");
    Ok(SolveResult {
        assignment,
        energy,
        evaluations,
        restarts_used: schedule.restarts,
        seed,
        wall_time: start.elapsed(),
    })
}

/// Schedule derived from the model's coefficient range: start hot enough to
/// flip against the largest coefficient, finish cold relative to the
/// smallest. An all-zero model gets a degenerate one-sweep schedule (any
/// state is optimal).
pub fn default_schedule(model: &QuboModel) -> SaSchedule {
    match (
        model.max_abs_coefficient(),
        model.min_abs_nonzero_coefficient(),
    ) {
        (Some(max), Some(min)) => {
            let t_final = (1e-3 * min).max(1e-9).min(max);
            SaSchedule::new(max, t_final, 1000, 10)
                .expect("coefficient-derived schedule is valid")
        }
        _ => SaSchedule::new(1e-9, 1e-9, 1, 1).expect("degenerate schedule is valid"),
    }
}
