//! Convex non-negative matrix factorization by QUBO encoding.
//!
//! Factorizes a data matrix `X` (M×N) as `X ≈ X·W·G` with non-negative
//! factors `W` (N×K) and `G` (K×N), encouraging the columns of `W` and the
//! rows of `G` to sum to one. Each half-step of the alternating minimization
//! is a box-constrained quadratic problem; fixed-point binary encoding of the
//! unknown factor turns it into a QUBO, solved here by exhaustive search or
//! multi-restart simulated annealing.
//!
//! Module map:
//! - [`matrix`]: dense linear algebra, objective and penalty evaluators
//! - [`encoding`]: fixed-point binary encoding of matrices
//! - [`qubo`]: QUBO representation, energies, flip deltas, text interchange
//! - [`builders`]: the two subproblem QUBOs (solve-for-G, solve-for-W)
//! - [`solvers`]: exhaustive oracle and simulated annealing
//! - [`chimera`]: embedding capacity arithmetic for Chimera-topology anneal hardware
//! - [`driver`]: the alternating minimization loop
//! - [`baseline`]: classical projected-gradient reference

pub mod baseline;
pub mod builders;
pub mod chimera;
pub mod driver;
pub mod encoding;
pub mod error;
pub mod matrix;
pub mod qubo;
pub mod solvers;

pub use baseline::{grad_g, grad_w, solve_classical, BaselineConfig};
pub use builders::{build_g_qubo, build_w_qubo, subproblem_bit_count, BuilderConfig, CrossTermMode};
pub use chimera::{
    ChimeraSpec, CurveRow, K65_OPTIMIZED_CHAIN_LENGTH, K65_OPTIMIZED_PHYSICAL_QUBITS,
};
pub use driver::{
    assign_clusters, centroids, init_w, max_col_sum_deviation, max_row_sum_deviation,
    run_factorization, FactorizationConfig, FactorizationResult, PhaseTimings, SolverChoice,
    TraceEntry,
};
pub use encoding::{BitLayout, EncodingScheme};
pub use error::{CnmfError, Result};
pub use matrix::{
    frobenius_sq, gram, matmul, objective, penalty_g, penalty_w, DenseMatrix,
};
pub use qubo::{QuboBuilder, QuboModel};
pub use solvers::{
    default_schedule, solve_exhaustive, solve_sa, SaSchedule, SolveResult, EXHAUSTIVE_MAX_VARS,
};
