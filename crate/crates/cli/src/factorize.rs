//! The `factorize` subcommand: run the alternating QUBO driver on a CSV
//! dataset and emit a self-describing JSON result document.

use cnmf_core::{
    build_g_qubo, init_w, run_factorization, BuilderConfig, CrossTermMode, DenseMatrix,
    EncodingScheme, FactorizationConfig, FactorizationResult, PhaseTimings, SolveResult,
    SolverChoice,
};
use serde_json::{json, Value};

use crate::data::{read_x_matrix, write_text};
use crate::{CliError, FactorizeArgs, ModeArg, SolverArg};

impl SolverArg {
    fn as_str(self) -> &'static str {
        match self {
            SolverArg::Sa => "sa",
            SolverArg::Exhaustive => "exhaustive",
        }
    }

    fn to_choice(self) -> SolverChoice {
        match self {
            SolverArg::Sa => SolverChoice::SimulatedAnnealing(None),
            SolverArg::Exhaustive => SolverChoice::Exhaustive,
        }
    }
}

impl ModeArg {
    fn as_str(self) -> &'static str {
        match self {
            ModeArg::Exact => "exact",
            ModeArg::Truncated => "truncated",
        }
    }

    fn to_mode(self) -> CrossTermMode {
        match self {
            ModeArg::Exact => CrossTermMode::Exact,
            ModeArg::Truncated => CrossTermMode::Truncated,
        }
    }
}

fn matrix_values(m: &DenseMatrix) -> Value {
    json!(m.values())
}

fn shape_value(m: &DenseMatrix) -> Value {
    json!([m.rows(), m.cols()])
}

fn solve_stats(s: &Option<SolveResult>) -> Value {
    match s {
        None => Value::Null,
        Some(s) => json!({
            "energy": s.energy,
            "evaluations": s.evaluations,
            "restarts_used": s.restarts_used,
            "seed": s.seed,
        }),
    }
}

fn timings_value(t: &PhaseTimings) -> Value {
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    json!({
        "build_g": ms(t.build_g),
        "solve_g": ms(t.solve_g),
        "build_w": ms(t.build_w),
        "solve_w": ms(t.solve_w),
        "total": ms(t.total),
    })
}

/// Assemble the result document. Everything except `timings_ms` is a pure
/// function of the input data and configuration.
pub fn result_document(config: Value, x: &DenseMatrix, r: &FactorizationResult) -> Value {
    json!({
        "config": config,
        "shapes": {
            "x": shape_value(x),
            "w": shape_value(&r.w),
            "g": shape_value(&r.g),
            "centroids": shape_value(&r.centroids),
        },
        "w": matrix_values(&r.w),
        "g": matrix_values(&r.g),
        "centroids": matrix_values(&r.centroids),
        "labels": r.labels,
        "objective_trace": r
            .objective_trace
            .iter()
            .map(|t| {
                json!({
                    "label": t.label,
                    "objective": t.objective,
                    "penalty_g": t.penalty_g,
                    "penalty_w": t.penalty_w,
                })
            })
            .collect::<Vec<_>>(),
        "max_row_sum_deviation_g": r.max_row_sum_deviation_g,
        "max_col_sum_deviation_w": r.max_col_sum_deviation_w,
        "solver_stats": {
            "g": solve_stats(&r.g_solve),
            "w": solve_stats(&r.w_solve),
        },
        "timings_ms": timings_value(&r.timings),
    })
}

pub fn cmd_factorize(args: &FactorizeArgs) -> Result<(), CliError> {
    let x = read_x_matrix(&args.input)?;
    let scheme = EncodingScheme::new(args.alpha, args.bits)?;
    let builder = BuilderConfig::new(args.k, scheme, args.lambda, args.mode.to_mode())?;
    let cfg = FactorizationConfig::new(
        args.iterations,
        builder,
        args.solver.to_choice(),
        args.seed,
    )?;

    if let Some(dump_path) = &args.dump_qubo {
        // The first G subproblem, exactly as the driver will see it: built
        // against the seeded initial W before any half-step runs.
        let w0 = init_w(x.cols(), args.k, &scheme, args.seed);
        let model = build_g_qubo(&x, &w0, &builder)?;
        write_text(dump_path, &model.to_text())?;
    }

    let result = run_factorization(&x, &cfg)?;

    let config_echo = json!({
        "input": args.input.display().to_string(),
        "k": args.k,
        "bits": args.bits,
        "alpha": args.alpha,
        "lambda": args.lambda,
        "solver": args.solver.as_str(),
        "iterations": args.iterations,
        "mode": args.mode.as_str(),
        "seed": args.seed,
    });
    let doc = result_document(config_echo, &x, &result);
    let text = format!("{:#}\n", doc);
    match &args.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}
