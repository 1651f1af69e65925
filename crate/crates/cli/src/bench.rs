//! The `bench` subcommand: run the annealing path and the classical
//! baseline on shared synthetic datasets and emit a phase-split timing CSV.

use cnmf_core::{
    run_factorization, solve_classical, BaselineConfig, BuilderConfig, CrossTermMode, DenseMatrix,
    EncodingScheme, FactorizationConfig, FactorizationResult, SolverChoice,
};

use crate::data::{fmt_value, generate_blobs, write_text};
use crate::{BenchArgs, CliError};

/// Blob spread used for every generated benchmark dataset.
const BENCH_SPREAD: f64 = 0.05;

/// One CSV row: a single path's run on one (size, repeat) dataset.
struct RunRecord {
    size: usize,
    repeat: usize,
    path: &'static str,
    build_g_ms: f64,
    solve_g_ms: f64,
    build_w_ms: f64,
    solve_w_ms: f64,
    total_ms: f64,
    objective: f64,
}

fn record(
    size: usize,
    repeat: usize,
    path: &'static str,
    r: &FactorizationResult,
) -> RunRecord {
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    let objective = r
        .objective_trace
        .last()
        .map(|t| t.objective)
        .unwrap_or(f64::NAN);
    RunRecord {
        size,
        repeat,
        path,
        build_g_ms: ms(r.timings.build_g),
        solve_g_ms: ms(r.timings.solve_g),
        build_w_ms: ms(r.timings.build_w),
        solve_w_ms: ms(r.timings.solve_w),
        total_ms: ms(r.timings.total),
        objective,
    }
}

pub const BENCH_CSV_HEADER: &str =
    "size,repeat,path,build_g_ms,solve_g_ms,build_w_ms,solve_w_ms,total_ms,objective";

fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{}\n",
            r.size,
            r.repeat,
            r.path,
            r.build_g_ms,
            r.solve_g_ms,
            r.build_w_ms,
            r.solve_w_ms,
            r.total_ms,
            fmt_value(r.objective),
        ));
    }
    out
}

/// Seed for one benchmark dataset, spread apart so that different
/// (size, repeat) cells never share a stream.
pub fn bench_data_seed(base: u64, size: usize, repeat: usize) -> u64 {
    base.wrapping_add(size as u64 * 1000).wrapping_add(repeat as u64)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.sizes.is_empty() {
        return Err(CliError::Core(cnmf_core::CnmfError::Config(
            "at least one size is required".into(),
        )));
    }
    if args.repeats == 0 {
        return Err(CliError::Core(cnmf_core::CnmfError::Config(
            "repeats must be >= 1".into(),
        )));
    }
    let scheme = EncodingScheme::new(0.001, 10)?;
    let builder = BuilderConfig::new(args.k, scheme, 1.0, CrossTermMode::Exact)?;

    let mut records = Vec::new();
    for &size in &args.sizes {
        for repeat in 0..args.repeats {
            let data_seed = bench_data_seed(args.seed, size, repeat);
            let blobs = generate_blobs(size, args.dims, args.k, BENCH_SPREAD, data_seed)?;
            let mut values = Vec::with_capacity(size * args.dims);
            for d in 0..args.dims {
                for row in &blobs.rows {
                    values.push(row[d]);
                }
            }
            let x = DenseMatrix::from_vec(args.dims, size, values)?;

            let cfg = FactorizationConfig::new(
                1,
                builder,
                SolverChoice::SimulatedAnnealing(None),
                data_seed,
            )?;
            let quantum = run_factorization(&x, &cfg)?;
            records.push(record(size, repeat, "quantum-sim", &quantum));

            let baseline_cfg = BaselineConfig::with_defaults(args.k, data_seed)?;
            let classical = solve_classical(&x, &baseline_cfg)?;
            records.push(record(size, repeat, "classical", &classical));
        }
    }
    // Deterministic row order regardless of how sizes were passed.
    records.sort_by(|a, b| {
        (a.size, a.repeat, a.path).cmp(&(b.size, b.repeat, b.path))
    });

    let csv = to_csv(&records);
    match &args.out {
        Some(path) => write_text(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
