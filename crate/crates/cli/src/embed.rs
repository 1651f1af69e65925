//! The `embed` subcommand: physical-qubit cost curve for clique embedding
//! of encoded real variables on a Chimera processor grid.

use cnmf_core::{ChimeraSpec, CnmfError};

use crate::data::write_text;
use crate::{CliError, EmbedArgs};

/// Parse "ROWSxCOLSxSHORE" (e.g. "16x16x4") into a processor spec.
fn parse_grid(grid: &str) -> Result<ChimeraSpec, CliError> {
    let parts: Vec<&str> = grid.split('x').collect();
    let parse = |s: &str| -> Result<usize, CliError> {
        s.parse().map_err(|_| {
            CliError::Core(CnmfError::Parse(format!(
                "grid must be ROWSxCOLSxSHORE like 16x16x4, got {grid:?}"
            )))
        })
    };
    match parts.as_slice() {
        [r, c, s] => {
            let spec = ChimeraSpec::new(parse(r)?, parse(c)?, parse(s)?)?;
            Ok(spec)
        }
        _ => Err(CliError::Core(CnmfError::Parse(format!(
            "grid must be ROWSxCOLSxSHORE like 16x16x4, got {grid:?}"
        )))),
    }
}

pub fn cmd_embed(args: &EmbedArgs) -> Result<(), CliError> {
    let spec = parse_grid(&args.grid)?;
    if args.bits == 0 {
        return Err(CliError::Core(CnmfError::Config(
            "bits must be >= 1".into(),
        )));
    }
    let curve = spec.qubit_curve(args.bits, args.reals_max);
    let mut csv = String::from("reals,logical_bits,physical_qubits,feasible\n");
    for row in &curve {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row.reals, row.logical_bits, row.physical_qubits, row.feasible
        ));
    }
    match &args.out {
        Some(path) => write_text(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
