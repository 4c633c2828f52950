//! Configuration-driven front end for the chpfem solver: evolutions,
//! eigenvalue solves, free-energy analyses, convergence studies, and
//! eps-sweeps, with CSV/VTK output.

pub mod commands;
pub mod config;
pub mod output;

/// Process exit code for an error, per the CLI contract:
/// 2 = configuration problem, 3 = solver failure, 4 = fit failure.
pub fn exit_code_for(err: &chpfem::Error) -> i32 {
    use chpfem::Error::*;
    match err {
        Parameter(_) | Parse { .. } | Geometry(_) | Domain(_) => 2,
        Numeric(_) => 3,
        Shape(_) | Fit(_) => 4,
    }
}
