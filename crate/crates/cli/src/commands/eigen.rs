use std::path::Path;

use chpfem::eigen::smallest_eigenpairs;
use chpfem::solver::{Operators, State};
use chpfem::Result;

use crate::config::RunConfig;
use crate::output;

/// Solve for the smallest Laplace-Neumann eigenpairs on the configured
/// domain; write eigenvalues.csv and one mode snapshot per pair.
pub fn cmd_eigen(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let mesh = cfg.build_mesh()?;
    let is_rect = cfg.str("domain") == "rect";
    let ops = Operators::new(mesh, cfg.usize("degree")?, cfg.quad_order()?, false)?;
    let count = cfg.usize("eigen_count")?;
    let pairs = smallest_eigenpairs(&ops.stiffness, &ops.mass, count)?;

    let rows: Vec<Vec<String>> = pairs
        .iter()
        .enumerate()
        .map(|(k, p)| vec![(k + 1).to_string(), output::fmt(p.rho)])
        .collect();
    output::write_csv(&out_dir.join("eigenvalues.csv"), "k,rho", &rows)?;

    for (k, pair) in pairs.iter().enumerate() {
        let state = State {
            t: 0.0,
            u: pair.v.clone(),
            w: vec![0.0; pair.v.len()],
        };
        if is_rect {
            output::write_state_vtk(
                &out_dir.join(format!("mode_{:02}.vtk", k + 1)),
                &state,
                &ops.mesh,
                &ops.dofs,
                cfg.usize("nx")?,
                cfg.usize("ny")?,
            )?;
        } else {
            output::write_state_csv(
                &out_dir.join(format!("mode_{:02}.csv", k + 1)),
                &state,
                &ops.dofs,
            )?;
        }
    }
    Ok(())
}
