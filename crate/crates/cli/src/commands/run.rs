use std::path::Path;

use chpfem::solver::{evolve, initialize_state, EvolveOptions, Operators, State};
use chpfem::Result;

use crate::config::RunConfig;
use crate::output;

use super::initial_field;

/// Evolve the configured problem and write diagnostics.csv, snapshots per
/// cadence, and the final state.
pub fn cmd_run(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let mesh = cfg.build_mesh()?;
    let model = cfg.build_model()?;
    let solver_cfg = cfg.solver_config()?;
    let is_rect = cfg.str("domain") == "rect";
    let ops = Operators::new(
        mesh,
        cfg.usize("degree")?,
        cfg.quad_order()?,
        solver_cfg.mass_lumping,
    )?;
    let u0 = initial_field(cfg, &ops, &model)?;
    let initial = initialize_state(u0, 0.0, &solver_cfg, &model, &ops)?;

    let opts = EvolveOptions {
        t_end: cfg.f64("t_end")?,
        max_steps: cfg.usize("max_steps")?,
        snapshot_every: cfg.usize("snapshot_every")?,
    };
    let traj = evolve(initial, &solver_cfg, &model, &ops, &opts)?;

    output::write_diagnostics(&out_dir.join("diagnostics.csv"), &traj.rows)?;
    let write_state = |state: &State, name: &str| -> Result<()> {
        if is_rect {
            output::write_state_vtk(
                &out_dir.join(format!("{name}.vtk")),
                state,
                &ops.mesh,
                &ops.dofs,
                cfg.usize("nx")?,
                cfg.usize("ny")?,
            )
        } else {
            output::write_state_csv(&out_dir.join(format!("{name}.csv")), state, &ops.dofs)
        }
    };
    for (k, snap) in traj.snapshots.iter().enumerate() {
        write_state(snap, &format!("snapshot_{k:04}"))?;
    }
    write_state(&traj.final_state, "final")?;
    Ok(())
}
