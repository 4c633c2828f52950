//! Subcommand implementations. Each returns Ok(()) on success; the binary
//! maps error kinds to exit codes.

mod convergence;
mod critical;
mod eigen;
mod run;
mod sweep;

pub use convergence::{benchmark_case, cmd_convergence, BenchmarkCase};
pub use critical::cmd_critical;
pub use eigen::cmd_eigen;
pub use run::cmd_run;
pub use sweep::{cmd_sweep, sweep_states, SweepSetup};

use chpfem::energy::EnergyModel;
use chpfem::solver::{random_nodal_field, Operators};
use chpfem::{Error, Result};

use crate::config::RunConfig;

/// Build the initial order-parameter field selected by the config.
pub fn initial_field(cfg: &RunConfig, ops: &Operators, model: &EnergyModel) -> Result<Vec<f64>> {
    let n = ops.n_dofs();
    let amplitude = cfg.f64("amplitude")?;
    match cfg.str("initial") {
        "random" => {
            let mut u = random_nodal_field(n, amplitude, cfg.u64("seed")?);
            ops.project_zero_mean(&mut u);
            Ok(u)
        }
        "modes" => {
            let combo = cfg.f64_list("mode_combo")?;
            if combo.is_empty() {
                return Err(Error::Parameter("mode_combo is empty".into()));
            }
            let pairs =
                chpfem::eigen::smallest_eigenpairs(&ops.stiffness, &ops.mass, combo.len())?;
            let mut u = chpfem::eigen::mode_initial_data(&pairs, &combo, 1.0)?;
            let peak = u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            if peak > 0.0 {
                let scale = amplitude / peak;
                u.iter_mut().for_each(|v| *v *= scale);
            }
            Ok(u)
        }
        "cross" => cross_field(cfg, ops, model),
        "file" => {
            let path = cfg.str("ic_file");
            if path.is_empty() {
                return Err(Error::Parameter("initial = file requires ic_file".into()));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parameter(format!("cannot read {path}: {e}")))?;
            let u: Vec<f64> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    l.trim()
                        .parse()
                        .map_err(|e| Error::Parameter(format!("bad value in {path}: {e}")))
                })
                .collect::<Result<_>>()?;
            if u.len() != n {
                return Err(Error::Parameter(format!(
                    "{path} has {} values for {n} dofs",
                    u.len()
                )));
            }
            Ok(u)
        }
        other => Err(Error::Parameter(format!(
            "initial must be random, modes, cross, or file, got '{other}'"
        ))),
    }
}

/// The benchmark cross: u = beta_+ inside a centered axis-aligned cross
/// (arm half-width 0.1 s, half-length 0.4 s with s the shorter side),
/// -beta_+ outside, mollified over one element width.
fn cross_field(cfg: &RunConfig, ops: &Operators, model: &EnergyModel) -> Result<Vec<f64>> {
    if ops.mesh.dim() != 2 {
        return Err(Error::Parameter("cross initial data needs a 2D domain".into()));
    }
    let lx = cfg.f64("lx")?;
    let ly = cfg.f64("ly")?;
    let nx = cfg.usize("nx")?;
    let beta = model.critical_points()?.binodal.1;
    let s = lx.min(ly);
    let (cx, cy) = (0.5 * lx, 0.5 * ly);
    let h = lx / nx as f64;
    let bar = |dx: f64, dy: f64, half_len: f64, half_wid: f64| -> f64 {
        (half_len - dx.abs()).min(half_wid - dy.abs())
    };
    Ok(ops
        .dofs
        .dof_coords()
        .iter()
        .map(|c| {
            let (dx, dy) = (c[0] - cx, c[1] - cy);
            let d = bar(dx, dy, 0.4 * s, 0.1 * s).max(bar(dy, dx, 0.4 * s, 0.1 * s));
            beta * (2.0 * d / h).tanh()
        })
        .collect())
}
