use std::path::Path;

use chpfem::diagnostics::fit_bifurcation;
use chpfem::eigen::{smallest_eigenpairs, EigenPair};
use chpfem::energy::EnergyModel;
use chpfem::mesh::Mesh;
use chpfem::solver::{find_stationary, initialize_state, Operators, SolverConfig};
use chpfem::{Error, Result};

use crate::config::RunConfig;
use crate::output;

pub struct SweepSetup {
    pub ops: Operators,
    pub model: EnergyModel,
    pub pair: EigenPair,
}

/// Build the sweep domain, extract the first Laplace-Neumann mode, and
/// relax a mode-seeded state for every eps in the schedule.
/// Returns the setup and the (eps, stationary u) list.
pub fn sweep_states(
    domain: &str,
    degree: usize,
    n_elem: usize,
    nx: usize,
    ny: usize,
    deltas: &[f64],
    tau0: f64,
) -> Result<(SweepSetup, Vec<(f64, Vec<f64>)>)> {
    if deltas.is_empty() {
        return Err(Error::Parameter("sweep_deltas is empty".into()));
    }
    if deltas.iter().any(|&d| d <= 0.0) {
        return Err(Error::Parameter(
            "sweep deltas must be positive (states exist above the threshold only)".into(),
        ));
    }
    let mesh = match domain {
        "segment" => Mesh::segment(0.0, 1.0, n_elem)?,
        "rect" => Mesh::rectangle(2.0, 1.0, nx, ny)?,
        other => {
            return Err(Error::Parameter(format!(
                "sweep_domain must be segment or rect, got '{other}'"
            )))
        }
    };
    let ops = Operators::new(mesh, degree, None, false)?;
    let model = EnergyModel::scaled_quartic();
    let pair = smallest_eigenpairs(&ops.stiffness, &ops.mass, 1)?.remove(0);
    let rho = pair.rho;
    let peak = pair.v.iter().fold(0.0f64, |m, &v| m.max(v.abs()));

    let mut states = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let inv_eps2 = rho * (1.0 + delta);
        let eps = 1.0 / inv_eps2.sqrt();
        let gap = inv_eps2 - rho;
        // seed at the predicted attractor amplitude 2 eps/sqrt(3) sqrt(gap)
        let amp = 2.0 * eps / 3f64.sqrt() * gap.sqrt();
        let u0: Vec<f64> = pair.v.iter().map(|&v| amp * v / peak).collect();
        let mut cfg = SolverConfig::new(tau0, eps * eps);
        cfg.steady_tol = 1e-9;
        cfg.krylov_tol = 1e-12;
        let initial = initialize_state(u0, 0.0, &cfg, &model, &ops)?;
        let state = find_stationary(initial, &cfg, &model, &ops, 5000)?;
        let final_amp = state.u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if final_amp < 0.05 * amp {
            return Err(Error::Numeric(format!(
                "sweep state at eps = {eps:.6} collapsed to the trivial solution"
            )));
        }
        states.push((eps, state.u));
    }
    Ok((SweepSetup { ops, model, pair }, states))
}

/// Stationary-state sweep around the first bifurcation with the amplitude
/// and exponent fits; writes sweep.csv and fit.csv.
pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let deltas = cfg.f64_list("sweep_deltas")?;
    let (setup, states) = sweep_states(
        cfg.str("sweep_domain"),
        cfg.usize("sweep_degree")?,
        cfg.usize("sweep_n_elem")?,
        cfg.usize("sweep_nx")?,
        cfg.usize("sweep_ny")?,
        &deltas,
        cfg.f64("sweep_tau0")?,
    )?;
    let fit = fit_bifurcation(&states, &setup.pair, &setup.ops.mass)?;
    let rho = setup.pair.rho;

    let mut rows = Vec::new();
    for (k, (eps, _)) in states.iter().enumerate() {
        rows.push(vec![
            output::fmt(*eps),
            output::fmt(1.0 / (eps * eps) - rho),
            output::fmt(fit.param(&format!("c_eps_{k}")).unwrap_or(f64::NAN)),
            output::fmt(fit.param(&format!("r_eps_{k}")).unwrap_or(f64::NAN)),
        ]);
    }
    output::write_csv(&out_dir.join("sweep.csv"), "eps,gap,c_eps,l2_diff", &rows)?;

    let fit_rows: Vec<Vec<String>> = fit
        .params
        .iter()
        .filter(|(name, _)| !name.starts_with("c_eps_") && !name.starts_with("r_eps_"))
        .map(|(name, value)| vec![name.clone(), output::fmt(*value)])
        .collect();
    output::write_csv(&out_dir.join("fit.csv"), "param,value", &fit_rows)?;
    Ok(())
}
