use std::path::Path;

use chpfem::diagnostics::{interface_slopes, l2_error, total_energy};
use chpfem::energy::{EnergyModel, TanhProfile};
use chpfem::mesh::Mesh;
use chpfem::ref_element::BasisTable;
use chpfem::solver::{find_stationary, initialize_state, Operators, SolverConfig};
use chpfem::{linalg, Error, Result};

use crate::config::RunConfig;
use crate::output;

/// One cell of the 1D stationary-profile benchmark: errors of the relaxed
/// discrete state against the explicit interface profile.
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkCase {
    pub degree: usize,
    pub n_elem: usize,
    pub n_dofs: usize,
    pub slope_error: f64,
    pub energy_error: f64,
    pub l2_error: f64,
}

/// Relax the interpolated tanh profile to the discrete stationary state on
/// [0, 1] (quartic expansion at T_c = 2, T = 1, interface slope mu) and
/// measure slope/energy/L2 errors against the explicit profile.
pub fn benchmark_case(degree: usize, n_elem: usize, mu: f64) -> Result<BenchmarkCase> {
    let (temp, temp_crit) = (1.0f64, 2.0f64);
    let eps = (temp_crit - temp).sqrt() / (mu * std::f64::consts::SQRT_2);
    let model = EnergyModel::taylor(2, temp, temp_crit)?;
    let profile = TanhProfile::new(temp, temp_crit, eps)?;

    let mesh = Mesh::segment(0.0, 1.0, n_elem)?;
    let ops = Operators::new(mesh, degree, None, false)?;
    let mut cfg = SolverConfig::new(1e-3, eps * eps);
    cfg.newton_tol = 1e-12 * (2.0 * ops.n_dofs() as f64).sqrt();
    cfg.krylov_tol = 1e-12;
    cfg.steady_tol = 1e-10;

    let u0: Vec<f64> = ops
        .dofs
        .dof_coords()
        .iter()
        .map(|c| profile.value(c[0] - 0.5))
        .collect();
    let initial = initialize_state(u0, 0.0, &cfg, &model, &ops)?;
    let state = find_stationary(initial, &cfg, &model, &ops, 2000)?;

    // measurement quadrature finer than the solve quadrature
    let fine = BasisTable::build(degree, 1, degree + 10)?;
    let l2 = l2_error(
        &state.u,
        &|x| profile.value(x[0] - 0.5),
        &ops.mesh,
        &ops.dofs,
        &fine,
    );
    let roots = interface_slopes(&state.u, &ops.mesh, &ops.dofs, &ops.basis)?;
    if roots.len() != 1 {
        return Err(Error::Shape(format!(
            "benchmark state has {} interfaces",
            roots.len()
        )));
    }
    let slope_error = (roots[0].1 - profile.u_plus * profile.mu).abs();
    // explicit profile energy: equipartition gives F = (4/3) eps^2 u_+^2 mu
    let exact_energy = 4.0 / 3.0 * eps * eps * profile.u_plus * profile.u_plus * profile.mu;
    let energy = total_energy(&state.u, &model, eps * eps, &ops.mesh, &ops.dofs, &fine)?;
    Ok(BenchmarkCase {
        degree,
        n_elem,
        n_dofs: ops.n_dofs(),
        slope_error,
        energy_error: (energy - exact_energy).abs(),
        l2_error: l2,
    })
}

/// Run the benchmark over (degree x complexity) cells, write the error
/// table, and fit per-degree L2 convergence orders.
pub fn cmd_convergence(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let degrees = cfg.usize_list("conv_degrees")?;
    let complexities = cfg.usize_list("conv_complexities")?;
    let mu = cfg.f64("conv_mu")?;
    if degrees.is_empty() {
        return Err(Error::Parameter("conv_degrees is empty".into()));
    }
    let mut rows = Vec::new();
    let mut order_rows = Vec::new();
    for &p in &degrees {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &c in &complexities {
            let n = (c as f64 / p as f64).round().max(2.0) as usize;
            let case = benchmark_case(p, n, mu)?;
            rows.push(vec![
                p.to_string(),
                n.to_string(),
                (p * n).to_string(),
                case.n_dofs.to_string(),
                output::fmt(case.slope_error),
                output::fmt(case.energy_error),
                output::fmt(case.l2_error),
            ]);
            xs.push((p * n) as f64);
            ys.push(case.l2_error);
        }
        let fit = linalg::loglog_regression(&xs, &ys)?;
        order_rows.push(vec![
            p.to_string(),
            output::fmt(-fit.slope),
            output::fmt(fit.r2),
        ]);
    }
    output::write_csv(
        &out_dir.join("convergence.csv"),
        "degree,n_elem,complexity,n_dofs,slope_error,energy_error,l2_error",
        &rows,
    )?;
    output::write_csv(&out_dir.join("orders.csv"), "degree,l2_order,r2", &order_rows)
}
