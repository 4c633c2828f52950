use std::path::Path;

use chpfem::energy::EnergyModel;
use chpfem::{Error, Result};

use crate::config::RunConfig;
use crate::output;

/// Spinodal/binodal points of the polynomial expansions against the
/// logarithmic reference, for n in [critical_n_min, critical_n_max].
pub fn cmd_critical(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let temp = cfg.f64("temp")?;
    let temp_crit = cfg.f64("temp_crit")?;
    let n_min = cfg.usize("critical_n_min")?;
    let n_max = cfg.usize("critical_n_max")?;
    if n_min < 2 || n_max < n_min {
        return Err(Error::Parameter(format!(
            "need 2 <= critical_n_min <= critical_n_max, got {n_min}..{n_max}"
        )));
    }
    let log_cp = EnergyModel::logarithmic(temp, temp_crit)?.critical_points()?;
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let cp = EnergyModel::taylor(n, temp, temp_crit)?.critical_points()?;
        rows.push(vec![
            n.to_string(),
            output::fmt(cp.spinodal.1),
            output::fmt(cp.binodal.1),
            output::fmt(log_cp.spinodal.1),
            output::fmt(log_cp.binodal.1),
            output::fmt(cp.spinodal.1 - log_cp.spinodal.1),
            output::fmt(cp.binodal.1 - log_cp.binodal.1),
        ]);
    }
    output::write_csv(
        &out_dir.join("critical_points.csv"),
        "n,sigma_taylor,beta_taylor,sigma_log,beta_log,err_sigma,err_beta",
        &rows,
    )
}
