//! Flat key=value run configuration with defaults, file loading, and
//! command-line overrides. Unknown keys are rejected so typos surface as
//! configuration errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chpfem::energy::EnergyModel;
use chpfem::mesh::Mesh;
use chpfem::solver::SolverConfig;
use chpfem::{Error, Result};

const DEFAULTS: &[(&str, &str, &str)] = &[
    // domain
    ("domain", "segment", "segment | rect | file"),
    ("a", "0", "segment start"),
    ("b", "1", "segment end"),
    ("n_elem", "100", "segment element count"),
    ("lx", "1", "rectangle width"),
    ("ly", "1", "rectangle height"),
    ("nx", "12", "rectangle elements along x"),
    ("ny", "12", "rectangle elements along y"),
    ("mesh_file", "", "quad mesh path (domain = file)"),
    ("degree", "3", "element degree 1..10"),
    ("quad_order", "0", "quadrature points per direction (0 = degree+2)"),
    // free-energy model
    ("model", "scaled_quartic", "scaled_quartic | logarithmic | taylor"),
    ("taylor_n", "2", "half-order n of the 2n-th degree expansion"),
    ("temp", "1", "temperature T"),
    ("temp_crit", "2", "critical temperature T_c"),
    // dynamics
    ("eps2", "0.07", "squared interface parameter eps^2"),
    ("tau", "1e-5", "time step"),
    ("t_end", "0.01", "final time"),
    ("max_steps", "100000", "step limit"),
    ("seed", "1", "RNG seed"),
    // solver
    ("newton_tol", "0", "Newton residual tolerance (0 = 1e-10 sqrt(2n))"),
    ("newton_max", "30", "max Newton iterations per step"),
    ("krylov_tol", "1e-11", "BiCGStab relative tolerance"),
    ("krylov_max", "0", "BiCGStab iteration cap (0 = auto)"),
    ("steady_tol", "1e-8", "stationarity threshold on |du|/tau"),
    ("mass_lumping", "false", "use the row-sum lumped mass matrix"),
    ("jacobi_scaling", "false", "diagonally scale the Newton systems"),
    // initial condition
    ("initial", "random", "random | modes | cross | file"),
    ("amplitude", "0.05", "initial-condition amplitude"),
    ("mode_combo", "1", "comma-separated mode coefficients"),
    ("ic_file", "", "nodal values, one per line (initial = file)"),
    // output
    ("snapshot_every", "0", "snapshot cadence in steps (0 = final only)"),
    // eigen command
    ("eigen_count", "3", "number of eigenpairs"),
    // critical command
    ("critical_n_min", "2", "smallest expansion half-order"),
    ("critical_n_max", "8", "largest expansion half-order"),
    // convergence command
    ("conv_degrees", "1,2,3,4,5", "degrees for the convergence study"),
    (
        "conv_complexities",
        "60,90,132,180,252,360,504,630",
        "complexity levels (degree x elements)",
    ),
    ("conv_mu", "25", "interface slope of the benchmark profile"),
    // sweep command
    ("sweep_domain", "segment", "segment | rect"),
    (
        "sweep_deltas",
        "0.02,0.035,0.06,0.1,0.18,0.3",
        "relative gaps (1/eps^2 - rho)/rho",
    ),
    ("sweep_degree", "3", "element degree for the sweep"),
    ("sweep_n_elem", "16", "segment elements for the sweep"),
    ("sweep_nx", "12", "rectangle elements along x"),
    ("sweep_ny", "6", "rectangle elements along y"),
    ("sweep_tau0", "0.05", "initial pseudo-transient step"),
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            values: DEFAULTS
                .iter()
                .map(|(k, v, _)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::Parameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg = RunConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: format!("expected key = value, got '{line}'"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !self.values.contains_key(key) {
            return Err(Error::Parameter(format!("unknown config key '{key}'")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn apply_overrides(&mut self, pairs: &[String]) -> Result<()> {
        for pair in pairs {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                Error::Parameter(format!("--set expects key=value, got '{pair}'"))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (key, default, help) in DEFAULTS {
            let value = &self.values[*key];
            let marker = if value == default { "" } else { "   # (set)" };
            out.push_str(&format!("{key} = {value}{marker}   # {help}\n"));
        }
        out
    }

    pub fn str(&self, key: &str) -> &str {
        &self.values[key]
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.values[key]
            .parse()
            .map_err(|e| Error::Parameter(format!("config key '{key}': {e}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.values[key]
            .parse()
            .map_err(|e| Error::Parameter(format!("config key '{key}': {e}")))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.values[key]
            .parse()
            .map_err(|e| Error::Parameter(format!("config key '{key}': {e}")))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.values[key].as_str() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(Error::Parameter(format!(
                "config key '{key}' must be a boolean, got '{other}'"
            ))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.values[key].trim();
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|e| Error::Parameter(format!("config key '{key}': {e}")))
            })
            .collect()
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        let raw = self.values[key].trim();
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|e| Error::Parameter(format!("config key '{key}': {e}")))
            })
            .collect()
    }

    /// Build the mesh described by the domain keys.
    pub fn build_mesh(&self) -> Result<Mesh> {
        match self.str("domain") {
            "segment" => Mesh::segment(self.f64("a")?, self.f64("b")?, self.usize("n_elem")?),
            "rect" => Mesh::rectangle(
                self.f64("lx")?,
                self.f64("ly")?,
                self.usize("nx")?,
                self.usize("ny")?,
            ),
            "file" => {
                let path = self.str("mesh_file");
                if path.is_empty() {
                    return Err(Error::Parameter(
                        "domain = file requires mesh_file".into(),
                    ));
                }
                let file = fs::File::open(path).map_err(|e| {
                    Error::Parameter(format!("cannot open mesh file {path}: {e}"))
                })?;
                Mesh::import_quads(std::io::BufReader::new(file))
            }
            other => Err(Error::Parameter(format!(
                "domain must be segment, rect, or file, got '{other}'"
            ))),
        }
    }

    /// Build the configured free-energy model, with cross-field checks.
    pub fn build_model(&self) -> Result<EnergyModel> {
        let model = match self.str("model") {
            "scaled_quartic" => EnergyModel::scaled_quartic(),
            "logarithmic" => EnergyModel::logarithmic(self.f64("temp")?, self.f64("temp_crit")?)?,
            "taylor" => EnergyModel::taylor(
                self.usize("taylor_n")?,
                self.f64("temp")?,
                self.f64("temp_crit")?,
            )?,
            other => {
                return Err(Error::Parameter(format!(
                    "model must be scaled_quartic, logarithmic, or taylor, got '{other}'"
                )))
            }
        };
        if self.str("model") == "logarithmic"
            && self.str("initial") == "random"
            && self.f64("amplitude")? >= 1.0
        {
            return Err(Error::Parameter(
                "logarithmic model requires initial amplitude < 1".into(),
            ));
        }
        Ok(model)
    }

    pub fn quad_order(&self) -> Result<Option<usize>> {
        let q = self.usize("quad_order")?;
        Ok(if q == 0 { None } else { Some(q) })
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.f64("tau")?, self.f64("eps2")?);
        cfg.newton_tol = self.f64("newton_tol")?;
        cfg.newton_max = self.usize("newton_max")?;
        cfg.krylov_tol = self.f64("krylov_tol")?;
        cfg.krylov_max = self.usize("krylov_max")?;
        cfg.steady_tol = self.f64("steady_tol")?;
        cfg.mass_lumping = self.bool("mass_lumping")?;
        cfg.jacobi_scaling = self.bool("jacobi_scaling")?;
        cfg.validate()?;
        Ok(cfg)
    }
}
