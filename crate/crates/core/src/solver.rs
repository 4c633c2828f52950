//! Backward-Euler time stepping for the mixed system
//!
//! ```text
//! tau A w_{n+1} + M u_{n+1}                       = M u_n
//! M w_{n+1} - eps2 A u_{n+1} - <psi(u_h), phi_i>  = 0
//! ```
//!
//! solved at each step by Newton iteration on the stacked (w, u) unknowns;
//! the linearized block system is handled by BiCGStab. Multiplying the
//! first block row by the all-ones vector shows that every Newton iterate
//! conserves the discrete mass 1^T M u up to the Krylov tolerance.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::assembly;
use crate::diagnostics::total_energy;
use crate::energy::EnergyModel;
use crate::linalg::{bicgstab, norm2, BlockOperator, CsrMatrix};
use crate::mesh::{DofMap, Mesh};
use crate::ref_element::BasisTable;
use crate::{Error, Result};

/// Coefficient vectors of the order parameter and chemical potential at
/// one time level.
#[derive(Debug, Clone)]
pub struct State {
    pub t: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

/// Time-step and solver tolerances.
///
/// A zero `newton_tol` or `krylov_max` selects the size-dependent
/// defaults 1e-10 sqrt(2 n) and 20 * 2n at solve time.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub tau: f64,
    /// eps^2, twice the gradient coefficient kappa
    pub eps2: f64,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub krylov_tol: f64,
    pub krylov_max: usize,
    pub steady_tol: f64,
    pub mass_lumping: bool,
    /// diagonally scale the Newton block system before BiCGStab
    pub jacobi_scaling: bool,
}

impl SolverConfig {
    pub fn new(tau: f64, eps2: f64) -> Self {
        SolverConfig {
            tau,
            eps2,
            newton_tol: 0.0,
            newton_max: 30,
            krylov_tol: 1e-11,
            krylov_max: 0,
            steady_tol: 1e-8,
            mass_lumping: false,
            jacobi_scaling: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau <= 0.0 || self.eps2 <= 0.0 {
            return Err(Error::Parameter(format!(
                "tau and eps2 must be positive, got tau={}, eps2={}",
                self.tau, self.eps2
            )));
        }
        if self.newton_tol < 0.0 || self.krylov_tol <= 0.0 || self.steady_tol <= 0.0 {
            return Err(Error::Parameter("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn newton_tol_for(&self, n: usize) -> f64 {
        if self.newton_tol > 0.0 {
            self.newton_tol
        } else {
            1e-10 * ((2 * n) as f64).sqrt()
        }
    }

    fn krylov_max_for(&self, n: usize) -> usize {
        if self.krylov_max > 0 {
            self.krylov_max
        } else {
            (40 * n).max(6000)
        }
    }
}

/// Mesh, DoF numbering, reference element, and the assembled constant
/// operators A and M shared by every step.
#[derive(Debug)]
pub struct Operators {
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub basis: BasisTable,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    /// M applied to the all-ones vector
    m_ones: Vec<f64>,
    measure: f64,
}

impl Operators {
    /// Assemble A and M for a mesh at a given degree. `quad_order` of
    /// `None` selects degree + 2 points per direction; `lumped` switches
    /// the mass matrix to its row-sum-lumped variant.
    pub fn new(mesh: Mesh, degree: usize, quad_order: Option<usize>, lumped: bool) -> Result<Self> {
        let basis = match quad_order {
            Some(q) => BasisTable::build(degree, mesh.dim(), q)?,
            None => BasisTable::with_default_quadrature(degree, mesh.dim())?,
        };
        let dofs = DofMap::build(&mesh, degree)?;
        let stiffness = assembly::stiffness(&mesh, &dofs, &basis)?;
        let mass = assembly::mass(&mesh, &dofs, &basis, lumped)?;
        let ones = vec![1.0; dofs.n_dofs()];
        let m_ones = mass.apply(&ones);
        let measure = m_ones.iter().sum();
        Ok(Operators {
            mesh,
            dofs,
            basis,
            stiffness,
            mass,
            m_ones,
            measure,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.n_dofs()
    }

    pub fn domain_measure(&self) -> f64 {
        self.measure
    }

    /// Discrete mass 1^T M u.
    pub fn mass_of(&self, u: &[f64]) -> f64 {
        crate::linalg::dot(&self.m_ones, u)
    }

    /// Subtract the mean so that 1^T M u = 0.
    pub fn project_zero_mean(&self, u: &mut [f64]) {
        let mean = self.mass_of(u) / self.measure;
        for v in u.iter_mut() {
            *v -= mean;
        }
    }

    pub fn energy(&self, u: &[f64], model: &EnergyModel, eps2: f64) -> Result<f64> {
        total_energy(u, model, eps2, &self.mesh, &self.dofs, &self.basis)
    }
}

/// Per-step solver record.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub newton_iters: usize,
    pub krylov_iters: usize,
    pub residual: f64,
    pub tau_used: f64,
    pub energy: f64,
    pub mass: f64,
}

/// Uniform nodal values in [-amplitude, amplitude], seeded.
pub fn random_nodal_field(n: usize, amplitude: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-amplitude..amplitude)).collect()
}

/// Build a State at time t with the chemical potential consistent with u:
/// solve M w = eps2 A u + <psi(u_h), phi_i>.
pub fn initialize_state(
    u: Vec<f64>,
    t: f64,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
) -> Result<State> {
    let n = ops.n_dofs();
    if u.len() != n {
        return Err(Error::Parameter(format!(
            "initial field has {} entries for {} dofs",
            u.len(),
            n
        )));
    }
    let mut rhs = assembly::nonlinear_load(&u, model, &ops.mesh, &ops.dofs, &ops.basis)?;
    ops.stiffness.matvec_add(cfg.eps2, &u, &mut rhs);
    let (w, _) = bicgstab(&ops.mass, &rhs, 1e-13, cfg.krylov_max_for(n))?;
    Ok(State { t, u, w })
}

/// Residual of the backward-Euler system at `next` given `prev`:
/// (tau A w + M u - M u_prev ; M w - eps2 A u - N(u)), stacked.
pub fn residual(
    next: &State,
    prev: &State,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
) -> Result<Vec<f64>> {
    residual_with_tau(next, prev, cfg.tau, cfg, model, ops)
}

fn residual_with_tau(
    next: &State,
    prev: &State,
    tau: f64,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
) -> Result<Vec<f64>> {
    let n = ops.n_dofs();
    let mut r = vec![0.0; 2 * n];
    {
        let (r1, r2) = r.split_at_mut(n);
        // r1 = tau A w + M u - M u_prev
        ops.stiffness.matvec(&next.w, r1);
        for v in r1.iter_mut() {
            *v *= tau;
        }
        ops.mass.matvec_add(1.0, &next.u, r1);
        ops.mass.matvec_add(-1.0, &prev.u, r1);
        // r2 = M w - eps2 A u - N(u)
        ops.mass.matvec(&next.w, r2);
        ops.stiffness.matvec_add(-cfg.eps2, &next.u, r2);
    }
    let load = assembly::nonlinear_load(&next.u, model, &ops.mesh, &ops.dofs, &ops.basis)?;
    for i in 0..n {
        r[n + i] -= load[i];
    }
    Ok(r)
}

/// One Newton update of the backward-Euler system; returns the new state
/// and the residual norm at the new state.
pub fn newton_step(
    guess: &State,
    prev: &State,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
) -> Result<(State, f64)> {
    let (state, res, _) = newton_step_inner(guess, prev, cfg.tau, cfg, model, ops)?;
    Ok((state, res))
}

fn newton_step_inner(
    guess: &State,
    prev: &State,
    tau: f64,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
) -> Result<(State, f64, usize)> {
    let n = ops.n_dofs();
    let r = residual_with_tau(guess, prev, tau, cfg, model, ops)?;
    let jac = assembly::nonlinear_jacobian(&guess.u, model, &ops.mesh, &ops.dofs, &ops.basis)?;
    let op = BlockOperator {
        stiffness: &ops.stiffness,
        mass: &ops.mass,
        nonlinear_jacobian: Some(&jac),
        tau,
        eps2: cfg.eps2,
    };
    let kmax = cfg.krylov_max_for(n);
    let solve = |scaling: bool| -> Result<(Vec<f64>, usize)> {
        if scaling {
            let diag: Vec<f64> = block_abs_diagonal(&op, &jac, ops);
            let scaled = crate::linalg::JacobiScaledOp::new(&op, &diag);
            let rs = scaled.scale_rhs(&r);
            let (y, iters) = bicgstab(&scaled, &rs, cfg.krylov_tol, kmax)?;
            Ok((scaled.unscale_solution(&y), iters))
        } else {
            bicgstab(&op, &r, cfg.krylov_tol, kmax)
        }
    };
    // BiCGStab on the symmetric indefinite block system occasionally
    // stalls in one conditioning; retry once with the other before failing
    let (d, iters) = match solve(cfg.jacobi_scaling) {
        Ok(ok) => ok,
        Err(first) => solve(!cfg.jacobi_scaling).map_err(|_| first)?,
    };
    let mut next = State {
        t: guess.t,
        u: guess.u.clone(),
        w: guess.w.clone(),
    };
    for i in 0..n {
        next.w[i] -= d[i];
        next.u[i] -= d[n + i];
    }
    let rn = residual_with_tau(&next, prev, tau, cfg, model, ops)?;
    Ok((next, norm2(&rn), iters))
}

/// Positive diagonal for Jacobi scaling of the block system. Magnitudes
/// are summed so the scale stays away from zero where eps2 A_ii and the
/// nonlinear block diagonal cancel.
fn block_abs_diagonal(op: &BlockOperator, jac: &CsrMatrix, ops: &Operators) -> Vec<f64> {
    let n = ops.n_dofs();
    let da = ops.stiffness.diagonal();
    let dm = ops.mass.diagonal();
    let dj = jac.diagonal();
    let mut diag = Vec::with_capacity(2 * n);
    for i in 0..n {
        diag.push((op.tau * da[i]).abs() + dm[i]);
    }
    for i in 0..n {
        diag.push(dm[i] + op.eps2 * da[i] + dj[i].abs());
    }
    diag
}

/// Advance one backward-Euler step. On Newton failure the step is retried
/// with tau halved, up to 4 times; the stats record the tau actually used.
pub fn advance(
    state: &State,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
) -> Result<(State, StepStats)> {
    cfg.validate()?;
    let n = ops.n_dofs();
    let tol = cfg.newton_tol_for(n);
    let mut tau = cfg.tau;
    let mut last_err: Option<Error> = None;
    for _attempt in 0..=4 {
        match try_step(state, tau, tol, cfg, model, ops) {
            Ok((next, newton_iters, krylov_iters, res)) => {
                let energy = ops.energy(&next.u, model, cfg.eps2)?;
                let mass = ops.mass_of(&next.u);
                return Ok((
                    next,
                    StepStats {
                        newton_iters,
                        krylov_iters,
                        residual: res,
                        tau_used: tau,
                        energy,
                        mass,
                    },
                ));
            }
            Err(e) => {
                last_err = Some(e);
                tau *= 0.5;
            }
        }
    }
    Err(Error::Numeric(format!(
        "step failed after 4 tau-halving retries (t = {}): {}",
        state.t,
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn try_step(
    state: &State,
    tau: f64,
    tol: f64,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
) -> Result<(State, usize, usize, f64)> {
    let r0 = residual_with_tau(state, state, tau, cfg, model, ops)?;
    let mut res = norm2(&r0);
    let mut current = state.clone();
    let mut krylov_total = 0;
    let mut newton_iters = 0;
    while res > tol {
        if newton_iters >= cfg.newton_max {
            return Err(Error::Numeric(format!(
                "Newton stalled at residual {res:.3e} after {newton_iters} iterations"
            )));
        }
        let (next, rn, kiters) = newton_step_inner(&current, state, tau, cfg, model, ops)?;
        current = next;
        res = rn;
        krylov_total += kiters;
        newton_iters += 1;
    }
    current.t = state.t + tau;
    Ok((current, newton_iters, krylov_total, res))
}

/// Output schedule and step limits for [`evolve`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub max_steps: usize,
    /// keep every k-th state (0 = none); the initial and final states are
    /// always included when nonzero
    pub snapshot_every: usize,
}

/// One diagnostics row per accepted step (step 0 is the initial state).
#[derive(Debug, Clone, Copy)]
pub struct DiagRow {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub mass: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub newton_iters: usize,
    pub krylov_iters: usize,
}

#[derive(Debug)]
pub struct Trajectory {
    pub rows: Vec<DiagRow>,
    pub snapshots: Vec<State>,
    pub final_state: State,
    pub reached_steady: bool,
}

fn diag_row(step: usize, state: &State, stats: Option<&StepStats>, energy: f64, mass: f64) -> DiagRow {
    let (min_u, max_u) = state
        .u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    DiagRow {
        step,
        t: state.t,
        energy,
        mass,
        min_u,
        max_u,
        newton_iters: stats.map_or(0, |s| s.newton_iters),
        krylov_iters: stats.map_or(0, |s| s.krylov_iters),
    }
}

/// Run the fixed-step evolution until `t_end`, stationarity
/// (||u_{n+1} - u_n|| / tau < steady_tol), or `max_steps`.
pub fn evolve(
    initial: State,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut snapshots = Vec::new();
    let e0 = ops.energy(&initial.u, model, cfg.eps2)?;
    let m0 = ops.mass_of(&initial.u);
    rows.push(diag_row(0, &initial, None, e0, m0));
    if opts.snapshot_every > 0 {
        snapshots.push(initial.clone());
    }
    let mut state = initial;
    let mut reached_steady = false;
    let mut step = 0;
    while state.t < opts.t_end && step < opts.max_steps {
        let (next, stats) = advance(&state, cfg, model, ops)?;
        step += 1;
        rows.push(diag_row(step, &next, Some(&stats), stats.energy, stats.mass));
        if opts.snapshot_every > 0 && step % opts.snapshot_every == 0 {
            snapshots.push(next.clone());
        }
        let mut du = 0.0;
        for i in 0..state.u.len() {
            let d = next.u[i] - state.u[i];
            du += d * d;
        }
        let rate = du.sqrt() / stats.tau_used;
        state = next;
        if rate < cfg.steady_tol {
            reached_steady = true;
            break;
        }
    }
    if opts.snapshot_every > 0
        && !snapshots
            .last()
            .map(|s| (s.t - state.t).abs() < 1e-300)
            .unwrap_or(false)
    {
        snapshots.push(state.clone());
    }
    Ok(Trajectory {
        rows,
        snapshots,
        final_state: state,
        reached_steady,
    })
}

/// Evolve to a stationary state with pseudo-transient step growth: tau
/// doubles after easy steps, and a step that raises the energy beyond
/// rounding is rejected and redone with tau halved. Certifies the
/// stationary defect ||A w|| at the returned state.
///
/// The grown-tau block systems are badly scaled, so the Krylov solves
/// here always run diagonally scaled.
pub fn find_stationary(
    initial: State,
    cfg: &SolverConfig,
    model: &EnergyModel,
    ops: &Operators,
    max_steps: usize,
) -> Result<State> {
    cfg.validate()?;
    let tau_floor = cfg.tau / 256.0;
    let tau_cap = cfg.tau * 2f64.powi(16);
    let mut tau = cfg.tau;
    let mut state = initial;
    let mut energy = ops.energy(&state.u, model, cfg.eps2)?;
    let mut steady = false;
    let mut local = cfg.clone();
    local.jacobi_scaling = true;
    let mut hard_failures = 0;
    for _ in 0..max_steps {
        local.tau = tau;
        let (next, stats) = match advance(&state, &local, model, ops) {
            Ok(ok) => ok,
            Err(e) => {
                // the grown tau outran the Krylov solver; back off and retry
                hard_failures += 1;
                if tau <= tau_floor || hard_failures > 8 {
                    return Err(e);
                }
                tau = (tau / 32.0).max(tau_floor);
                continue;
            }
        };
        if stats.energy > energy + 1e-12 * energy.abs() {
            if tau <= tau_floor {
                return Err(Error::Numeric(format!(
                    "energy increased by {:.3e} at the smallest step size",
                    stats.energy - energy
                )));
            }
            tau = (tau * 0.25).max(tau_floor);
            continue; // redo from the same state
        }
        let mut du = 0.0;
        for i in 0..state.u.len() {
            let d = next.u[i] - state.u[i];
            du += d * d;
        }
        let rate = du.sqrt() / stats.tau_used;
        state = next;
        energy = stats.energy;
        if rate < cfg.steady_tol {
            steady = true;
            break;
        }
        // grow only while the linear solves stay affordable
        if stats.newton_iters <= 5
            && stats.krylov_iters <= 1200 * stats.newton_iters.max(1)
            && tau < tau_cap
        {
            tau *= 2.0;
        }
    }
    if !steady {
        return Err(Error::Numeric(format!(
            "no stationary state within {max_steps} steps (t = {})",
            state.t
        )));
    }
    // certify the stationary defect of the first equation, measured
    // relative to the stiffness scale
    let aw = ops.stiffness.apply(&state.w);
    let scale = ops.stiffness.max_abs().max(1.0) * (1.0 + norm2(&state.w));
    let defect = norm2(&aw) / scale;
    if defect > 1e3 * cfg.steady_tol {
        return Err(Error::Numeric(format!(
            "stationarity certificate failed: scaled ||A w|| = {defect:.3e}"
        )));
    }
    Ok(state)
}
