//! The free-energy density family: logarithmic, scaled quartic, and the
//! even polynomial expansions of the logarithm, with their derivatives,
//! binodal/spinodal solvers, and the stationary tanh profile.
//!
//! Physical constants N_m k_B are normalized to 1 throughout.

use crate::{Error, Result};

/// Margin below the logarithmic singularities at u = +-1 within which a
/// field is treated as inadmissible. The solution is expected to stay
/// well inside (-1, 1); a violation signals a solver bug.
pub const LOG_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// f = T_c (1-u^2)/2 + T [ (1+u)/2 ln((1+u)/2) + (1-u)/2 ln((1-u)/2) ]
    Logarithmic,
    /// f = (1-u^2)^2 / 4, the classic double well with unit coefficients
    ScaledQuartic,
    /// 2n-th order expansion of the logarithmic density, shifted so that
    /// f vanishes at its binodal points
    Taylor(usize),
}

/// A free-energy density f with derivative psi = f' and second derivative.
///
/// All kinds are even in u, so psi is odd; critical points come in
/// symmetric pairs. Pure value type: safe to share across threads.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    kind: ModelKind,
    temp: f64,
    temp_crit: f64,
    additive_const: f64,
}

/// Spinodal (roots of f'') and binodal (zeros of psi) points.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoints {
    pub spinodal: (f64, f64),
    pub binodal: (f64, f64),
}

impl EnergyModel {
    /// Logarithmic free energy at temperature `temp` with critical
    /// temperature `temp_crit`. `temp >= temp_crit` is permitted (single
    /// well); bifurcation analyses require `temp < temp_crit`.
    pub fn logarithmic(temp: f64, temp_crit: f64) -> Result<Self> {
        if temp <= 0.0 || temp_crit <= 0.0 {
            return Err(Error::Parameter(format!(
                "temperatures must be positive, got T={temp}, T_c={temp_crit}"
            )));
        }
        Ok(EnergyModel {
            kind: ModelKind::Logarithmic,
            temp,
            temp_crit,
            additive_const: 0.0,
        })
    }

    /// The classic quartic double well with unit coefficients,
    /// psi(u) = u^3 - u exactly.
    pub fn scaled_quartic() -> Self {
        EnergyModel {
            kind: ModelKind::ScaledQuartic,
            temp: f64::NAN,
            temp_crit: f64::NAN,
            additive_const: 0.0,
        }
    }

    /// 2n-th order polynomial expansion of the logarithmic density.
    /// The additive constant is chosen so that f vanishes at the model's
    /// own binodal points; this requires `temp < temp_crit`.
    pub fn taylor(n: usize, temp: f64, temp_crit: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("expansion order n must be >= 2, got {n}")));
        }
        if temp <= 0.0 || !(temp < temp_crit) {
            return Err(Error::Parameter(format!(
                "need 0 < T < T_c for a double well, got T={temp}, T_c={temp_crit}"
            )));
        }
        let mut model = EnergyModel {
            kind: ModelKind::Taylor(n),
            temp,
            temp_crit,
            additive_const: 0.0,
        };
        let beta = model.critical_points()?.binodal.1;
        model.additive_const = -model.f_unchecked(beta);
        Ok(model)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn temp(&self) -> f64 {
        self.temp
    }

    pub fn temp_crit(&self) -> f64 {
        self.temp_crit
    }

    /// The additive constant K of a Taylor-expanded model (0 otherwise).
    pub fn additive_const(&self) -> f64 {
        self.additive_const
    }

    pub fn is_admissible(&self, u: f64) -> bool {
        match self.kind {
            ModelKind::Logarithmic => u.abs() < 1.0 - LOG_GUARD,
            _ => u.is_finite(),
        }
    }

    fn check(&self, u: f64) -> Result<()> {
        if self.is_admissible(u) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "u = {u} outside the admissible set of the {:?} model",
                self.kind
            )))
        }
    }

    /// Free-energy density f(u).
    pub fn f(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok(self.f_unchecked(u))
    }

    /// psi = f'.
    pub fn psi(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok(self.psi_unchecked(u))
    }

    /// psi' = f''.
    pub fn dpsi(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok(self.dpsi_unchecked(u))
    }

    pub(crate) fn f_unchecked(&self, u: f64) -> f64 {
        match self.kind {
            ModelKind::Logarithmic => {
                let entropy = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
                self.temp_crit * (1.0 - u * u) / 2.0
                    + self.temp * (entropy((1.0 + u) / 2.0) + entropy((1.0 - u) / 2.0))
            }
            ModelKind::ScaledQuartic => {
                let w = 1.0 - u * u;
                0.25 * w * w
            }
            ModelKind::Taylor(n) => {
                // sum_{p=1..n} u^{2p} / (2p (2p-1)), by Horner in u^2
                let u2 = u * u;
                let mut s = 0.0;
                for p in (1..=n).rev() {
                    s = u2 * (1.0 / ((2 * p) as f64 * (2 * p - 1) as f64) + s);
                }
                self.temp_crit * (1.0 - u2) / 2.0
                    + self.temp * (s - std::f64::consts::LN_2)
                    + self.additive_const
            }
        }
    }

    pub(crate) fn psi_unchecked(&self, u: f64) -> f64 {
        match self.kind {
            ModelKind::Logarithmic => -self.temp_crit * u + self.temp * u.atanh(),
            ModelKind::ScaledQuartic => u * u * u - u,
            ModelKind::Taylor(n) => {
                // sum_{p=1..n} u^{2p-1} / (2p-1)
                let u2 = u * u;
                let mut s = 0.0;
                for p in (1..=n).rev() {
                    s = u2 * s + 1.0 / (2 * p - 1) as f64;
                }
                -self.temp_crit * u + self.temp * u * s
            }
        }
    }

    pub(crate) fn dpsi_unchecked(&self, u: f64) -> f64 {
        match self.kind {
            ModelKind::Logarithmic => -self.temp_crit + self.temp / (1.0 - u * u),
            ModelKind::ScaledQuartic => 3.0 * u * u - 1.0,
            ModelKind::Taylor(n) => {
                let u2 = u * u;
                let mut s = 0.0;
                for _ in 1..=n {
                    s = u2 * s + 1.0;
                }
                -self.temp_crit + self.temp * s
            }
        }
    }

    /// Spinodal and binodal points, each found to ~1e-12 by bracketed
    /// bisection plus Newton polish. Requires a double well (T < T_c for
    /// the temperature-dependent kinds).
    pub fn critical_points(&self) -> Result<CriticalPoints> {
        let upper = match self.kind {
            ModelKind::Logarithmic => 1.0 - LOG_GUARD,
            _ => {
                if !matches!(self.kind, ModelKind::ScaledQuartic) && !(self.temp < self.temp_crit) {
                    return Err(Error::Parameter(
                        "critical points require T < T_c".into(),
                    ));
                }
                f64::INFINITY
            }
        };
        if matches!(self.kind, ModelKind::Logarithmic) && !(self.temp < self.temp_crit) {
            return Err(Error::Parameter("critical points require T < T_c".into()));
        }
        // spinodal: positive root of psi' (negative at 0, eventually positive)
        let sigma = positive_root(
            |u| self.dpsi_unchecked(u),
            |u| self.d2psi_unchecked(u),
            0.0,
            upper,
        )?;
        // binodal: positive root of psi above the spinodal
        let beta = positive_root(
            |u| self.psi_unchecked(u),
            |u| self.dpsi_unchecked(u),
            sigma,
            upper,
        )?;
        Ok(CriticalPoints {
            spinodal: (-sigma, sigma),
            binodal: (-beta, beta),
        })
    }

    fn d2psi_unchecked(&self, u: f64) -> f64 {
        match self.kind {
            ModelKind::Logarithmic => {
                let w = 1.0 - u * u;
                2.0 * self.temp * u / (w * w)
            }
            ModelKind::ScaledQuartic => 6.0 * u,
            ModelKind::Taylor(n) => {
                let u2 = u * u;
                let mut s = 0.0;
                for p in (2..=n).rev() {
                    s = u2 * s + (2 * p - 2) as f64;
                }
                self.temp * u * s
            }
        }
    }
}

/// Positive root of g on (lo, hi): bracket (growing the upper end when it
/// is unbounded), bisect to ~1e-13 relative, then two Newton steps.
fn positive_root(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let eps_lo = if lo == 0.0 { 1e-12 } else { lo * (1.0 + 1e-9) };
    let mut a = eps_lo;
    let ga = g(a);
    if ga >= 0.0 {
        return Err(Error::Numeric(format!(
            "root bracketing failed: g({a}) = {ga} is not negative"
        )));
    }
    let mut b;
    if hi.is_finite() {
        b = hi;
        if g(b) <= 0.0 {
            return Err(Error::Numeric("root bracketing failed at upper bound".into()));
        }
    } else {
        b = (2.0 * a).max(1.0);
        let mut tries = 0;
        while g(b) <= 0.0 {
            b *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::Numeric("no sign change found while growing bracket".into()));
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if (b - a) <= 1e-13 * b.abs().max(1.0) {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let d = dg(x);
        if d != 0.0 {
            let step = g(x) / d;
            let next = x - step;
            if next > eps_lo && next < b * (1.0 + 1e-9) {
                x = next;
            }
        }
    }
    Ok(x)
}

/// The explicit stationary interface profile u(x) = u_plus tanh(x mu) of
/// the quartic model on the line, with
/// u_plus = sqrt(3 (T_c/T - 1)) and mu = sqrt(T_c - T) / (eps sqrt(2)).
#[derive(Debug, Clone, Copy)]
pub struct TanhProfile {
    pub u_plus: f64,
    pub mu: f64,
}

impl TanhProfile {
    pub fn new(temp: f64, temp_crit: f64, eps: f64) -> Result<Self> {
        if !(temp > 0.0 && temp < temp_crit) || eps <= 0.0 {
            return Err(Error::Parameter(format!(
                "tanh profile needs 0 < T < T_c and eps > 0, got T={temp}, T_c={temp_crit}, eps={eps}"
            )));
        }
        Ok(TanhProfile {
            u_plus: (3.0 * (temp_crit / temp - 1.0)).sqrt(),
            mu: (temp_crit - temp).sqrt() / (eps * std::f64::consts::SQRT_2),
        })
    }

    /// Profile value at x (interface centered at 0).
    pub fn value(&self, x: f64) -> f64 {
        self.u_plus * (x * self.mu).tanh()
    }

    /// Characteristic interface length 2 u_plus / u'(0) = 2 / mu.
    pub fn interface_length(&self) -> f64 {
        2.0 / self.mu
    }
}

/// Interface length ell = 2 eps sqrt(2) / sqrt(T_c - T).
pub fn interface_length(temp: f64, temp_crit: f64, eps: f64) -> Result<f64> {
    if !(temp > 0.0 && temp < temp_crit) || eps <= 0.0 {
        return Err(Error::Parameter(
            "interface length needs 0 < T < T_c and eps > 0".into(),
        ));
    }
    Ok(2.0 * eps * std::f64::consts::SQRT_2 / (temp_crit - temp).sqrt())
}

/// The Cahn-Hilliard length parameter lambda = 2 eps sqrt(2) / sqrt(T_c),
/// so that ell = lambda / sqrt(1 - T/T_c).
pub fn lambda_param(temp_crit: f64, eps: f64) -> Result<f64> {
    if temp_crit <= 0.0 || eps <= 0.0 {
        return Err(Error::Parameter("lambda needs T_c > 0 and eps > 0".into()));
    }
    Ok(2.0 * eps * std::f64::consts::SQRT_2 / temp_crit.sqrt())
}
