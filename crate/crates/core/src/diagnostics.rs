//! Scalar and field diagnostics: total free energy, L2 errors against a
//! reference, tanh-profile fitting, interface location/slope extraction,
//! zero-level-set measurement, and the bifurcation amplitude fits.

use crate::eigen::EigenPair;
use crate::energy::EnergyModel;
use crate::linalg::{dot, loglog_regression, CsrMatrix};
use crate::mesh::{DofMap, Mesh};
use crate::ref_element::BasisTable;
use crate::{Error, Result};

/// Result of a least-squares fit: named parameters, the objective value at
/// the optimum, and the number of data points.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: Vec<(String, f64)>,
    pub residual: f64,
    pub n_points: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }
}

/// Total free energy of a field: integral of f(u_h) + (eps2/2) |grad u_h|^2.
pub fn total_energy(
    u: &[f64],
    model: &EnergyModel,
    eps2: f64,
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
) -> Result<f64> {
    let dim = mesh.dim();
    let n_loc = basis.n_nodes();
    let mut total = 0.0;
    for e in 0..mesh.n_elements() {
        let ids = dofs.global_ids(e);
        for q in 0..basis.n_quad() {
            let jac = mesh.jacobian(e, basis.quad_points()[q]);
            let w = basis.quad_weights()[q] * jac.det;
            let mut uq = 0.0;
            let mut gref = [0.0, 0.0];
            for i in 0..n_loc {
                uq += u[ids[i]] * basis.phi(q, i);
                gref[0] += u[ids[i]] * basis.dphi(q, i, 0);
                if dim == 2 {
                    gref[1] += u[ids[i]] * basis.dphi(q, i, 1);
                }
            }
            if !model.is_admissible(uq) {
                return Err(Error::Domain(format!(
                    "field value {uq} in element {e} outside the admissible set"
                )));
            }
            let g = jac.to_physical_gradient(dim, gref);
            total += w * (model.f_unchecked(uq) + 0.5 * eps2 * (g[0] * g[0] + g[1] * g[1]));
        }
    }
    Ok(total)
}

/// Quadrature L2 norm of u_h - reference.
pub fn l2_error(
    u: &[f64],
    reference: &dyn Fn([f64; 2]) -> f64,
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
) -> f64 {
    let n_loc = basis.n_nodes();
    let mut total = 0.0;
    for e in 0..mesh.n_elements() {
        let ids = dofs.global_ids(e);
        for q in 0..basis.n_quad() {
            let xi = basis.quad_points()[q];
            let jac = mesh.jacobian(e, xi);
            let w = basis.quad_weights()[q] * jac.det;
            let mut uq = 0.0;
            for i in 0..n_loc {
                uq += u[ids[i]] * basis.phi(q, i);
            }
            let d = uq - reference(mesh.map_to_physical(e, xi));
            total += w * d * d;
        }
    }
    total.sqrt()
}

/// The 1D field as (x, value) samples at the DoF coordinates, ascending.
fn sorted_nodal_values(u: &[f64], dofs: &DofMap) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = dofs
        .dof_coords()
        .iter()
        .zip(u)
        .map(|(c, &v)| (c[0], v))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

/// Find the 1D element whose span contains x.
fn element_containing(mesh: &Mesh, x: f64) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for e in 0..mesh.n_elements() {
        let vs = mesh.element(e);
        let a = mesh.vertex(vs[0])[0];
        let b = mesh.vertex(vs[1])[0];
        if x >= a && x <= b {
            return e;
        }
        let d = (x - a).abs().min((x - b).abs());
        if d < best_dist {
            best_dist = d;
            best = e;
        }
    }
    best
}

fn eval_1d(u: &[f64], mesh: &Mesh, dofs: &DofMap, basis: &BasisTable, e: usize, x: f64) -> f64 {
    let vs = mesh.element(e);
    let a = mesh.vertex(vs[0])[0];
    let b = mesh.vertex(vs[1])[0];
    let xi = 2.0 * (x - a) / (b - a) - 1.0;
    dofs.eval_local(u, e, basis, [xi, 0.0])
}

fn eval_deriv_1d(
    u: &[f64],
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
    e: usize,
    x: f64,
) -> f64 {
    let vs = mesh.element(e);
    let a = mesh.vertex(vs[0])[0];
    let b = mesh.vertex(vs[1])[0];
    let xi = 2.0 * (x - a) / (b - a) - 1.0;
    let grads = basis.eval_grad_at([xi, 0.0]);
    let dref: f64 = dofs
        .global_ids(e)
        .iter()
        .zip(grads)
        .map(|(&g, d)| u[g] * d[0])
        .sum();
    dref * 2.0 / (b - a)
}

/// Roots of a 1D field with the field's derivative at each root,
/// ascending in x. Empty when the field has no sign change.
pub fn interface_slopes(
    u: &[f64],
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
) -> Result<Vec<(f64, f64)>> {
    if mesh.dim() != 1 {
        return Err(Error::Shape("interface slopes need a 1D field".into()));
    }
    let pts = sorted_nodal_values(u, dofs);
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (x0, v0) = w[0];
        let (x1, v1) = w[1];
        let root = if v0 == 0.0 {
            continue; // handled as the left endpoint of the previous pair
        } else if v1 == 0.0 {
            Some(x1)
        } else if v0 * v1 < 0.0 {
            // bisection inside the element
            let e = element_containing(mesh, 0.5 * (x0 + x1));
            let (mut a, mut b) = (x0, x1);
            let fa = eval_1d(u, mesh, dofs, basis, e, a);
            let mut sa = fa.signum();
            if fa == 0.0 {
                sa = -v1.signum();
            }
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                let fm = eval_1d(u, mesh, dofs, basis, e, mid);
                if fm.signum() == sa {
                    a = mid;
                } else {
                    b = mid;
                }
                if b - a < 1e-15 * (1.0 + b.abs()) {
                    break;
                }
            }
            Some(0.5 * (a + b))
        } else {
            None
        };
        if let Some(r) = root {
            let e = element_containing(mesh, r);
            out.push((r, eval_deriv_1d(u, mesh, dofs, basis, e, r)));
        }
    }
    Ok(out)
}

/// Fit the stationary interface profile u_plus * tanh(mu (x - x0)) to a 1D
/// field with a single sign change.
///
/// u_plus is read off the boundary values; x0 is the root of u_h inside
/// the sign-change element; mu minimizes the nodal least-squares objective
/// (golden section, then Newton polish).
pub fn fit_tanh_profile(
    u: &[f64],
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
) -> Result<FitResult> {
    if mesh.dim() != 1 {
        return Err(Error::Shape("tanh-profile fit needs a 1D field".into()));
    }
    let roots = interface_slopes(u, mesh, dofs, basis)?;
    if roots.is_empty() {
        return Err(Error::Shape("field has no sign change".into()));
    }
    if roots.len() > 1 {
        return Err(Error::Shape(format!(
            "field has {} interfaces; fit expects exactly one",
            roots.len()
        )));
    }
    let (x0, slope) = roots[0];
    let pts = sorted_nodal_values(u, dofs);
    let u_plus = 0.5 * (pts.first().unwrap().1.abs() + pts.last().unwrap().1.abs());
    if u_plus <= 0.0 {
        return Err(Error::Shape("boundary values vanish".into()));
    }

    let objective = |mu: f64| -> f64 {
        pts.iter()
            .map(|&(x, v)| {
                let r = v - u_plus * (mu * (x - x0)).tanh();
                r * r
            })
            .sum()
    };
    // golden-section bracket around the slope-based estimate
    let mu_guess = (slope.abs() / u_plus).max(1e-12);
    let (mut lo, mut hi) = (mu_guess / 50.0, mu_guess * 50.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..200 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = objective(d);
        }
        if (hi - lo) < 1e-12 * hi {
            break;
        }
    }
    let mut mu = 0.5 * (lo + hi);
    // Newton polish on the objective derivative
    for _ in 0..2 {
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        for &(x, v) in &pts {
            let dxi = x - x0;
            let t = (mu * dxi).tanh();
            let s2 = 1.0 - t * t;
            let r = v - u_plus * t;
            let dr = -u_plus * dxi * s2;
            let ddr = 2.0 * u_plus * dxi * dxi * s2 * t;
            g1 += 2.0 * r * dr;
            g2 += 2.0 * (dr * dr + r * ddr);
        }
        if g2 > 0.0 {
            let next = mu - g1 / g2;
            if next > 0.0 {
                mu = next;
            }
        }
    }
    Ok(FitResult {
        params: vec![
            ("u_plus".into(), u_plus),
            ("mu".into(), mu),
            ("x0".into(), x0),
        ],
        residual: objective(mu),
        n_points: pts.len(),
    })
}

/// Per-state amplitude constants and the amplitude-law exponents for a
/// family of stationary states near a bifurcation.
///
/// For each `(eps, u)` with 1/eps^2 > rho the closed-form least-squares
/// amplitude against the mode v is
/// `C(eps) = <u, v>_M / (sqrt(1/eps^2 - rho) <v, v>_M)` with the sign of v
/// aligned to the state. The log-log regression of `||u - v_eps||_2`
/// against `1/eps^2 - rho` gives the exponent `alpha` and prefactor;
/// the regression of `log C` against `log eps` gives the amplitude law.
pub fn fit_bifurcation(
    states: &[(f64, Vec<f64>)],
    pair: &EigenPair,
    mass: &CsrMatrix,
) -> Result<FitResult> {
    if states.len() < 3 {
        return Err(Error::Fit(format!(
            "bifurcation fit needs at least 3 states, got {}",
            states.len()
        )));
    }
    let rho = pair.rho;
    let mv = mass.apply(&pair.v);
    let vv = dot(&pair.v, &mv);
    let mut c_values = Vec::with_capacity(states.len());
    let mut gaps = Vec::with_capacity(states.len());
    let mut residuals = Vec::with_capacity(states.len());
    for (k, (eps, u)) in states.iter().enumerate() {
        let gap = 1.0 / (eps * eps) - rho;
        if gap <= 0.0 {
            return Err(Error::Parameter(format!(
                "state {k}: 1/eps^2 = {:.6} is not above rho = {rho:.6}",
                1.0 / (eps * eps)
            )));
        }
        let proj = dot(u, &mv);
        let sign = if proj >= 0.0 { 1.0 } else { -1.0 };
        let c = sign * proj / (gap.sqrt() * vv);
        // L2 distance to the aligned mode approximation
        let scale = c * gap.sqrt() * sign;
        let diff: Vec<f64> = u
            .iter()
            .zip(&pair.v)
            .map(|(a, b)| a - scale * b)
            .collect();
        let mdiff = mass.apply(&diff);
        residuals.push(dot(&diff, &mdiff).max(0.0).sqrt());
        c_values.push(c);
        gaps.push(gap);
    }
    let epss: Vec<f64> = states.iter().map(|s| s.0).collect();
    let c_fit = loglog_regression(&epss, &c_values)?;
    let mut params = vec![
        ("c_exponent".into(), c_fit.slope),
        ("c_prefactor".into(), 10f64.powf(c_fit.intercept)),
        ("c_r2".into(), c_fit.r2),
    ];
    // states lying exactly on the mode make the alpha regression
    // degenerate; report only the amplitude part then
    let mut ss = 0.0;
    if residuals.iter().all(|&r| r > 0.0) {
        let alpha_fit = loglog_regression(&gaps, &residuals)?;
        params.push(("alpha".into(), alpha_fit.slope));
        params.push(("c_tilde".into(), 10f64.powf(alpha_fit.intercept)));
        params.push(("alpha_r2".into(), alpha_fit.r2));
        ss = gaps
            .iter()
            .zip(&residuals)
            .map(|(&g, &r)| {
                let p = alpha_fit.slope * g.log10() + alpha_fit.intercept;
                let d = r.log10() - p;
                d * d
            })
            .sum();
    }
    for (k, c) in c_values.iter().enumerate() {
        params.push((format!("c_eps_{k}"), *c));
    }
    for (k, r) in residuals.iter().enumerate() {
        params.push((format!("r_eps_{k}"), *r));
    }
    Ok(FitResult {
        params,
        residual: ss,
        n_points: states.len(),
    })
}

/// Approximate length of the zero level set of a 2D field, by marching
/// segments on a (p+3)^2 sampling sub-grid per element.
pub fn interface_measure_2d(
    u: &[f64],
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
) -> Result<f64> {
    if mesh.dim() != 2 {
        return Err(Error::Shape("zero-level-set measurement needs a 2D field".into()));
    }
    let p = basis.degree();
    let k = p + 3; // sample points per direction
    let ts: Vec<f64> = (0..k)
        .map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64)
        .collect();
    // basis values at every sample point, computed once
    let mut sample_phi = Vec::with_capacity(k * k);
    for &ty in &ts {
        for &tx in &ts {
            sample_phi.push(basis.eval_at([tx, ty]));
        }
    }
    let n_loc = basis.n_nodes();
    let mut vals = vec![0.0; k * k];
    let mut length = 0.0;
    for e in 0..mesh.n_elements() {
        let ids = dofs.global_ids(e);
        for s in 0..k * k {
            vals[s] = (0..n_loc).map(|i| u[ids[i]] * sample_phi[s][i]).sum();
        }
        for cj in 0..k - 1 {
            for ci in 0..k - 1 {
                let s00 = cj * k + ci;
                let s10 = s00 + 1;
                let s01 = s00 + k;
                let s11 = s01 + 1;
                let corners = [
                    (ts[ci], ts[cj], vals[s00]),
                    (ts[ci + 1], ts[cj], vals[s10]),
                    (ts[ci + 1], ts[cj + 1], vals[s11]),
                    (ts[ci], ts[cj + 1], vals[s01]),
                ];
                length += cell_segments(mesh, e, &corners);
            }
        }
    }
    Ok(length)
}

/// Marching-squares on one sampling sub-cell; returns the physical length
/// of the zero-level segments.
fn cell_segments(mesh: &Mesh, e: usize, corners: &[(f64, f64, f64); 4]) -> f64 {
    let inside: Vec<bool> = corners.iter().map(|c| c.2 >= 0.0).collect();
    let case = (inside[0] as usize)
        | (inside[1] as usize) << 1
        | (inside[2] as usize) << 2
        | (inside[3] as usize) << 3;
    if case == 0 || case == 15 {
        return 0.0;
    }
    // crossing point on edge (a, b) by linear interpolation
    let cross = |a: usize, b: usize| -> [f64; 2] {
        let (xa, ya, va) = corners[a];
        let (xb, yb, vb) = corners[b];
        let t = va / (va - vb);
        [xa + t * (xb - xa), ya + t * (yb - ya)]
    };
    let seg_len = |p: [f64; 2], q: [f64; 2]| -> f64 {
        let a = mesh.map_to_physical(e, p);
        let b = mesh.map_to_physical(e, q);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    };
    // edges: 0 = (0,1) bottom, 1 = (1,2) right, 2 = (2,3) top, 3 = (3,0) left
    let segments: &[(usize, usize, usize, usize)] = match case {
        1 | 14 => &[(3, 0, 0, 1)],
        2 | 13 => &[(0, 1, 1, 2)],
        4 | 11 => &[(1, 2, 2, 3)],
        8 | 7 => &[(2, 3, 3, 0)],
        3 | 12 => &[(3, 0, 1, 2)],
        6 | 9 => &[(0, 1, 2, 3)],
        5 | 10 => {
            // saddle: disambiguate with the cell-center average
            let avg = (corners[0].2 + corners[1].2 + corners[2].2 + corners[3].2) / 4.0;
            let center_inside = avg >= 0.0;
            if (case == 5) == center_inside {
                &[(3, 0, 2, 3), (0, 1, 1, 2)]
            } else {
                &[(3, 0, 0, 1), (1, 2, 2, 3)]
            }
        }
        _ => &[],
    };
    segments
        .iter()
        .map(|&(a0, a1, b0, b1)| seg_len(cross(a0, a1), cross(b0, b1)))
        .sum()
}
