//! Element-loop assembly of the sparse "stiffness" matrix A with entries
//! <grad phi_i, grad phi_j>, the "mass" matrix M with entries
//! <phi_i, phi_j> (optionally row-sum lumped), the nonlinear load vector
//! with entries <psi(u_h), phi_i>, and its Gateaux derivative block
//! <psi'(u_h) phi_i, phi_j>.
//!
//! Contributions are pushed in element order and reduced deterministically,
//! so assembled values are bit-identical run to run.

use crate::energy::EnergyModel;
use crate::linalg::CsrMatrix;
use crate::mesh::{DofMap, Mesh};
use crate::ref_element::BasisTable;
use crate::{Error, Result};

fn check_consistent(mesh: &Mesh, dofs: &DofMap, basis: &BasisTable) -> Result<()> {
    if basis.degree() != dofs.degree() {
        return Err(Error::Parameter(format!(
            "basis degree {} does not match dof map degree {}",
            basis.degree(),
            dofs.degree()
        )));
    }
    if basis.dim() != mesh.dim() {
        return Err(Error::Parameter(format!(
            "basis dimension {} does not match mesh dimension {}",
            basis.dim(),
            mesh.dim()
        )));
    }
    Ok(())
}

/// Stiffness matrix [A]_ij = integral of grad phi_i . grad phi_j.
pub fn stiffness(mesh: &Mesh, dofs: &DofMap, basis: &BasisTable) -> Result<CsrMatrix> {
    check_consistent(mesh, dofs, basis)?;
    let n_loc = basis.n_nodes();
    let dim = mesh.dim();
    let mut triplets = Vec::with_capacity(mesh.n_elements() * n_loc * n_loc);
    let mut grads = vec![[0.0; 2]; n_loc];
    for e in 0..mesh.n_elements() {
        let ids = dofs.global_ids(e);
        let mut local = vec![0.0; n_loc * n_loc];
        for q in 0..basis.n_quad() {
            let jac = mesh.jacobian(e, basis.quad_points()[q]);
            let w = basis.quad_weights()[q] * jac.det;
            for i in 0..n_loc {
                let g = [basis.dphi(q, i, 0), if dim == 2 { basis.dphi(q, i, 1) } else { 0.0 }];
                grads[i] = jac.to_physical_gradient(dim, g);
            }
            for i in 0..n_loc {
                for j in 0..n_loc {
                    local[i * n_loc + j] +=
                        w * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                }
            }
        }
        for i in 0..n_loc {
            for j in 0..n_loc {
                triplets.push((ids[i], ids[j], local[i * n_loc + j]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(dofs.n_dofs(), dofs.n_dofs(), triplets))
}

/// Mass matrix [M]_ij = integral of phi_i phi_j; with `lumped` the
/// row-sum-lumped diagonal variant (same row sums as the consistent one).
pub fn mass(mesh: &Mesh, dofs: &DofMap, basis: &BasisTable, lumped: bool) -> Result<CsrMatrix> {
    check_consistent(mesh, dofs, basis)?;
    let n_loc = basis.n_nodes();
    let n = dofs.n_dofs();
    let mut triplets = Vec::with_capacity(mesh.n_elements() * n_loc * n_loc);
    for e in 0..mesh.n_elements() {
        let ids = dofs.global_ids(e);
        let mut local = vec![0.0; n_loc * n_loc];
        for q in 0..basis.n_quad() {
            let jac = mesh.jacobian(e, basis.quad_points()[q]);
            let w = basis.quad_weights()[q] * jac.det;
            for i in 0..n_loc {
                let pi = basis.phi(q, i);
                for j in 0..n_loc {
                    local[i * n_loc + j] += w * pi * basis.phi(q, j);
                }
            }
        }
        if lumped {
            for i in 0..n_loc {
                let row: f64 = (0..n_loc).map(|j| local[i * n_loc + j]).sum();
                triplets.push((ids[i], ids[i], row));
            }
        } else {
            for i in 0..n_loc {
                for j in 0..n_loc {
                    triplets.push((ids[i], ids[j], local[i * n_loc + j]));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(n, n, triplets))
}

/// Values of u_h at the quadrature points of one element.
fn values_at_quad(u: &[f64], ids: &[usize], basis: &BasisTable, out: &mut [f64]) {
    for (q, v) in out.iter_mut().enumerate() {
        *v = ids
            .iter()
            .enumerate()
            .map(|(i, &g)| u[g] * basis.phi(q, i))
            .sum();
    }
}

fn check_admissible(uq: &[f64], model: &EnergyModel, e: usize) -> Result<()> {
    for &v in uq {
        if !model.is_admissible(v) {
            return Err(Error::Domain(format!(
                "field value {v} in element {e} outside the admissible set"
            )));
        }
    }
    Ok(())
}

/// Nonlinear load vector with entries integral of psi(u_h) phi_i,
/// evaluated pointwise at the quadrature points.
pub fn nonlinear_load(
    u: &[f64],
    model: &EnergyModel,
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
) -> Result<Vec<f64>> {
    check_consistent(mesh, dofs, basis)?;
    if u.len() != dofs.n_dofs() {
        return Err(Error::Parameter(format!(
            "coefficient vector has {} entries, dof map has {}",
            u.len(),
            dofs.n_dofs()
        )));
    }
    let n_loc = basis.n_nodes();
    let mut out = vec![0.0; dofs.n_dofs()];
    let mut uq = vec![0.0; basis.n_quad()];
    for e in 0..mesh.n_elements() {
        let ids = dofs.global_ids(e);
        values_at_quad(u, ids, basis, &mut uq);
        check_admissible(&uq, model, e)?;
        for q in 0..basis.n_quad() {
            let jac = mesh.jacobian(e, basis.quad_points()[q]);
            let w = basis.quad_weights()[q] * jac.det * model.psi_unchecked(uq[q]);
            for i in 0..n_loc {
                out[ids[i]] += w * basis.phi(q, i);
            }
        }
    }
    Ok(out)
}

/// Gateaux derivative of [`nonlinear_load`]: the matrix with entries
/// integral of psi'(u_h) phi_i phi_j.
pub fn nonlinear_jacobian(
    u: &[f64],
    model: &EnergyModel,
    mesh: &Mesh,
    dofs: &DofMap,
    basis: &BasisTable,
) -> Result<CsrMatrix> {
    check_consistent(mesh, dofs, basis)?;
    if u.len() != dofs.n_dofs() {
        return Err(Error::Parameter(format!(
            "coefficient vector has {} entries, dof map has {}",
            u.len(),
            dofs.n_dofs()
        )));
    }
    let n_loc = basis.n_nodes();
    let n = dofs.n_dofs();
    let mut triplets = Vec::with_capacity(mesh.n_elements() * n_loc * n_loc);
    let mut uq = vec![0.0; basis.n_quad()];
    for e in 0..mesh.n_elements() {
        let ids = dofs.global_ids(e);
        values_at_quad(u, ids, basis, &mut uq);
        check_admissible(&uq, model, e)?;
        let mut local = vec![0.0; n_loc * n_loc];
        for q in 0..basis.n_quad() {
            let jac = mesh.jacobian(e, basis.quad_points()[q]);
            let w = basis.quad_weights()[q] * jac.det * model.dpsi_unchecked(uq[q]);
            for i in 0..n_loc {
                let pi = basis.phi(q, i);
                for j in 0..n_loc {
                    local[i * n_loc + j] += w * pi * basis.phi(q, j);
                }
            }
        }
        for i in 0..n_loc {
            for j in 0..n_loc {
                triplets.push((ids[i], ids[j], local[i * n_loc + j]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(n, n, triplets))
}
