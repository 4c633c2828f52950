//! Generalized Laplace-Neumann eigenpairs A v = rho M v restricted to
//! zero-mean fields, for bifurcation thresholds and mode-shaped initial
//! data.
//!
//! The solver runs shift-invert Lanczos in the M-inner product on the
//! operator (A + M)^{-1} M with the constant mode (and previously found
//! pairs) deflated by explicit projection; inner solves use diagonally
//! scaled BiCGStab. A dense reduction is available as a test oracle for
//! small systems (see [`crate::linalg::dense`]).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{bicgstab, dot, norm2, CsrMatrix, JacobiScaledOp};
use crate::{Error, Result};

/// An eigenpair of A v = rho M v with v zero-mean and M-normalized.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub rho: f64,
    pub v: Vec<f64>,
}

const SHIFT: f64 = 1.0;
const INNER_TOL: f64 = 1e-12;
/// Convergence target for ||A v - rho M v|| / ||M v||; half the 1e-9
/// budget the pairs are contracted to satisfy.
const RESIDUAL_TOL: f64 = 5e-10;

struct PencilContext<'a> {
    a: &'a CsrMatrix,
    m: &'a CsrMatrix,
    scaled: &'a JacobiScaledOp<'a, CsrMatrix>,
    /// deflation basis (M-orthonormal) and its M-images
    basis: Vec<Vec<f64>>,
    basis_m: Vec<Vec<f64>>,
    inner_max: usize,
}

impl<'a> PencilContext<'a> {
    fn m_inner(&self, x: &[f64], my: &[f64]) -> f64 {
        dot(x, my)
    }

    fn m_norm(&self, x: &[f64]) -> f64 {
        let mx = self.m.apply(x);
        dot(x, &mx).max(0.0).sqrt()
    }

    /// Remove the components along the deflation basis (in the M geometry).
    fn deflate(&self, x: &mut [f64]) {
        for (b, bm) in self.basis.iter().zip(&self.basis_m) {
            let c = dot(bm, x);
            for i in 0..x.len() {
                x[i] -= c * b[i];
            }
        }
    }

    /// Apply (A + shift M)^{-1} M x through the Jacobi-scaled system.
    fn shift_invert(&self, x: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.m.apply(x);
        let rhs_scaled = self.scaled.scale_rhs(&rhs);
        let (y, _) = bicgstab(self.scaled, &rhs_scaled, INNER_TOL, self.inner_max)?;
        Ok(self.scaled.unscale_solution(&y))
    }

    fn pencil_residual(&self, rho: f64, v: &[f64]) -> f64 {
        let n = v.len();
        let mv = self.m.apply(v);
        let mut r = self.a.apply(v);
        for i in 0..n {
            r[i] -= rho * mv[i];
        }
        norm2(&r) / norm2(&mv)
    }
}

/// The `count` smallest nonzero eigenvalues of A v = rho M v (ascending)
/// with the constant mode deflated. A must be the Neumann stiffness
/// (symmetric positive semi-definite with constants in its kernel) and M
/// the mass matrix on the same DoF numbering.
pub fn smallest_eigenpairs(a: &CsrMatrix, m: &CsrMatrix, count: usize) -> Result<Vec<EigenPair>> {
    let n = a.n_rows();
    if m.n_rows() != n || a.n_cols() != n || m.n_cols() != n {
        return Err(Error::Parameter("A and M must be square with equal size".into()));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if count + 1 >= n {
        return Err(Error::Parameter(format!(
            "cannot extract {count} nonzero pairs from an {n}-dof system"
        )));
    }
    let shifted = CsrMatrix::linear_combination(1.0, a, SHIFT, m);
    let diag = shifted.diagonal();
    let scaled = JacobiScaledOp::new(&shifted, &diag);
    let mut ctx = PencilContext {
        a,
        m,
        scaled: &scaled,
        basis: Vec::new(),
        basis_m: Vec::new(),
        inner_max: 40 * n.max(50),
    };
    // deflate the constant mode
    let mut ones = vec![1.0; n];
    let nrm = ctx.m_norm(&ones);
    ones.iter_mut().for_each(|x| *x /= nrm);
    let m_ones = m.apply(&ones);
    ctx.basis.push(ones);
    ctx.basis_m.push(m_ones);

    let mut pairs: Vec<EigenPair> = Vec::new();
    for k in 0..count {
        let pair = lanczos_next(&ctx, k as u64)?;
        ctx.basis_m.push(m.apply(&pair.v));
        ctx.basis.push(pair.v.clone());
        pairs.push(pair);
    }
    pairs.sort_by(|p, q| p.rho.partial_cmp(&q.rho).unwrap());
    Ok(pairs)
}

/// One shift-invert Lanczos run returning the smallest eigenvalue outside
/// the current deflation space.
fn lanczos_next(ctx: &PencilContext, seed: u64) -> Result<EigenPair> {
    let n = ctx.a.n_rows();
    let m_max = (n - ctx.basis.len()).min(160);
    let mut last_residual = f64::INFINITY;
    for attempt in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1009 * seed + attempt + 1);
        let mut q0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        ctx.deflate(&mut q0);
        let nrm = ctx.m_norm(&q0);
        if nrm < 1e-14 {
            continue;
        }
        q0.iter_mut().for_each(|x| *x /= nrm);

        let mut q_vecs: Vec<Vec<f64>> = vec![q0];
        let mut mq_vecs: Vec<Vec<f64>> = vec![ctx.m.apply(&q_vecs[0])];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();

        for j in 0..m_max {
            let mut z = ctx.shift_invert(&q_vecs[j])?;
            ctx.deflate(&mut z);
            let alpha = ctx.m_inner(&z, &mq_vecs[j]);
            alphas.push(alpha);
            // full reorthogonalization against the Krylov basis, twice
            for _ in 0..2 {
                for (qi, mqi) in q_vecs.iter().zip(&mq_vecs) {
                    let c = dot(mqi, &z);
                    for i in 0..n {
                        z[i] -= c * qi[i];
                    }
                }
                ctx.deflate(&mut z);
            }
            let beta = ctx.m_norm(&z);

            // Ritz extraction every few steps (the tridiagonal is small)
            let converged = if (j >= 4 && j % 3 == 0) || beta < 1e-14 || j + 1 == m_max {
                let (theta, y) = largest_ritz(&alphas, &betas);
                let mut v = vec![0.0; n];
                for (c, q) in y.iter().zip(&q_vecs) {
                    for i in 0..n {
                        v[i] += c * q[i];
                    }
                }
                let vn = ctx.m_norm(&v);
                v.iter_mut().for_each(|x| *x /= vn);
                let rho = 1.0 / theta - SHIFT;
                let res = ctx.pencil_residual(rho, &v);
                last_residual = res;
                if res <= RESIDUAL_TOL {
                    fix_sign(&mut v);
                    return Ok(EigenPair { rho, v });
                }
                false
            } else {
                false
            };
            let _ = converged;
            if beta < 1e-14 {
                break; // invariant subspace exhausted; retry from a new start
            }
            betas.push(beta);
            let qn: Vec<f64> = z.iter().map(|x| x / beta).collect();
            mq_vecs.push(ctx.m.apply(&qn));
            q_vecs.push(qn);
        }
    }
    Err(Error::Numeric(format!(
        "Lanczos did not converge: best pencil residual {last_residual:.3e} \
         (target {RESIDUAL_TOL:.1e})"
    )))
}

/// Largest eigenpair of the symmetric tridiagonal (alphas, betas).
fn largest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = nalgebra::DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    (
        eig.eigenvalues[best],
        eig.eigenvectors.column(best).iter().copied().collect(),
    )
}

/// Deterministic sign convention: the entry of largest magnitude
/// (lowest index on ties) is made positive.
fn fix_sign(v: &mut [f64]) {
    let mut idx = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[idx].abs() + 1e-300 {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Amplitude-scaled combination of M-orthonormal modes: the result has
/// M-norm `amplitude` (zero mean, like every deflated mode). A zero
/// amplitude or all-zero combination gives the zero vector.
pub fn mode_initial_data(pairs: &[EigenPair], combo: &[f64], amplitude: f64) -> Result<Vec<f64>> {
    if pairs.len() != combo.len() {
        return Err(Error::Parameter(format!(
            "combination has {} coefficients for {} modes",
            combo.len(),
            pairs.len()
        )));
    }
    if pairs.is_empty() {
        return Err(Error::Parameter("no modes given".into()));
    }
    let n = pairs[0].v.len();
    let mut u = vec![0.0; n];
    let cnorm = norm2(combo);
    if cnorm == 0.0 || amplitude == 0.0 {
        return Ok(u);
    }
    for (c, p) in combo.iter().zip(pairs) {
        for i in 0..n {
            u[i] += c * p.v[i];
        }
    }
    let scale = amplitude / cnorm;
    u.iter_mut().for_each(|x| *x *= scale);
    Ok(u)
}
