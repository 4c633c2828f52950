//! Lagrange nodal reference elements of degree 1..=10 on the segment
//! [-1, 1] and its tensor square, with Gauss-Lobatto node placement and
//! Gauss-Legendre quadrature.

use crate::{Error, Result};

pub const MAX_DEGREE: usize = 10;

/// Legendre polynomial value and first derivative at x, by recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let next = ((2 * k - 1) as f64 * x * p - (k - 1) as f64 * p_prev) / k as f64;
        p_prev = p;
        p = next;
    }
    // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    let dp = if x.abs() < 1.0 {
        n as f64 * (p_prev - x * p) / (1.0 - x * x)
    } else {
        // P_n'(+-1) = (+-1)^{n-1} n(n+1)/2
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 - 1) };
        sign * (n * (n + 1)) as f64 / 2.0
    };
    (p, dp)
}

/// Gauss-Legendre points and weights on [-1, 1].
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut points = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q {
        // Newton from the Chebyshev estimate of the i-th root
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(q, x);
        points[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (points, weights)
}

/// Gauss-Lobatto points for a degree-p element: the endpoints plus the
/// roots of P_p', found by Newton on P_p' from Chebyshev-Lobatto guesses.
pub fn gauss_lobatto(degree: usize) -> Vec<f64> {
    assert!(degree >= 1);
    let p = degree;
    let mut nodes = vec![0.0; p + 1];
    nodes[0] = -1.0;
    nodes[p] = 1.0;
    for i in 1..p {
        let mut x = -(std::f64::consts::PI * i as f64 / p as f64).cos();
        for _ in 0..100 {
            let (pv, dp) = legendre(p, x);
            // P_p'' from the Legendre ODE: (1-x^2) P'' = 2x P' - p(p+1) P
            let ddp = (2.0 * x * dp - (p * (p + 1)) as f64 * pv) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
    }
    // enforce exact symmetry of the node set
    for i in 0..=(p / 2) {
        let s = 0.5 * (nodes[i] - nodes[p - i]);
        nodes[i] = s;
        nodes[p - i] = -s;
    }
    nodes
}

/// One-dimensional Lagrange basis on given nodes, evaluated via the
/// barycentric form (stable up to degree 10 and beyond).
#[derive(Debug, Clone)]
struct Lagrange1d {
    nodes: Vec<f64>,
    bary_weights: Vec<f64>,
}

impl Lagrange1d {
    fn new(nodes: Vec<f64>) -> Self {
        let n = nodes.len();
        let mut bary_weights = vec![1.0; n];
        for i in 0..n {
            for m in 0..n {
                if m != i {
                    bary_weights[i] /= nodes[i] - nodes[m];
                }
            }
        }
        Lagrange1d {
            nodes,
            bary_weights,
        }
    }

    fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Values of all basis functions at x.
    fn eval(&self, x: f64) -> Vec<f64> {
        let n = self.n();
        if let Some(j) = self.coincident_node(x) {
            let mut out = vec![0.0; n];
            out[j] = 1.0;
            return out;
        }
        let terms: Vec<f64> = (0..n)
            .map(|i| self.bary_weights[i] / (x - self.nodes[i]))
            .collect();
        let denom: f64 = terms.iter().sum();
        terms.iter().map(|t| t / denom).collect()
    }

    /// Derivatives of all basis functions at x.
    fn eval_deriv(&self, x: f64) -> Vec<f64> {
        let n = self.n();
        if let Some(k) = self.coincident_node(x) {
            // differentiation-matrix row at node k
            let mut out = vec![0.0; n];
            let mut diag = 0.0;
            for i in 0..n {
                if i != k {
                    let d = (self.bary_weights[i] / self.bary_weights[k])
                        / (self.nodes[k] - self.nodes[i]);
                    out[i] = d;
                    diag -= d;
                }
            }
            out[k] = diag;
            return out;
        }
        let phi = self.eval(x);
        let recip: Vec<f64> = (0..n).map(|i| 1.0 / (x - self.nodes[i])).collect();
        let s: f64 = phi.iter().zip(&recip).map(|(p, r)| p * r).sum();
        (0..n).map(|i| phi[i] * (s - recip[i])).collect()
    }

    fn coincident_node(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&xn| (x - xn).abs() < 1e-13)
    }
}

/// Per-degree reference-element tables: Gauss-Lobatto nodes, Gauss-Legendre
/// quadrature, basis values and reference gradients at the quadrature points.
///
/// Immutable after construction; safe for shared concurrent reads.
#[derive(Debug, Clone)]
pub struct BasisTable {
    degree: usize,
    dim: usize,
    quad_order: usize,
    lagrange: Lagrange1d,
    nodes: Vec<[f64; 2]>,
    quad_points: Vec<[f64; 2]>,
    quad_weights: Vec<f64>,
    /// phi[q * n_nodes + i]
    phi: Vec<f64>,
    /// dphi[(q * n_nodes + i) * dim + d]
    dphi: Vec<f64>,
}

impl BasisTable {
    /// Build the table for `degree` in 1..=10 and `dim` in {1, 2} with
    /// `quad_order >= degree + 1` Gauss-Legendre points per direction.
    pub fn build(degree: usize, dim: usize, quad_order: usize) -> Result<Self> {
        if degree < 1 || degree > MAX_DEGREE {
            return Err(Error::Parameter(format!(
                "element degree must be in 1..={MAX_DEGREE}, got {degree}"
            )));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::Parameter(format!("dimension must be 1 or 2, got {dim}")));
        }
        if quad_order < degree + 1 {
            return Err(Error::Parameter(format!(
                "quadrature order {quad_order} is below degree+1 = {}",
                degree + 1
            )));
        }
        let lagrange = Lagrange1d::new(gauss_lobatto(degree));
        let (qx, qw) = gauss_legendre(quad_order);
        let n1 = degree + 1;

        let phi1: Vec<Vec<f64>> = qx.iter().map(|&x| lagrange.eval(x)).collect();
        let dphi1: Vec<Vec<f64>> = qx.iter().map(|&x| lagrange.eval_deriv(x)).collect();

        let (nodes, quad_points, quad_weights, phi, dphi) = match dim {
            1 => {
                let nodes = lagrange.nodes.iter().map(|&x| [x, 0.0]).collect();
                let qp = qx.iter().map(|&x| [x, 0.0]).collect();
                let mut phi = Vec::with_capacity(quad_order * n1);
                let mut dphi = Vec::with_capacity(quad_order * n1);
                for q in 0..quad_order {
                    for i in 0..n1 {
                        phi.push(phi1[q][i]);
                        dphi.push(dphi1[q][i]);
                    }
                }
                (nodes, qp, qw.clone(), phi, dphi)
            }
            _ => {
                let mut nodes = Vec::with_capacity(n1 * n1);
                for j in 0..n1 {
                    for i in 0..n1 {
                        nodes.push([lagrange.nodes[i], lagrange.nodes[j]]);
                    }
                }
                let nq = quad_order * quad_order;
                let mut qp = Vec::with_capacity(nq);
                let mut w = Vec::with_capacity(nq);
                let mut phi = Vec::with_capacity(nq * n1 * n1);
                let mut dphi = Vec::with_capacity(nq * n1 * n1 * 2);
                for qj in 0..quad_order {
                    for qi in 0..quad_order {
                        qp.push([qx[qi], qx[qj]]);
                        w.push(qw[qi] * qw[qj]);
                        for j in 0..n1 {
                            for i in 0..n1 {
                                phi.push(phi1[qi][i] * phi1[qj][j]);
                                dphi.push(dphi1[qi][i] * phi1[qj][j]);
                                dphi.push(phi1[qi][i] * dphi1[qj][j]);
                            }
                        }
                    }
                }
                (nodes, qp, w, phi, dphi)
            }
        };

        Ok(BasisTable {
            degree,
            dim,
            quad_order,
            lagrange,
            nodes,
            quad_points,
            quad_weights,
            phi,
            dphi,
        })
    }

    /// Default quadrature: degree + 2 points per direction.
    pub fn with_default_quadrature(degree: usize, dim: usize) -> Result<Self> {
        Self::build(degree, dim, degree + 2)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_quad(&self) -> usize {
        self.quad_weights.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn nodes_1d(&self) -> &[f64] {
        &self.lagrange.nodes
    }

    pub fn quad_points(&self) -> &[[f64; 2]] {
        &self.quad_points
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    #[inline]
    pub fn phi(&self, q: usize, i: usize) -> f64 {
        self.phi[q * self.n_nodes() + i]
    }

    #[inline]
    pub fn dphi(&self, q: usize, i: usize, d: usize) -> f64 {
        debug_assert!(d < self.dim);
        if self.dim == 1 {
            self.dphi[q * self.n_nodes() + i]
        } else {
            self.dphi[(q * self.n_nodes() + i) * 2 + d]
        }
    }

    /// Values of all basis functions at an arbitrary reference point.
    pub fn eval_at(&self, xi: [f64; 2]) -> Vec<f64> {
        match self.dim {
            1 => self.lagrange.eval(xi[0]),
            _ => {
                let fx = self.lagrange.eval(xi[0]);
                let fy = self.lagrange.eval(xi[1]);
                let n1 = self.degree + 1;
                let mut out = Vec::with_capacity(n1 * n1);
                for j in 0..n1 {
                    for i in 0..n1 {
                        out.push(fx[i] * fy[j]);
                    }
                }
                out
            }
        }
    }

    /// Reference gradients of all basis functions at an arbitrary point.
    pub fn eval_grad_at(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        match self.dim {
            1 => self
                .lagrange
                .eval_deriv(xi[0])
                .into_iter()
                .map(|d| [d, 0.0])
                .collect(),
            _ => {
                let fx = self.lagrange.eval(xi[0]);
                let fy = self.lagrange.eval(xi[1]);
                let dx = self.lagrange.eval_deriv(xi[0]);
                let dy = self.lagrange.eval_deriv(xi[1]);
                let n1 = self.degree + 1;
                let mut out = Vec::with_capacity(n1 * n1);
                for j in 0..n1 {
                    for i in 0..n1 {
                        out.push([dx[i] * fy[j], fx[i] * dy[j]]);
                    }
                }
                out
            }
        }
    }

    /// Quadrature value of the monomial x^k over the reference element
    /// (x is the first coordinate); exact for k <= 2 * quad_order - 1.
    pub fn integrate_monomial(&self, k: u32) -> f64 {
        self.quad_points
            .iter()
            .zip(&self.quad_weights)
            .map(|(p, w)| w * p[0].powi(k as i32))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(BasisTable::build(0, 1, 4).is_err());
        assert!(BasisTable::build(11, 1, 13).is_err());
        assert!(BasisTable::build(3, 3, 5).is_err());
        assert!(BasisTable::build(3, 1, 3).is_err());
    }

    #[test]
    fn linear_basis_is_the_hat_pair() {
        let t = BasisTable::with_default_quadrature(1, 1).unwrap();
        assert_eq!(t.nodes_1d(), &[-1.0, 1.0]);
        for q in 0..t.n_quad() {
            let x = t.quad_points()[q][0];
            assert!((t.phi(q, 0) - (1.0 - x) / 2.0).abs() < 1e-14);
            assert!((t.phi(q, 1) - (1.0 + x) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_nodes_include_midpoint() {
        let t = BasisTable::with_default_quadrature(2, 1).unwrap();
        assert!((t.nodes_1d()[1]).abs() < 1e-15);
    }

    #[test]
    fn quartic_interior_nodes_match_bisection_oracle() {
        // interior Lobatto nodes for degree 4 are the roots of P_4';
        // bracket the positive root and bisect on the recurrence
        let f = |x: f64| {
            let p3 = 0.5 * (5.0 * x * x * x - 3.0 * x);
            let p4 = (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
            4.0 * (p3 - x * p4) / (1.0 - x * x)
        };
        let (mut lo, mut hi) = (0.1, 0.99);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((oracle - (3.0f64 / 7.0).sqrt()).abs() < 1e-12);
        let t = BasisTable::with_default_quadrature(4, 1).unwrap();
        assert!((t.nodes_1d()[3] - oracle).abs() < 1e-13);
        assert!((t.nodes_1d()[1] + oracle).abs() < 1e-13);
    }

    #[test]
    fn kronecker_property_all_degrees() {
        for p in 1..=MAX_DEGREE {
            let t = BasisTable::with_default_quadrature(p, 1).unwrap();
            for (j, &xj) in t.nodes_1d().iter().enumerate() {
                let vals = t.eval_at([xj, 0.0]);
                for (i, v) in vals.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (v - expect).abs() < 1e-12,
                        "degree {p}: basis {i} at node {j} = {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_gradient_sum() {
        for p in [1, 3, 7, 10] {
            for dim in [1, 2] {
                let t = BasisTable::with_default_quadrature(p, dim).unwrap();
                for q in 0..t.n_quad() {
                    let s: f64 = (0..t.n_nodes()).map(|i| t.phi(q, i)).sum();
                    assert!((s - 1.0).abs() < 1e-12, "p={p} dim={dim}: sum={s}");
                    for d in 0..dim {
                        let g: f64 = (0..t.n_nodes()).map(|i| t.dphi(q, i, d)).sum();
                        assert!(g.abs() < 1e-11, "p={p} dim={dim}: grad sum={g}");
                    }
                }
            }
        }
    }

    #[test]
    fn weights_sum_to_reference_measure() {
        for p in 1..=MAX_DEGREE {
            let t1 = BasisTable::with_default_quadrature(p, 1).unwrap();
            assert!((t1.quad_weights().iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let t2 = BasisTable::with_default_quadrature(p, 2).unwrap();
            assert!((t2.quad_weights().iter().sum::<f64>() - 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn quadrature_is_exact_below_design_order() {
        // relative accuracy 1e-13 for all monomials with k <= 2q-1
        for p in 1..=MAX_DEGREE {
            let t = BasisTable::with_default_quadrature(p, 1).unwrap();
            for k in 0..=(2 * t.quad_order() - 1) as u32 {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = t.integrate_monomial(k);
                assert!(
                    (got - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                    "p={p} k={k}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn monomial_examples() {
        let t = BasisTable::build(2, 1, 3).unwrap();
        assert!((t.integrate_monomial(0) - 2.0).abs() < 1e-14);
        assert!(t.integrate_monomial(1).abs() < 1e-14);
        assert!((t.integrate_monomial(4) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn tensor_basis_is_product_of_1d_factors() {
        let p = 4;
        let t2 = BasisTable::with_default_quadrature(p, 2).unwrap();
        let t1 = BasisTable::with_default_quadrature(p, 1).unwrap();
        let q1 = t1.n_quad();
        for qj in 0..q1 {
            for qi in 0..q1 {
                let q = qj * q1 + qi;
                for j in 0..=p {
                    for i in 0..=p {
                        let expect = t1.phi(qi, i) * t1.phi(qj, j);
                        let got = t2.phi(q, j * (p + 1) + i);
                        assert!((got - expect).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let t = BasisTable::with_default_quadrature(10, 1).unwrap();
        let h = 1e-6;
        for &x in &[-0.83, -0.2, 0.41, 0.97] {
            let d = t.eval_grad_at([x, 0.0]);
            let up = t.eval_at([x + h, 0.0]);
            let dn = t.eval_at([x - h, 0.0]);
            for i in 0..t.n_nodes() {
                let fd = (up[i] - dn[i]) / (2.0 * h);
                assert!((d[i][0] - fd).abs() < 1e-5 * (1.0 + fd.abs()));
            }
        }
    }
}
