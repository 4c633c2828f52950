use super::CsrMatrix;

/// A linear operator on stacked coefficient vectors.
pub trait LinearOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOp for CsrMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
}

/// The 2x2 block matrix of the linearized backward-Euler system,
///
/// ```text
/// | tau A        M              |   | w |
/// | M           -eps2 A - Jpsi  | * | u |
/// ```
///
/// acting on stacked `(w, u)` vectors of length `2 n`. With
/// `nonlinear_jacobian = None` this is the constant-coefficient part alone.
pub struct BlockOperator<'a> {
    pub stiffness: &'a CsrMatrix,
    pub mass: &'a CsrMatrix,
    pub nonlinear_jacobian: Option<&'a CsrMatrix>,
    pub tau: f64,
    pub eps2: f64,
}

impl LinearOp for BlockOperator<'_> {
    fn dim(&self) -> usize {
        2 * self.mass.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.mass.n_rows();
        debug_assert_eq!(x.len(), 2 * n);
        debug_assert_eq!(y.len(), 2 * n);
        let (w, u) = x.split_at(n);
        let (y1, y2) = y.split_at_mut(n);
        // y1 = tau A w + M u
        self.stiffness.matvec(w, y1);
        for v in y1.iter_mut() {
            *v *= self.tau;
        }
        self.mass.matvec_add(1.0, u, y1);
        // y2 = M w - eps2 A u - Jpsi u
        self.mass.matvec(w, y2);
        self.stiffness.matvec_add(-self.eps2, u, y2);
        if let Some(jac) = self.nonlinear_jacobian {
            jac.matvec_add(-1.0, u, y2);
        }
    }
}

/// Symmetric Jacobi scaling of an operator: `D^{-1/2} A D^{-1/2}`.
///
/// Solving the scaled system for `y` and returning `x = D^{-1/2} y`
/// preserves symmetry, so a Lanczos or BiCGStab run on the wrapped
/// operator behaves like a diagonally preconditioned solve.
pub struct JacobiScaledOp<'a, T: LinearOp> {
    inner: &'a T,
    inv_sqrt_diag: Vec<f64>,
}

impl<'a, T: LinearOp> JacobiScaledOp<'a, T> {
    /// `diag` must hold strictly positive entries of length `inner.dim()`.
    pub fn new(inner: &'a T, diag: &[f64]) -> Self {
        assert_eq!(diag.len(), inner.dim());
        let inv_sqrt_diag = diag
            .iter()
            .map(|&d| {
                assert!(d > 0.0, "Jacobi scaling requires a positive diagonal");
                1.0 / d.sqrt()
            })
            .collect();
        JacobiScaledOp {
            inner,
            inv_sqrt_diag,
        }
    }

    /// Map a right-hand side b into the scaled system: `D^{-1/2} b`.
    pub fn scale_rhs(&self, b: &[f64]) -> Vec<f64> {
        b.iter()
            .zip(&self.inv_sqrt_diag)
            .map(|(x, s)| x * s)
            .collect()
    }

    /// Map a scaled solution y back: `x = D^{-1/2} y`.
    pub fn unscale_solution(&self, y: &[f64]) -> Vec<f64> {
        self.scale_rhs(y)
    }
}

impl<T: LinearOp> LinearOp for JacobiScaledOp<'_, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let xs = self.scale_rhs(x);
        self.inner.apply(&xs, y);
        for (v, s) in y.iter_mut().zip(&self.inv_sqrt_diag) {
            *v *= s;
        }
    }
}
