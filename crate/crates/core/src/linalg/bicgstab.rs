use super::ops::LinearOp;
use super::{axpy, dot, norm2};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BicgstabOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// BiCGStab without preconditioning, starting from x = 0.
///
/// Returns the solution and the iteration count, or a numeric error after
/// `max_iter` iterations (restarts on breakdown/stagnation are counted).
pub fn bicgstab<T: LinearOp>(
    op: &T,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let out = bicgstab_detailed(op, rhs, tol, max_iter);
    if out.converged {
        Ok((out.x, out.iterations))
    } else {
        Err(Error::Numeric(format!(
            "bicgstab did not converge: relative residual {:.3e} after {} iterations",
            out.relative_residual, out.iterations
        )))
    }
}

/// BiCGStab returning the best iterate even on failure. The recursive
/// residual is verified against the true residual on convergence, and the
/// iteration restarts from the best iterate on breakdown or stagnation.
pub fn bicgstab_detailed<T: LinearOp>(
    op: &T,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> BicgstabOutcome {
    let n = op.dim();
    assert_eq!(rhs.len(), n);
    assert!(tol > 0.0);
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        return BicgstabOutcome {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let target = tol * bnorm;
    let tiny = 1e-40;

    let mut x = vec![0.0; n];
    let mut best_x = x.clone();
    let mut best_norm = f64::INFINITY;
    let mut iterations = 0;
    let mut stale_restarts = 0;

    let mut r = vec![0.0; n];
    let mut r_hat = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];

    'outer: while iterations < max_iter && stale_restarts < 4 {
        // fresh true residual for this (re)start
        op.apply(&x, &mut t);
        for i in 0..n {
            r[i] = rhs[i] - t[i];
        }
        let rnorm = norm2(&r);
        if rnorm <= target {
            return BicgstabOutcome {
                x,
                iterations,
                relative_residual: rnorm / bnorm,
                converged: true,
            };
        }
        if rnorm < best_norm * (1.0 - 1e-12) {
            best_norm = rnorm;
            best_x.copy_from_slice(&x);
            stale_restarts = 0;
        } else {
            stale_restarts += 1;
            if stale_restarts >= 4 {
                break;
            }
            if !(rnorm <= best_norm) {
                // worse than (or not comparable to) the best: restore it
                x.copy_from_slice(&best_x);
                op.apply(&x, &mut t);
                for i in 0..n {
                    r[i] = rhs[i] - t[i];
                }
            }
        }
        r_hat.copy_from_slice(&r);
        p.iter_mut().for_each(|z| *z = 0.0);
        v.iter_mut().for_each(|z| *z = 0.0);
        let mut rho = 1.0;
        let mut alpha = 1.0;
        let mut omega = 1.0;
        let rhat_norm = norm2(&r_hat);
        let mut rnorm_cur = rhat_norm;

        // restart only on breakdown or to verify a recursive-residual
        // convergence signal against the true residual; breakdown guards
        // are relative to the running residual scales
        while iterations < max_iter {
            iterations += 1;
            let rho_new = dot(&r_hat, &r);
            if !rho_new.is_finite() || rho_new.abs() < tiny * rhat_norm * rnorm_cur {
                continue 'outer;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            op.apply(&p, &mut v);
            let rhv = dot(&r_hat, &v);
            if !rhv.is_finite() || rhv.abs() < tiny * rhat_norm * norm2(&v) {
                continue 'outer;
            }
            alpha = rho / rhv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            let snorm = norm2(&s);
            if snorm <= 0.5 * target {
                axpy(alpha, &p, &mut x);
                continue 'outer; // verify with the true residual
            }
            op.apply(&s, &mut t);
            let tnorm2 = dot(&t, &t);
            if !tnorm2.is_finite() || tnorm2 == 0.0 {
                continue 'outer;
            }
            omega = dot(&t, &s) / tnorm2;
            if !omega.is_finite() || omega.abs() * tnorm2.sqrt() < tiny * snorm {
                continue 'outer;
            }
            for i in 0..n {
                x[i] += alpha * p[i] + omega * s[i];
                r[i] = s[i] - omega * t[i];
            }
            rnorm_cur = norm2(&r);
            if !rnorm_cur.is_finite() || rnorm_cur <= target {
                continue 'outer; // verify with the true residual
            }
        }
    }
    // report the better of the last and the best-seen iterate, judged by
    // the true residual (the loop may stop mid-cycle with progress in x)
    let true_norm = |y: &[f64], t: &mut Vec<f64>| -> f64 {
        op.apply(y, t);
        let mut s = 0.0;
        for i in 0..n {
            let d = rhs[i] - t[i];
            s += d * d;
        }
        s.sqrt()
    };
    let last_res = true_norm(&x, &mut t);
    let best_res = true_norm(&best_x, &mut t);
    let (x, true_res) = if last_res.is_finite() && last_res < best_res {
        (x, last_res)
    } else {
        (best_x, best_res)
    };
    BicgstabOutcome {
        converged: true_res <= target,
        x,
        iterations,
        relative_residual: true_res / bnorm,
    }
}
