use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares y = slope * x + intercept.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Fit(format!(
            "regression needs at least 2 points with matching lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(Error::Fit("degenerate x-spread in regression".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(Regression {
        slope,
        intercept,
        r2,
    })
}

/// Least squares on (log10 x, log10 y); inputs must be strictly positive.
pub fn loglog_regression(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.iter().any(|&x| x <= 0.0) || ys.iter().any(|&y| y <= 0.0) {
        return Err(Error::Fit("log-log regression requires positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    linear_regression(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_has_slope_two() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let r = loglog_regression(&xs, &ys).unwrap();
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert!((r.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prefactor_lands_in_intercept() {
        let xs: [f64; 3] = [1.0, 3.0, 9.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5)).collect();
        let r = loglog_regression(&xs, &ys).unwrap();
        assert!((r.slope - 1.5).abs() < 1e-12);
        assert!((r.intercept - 3f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spread_is_rejected() {
        assert!(linear_regression(&[2.0, 2.0], &[1.0, 5.0]).is_err());
        assert!(loglog_regression(&[1.0, -1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn single_point_is_rejected() {
        assert!(linear_regression(&[1.0], &[1.0]).is_err());
    }
}
