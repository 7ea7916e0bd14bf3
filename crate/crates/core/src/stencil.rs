//! Finite-difference stencils and least-squares line fits.

use crate::error::{Error, Result};

/// Centered two-point estimate of `f'(t)`.
pub fn first_derivative(mut f: impl FnMut(f64) -> Result<f64>, t: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
}

/// Five-point estimate of `f''(t)` with weights `(-1/12, 4/3, -5/2, 4/3, -1/12) / h^2`.
pub fn second_derivative(mut f: impl FnMut(f64) -> Result<f64>, t: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    let outer = f(t - 2.0 * h)? + f(t + 2.0 * h)?;
    let inner = f(t - h)? + f(t + h)?;
    let center = f(t)?;
    Ok((-outer / 12.0 + 4.0 * inner / 3.0 - 2.5 * center) / (h * h))
}

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("stencil step must be positive, got {h}")));
    }
    Ok(())
}

/// Ordinary least-squares fit `y = intercept + slope * x`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Numerical(format!("line fit needs >= 2 paired points, got {} and {}", x.len(), y.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("line fit input is not finite".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("line fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LineFit { intercept, slope, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_on_polynomials() {
        // exact for quartics
        let f = |t: f64| Ok(3.0 * t.powi(4) - t.powi(3) + 2.0 * t * t + t);
        let d2 = second_derivative(f, 0.5, 0.1).unwrap();
        assert!((d2 - (36.0 * 0.25 - 3.0 + 4.0)).abs() < 1e-10);
        let d1 = first_derivative(|t: f64| Ok(t * t), 1.0, 0.01).unwrap();
        assert!((d1 - 2.0).abs() < 1e-12);
        assert!(second_derivative(f, 0.0, 0.0).is_err());
    }

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14 && (fit.intercept - 2.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
        assert!(fit_line(&[1.0], &[1.0]).is_err());
    }
}
