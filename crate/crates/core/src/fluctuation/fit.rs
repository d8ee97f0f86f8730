//! Ordinary least squares on raw and base-10 log coordinates.

use serde::Serialize;

use crate::error::{Error, Result};

/// Straight-line OLS fit with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// OLS of `y` on `x`. Needs at least 3 points and some spread in `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::Config(format!(
            "fit inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("fit needs at least 3 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in fit input".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all abscissae are equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let sigma2 = ssr / (nf - 2.0);
    let slope_stderr = (sigma2 / sxx).sqrt();
    let sum_x2: f64 = x.iter().map(|v| v * v).sum();
    let intercept_stderr = (sigma2 * sum_x2 / (nf * sxx)).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ssr / syy).max(0.0) };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        r_squared,
        residuals,
    })
}

/// OLS on `(log10 x, log10 y)`; the slope is the scaling exponent.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() < 3 || y.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "fit needs at least 3 points, got {}",
            x.len().min(y.len())
        )));
    }
    if let Some(v) = x.iter().chain(y).find(|v| !(**v > 0.0)) {
        return Err(Error::Domain(format!("log-log fit needs positive values, got {v}")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    linear_fit(&lx, &ly)
}
