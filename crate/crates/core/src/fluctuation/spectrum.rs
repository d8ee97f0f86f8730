use serde::Serialize;

use super::fit::{loglog_fit, LinearFit};
use super::grid::{QGrid, ScaleGrid};
use super::surface::{fluctuation_surface, FluctuationSurface};
use crate::error::{Error, Result};

/// Fractal dimension of the support of a time series.
pub const SUPPORT_DIMENSION: f64 = 1.0;

/// Generalized Hurst exponents and the singularity spectrum derived from
/// them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultifractalResult {
    pub q: Vec<f64>,
    pub h: Vec<f64>,
    pub h_stderr: Vec<f64>,
    pub r_squared: Vec<f64>,
    /// `h(2)`, present when the q grid contains 2.
    pub hurst: Option<f64>,
    pub hurst_stderr: Option<f64>,
    pub tau: Vec<f64>,
    pub alpha: Vec<f64>,
    pub f_alpha: Vec<f64>,
    pub delta_h: f64,
    pub delta_alpha: f64,
    /// Set when α(q) is not non-increasing in q.
    pub alpha_non_monotone: bool,
    pub fits: Vec<LinearFit>,
}

/// Fits `h(q)` per row of the surface and takes the Legendre transform via
/// finite differences on the q grid.
pub fn multifractal_analysis(surface: &FluctuationSurface) -> Result<MultifractalResult> {
    let q = surface.q.values().to_vec();
    if q.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "multifractal analysis needs at least 3 q values, got {}",
            q.len()
        )));
    }
    let s: Vec<f64> = surface.scales.scales().iter().map(|&v| v as f64).collect();
    let fits = surface
        .values
        .iter()
        .map(|row| loglog_fit(&s, row))
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = fits.iter().map(|f| f.slope).collect();

    let tau: Vec<f64> = q.iter().zip(&h).map(|(q, h)| mass_exponent(*q, *h)).collect();
    let dh = derivative(&q, &h);
    let alpha: Vec<f64> = (0..q.len()).map(|i| h[i] + q[i] * dh[i]).collect();
    let f_alpha: Vec<f64> = (0..q.len()).map(|i| q[i] * (alpha[i] - h[i]) + 1.0).collect();

    let hurst_idx = surface.q.position(2.0);
    Ok(MultifractalResult {
        h_stderr: fits.iter().map(|f| f.slope_stderr).collect(),
        r_squared: fits.iter().map(|f| f.r_squared).collect(),
        hurst: hurst_idx.map(|i| h[i]),
        hurst_stderr: hurst_idx.map(|i| fits[i].slope_stderr),
        delta_h: spread(&h),
        delta_alpha: spread(&alpha),
        alpha_non_monotone: alpha.windows(2).any(|w| w[1] > w[0]),
        q,
        h,
        tau,
        alpha,
        f_alpha,
        fits,
    })
}

/// `τ(q) = q h(q) − D_f`.
pub fn mass_exponent(q: f64, h: f64) -> f64 {
    q * h - SUPPORT_DIMENSION
}

/// Central differences inside, one-sided at the ends.
fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// DFA estimate of the Hurst index: slope of `log F_2(s)` against `log s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfaResult {
    pub hurst: f64,
    pub stderr: f64,
    pub fit: LinearFit,
    pub scales: Vec<usize>,
    pub f2: Vec<f64>,
}

pub fn dfa(series: &[f64], grid: &ScaleGrid, detrend_order: usize) -> Result<DfaResult> {
    let q = QGrid::new(vec![2.0])?;
    let surface = fluctuation_surface(series, &q, grid, detrend_order)?;
    let s: Vec<f64> = grid.scales().iter().map(|&v| v as f64).collect();
    let f2 = surface.values.into_iter().next().expect("one q row");
    let fit = loglog_fit(&s, &f2)?;
    Ok(DfaResult {
        hurst: fit.slope,
        stderr: fit.slope_stderr,
        fit,
        scales: grid.scales().to_vec(),
        f2,
    })
}
