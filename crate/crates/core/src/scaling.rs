//! Cross-sectional scaling laws: Taylor's mean-variance relation, the
//! drift of its exponent with time scale, and Hurst index against mean
//! volume.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fluctuation::{linear_fit, loglog_fit};
use crate::ingest::VolumeSeries;

/// Default time scales in trading minutes (1 minute to 20 days).
pub const DEFAULT_DT_GRID: [u32; 10] = [1, 2, 5, 10, 30, 60, 120, 240, 1200, 4800];

/// Time-averaged moments of one instrument at one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstrumentSummary {
    pub id: String,
    pub dt_minutes: u32,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub hurst_original: Option<f64>,
    pub hurst_adjusted: Option<f64>,
}

pub fn summarize_values(id: &str, dt_minutes: u32, values: &[f64]) -> Result<InstrumentSummary> {
    if values.is_empty() {
        return Err(Error::InsufficientData("cannot summarize an empty series".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(InstrumentSummary {
        id: id.to_string(),
        dt_minutes,
        mean,
        std: var.sqrt(),
        hurst_original: None,
        hurst_adjusted: None,
    })
}

pub fn summarize(id: &str, series: &VolumeSeries) -> Result<InstrumentSummary> {
    summarize_values(id, series.dt_minutes(), series.values())
}

/// A fitted scaling exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub intercept_stderr: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Points dropped before fitting (e.g. σ = 0).
    pub excluded: usize,
    pub dt_minutes: Option<u32>,
}

impl ScalingFit {
    /// Hand-specified exponent, e.g. a published value.
    pub fn given(exponent: f64, stderr: f64) -> Self {
        ScalingFit {
            exponent,
            intercept: 0.0,
            stderr,
            intercept_stderr: 0.0,
            r_squared: 1.0,
            n_points: 0,
            excluded: 0,
            dt_minutes: None,
        }
    }
}

fn require_spread(x: &[f64]) -> Result<()> {
    if x.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::NoCrossSectionalVariation);
    }
    Ok(())
}

/// `σ ∼ ⟨V⟩^β` across instruments at one time scale.
pub fn fit_taylor(summaries: &[InstrumentSummary]) -> Result<ScalingFit> {
    let dt = summaries.first().map(|s| s.dt_minutes);
    if summaries.iter().any(|s| Some(s.dt_minutes) != dt) {
        return Err(Error::Config("Taylor fit needs summaries at a common time scale".into()));
    }
    if let Some(s) = summaries.iter().find(|s| !(s.mean > 0.0)) {
        return Err(Error::Domain(format!("instrument {} has non-positive mean", s.id)));
    }
    let kept: Vec<&InstrumentSummary> = summaries.iter().filter(|s| s.std > 0.0).collect();
    let excluded = summaries.len() - kept.len();
    if kept.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "Taylor fit needs 3 instruments with σ > 0, have {}",
            kept.len()
        )));
    }
    let mean: Vec<f64> = kept.iter().map(|s| s.mean).collect();
    let std: Vec<f64> = kept.iter().map(|s| s.std).collect();
    require_spread(&mean)?;
    let fit = loglog_fit(&mean, &std)?;
    Ok(ScalingFit {
        exponent: fit.slope,
        intercept: fit.intercept,
        stderr: fit.slope_stderr,
        intercept_stderr: fit.intercept_stderr,
        r_squared: fit.r_squared,
        n_points: kept.len(),
        excluded,
        dt_minutes: dt,
    })
}

/// `β(Δt) = β* + γ_β log₁₀ Δt`; every fit must carry its `dt_minutes`.
pub fn fit_beta_trend(fits: &[ScalingFit]) -> Result<ScalingFit> {
    let dt: Vec<f64> = fits
        .iter()
        .map(|f| {
            f.dt_minutes
                .map(f64::from)
                .ok_or_else(|| Error::Config("β fit lacks its time scale".into()))
        })
        .collect::<Result<_>>()?;
    if fits.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "β trend needs at least 3 time scales, got {}",
            fits.len()
        )));
    }
    let mut distinct = dt.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData("β trend needs 3 distinct time scales".into()));
    }
    let span = distinct.last().unwrap() / distinct[0];
    if span < 10.0 {
        return Err(Error::InsufficientData(format!(
            "time scales span {span:.2}x, need at least one decade"
        )));
    }
    let log_dt: Vec<f64> = dt.iter().map(|v| v.log10()).collect();
    let beta: Vec<f64> = fits.iter().map(|f| f.exponent).collect();
    let fit = linear_fit(&log_dt, &beta)?;
    Ok(ScalingFit {
        exponent: fit.slope,
        intercept: fit.intercept,
        stderr: fit.slope_stderr,
        intercept_stderr: fit.intercept_stderr,
        r_squared: fit.r_squared,
        n_points: fits.len(),
        excluded: 0,
        dt_minutes: None,
    })
}

/// `H = H* + γ_H log₁₀⟨V⟩` across instruments; `pairs` are `(H, ⟨V⟩)`.
pub fn fit_hurst_vs_volume(pairs: &[(f64, f64)]) -> Result<ScalingFit> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "H vs volume fit needs at least 3 instruments, got {}",
            pairs.len()
        )));
    }
    if let Some((_, v)) = pairs.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Domain(format!("mean volume must be positive, got {v}")));
    }
    let log_v: Vec<f64> = pairs.iter().map(|(_, v)| v.log10()).collect();
    require_spread(&log_v)?;
    let h: Vec<f64> = pairs.iter().map(|(h, _)| *h).collect();
    let fit = linear_fit(&log_v, &h)?;
    Ok(ScalingFit {
        exponent: fit.slope,
        intercept: fit.intercept,
        stderr: fit.slope_stderr,
        intercept_stderr: fit.intercept_stderr,
        r_squared: fit.r_squared,
        n_points: pairs.len(),
        excluded: 0,
        dt_minutes: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaComparison {
    pub label: String,
    pub gamma_h: f64,
    pub gamma_h_stderr: f64,
    pub discrepancy: f64,
    /// `|γ_β − γ_H|` over the combined standard error; infinite if both
    /// errors are zero and the slopes differ.
    pub z: f64,
}

/// Side-by-side γ_β and γ_H values. Carries no verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaReport {
    pub gamma_beta: f64,
    pub gamma_beta_stderr: f64,
    pub comparisons: Vec<GammaComparison>,
}

/// Compares γ_β with one or more labelled γ_H fits (original, adjusted).
pub fn gamma_consistency(gamma_beta: &ScalingFit, gamma_h: &[(&str, &ScalingFit)]) -> Result<GammaReport> {
    let finite = |f: &ScalingFit| f.exponent.is_finite() && f.stderr.is_finite() && f.stderr >= 0.0;
    if !finite(gamma_beta) || gamma_h.iter().any(|(_, f)| !finite(f)) {
        return Err(Error::Domain("γ fits must have finite exponents and standard errors".into()));
    }
    let comparisons = gamma_h
        .iter()
        .map(|(label, f)| {
            let discrepancy = (gamma_beta.exponent - f.exponent).abs();
            let se = gamma_beta.stderr.hypot(f.stderr);
            let z = if discrepancy == 0.0 {
                0.0
            } else if se == 0.0 {
                f64::INFINITY
            } else {
                discrepancy / se
            };
            GammaComparison {
                label: label.to_string(),
                gamma_h: f.exponent,
                gamma_h_stderr: f.stderr,
                discrepancy,
                z,
            }
        })
        .collect();
    Ok(GammaReport {
        gamma_beta: gamma_beta.exponent,
        gamma_beta_stderr: gamma_beta.stderr,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(id: usize, dt: u32, mean: f64, std: f64) -> InstrumentSummary {
        InstrumentSummary {
            id: format!("s{id}"),
            dt_minutes: dt,
            mean,
            std,
            hurst_original: None,
            hurst_adjusted: None,
        }
    }

    fn fit_at(dt: u32, beta: f64) -> ScalingFit {
        ScalingFit {
            dt_minutes: Some(dt),
            ..ScalingFit::given(beta, 0.0)
        }
    }

    #[test]
    fn two_point_moments() {
        let s = summarize_values("a", 1, &[1.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.std), (2.0, 1.0));
        assert_eq!(summarize_values("c", 1, &[4.0; 9]).unwrap().std, 0.0);
        assert!(summarize_values("e", 1, &[]).is_err());
    }

    #[test]
    fn exact_taylor_law() {
        let s: Vec<_> = (0..10)
            .map(|i| {
                let m = 10f64.powf(1.0 + i as f64 * 0.3);
                summary(i, 5, m, m.powf(0.75))
            })
            .collect();
        let f = fit_taylor(&s).unwrap();
        assert!((f.exponent - 0.75).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        assert_eq!(f.dt_minutes, Some(5));
    }

    #[test]
    fn identical_instruments_rejected() {
        let s: Vec<_> = (0..5).map(|i| summary(i, 1, 10.0, 2.0)).collect();
        assert!(matches!(fit_taylor(&s), Err(Error::NoCrossSectionalVariation)));
    }

    #[test]
    fn zero_sigma_excluded() {
        let mut s: Vec<_> = (1..=4).map(|i| summary(i, 1, i as f64 * 10.0, i as f64)).collect();
        s.push(summary(9, 1, 50.0, 0.0));
        let f = fit_taylor(&s).unwrap();
        assert_eq!((f.n_points, f.excluded), (4, 1));
        s.truncate(2);
        assert!(matches!(fit_taylor(&s), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn mixed_dt_rejected() {
        let s = vec![summary(0, 1, 1.0, 1.0), summary(1, 1, 2.0, 1.0), summary(2, 5, 3.0, 1.0)];
        assert!(matches!(fit_taylor(&s), Err(Error::Config(_))));
    }

    #[test]
    fn beta_trend_exact_line() {
        let fits: Vec<_> = DEFAULT_DT_GRID
            .iter()
            .map(|&dt| fit_at(dt, 0.7 + 0.059 * (dt as f64).log10()))
            .collect();
        let f = fit_beta_trend(&fits).unwrap();
        assert!((f.exponent - 0.059).abs() < 1e-14);
        assert!((f.intercept - 0.7).abs() < 1e-14);
    }

    #[test]
    fn beta_trend_flat() {
        let fits: Vec<_> = [1, 10, 100].iter().map(|&dt| fit_at(dt, 0.8)).collect();
        assert!(fit_beta_trend(&fits).unwrap().exponent.abs() < 1e-15);
    }

    #[test]
    fn beta_trend_trading_minutes() {
        // 20 trading days at 240 minutes per day, converted by hand
        let twenty_days = 20 * 240;
        assert_eq!(twenty_days, 4800);
        let fits: Vec<_> = [1, 120, twenty_days]
            .iter()
            .map(|&dt| fit_at(dt, 0.5 + 0.1 * (dt as f64).log10()))
            .collect();
        let f = fit_beta_trend(&fits).unwrap();
        assert!((f.exponent - 0.1).abs() < 1e-13);
    }

    #[test]
    fn beta_trend_preconditions() {
        assert!(fit_beta_trend(&[fit_at(1, 0.5), fit_at(100, 0.6)]).is_err());
        assert!(fit_beta_trend(&[fit_at(1, 0.5), fit_at(2, 0.6), fit_at(5, 0.7)]).is_err());
        assert!(fit_beta_trend(&vec![ScalingFit::given(0.5, 0.0); 3]).is_err());
    }

    #[test]
    fn hurst_vs_volume_exact_line() {
        let pairs: Vec<(f64, f64)> = (0..8)
            .map(|i| {
                let v = 10f64.powf(2.0 + 0.4 * i as f64);
                (0.6 + 0.06 * v.log10(), v)
            })
            .collect();
        let f = fit_hurst_vs_volume(&pairs).unwrap();
        assert!((f.exponent - 0.06).abs() < 1e-13);
        assert!((f.intercept - 0.6).abs() < 1e-12);
        assert!(matches!(
            fit_hurst_vs_volume(&[(0.5, 3.0), (0.6, 3.0), (0.7, 3.0)]),
            Err(Error::NoCrossSectionalVariation)
        ));
    }

    #[test]
    fn gamma_report_published_values() {
        let gb = ScalingFit::given(0.059, 0.001);
        let gh = ScalingFit::given(0.06, 0.03);
        let r = gamma_consistency(&gb, &[("original", &gh)]).unwrap();
        let c = &r.comparisons[0];
        assert!((c.discrepancy - 0.001).abs() < 1e-12);
        // 0.001 / sqrt(0.001² + 0.03²)
        assert!((c.z - 0.033315).abs() < 1e-5);
        let same = gamma_consistency(&gb, &[("same", &gb)]).unwrap();
        assert_eq!(same.comparisons[0].z, 0.0);
    }
}
