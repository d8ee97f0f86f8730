//! Detrended fluctuation analysis and its multifractal generalization.

mod fit;
mod grid;
mod spectrum;
mod surface;

pub use fit::{linear_fit, loglog_fit, LinearFit};
pub use grid::{
    build_grid, make_dyadic_grid, make_scale_grid, GridKind, QGrid, ScaleGrid, DEFAULT_N_SCALES, DEFAULT_S_MIN,
};
pub use spectrum::{dfa, mass_exponent, multifractal_analysis, DfaResult, MultifractalResult, SUPPORT_DIMENSION};
pub use surface::{fluctuation_surface, profile, FluctuationSurface};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Parameters shared by DFA and MF-DFA runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub s_min: usize,
    /// `None` means a quarter of the series length.
    pub s_max: Option<usize>,
    pub n_scales: usize,
    pub grid: GridKind,
    pub detrend_order: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            q_min: -4.0,
            q_max: 4.0,
            q_step: 0.25,
            s_min: DEFAULT_S_MIN,
            s_max: None,
            n_scales: DEFAULT_N_SCALES,
            grid: GridKind::Log,
            detrend_order: 1,
        }
    }
}

impl AnalysisConfig {
    pub fn q_grid(&self) -> Result<QGrid> {
        QGrid::range(self.q_min, self.q_max, self.q_step)
    }

    pub fn scale_grid(&self, len: usize) -> Result<ScaleGrid> {
        build_grid(self.grid, len, self.s_min, self.s_max, self.n_scales)
    }

    /// Surface plus spectrum for one series.
    pub fn mfdfa(&self, series: &[f64]) -> Result<(FluctuationSurface, MultifractalResult)> {
        let surface = fluctuation_surface(series, &self.q_grid()?, &self.scale_grid(series.len())?, self.detrend_order)?;
        let result = multifractal_analysis(&surface)?;
        Ok((surface, result))
    }

    pub fn dfa(&self, series: &[f64]) -> Result<DfaResult> {
        dfa(series, &self.scale_grid(series.len())?, self.detrend_order)
    }
}
