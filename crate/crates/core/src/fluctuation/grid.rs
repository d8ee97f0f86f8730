use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_S_MIN: usize = 20;
pub const DEFAULT_N_SCALES: usize = 30;

/// Spacing rule for window sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Log-uniform integers between the bounds.
    #[default]
    Log,
    /// Powers of two between the bounds. Matches the discrete scale
    /// invariance of dyadic cascades.
    Dyadic,
}

/// Distinct, increasing window sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGrid {
    scales: Vec<usize>,
}

impl ScaleGrid {
    /// Takes arbitrary window sizes; sorts and deduplicates them.
    pub fn from_scales(mut scales: Vec<usize>) -> Result<Self> {
        scales.sort_unstable();
        scales.dedup();
        if scales.first().is_none_or(|&s| s < 2) {
            return Err(Error::Config("scale grid needs window sizes >= 2".into()));
        }
        Ok(ScaleGrid { scales })
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn s_min(&self) -> usize {
        self.scales[0]
    }

    pub fn s_max(&self) -> usize {
        *self.scales.last().expect("grid is never empty")
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

fn check_bounds(m: usize, s_min: usize, s_max: usize) -> Result<()> {
    if s_min < 4 {
        return Err(Error::Config(format!("s_min must be at least 4, got {s_min}")));
    }
    if m < 4 * s_min {
        return Err(Error::SeriesTooShort {
            len: m,
            required: 4 * s_min,
        });
    }
    if s_max < s_min {
        return Err(Error::Config(format!("s_max {s_max} is below s_min {s_min}")));
    }
    if s_max > m / 4 {
        return Err(Error::Config(format!(
            "s_max {s_max} exceeds a quarter of the series length ({})",
            m / 4
        )));
    }
    Ok(())
}

/// `n_scales` log-spaced integers in `[s_min, s_max]`, fewer after
/// rounding collisions. `s_max = None` means `M / 4`.
pub fn make_scale_grid(m: usize, s_min: usize, s_max: Option<usize>, n_scales: usize) -> Result<ScaleGrid> {
    let s_max = s_max.unwrap_or(m / 4);
    check_bounds(m, s_min, s_max)?;
    if n_scales < 2 {
        return Err(Error::Config(format!("need at least 2 scales, got {n_scales}")));
    }
    let (lo, hi) = ((s_min as f64).ln(), (s_max as f64).ln());
    let last = (n_scales - 1) as f64;
    let scales = (0..n_scales)
        .map(|k| match k {
            0 => s_min,
            k if k == n_scales - 1 => s_max,
            k => (lo + (hi - lo) * k as f64 / last).exp().round() as usize,
        })
        .collect();
    ScaleGrid::from_scales(scales)
}

/// Powers of two in `[s_min, s_max]`.
pub fn make_dyadic_grid(m: usize, s_min: usize, s_max: Option<usize>) -> Result<ScaleGrid> {
    let s_max = s_max.unwrap_or(m / 4);
    check_bounds(m, s_min, s_max)?;
    let scales: Vec<usize> = (0..usize::BITS)
        .map(|k| 1usize << k)
        .skip_while(|&s| s < s_min)
        .take_while(|&s| s <= s_max)
        .collect();
    if scales.len() < 2 {
        return Err(Error::Config(format!(
            "fewer than two powers of two in [{s_min}, {s_max}]"
        )));
    }
    ScaleGrid::from_scales(scales)
}

/// Builds either grid kind; `n_scales` is ignored for dyadic grids.
pub fn build_grid(kind: GridKind, m: usize, s_min: usize, s_max: Option<usize>, n_scales: usize) -> Result<ScaleGrid> {
    match kind {
        GridKind::Log => make_scale_grid(m, s_min, s_max, n_scales),
        GridKind::Dyadic => make_dyadic_grid(m, s_min, s_max),
    }
}

/// Moment orders `q`. Values are formed as `start + i * step`, so grids
/// with dyadic steps contain 0 and 2 exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid(Vec<f64>);

impl QGrid {
    pub fn new(mut q: Vec<f64>) -> Result<Self> {
        if q.is_empty() || q.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("q grid must be non-empty and finite".into()));
        }
        q.sort_by(f64::total_cmp);
        if q.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("q grid has duplicate values".into()));
        }
        Ok(QGrid(q))
    }

    pub fn range(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(max >= min) {
            return Err(Error::Config(format!("bad q range {min}..{max} step {step}")));
        }
        let n = ((max - min) / step + 1e-9).floor() as usize + 1;
        let q = (0..n)
            .map(|i| {
                let v = min + i as f64 * step;
                if v.abs() < step * 1e-9 {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        QGrid::new(q)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn position(&self, q: f64) -> Option<usize> {
        self.0.iter().position(|&v| v == q)
    }
}

impl Default for QGrid {
    /// −4 to 4 in steps of 0.25.
    fn default() -> Self {
        QGrid::range(-4.0, 4.0, 0.25).expect("default q grid")
    }
}
