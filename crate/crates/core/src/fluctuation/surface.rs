use serde::Serialize;

use super::grid::{QGrid, ScaleGrid};
use crate::error::{Error, Result};

/// `F_q(s)` on a `(q, s)` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationSurface {
    pub q: QGrid,
    pub scales: ScaleGrid,
    pub detrend_order: usize,
    /// Row per `q`, column per scale.
    pub values: Vec<Vec<f64>>,
    /// Windows whose detrended variance vanished; excluded from `q <= 0`.
    pub zero_windows: usize,
}

impl FluctuationSurface {
    /// `F_q(s)` for the row of moment `q`.
    pub fn row(&self, q: f64) -> Option<&[f64]> {
        self.q.position(q).map(|i| self.values[i].as_slice())
    }
}

/// Cumulative sum of deviations from the mean, with a leading zero so the
/// profile has `M + 1` points.
pub fn profile(series: &[f64]) -> Vec<f64> {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let mut out = Vec::with_capacity(series.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for x in series {
        acc += x - mean;
        out.push(acc);
    }
    out
}

/// Orthonormal polynomial basis on `0..s` up to degree `order`.
struct Basis {
    columns: Vec<Vec<f64>>,
}

impl Basis {
    fn new(s: usize, order: usize) -> Self {
        let half = (s as f64 - 1.0) / 2.0;
        let t: Vec<f64> = (0..s).map(|i| (i as f64 - half) / half.max(1.0)).collect();
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for degree in 0..=order {
            let mut v: Vec<f64> = t.iter().map(|x| x.powi(degree as i32)).collect();
            // two Gram-Schmidt passes keep the basis orthogonal to rounding
            for _ in 0..2 {
                for q in &columns {
                    let c = dot(q, &v);
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            columns.push(v);
        }
        Basis { columns }
    }

    /// Mean squared residual after removing the polynomial fit, and whether
    /// it is zero up to rounding.
    fn residual_variance(&self, window: &[f64], scratch: &mut Vec<f64>) -> (f64, bool) {
        scratch.clear();
        scratch.extend_from_slice(window);
        for q in &self.columns {
            let c = dot(q, scratch);
            scratch.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
        let var = dot(scratch, scratch) / window.len() as f64;
        let scale = window.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 16.0 * f64::EPSILON * scale;
        (var, var <= tol * tol)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Detrended variances for windows of size `s`, as pairs
/// `(k-th window from the start, k-th window from the end)`.
fn window_variances(profile: &[f64], s: usize, order: usize) -> Vec<[(f64, bool); 2]> {
    let basis = Basis::new(s, order);
    let m = profile.len() - 1;
    let n = m / s;
    let end = profile.len();
    let mut scratch = Vec::with_capacity(s);
    (0..n)
        .map(|k| {
            let head = &profile[k * s..(k + 1) * s];
            let tail = &profile[end - (k + 1) * s..end - k * s];
            [
                basis.residual_variance(head, &mut scratch),
                basis.residual_variance(tail, &mut scratch),
            ]
        })
        .collect()
}

/// q-th order fluctuation function from paired window variances.
fn moment(pairs: &[[(f64, bool); 2]], q: f64) -> Option<f64> {
    let all = || pairs.iter().flatten();
    if q > 0.0 {
        let top = all().map(|w| if w.1 { 0.0 } else { w.0 }).fold(0.0, f64::max);
        if top == 0.0 {
            return None;
        }
        let term = |w: &(f64, bool)| if w.1 { 0.0 } else { (w.0 / top).powf(q / 2.0) };
        let sum: f64 = pairs.iter().map(|[a, b]| term(a) + term(b)).sum();
        let mean = sum / (2 * pairs.len()) as f64;
        Some(top.sqrt() * mean.powf(1.0 / q))
    } else {
        let count = all().filter(|w| !w.1).count();
        if count == 0 {
            return None;
        }
        if q == 0.0 {
            let term = |w: &(f64, bool)| if w.1 { 0.0 } else { w.0.ln() };
            let sum: f64 = pairs.iter().map(|[a, b]| term(a) + term(b)).sum();
            Some((0.5 * sum / count as f64).exp())
        } else {
            let floor = all().filter(|w| !w.1).map(|w| w.0).fold(f64::INFINITY, f64::min);
            let term = |w: &(f64, bool)| if w.1 { 0.0 } else { (w.0 / floor).powf(q / 2.0) };
            let sum: f64 = pairs.iter().map(|[a, b]| term(a) + term(b)).sum();
            let mean = sum / count as f64;
            Some(floor.sqrt() * mean.powf(1.0 / q))
        }
    }
}

/// MF-DFA fluctuation functions.
///
/// The profile is cut into `⌊M/s⌋` windows from each end, a polynomial of
/// `detrend_order` is removed in every window, and the window variances
/// are combined as power means of order `q / 2` (log-mean at `q = 0`).
pub fn fluctuation_surface(series: &[f64], q: &QGrid, grid: &ScaleGrid, detrend_order: usize) -> Result<FluctuationSurface> {
    let m = series.len();
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("series contains non-finite values".into()));
    }
    if grid.s_min() < detrend_order + 2 {
        return Err(Error::Config(format!(
            "s_min {} too small for detrend order {detrend_order}",
            grid.s_min()
        )));
    }
    if m < 4 * grid.s_min() || grid.s_max() > m {
        return Err(Error::SeriesTooShort {
            len: m,
            required: (4 * grid.s_min()).max(grid.s_max()),
        });
    }
    if series.iter().all(|&v| v == series[0]) {
        return Err(Error::DegenerateInput("series has zero variance".into()));
    }

    let y = profile(series);
    let mut values = vec![Vec::with_capacity(grid.len()); q.values().len()];
    let mut zero_windows = 0;
    for &s in grid.scales() {
        let pairs = window_variances(&y, s, detrend_order);
        zero_windows += pairs.iter().flatten().filter(|w| w.1).count();
        for (row, &qv) in values.iter_mut().zip(q.values()) {
            let f = moment(&pairs, qv).ok_or_else(|| {
                Error::DegenerateInput(format!("every window at scale {s} has zero detrended variance"))
            })?;
            row.push(f);
        }
    }
    Ok(FluctuationSurface {
        q: q.clone(),
        scales: grid.clone(),
        detrend_order,
        values,
        zero_windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_noise(n: usize, mut state: u64) -> Vec<f64> {
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn profile_has_leading_zero_and_closes() {
        let p = profile(&[1.0, 2.0, 3.0]);
        assert_eq!(p.len(), 4);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[1], -1.0);
        assert!(p[3].abs() < 1e-15);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let q = QGrid::new(vec![2.0]).unwrap();
        let g = ScaleGrid::from_scales(vec![10, 20]).unwrap();
        assert!(matches!(
            fluctuation_surface(&[0.1; 200], &q, &g, 1),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn residual_of_polynomial_is_flagged_zero() {
        let b = Basis::new(30, 2);
        let w: Vec<f64> = (0..30).map(|i| 1e6 + 3.0 * i as f64 - 0.5 * (i * i) as f64).collect();
        let mut scratch = Vec::new();
        let (_, zero) = b.residual_variance(&w, &mut scratch);
        assert!(zero);
    }

    #[test]
    fn brute_force_linear_detrend() {
        // oracle: closed-form least-squares line per window
        let x = lcg_noise(400, 7);
        let y = profile(&x);
        let s = 25;
        let pairs = window_variances(&y, s, 1);
        let brute = |w: &[f64]| {
            let n = w.len() as f64;
            let t: Vec<f64> = (0..w.len()).map(|i| i as f64).collect();
            let (mt, mw) = (t.iter().sum::<f64>() / n, w.iter().sum::<f64>() / n);
            let b = t.iter().zip(w).map(|(a, c)| (a - mt) * (c - mw)).sum::<f64>()
                / t.iter().map(|a| (a - mt) * (a - mt)).sum::<f64>();
            let a = mw - b * mt;
            t.iter().zip(w).map(|(ti, wi)| (wi - a - b * ti).powi(2)).sum::<f64>() / n
        };
        let end = y.len();
        for (k, [head, tail]) in pairs.iter().enumerate() {
            let h = brute(&y[k * s..(k + 1) * s]);
            let t = brute(&y[end - (k + 1) * s..end - k * s]);
            assert!((head.0 - h).abs() < 1e-12 * h.max(1e-300));
            assert!((tail.0 - t).abs() < 1e-12 * t.max(1e-300));
        }
        assert_eq!(pairs.len(), 16);
    }

    #[test]
    fn power_mean_ordering() {
        let x = lcg_noise(2000, 11);
        let q = QGrid::new(vec![-4.0, 0.0, 4.0]).unwrap();
        let g = ScaleGrid::from_scales(vec![10, 40, 160, 500]).unwrap();
        let f = fluctuation_surface(&x, &q, &g, 1).unwrap();
        for j in 0..g.len() {
            assert!(f.values[0][j] <= f.values[1][j]);
            assert!(f.values[1][j] <= f.values[2][j]);
        }
    }

    #[test]
    fn zero_windows_excluded_for_negative_q() {
        // first 100 samples constant: their profile windows are exact lines
        let mut x = lcg_noise(1000, 3);
        x[..100].iter_mut().for_each(|v| *v = 0.25);
        let q = QGrid::new(vec![-2.0, 0.0, 2.0]).unwrap();
        let g = ScaleGrid::from_scales(vec![20, 50]).unwrap();
        let f = fluctuation_surface(&x, &q, &g, 1).unwrap();
        assert!(f.zero_windows > 0);
        assert!(f.values.iter().flatten().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn short_series_rejected() {
        let q = QGrid::default();
        let g = ScaleGrid::from_scales(vec![20, 40]).unwrap();
        assert!(matches!(
            fluctuation_surface(&lcg_noise(70, 1), &q, &g, 1),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn order_too_high_for_scale() {
        let q = QGrid::default();
        let g = ScaleGrid::from_scales(vec![4, 8]).unwrap();
        assert!(matches!(
            fluctuation_surface(&lcg_noise(100, 1), &q, &g, 3),
            Err(Error::Config(_))
        ));
    }
}
