//! Synthetic series with known scaling, used as estimator oracles.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.

use std::f64::consts::LN_2;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::SessionSpec;

pub const MIN_FGN_LENGTH: usize = 1 << 10;
pub const VOLUME_FLOOR: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th child of a batch.
pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Fractional Gaussian noise by exact circulant embedding of its
/// covariance.
pub fn gen_fgn(hurst: f64, length: usize, seed: u64) -> Result<Vec<f64>> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Config(format!("fGn needs 0 < H < 1, got {hurst}")));
    }
    if length < MIN_FGN_LENGTH {
        return Err(Error::Config(format!(
            "fGn length must be at least {MIN_FGN_LENGTH}, got {length}"
        )));
    }
    let n = length.next_power_of_two();
    let m = 2 * n;
    let mut spectrum: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex::new(fgn_autocovariance(hurst, lag), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut spectrum);

    let peak = spectrum.iter().map(|c| c.re).fold(0.0, f64::max);
    let mut rng = rng(seed);
    let mut w: Vec<Complex<f64>> = Vec::with_capacity(m);
    for c in &spectrum {
        let lambda = if c.re < 0.0 {
            if c.re < -1e-9 * peak {
                return Err(Error::Internal(format!(
                    "circulant embedding not non-negative definite (eigenvalue {})",
                    c.re
                )));
            }
            0.0
        } else {
            c.re
        };
        let scale = (lambda / m as f64).sqrt();
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        w.push(Complex::new(scale * re, scale * im));
    }
    fft.process(&mut w);
    Ok(w.into_iter().take(length).map(|c| c.re).collect())
}

/// I.i.d. standard normal noise.
pub fn gen_iid(length: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..length).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Binomial multiplicative measure on `2^levels` cells with unit mean.
///
/// At every level each cell splits into halves weighted `2p` and `2(1-p)`.
/// With `randomize`, the order of the two weights is drawn per cell from
/// `seed`; otherwise `seed` is unused.
pub fn gen_cascade(p: f64, levels: u32, randomize: bool, seed: u64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Config(format!("cascade needs 0 < p < 1, got {p}")));
    }
    if !(8..=24).contains(&levels) {
        return Err(Error::Config(format!("cascade levels must be in 8..=24, got {levels}")));
    }
    let (a, b) = (2.0 * p, 2.0 * (1.0 - p));
    let mut rng = rng(seed);
    let mut cells = vec![1.0];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for &c in &cells {
            let swap = randomize && rand::Rng::random::<bool>(&mut rng);
            let (l, r) = if swap { (b, a) } else { (a, b) };
            next.push(c * l);
            next.push(c * r);
        }
        cells = next;
    }
    Ok(cells)
}

/// Analytic scaling of the binomial measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeReference {
    pub p: f64,
}

impl CascadeReference {
    /// `τ(q) = −log₂(p^q + (1−p)^q)`.
    pub fn tau(&self, q: f64) -> f64 {
        -(self.p.powf(q) + (1.0 - self.p).powf(q)).log2()
    }

    /// `h(q) = (1 + τ(q)) / q`, continuous at `q = 0`.
    pub fn h(&self, q: f64) -> f64 {
        if q == 0.0 {
            -(self.p * (1.0 - self.p)).log2() / 2.0
        } else {
            (1.0 + self.tau(q)) / q
        }
    }

    /// `α(q) = τ′(q)`.
    pub fn alpha(&self, q: f64) -> f64 {
        let (a, b) = (self.p.powf(q), (1.0 - self.p).powf(q));
        -(a * self.p.ln() + b * (1.0 - self.p).ln()) / ((a + b) * LN_2)
    }

    pub fn f_alpha(&self, q: f64) -> f64 {
        q * self.alpha(q) - self.tau(q)
    }
}

/// Uniformly random permutation.
pub fn shuffle(series: &[f64], seed: u64) -> Vec<f64> {
    let mut out = series.to_vec();
    out.shuffle(&mut rng(seed));
    out
}

/// Instruments with i.i.d. positive volumes whose standard deviation is a
/// planted power of their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorUniverse {
    pub means: Vec<f64>,
    pub series: Vec<Vec<f64>>,
    /// Draws raised to [`VOLUME_FLOOR`].
    pub clipped: usize,
}

/// Gamma draws with mean `μ_j` (log-spaced over `[mean_lo, mean_hi]`) and
/// standard deviation `μ_j^β`.
pub fn gen_taylor_universe(
    beta: f64,
    instruments: usize,
    mean_lo: f64,
    mean_hi: f64,
    length: usize,
    seed: u64,
) -> Result<TaylorUniverse> {
    if instruments < 2 {
        return Err(Error::Config("universe needs at least 2 instruments".into()));
    }
    if !(mean_lo > 0.0 && mean_hi > mean_lo) {
        return Err(Error::Config(format!("bad mean range {mean_lo}..{mean_hi}")));
    }
    if !beta.is_finite() || length == 0 {
        return Err(Error::Config("universe needs finite beta and positive length".into()));
    }
    let (lo, hi) = (mean_lo.ln(), mean_hi.ln());
    let mut means = Vec::with_capacity(instruments);
    let mut series = Vec::with_capacity(instruments);
    let mut clipped = 0;
    for j in 0..instruments {
        let mu = (lo + (hi - lo) * j as f64 / (instruments - 1) as f64).exp();
        let sd = mu.powf(beta);
        let shape = (mu / sd).powi(2);
        let scale = sd * sd / mu;
        let gamma = Gamma::new(shape, scale).map_err(|e| Error::Config(format!("gamma({shape}, {scale}): {e}")))?;
        let mut rng = rng(child_seed(seed, j as u64));
        let values = (0..length)
            .map(|_| {
                let v: f64 = gamma.sample(&mut rng);
                if v < VOLUME_FLOOR {
                    clipped += 1;
                    VOLUME_FLOOR
                } else {
                    v
                }
            })
            .collect();
        means.push(mu);
        series.push(values);
    }
    Ok(TaylorUniverse {
        means,
        series,
        clipped,
    })
}

/// Intraday profile with two morning humps, a spike at the first minute of
/// every window after the first, and an afternoon ramp.
pub fn stylized_pattern(session: &SessionSpec) -> Vec<f64> {
    let total = session.minutes_per_day() as f64;
    let mut starts = Vec::new();
    let mut offset = 0;
    for w in session.windows() {
        starts.push(offset);
        offset += ((w.close - w.open).num_minutes()) as u32;
    }
    (0..session.minutes_per_day())
        .map(|m| {
            let u = m as f64 / total;
            let mut v = 1.0 + 0.5 * (-((u - 0.125) / 0.1).powi(2)).exp() + 0.4 * (-((u - 0.375) / 0.08).powi(2)).exp();
            if u >= 0.5 {
                v += 0.6 * (u - 0.5);
            }
            if starts.iter().skip(1).any(|&s| s == m) {
                v *= 3.0;
            }
            v
        })
        .collect()
}

/// Log-normal long-memory volumes modulated by an intraday pattern:
/// `pattern[m] · exp(σ · fGn)`.
pub fn gen_modulated_volume(
    hurst: f64,
    days: usize,
    sigma: f64,
    pattern: &[f64],
    seed: u64,
) -> Result<Vec<f64>> {
    if pattern.is_empty() || pattern.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Config("modulating pattern must be positive".into()));
    }
    let noise = gen_fgn(hurst, days * pattern.len(), seed)?;
    Ok(noise
        .chunks_exact(pattern.len())
        .flat_map(|day| day.iter().zip(pattern).map(|(z, p)| p * (sigma * z).exp()))
        .collect())
}

/// Serializable generator description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Fgn {
        hurst: f64,
        length: usize,
        seed: u64,
    },
    Cascade {
        p: f64,
        levels: u32,
        randomize: bool,
        seed: u64,
    },
    Iid {
        length: usize,
        seed: u64,
    },
    PlantedTaylorUniverse {
        beta: f64,
        instruments: usize,
        mean_lo: f64,
        mean_hi: f64,
        length: usize,
        seed: u64,
    },
    Modulated {
        hurst: f64,
        days: usize,
        sigma: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    /// One series per instrument; single-series kinds return one entry.
    pub fn generate(&self, session: &SessionSpec) -> Result<Vec<Vec<f64>>> {
        Ok(match *self {
            GeneratorSpec::Fgn { hurst, length, seed } => vec![gen_fgn(hurst, length, seed)?],
            GeneratorSpec::Cascade {
                p,
                levels,
                randomize,
                seed,
            } => vec![gen_cascade(p, levels, randomize, seed)?],
            GeneratorSpec::Iid { length, seed } => vec![gen_iid(length, seed)],
            GeneratorSpec::PlantedTaylorUniverse {
                beta,
                instruments,
                mean_lo,
                mean_hi,
                length,
                seed,
            } => gen_taylor_universe(beta, instruments, mean_lo, mean_hi, length, seed)?.series,
            GeneratorSpec::Modulated {
                hurst,
                days,
                sigma,
                seed,
            } => vec![gen_modulated_volume(hurst, days, sigma, &stylized_pattern(session), seed)?],
        })
    }
}
