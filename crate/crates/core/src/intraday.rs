//! Intraday volume pattern and multiplicative deseasonalization.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{SessionSpec, VolumeSeries};

/// Mean volume per bin-of-day across trading days.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntradayPattern {
    pub dt_minutes: u32,
    pub values: Vec<f64>,
    pub n_days: usize,
}

impl IntradayPattern {
    /// Sums groups of `k` consecutive bins, giving the pattern at `k * dt`.
    pub fn coarsen(&self, k: usize) -> Result<IntradayPattern> {
        if k == 0 || self.values.len() % k != 0 {
            return Err(Error::Config(format!(
                "cannot coarsen a {}-bin pattern by {k}",
                self.values.len()
            )));
        }
        Ok(IntradayPattern {
            dt_minutes: self.dt_minutes * k as u32,
            values: self.values.chunks_exact(k).map(|c| c.iter().sum()).collect(),
            n_days: self.n_days,
        })
    }

    /// Two columns: clock minute of day, mean volume.
    pub fn write_csv<W: Write>(&self, session: &SessionSpec, mut w: W) -> Result<()> {
        let io = |e| Error::io("<pattern>", e);
        writeln!(w, "# dt_minutes={} n_days={}", self.dt_minutes, self.n_days).map_err(io)?;
        writeln!(w, "minute_of_day,mean_volume").map_err(io)?;
        for (i, v) in self.values.iter().enumerate() {
            let clock = session
                .clock_minute(i as u32 * self.dt_minutes)
                .ok_or_else(|| Error::Internal("pattern bin outside session".into()))?;
            writeln!(w, "{clock},{v}").map_err(io)?;
        }
        Ok(())
    }
}

fn require_days(series: &VolumeSeries) -> Result<usize> {
    if series.is_signed() {
        return Err(Error::Config("intraday pattern needs a volume series, not a signed signal".into()));
    }
    let per_day = series
        .bins_per_day()
        .ok_or_else(|| Error::Config("intraday pattern needs an intraday time scale".into()))?;
    if !series.has_complete_days() {
        return Err(Error::Config("series must consist of whole trading days".into()));
    }
    Ok(per_day)
}

/// Per-bin mean over days. Fails if any bin averages to zero, since the
/// pattern is used as a divisor.
pub fn compute_pattern(series: &VolumeSeries) -> Result<IntradayPattern> {
    let per_day = require_days(series)?;
    let n_days = series.len() / per_day;
    if n_days < 2 {
        return Err(Error::InsufficientData(format!(
            "intraday pattern needs at least 2 days, got {n_days}"
        )));
    }
    let mut sums = vec![0.0; per_day];
    for day in series.values().chunks_exact(per_day) {
        for (s, v) in sums.iter_mut().zip(day) {
            *s += v;
        }
    }
    let values: Vec<f64> = sums.into_iter().map(|s| s / n_days as f64).collect();
    if let Some(bin) = values.iter().position(|&v| v <= 0.0) {
        return Err(Error::ZeroPattern {
            minute: bin * series.dt_minutes() as usize,
        });
    }
    Ok(IntradayPattern {
        dt_minutes: series.dt_minutes(),
        values,
        n_days,
    })
}

/// Bin-wise mean of several instruments' patterns.
pub fn average_pattern(patterns: &[IntradayPattern]) -> Result<IntradayPattern> {
    let first = patterns
        .first()
        .ok_or_else(|| Error::InsufficientData("no patterns to average".into()))?;
    if patterns
        .iter()
        .any(|p| p.dt_minutes != first.dt_minutes || p.values.len() != first.values.len())
    {
        return Err(Error::Config("patterns have different time scales".into()));
    }
    let n = patterns.len() as f64;
    let values = (0..first.values.len())
        .map(|i| patterns.iter().map(|p| p.values[i]).sum::<f64>() / n)
        .collect();
    Ok(IntradayPattern {
        dt_minutes: first.dt_minutes,
        values,
        n_days: patterns.iter().map(|p| p.n_days).min().unwrap_or(0),
    })
}

/// Divides every bin by the pattern value for its bin-of-day.
pub fn deseasonalize(series: &VolumeSeries, pattern: &IntradayPattern) -> Result<VolumeSeries> {
    let per_day = require_days(series)?;
    if pattern.dt_minutes != series.dt_minutes() || pattern.values.len() != per_day {
        return Err(Error::Config(format!(
            "pattern ({} bins at dt {}) does not match series ({} bins at dt {})",
            pattern.values.len(),
            pattern.dt_minutes,
            per_day,
            series.dt_minutes()
        )));
    }
    if let Some(bin) = pattern.values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroPattern {
            minute: bin * pattern.dt_minutes as usize,
        });
    }
    let adjusted = series
        .values()
        .chunks_exact(per_day)
        .flat_map(|day| day.iter().zip(&pattern.values).map(|(v, p)| v / p))
        .collect();
    series.with_values(adjusted)
}

/// In-sample pattern estimation followed by division.
pub fn adjust(series: &VolumeSeries) -> Result<(IntradayPattern, VolumeSeries)> {
    let pattern = compute_pattern(series)?;
    let adjusted = deseasonalize(series, &pattern)?;
    Ok((pattern, adjusted))
}
