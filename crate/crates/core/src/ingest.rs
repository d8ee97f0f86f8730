//! Tick ingestion and fixed-interval volume aggregation.
//!
//! Trades are read from delimited text, restricted to the continuous
//! auction windows of a [`SessionSpec`] and summed into bins of `dt`
//! trading minutes. Bins are half-open `[start, end)`; a trade stamped
//! exactly at a window close is folded into that window's last bin.
//! Scales longer than one session are whole trading days.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One executed trade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TradeRecord {
    pub timestamp: NaiveDateTime,
    pub size: u64,
}

/// A continuous trading window in local exchange time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionWindow {
    pub open: NaiveTime,
    pub close: NaiveTime,
}

impl SessionWindow {
    fn minutes(&self) -> u32 {
        ((self.close - self.open).num_seconds() / 60) as u32
    }
}

/// Ordered, non-overlapping continuous auction windows of a trading day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SessionSpec {
    windows: Vec<SessionWindow>,
    minutes_per_day: u32,
}

impl SessionSpec {
    pub fn new(windows: Vec<SessionWindow>) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::Config("session needs at least one window".into()));
        }
        for w in &windows {
            if w.close <= w.open {
                return Err(Error::Config(format!(
                    "session window {}-{} closes before it opens",
                    w.open.format("%H:%M"),
                    w.close.format("%H:%M")
                )));
            }
            if (w.close - w.open).num_seconds() % 60 != 0 {
                return Err(Error::Config("session windows must span whole minutes".into()));
            }
        }
        for pair in windows.windows(2) {
            if pair[1].open < pair[0].close {
                return Err(Error::Config("session windows overlap or are out of order".into()));
            }
        }
        let minutes_per_day = windows.iter().map(SessionWindow::minutes).sum();
        Ok(SessionSpec {
            windows,
            minutes_per_day,
        })
    }

    /// 09:30-11:30 and 13:00-15:00, 240 trading minutes.
    pub fn shenzhen() -> Self {
        let t = |h, m| NaiveTime::from_hms_opt(h, m, 0).expect("valid time");
        SessionSpec::new(vec![
            SessionWindow {
                open: t(9, 30),
                close: t(11, 30),
            },
            SessionWindow {
                open: t(13, 0),
                close: t(15, 0),
            },
        ])
        .expect("default session is valid")
    }

    pub fn windows(&self) -> &[SessionWindow] {
        &self.windows
    }

    pub fn minutes_per_day(&self) -> u32 {
        self.minutes_per_day
    }

    /// Session minute (0-based, trading time) containing `t`, or `None`
    /// outside every window.
    pub fn session_minute(&self, t: NaiveTime) -> Option<u32> {
        let mut offset = 0;
        for w in &self.windows {
            let len = w.minutes();
            if t >= w.open && t <= w.close {
                let secs = (t - w.open).num_seconds();
                let minute = ((secs / 60) as u32).min(len - 1);
                return Some(offset + minute);
            }
            offset += len;
        }
        None
    }

    /// Clock minute of day (minutes since midnight) at which session minute
    /// `idx` starts.
    pub fn clock_minute(&self, idx: u32) -> Option<u32> {
        let mut rest = idx;
        for w in &self.windows {
            let len = w.minutes();
            if rest < len {
                let open = w.open.signed_duration_since(NaiveTime::MIN).num_minutes() as u32;
                return Some(open + rest);
            }
            rest -= len;
        }
        None
    }

    /// Inverse of [`SessionSpec::clock_minute`].
    pub fn session_index_of_clock(&self, clock: u32) -> Option<u32> {
        let t = NaiveTime::MIN + Duration::minutes(clock as i64);
        if clock >= 24 * 60 {
            return None;
        }
        let mut offset = 0;
        for w in &self.windows {
            if t >= w.open && t < w.close {
                return Some(offset + ((t - w.open).num_minutes() as u32));
            }
            offset += w.minutes();
        }
        None
    }
}

impl Default for SessionSpec {
    fn default() -> Self {
        SessionSpec::shenzhen()
    }
}

impl fmt::Display for SessionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.windows.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}-{}", w.open.format("%H:%M"), w.close.format("%H:%M"))?;
        }
        Ok(())
    }
}

impl FromStr for SessionSpec {
    type Err = Error;

    /// Parses `"09:30-11:30,13:00-15:00"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut windows = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (open, close) = part
                .split_once('-')
                .ok_or_else(|| Error::Config(format!("bad session window '{part}'")))?;
            let parse = |x: &str| {
                NaiveTime::parse_from_str(x.trim(), "%H:%M")
                    .map_err(|_| Error::Config(format!("bad session time '{x}'")))
            };
            windows.push(SessionWindow {
                open: parse(open)?,
                close: parse(close)?,
            });
        }
        SessionSpec::new(windows)
    }
}

impl From<SessionSpec> for String {
    fn from(s: SessionSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SessionSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Column layout of a trade file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeFormat {
    pub delimiter: u8,
    pub has_header: bool,
    pub timestamp_column: usize,
    pub size_column: usize,
    /// chrono format string; `%.f` accepts an optional fractional second.
    pub timestamp_format: String,
}

impl Default for TradeFormat {
    fn default() -> Self {
        TradeFormat {
            delimiter: b',',
            has_header: false,
            timestamp_column: 0,
            size_column: 1,
            timestamp_format: "%Y-%m-%d %H:%M:%S%.f".into(),
        }
    }
}

/// A rejected input line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, line {}", self.message, self.line)
    }
}

impl From<RecordError> for Error {
    fn from(e: RecordError) -> Self {
        Error::Record {
            line: e.line,
            message: e.message,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedTrades {
    /// Sorted by timestamp, ties by size.
    pub records: Vec<TradeRecord>,
    pub errors: Vec<RecordError>,
    pub warnings: Vec<String>,
}

/// Reads trade records from delimited text. Malformed lines are collected
/// in [`ParsedTrades::errors`] rather than aborting the read.
pub fn parse_trades<R: Read>(raw: R, format: &TradeFormat) -> Result<ParsedTrades> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(format.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw);

    let mut out = ParsedTrades::default();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.errors.push(RecordError {
                    line,
                    message: format!("unreadable record ({e})"),
                });
                continue;
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match parse_record(&record, format) {
            Ok(trade) => out.records.push(trade),
            Err(message) => out.errors.push(RecordError { line, message }),
        }
    }

    if out.records.is_empty() && out.errors.is_empty() {
        out.warnings.push("empty input: no trade records".into());
    }
    out.records.sort_unstable();
    Ok(out)
}

fn parse_record(record: &csv::StringRecord, format: &TradeFormat) -> std::result::Result<TradeRecord, String> {
    let ts = record
        .get(format.timestamp_column)
        .ok_or_else(|| "missing timestamp column".to_string())?;
    let size = record
        .get(format.size_column)
        .ok_or_else(|| "missing size column".to_string())?;
    let timestamp = NaiveDateTime::parse_from_str(ts, &format.timestamp_format)
        .map_err(|_| format!("unparseable timestamp '{ts}'"))?;
    let size: i64 = size.parse().map_err(|_| format!("invalid size '{size}'"))?;
    if size < 0 {
        return Err("negative size".into());
    }
    Ok(TradeRecord {
        timestamp,
        size: size as u64,
    })
}

/// Regularly spaced volume bins in trading time.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSeries {
    dt_minutes: u32,
    /// Values may be negative; set for synthetic signals such as fGn that
    /// share the file layout but are not volumes.
    signed: bool,
    session: SessionSpec,
    days: Vec<NaiveDate>,
    values: Vec<f64>,
    day_index: Vec<u32>,
    minute_index: Vec<u32>,
}

impl VolumeSeries {
    /// Lays `values` out on consecutive bins starting at the first bin of
    /// `days[0]`. A trailing partial day is allowed.
    pub fn from_values(values: Vec<f64>, dt_minutes: u32, session: SessionSpec, start: NaiveDate) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("volume at bin {i} is {v}, must be finite and >= 0")));
        }
        Self::laid_out(values, dt_minutes, session, start, false)
    }

    /// Like [`VolumeSeries::from_values`] but admits negative values.
    pub fn from_signal(values: Vec<f64>, dt_minutes: u32, session: SessionSpec, start: NaiveDate) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("signal contains non-finite values".into()));
        }
        Self::laid_out(values, dt_minutes, session, start, true)
    }

    fn laid_out(values: Vec<f64>, dt_minutes: u32, session: SessionSpec, start: NaiveDate, signed: bool) -> Result<Self> {
        let layout = BinLayout::new(dt_minutes, &session)?;
        let n = values.len();
        let (per_day, days_per_bin) = (layout.bins_per_day(), layout.days_per_bin());
        let n_days = if per_day > 0 {
            n.div_ceil(per_day)
        } else {
            n * days_per_bin
        };
        let days = trading_days(start, n_days);
        let mut day_index = Vec::with_capacity(n);
        let mut minute_index = Vec::with_capacity(n);
        for i in 0..n {
            if per_day > 0 {
                day_index.push((i / per_day) as u32);
                minute_index.push(((i % per_day) as u32) * dt_minutes);
            } else {
                day_index.push((i * days_per_bin) as u32);
                minute_index.push(0);
            }
        }
        Ok(VolumeSeries {
            dt_minutes,
            signed,
            session,
            days,
            values,
            day_index,
            minute_index,
        })
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn dt_minutes(&self) -> u32 {
        self.dt_minutes
    }

    pub fn session(&self) -> &SessionSpec {
        &self.session
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn day_index(&self) -> &[u32] {
        &self.day_index
    }

    /// Session minute at which each bin starts.
    pub fn minute_index(&self) -> &[u32] {
        &self.minute_index
    }

    pub fn is_intraday(&self) -> bool {
        self.dt_minutes <= self.session.minutes_per_day()
    }

    /// Bins per trading day, or `None` for multi-day scales.
    pub fn bins_per_day(&self) -> Option<usize> {
        self.is_intraday()
            .then(|| (self.session.minutes_per_day() / self.dt_minutes) as usize)
    }

    /// Whether the series is an exact grid of whole days starting at the
    /// first bin of a day.
    pub fn has_complete_days(&self) -> bool {
        match self.bins_per_day() {
            Some(b) => {
                !self.values.is_empty()
                    && self.values.len() % b == 0
                    && self.minute_index.first() == Some(&0)
            }
            None => false,
        }
    }

    /// Same coordinates, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Config(format!(
                "value count {} does not match series length {}",
                values.len(),
                self.values.len()
            )));
        }
        Ok(VolumeSeries {
            values,
            ..self.clone()
        })
    }

    /// Re-aggregates to a coarser scale by summing consecutive bins.
    /// Intraday targets must be a multiple of the current scale dividing the
    /// session; multi-day targets sum whole days and drop a trailing
    /// partial block.
    pub fn rescale(&self, dt_minutes: u32) -> Result<Self> {
        let target = BinLayout::new(dt_minutes, &self.session)?;
        if dt_minutes == self.dt_minutes {
            return Ok(self.clone());
        }
        if dt_minutes < self.dt_minutes || dt_minutes % self.dt_minutes != 0 {
            return Err(Error::Config(format!(
                "cannot rescale dt {} to {}: target must be a multiple",
                self.dt_minutes, dt_minutes
            )));
        }
        if self.minute_index.first().is_some_and(|&m| m != 0) {
            return Err(Error::Config("rescaling requires the series to start at a day boundary".into()));
        }
        let k = (dt_minutes / self.dt_minutes) as usize;
        let (mut values, mut day_index, mut minute_index) = (Vec::new(), Vec::new(), Vec::new());
        if target.bins_per_day() > 0 {
            for (chunk_no, chunk) in self.values.chunks_exact(k).enumerate() {
                let first = chunk_no * k;
                values.push(chunk.iter().sum());
                day_index.push(self.day_index[first]);
                minute_index.push(self.minute_index[first]);
            }
        } else {
            let daily = self.daily_totals();
            let days_per_bin = target.days_per_bin();
            for (block, chunk) in daily.chunks_exact(days_per_bin).enumerate() {
                values.push(chunk.iter().sum());
                day_index.push((block * days_per_bin) as u32);
                minute_index.push(0);
            }
        }
        Ok(VolumeSeries {
            dt_minutes,
            signed: self.signed,
            session: self.session.clone(),
            days: self.days.clone(),
            values,
            day_index,
            minute_index,
        })
    }

    /// Totals of the days fully covered by the series.
    fn daily_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.days.len()];
        for (v, &d) in self.values.iter().zip(&self.day_index) {
            totals[d as usize] += v;
        }
        if let Some(per_day) = self.bins_per_day() {
            totals.truncate(self.values.len() / per_day);
        }
        totals
    }

    /// Writes `day,minute_of_day,volume` rows, `minute_of_day` being the
    /// clock minute (minutes since midnight) of the bin start.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<series>", e);
        write!(w, "# dt_minutes={} session={}", self.dt_minutes, self.session).map_err(io)?;
        if self.signed {
            write!(w, " signed=1").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
        writeln!(w, "day,minute_of_day,volume").map_err(io)?;
        for i in 0..self.values.len() {
            let day = self.days[self.day_index[i] as usize];
            let clock = self
                .session
                .clock_minute(self.minute_index[i])
                .ok_or_else(|| Error::Internal("bin outside session".into()))?;
            writeln!(w, "{},{},{}", day.format("%Y-%m-%d"), clock, self.values[i]).map_err(io)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`VolumeSeries::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut dt = None;
        let mut signed = false;
        let mut session = SessionSpec::default();
        let mut days: Vec<NaiveDate> = Vec::new();
        let (mut values, mut day_index, mut minute_index) = (Vec::new(), Vec::new(), Vec::new());
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<series>", e))?;
            let line_no = n as u64 + 1;
            let line = line.trim();
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("dt_minutes", v)) => {
                            dt = Some(v.parse::<u32>().map_err(|_| Error::Record {
                                line: line_no,
                                message: format!("bad dt_minutes '{v}'"),
                            })?)
                        }
                        Some(("session", v)) => session = v.parse()?,
                        Some(("signed", v)) => signed = v == "1",
                        _ => {}
                    }
                }
                continue;
            }
            if line.is_empty() || line.starts_with("day") {
                continue;
            }
            let rec_err = |message: String| Error::Record { line: line_no, message };
            let mut cols = line.split(',');
            let (Some(d), Some(m), Some(v)) = (cols.next(), cols.next(), cols.next()) else {
                return Err(rec_err("expected day,minute_of_day,volume".into()));
            };
            let date = NaiveDate::parse_from_str(d, "%Y-%m-%d").map_err(|_| rec_err(format!("bad day '{d}'")))?;
            let clock: u32 = m.parse().map_err(|_| rec_err(format!("bad minute '{m}'")))?;
            let value: f64 = v.parse().map_err(|_| rec_err(format!("bad volume '{v}'")))?;
            if !value.is_finite() || (!signed && value < 0.0) {
                return Err(rec_err("negative volume".into()));
            }
            let minute = session
                .session_index_of_clock(clock)
                .ok_or_else(|| rec_err(format!("minute {clock} outside session")))?;
            if days.last() != Some(&date) {
                if days.last().is_some_and(|last| *last > date) {
                    return Err(rec_err("days out of order".into()));
                }
                days.push(date);
            }
            values.push(value);
            day_index.push((days.len() - 1) as u32);
            minute_index.push(minute);
        }
        let dt_minutes = dt.ok_or_else(|| Error::Config("series file lacks '# dt_minutes=' header".into()))?;
        let layout = BinLayout::new(dt_minutes, &session)?;
        if layout.bins_per_day() == 0 {
            // day_index counted distinct block starts; map back to positions
            // in a contiguous trading-day list.
            let k = layout.days_per_bin();
            let starts = days.clone();
            let mut all_days = Vec::new();
            for (block, start) in starts.iter().enumerate() {
                let block_days = trading_days(*start, k);
                day_index[block] = all_days.len() as u32;
                all_days.extend(block_days);
            }
            days = all_days;
        }
        Ok(VolumeSeries {
            dt_minutes,
            signed,
            session,
            days,
            values,
            day_index,
            minute_index,
        })
    }
}

/// Weekday-only calendar starting at `start`; used for synthetic series
/// and multi-day block labels.
pub fn trading_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct BinLayout {
    dt: u32,
    per_day: u32,
}

impl BinLayout {
    fn new(dt: u32, session: &SessionSpec) -> Result<Self> {
        let per_day = session.minutes_per_day();
        if dt == 0 {
            return Err(Error::Config("dt must be positive".into()));
        }
        if dt <= per_day {
            if per_day % dt != 0 {
                return Err(Error::Config(format!(
                    "dt {dt} does not divide {per_day} minutes per day"
                )));
            }
        } else if dt % per_day != 0 {
            return Err(Error::Config(format!(
                "dt {dt} exceeds one session but is not a whole number of {per_day}-minute days"
            )));
        }
        Ok(BinLayout { dt, per_day })
    }

    /// Zero for multi-day scales.
    fn bins_per_day(&self) -> usize {
        if self.dt <= self.per_day {
            (self.per_day / self.dt) as usize
        } else {
            0
        }
    }

    fn days_per_bin(&self) -> usize {
        (self.dt / self.per_day).max(1) as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AggregationReport {
    pub in_session: u64,
    /// Trades outside every continuous window (call auction, lunch, after close).
    pub discarded: u64,
    pub days: usize,
    /// Trading days left over after forming whole multi-day blocks.
    pub dropped_days: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Aggregation {
    pub series: VolumeSeries,
    pub report: AggregationReport,
}

/// Sums trade sizes into bins of `dt_minutes` trading minutes.
///
/// Every calendar date carrying at least one trade is a trading day; bins
/// with no trades are zero. Input order does not matter.
pub fn aggregate_volume(trades: &[TradeRecord], dt_minutes: u32, session: &SessionSpec) -> Result<Aggregation> {
    let layout = BinLayout::new(dt_minutes, session)?;
    let per_day_minutes = session.minutes_per_day() as usize;

    let mut by_day: BTreeMap<NaiveDate, Vec<u64>> = BTreeMap::new();
    let mut report = AggregationReport::default();
    for t in trades {
        let minutes = by_day
            .entry(t.timestamp.date())
            .or_insert_with(|| vec![0; per_day_minutes]);
        match session.session_minute(t.timestamp.time()) {
            Some(m) => {
                minutes[m as usize] += t.size;
                report.in_session += 1;
            }
            None => report.discarded += 1,
        }
    }
    report.days = by_day.len();
    if report.in_session == 0 {
        report.warnings.push("no trades inside the continuous session".into());
    }

    let days: Vec<NaiveDate> = by_day.keys().copied().collect();
    let (mut values, mut day_index, mut minute_index) = (Vec::new(), Vec::new(), Vec::new());
    let per_day = layout.bins_per_day();
    if per_day > 0 {
        let width = dt_minutes as usize;
        for (d, minutes) in by_day.values().enumerate() {
            for (b, chunk) in minutes.chunks_exact(width).enumerate() {
                values.push(chunk.iter().sum::<u64>() as f64);
                day_index.push(d as u32);
                minute_index.push((b * width) as u32);
            }
        }
    } else {
        let k = layout.days_per_bin();
        let totals: Vec<u64> = by_day.values().map(|m| m.iter().sum()).collect();
        for (block, chunk) in totals.chunks_exact(k).enumerate() {
            values.push(chunk.iter().sum::<u64>() as f64);
            day_index.push((block * k) as u32);
            minute_index.push(0);
        }
        report.dropped_days = totals.len() % k;
        if report.dropped_days > 0 {
            report.warnings.push(format!(
                "{} trailing trading days do not fill a {k}-day bin and were dropped",
                report.dropped_days
            ));
        }
    }

    Ok(Aggregation {
        series: VolumeSeries {
            dt_minutes,
            signed: false,
            session: session.clone(),
            days,
            values,
            day_index,
            minute_index,
        },
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> NaiveDateTime {
        NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S").unwrap()
    }

    fn trade(s: &str, size: u64) -> TradeRecord {
        TradeRecord {
            timestamp: ts(s),
            size,
        }
    }

    #[test]
    fn parses_single_line() {
        let p = parse_trades("2003-01-02 09:30:15,100\n".as_bytes(), &TradeFormat::default()).unwrap();
        assert_eq!(p.records, vec![trade("2003-01-02 09:30:15", 100)]);
        assert!(p.errors.is_empty());
    }

    #[test]
    fn empty_input_warns() {
        let p = parse_trades("".as_bytes(), &TradeFormat::default()).unwrap();
        assert!(p.records.is_empty());
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn negative_size_reports_line() {
        let p = parse_trades("2003-01-02 09:30:15,-5\n".as_bytes(), &TradeFormat::default()).unwrap();
        assert!(p.records.is_empty());
        assert_eq!(p.errors[0].to_string(), "negative size, line 1");
    }

    #[test]
    fn bad_timestamp_is_record_error() {
        let input = "2003-01-02 09:30:15,1\nnot a time,3\n2003-01-02 09:31:00.250,4\n";
        let p = parse_trades(input.as_bytes(), &TradeFormat::default()).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.errors.len(), 1);
        assert_eq!(p.errors[0].line, 2);
    }

    #[test]
    fn header_and_custom_delimiter() {
        let format = TradeFormat {
            delimiter: b';',
            has_header: true,
            timestamp_column: 1,
            size_column: 0,
            timestamp_format: "%Y%m%d %H%M%S".into(),
        };
        let p = parse_trades("size;time\n7;20030102 093001\n".as_bytes(), &format).unwrap();
        assert_eq!(p.records, vec![trade("2003-01-02 09:30:01", 7)]);
    }

    #[test]
    fn output_sorted() {
        let input = "2003-01-02 09:31:00,1\n2003-01-02 09:30:00,2\n";
        let p = parse_trades(input.as_bytes(), &TradeFormat::default()).unwrap();
        assert!(p.records[0].timestamp < p.records[1].timestamp);
    }

    #[test]
    fn one_minute_bins() {
        let trades = [
            trade("2003-01-02 09:30:15", 100),
            trade("2003-01-02 09:30:40", 200),
            trade("2003-01-02 09:31:05", 50),
        ];
        let agg = aggregate_volume(&trades, 1, &SessionSpec::default()).unwrap();
        let v = agg.series.values();
        assert_eq!(v.len(), 240);
        assert_eq!(&v[..3], &[300.0, 50.0, 0.0]);
        assert!(v[3..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn call_auction_trade_discarded() {
        let trades = [trade("2003-01-02 09:20:00", 10), trade("2003-01-02 09:45:00", 5)];
        let agg = aggregate_volume(&trades, 1, &SessionSpec::default()).unwrap();
        assert_eq!(agg.report.discarded, 1);
        assert_eq!(agg.report.in_session, 1);
        assert_eq!(agg.series.values().iter().sum::<f64>(), 5.0);
    }

    #[test]
    fn lunch_and_after_close_discarded() {
        let trades = [
            trade("2003-01-02 12:00:00", 1),
            trade("2003-01-02 15:00:01", 1),
            trade("2003-01-02 11:30:01", 1),
        ];
        let agg = aggregate_volume(&trades, 1, &SessionSpec::default()).unwrap();
        assert_eq!(agg.report.discarded, 3);
        assert_eq!(agg.report.warnings.len(), 1);
        assert!(agg.series.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn close_stamp_in_last_bin_and_13h_in_first_afternoon_bin() {
        let trades = [
            trade("2003-01-02 15:00:00", 4),
            trade("2003-01-02 11:30:00", 3),
            trade("2003-01-02 13:00:00", 9),
        ];
        let agg = aggregate_volume(&trades, 1, &SessionSpec::default()).unwrap();
        let v = agg.series.values();
        assert_eq!(v[239], 4.0);
        assert_eq!(v[119], 3.0);
        assert_eq!(v[120], 9.0);
        assert_eq!(agg.report.discarded, 0);
    }

    #[test]
    fn half_day_bins_match_direct_sums() {
        let trades = [
            trade("2003-01-02 09:30:00", 1),
            trade("2003-01-02 10:59:59", 20),
            trade("2003-01-02 11:30:00", 300),
            trade("2003-01-02 13:00:00", 4000),
            trade("2003-01-02 14:59:00", 50000),
            trade("2003-01-02 09:25:00", 7),
        ];
        // oracle: sum sizes by half-day directly from clock time
        let morning: u64 = trades
            .iter()
            .filter(|t| t.timestamp.time() >= NaiveTime::from_hms_opt(9, 30, 0).unwrap() && t.timestamp.time() <= NaiveTime::from_hms_opt(11, 30, 0).unwrap())
            .map(|t| t.size)
            .sum();
        let afternoon: u64 = trades
            .iter()
            .filter(|t| t.timestamp.time() >= NaiveTime::from_hms_opt(13, 0, 0).unwrap())
            .map(|t| t.size)
            .sum();
        let agg = aggregate_volume(&trades, 120, &SessionSpec::default()).unwrap();
        assert_eq!(agg.series.values(), &[morning as f64, afternoon as f64]);
    }

    #[test]
    fn dt_must_divide_session() {
        assert!(matches!(
            aggregate_volume(&[], 7, &SessionSpec::default()),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            aggregate_volume(&[], 300, &SessionSpec::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn multi_day_blocks_ignore_calendar_gaps() {
        // Friday then Monday, then Tuesday: three trading days
        let trades = [
            trade("2003-01-03 10:00:00", 1),
            trade("2003-01-06 10:00:00", 2),
            trade("2003-01-07 10:00:00", 4),
        ];
        let agg = aggregate_volume(&trades, 480, &SessionSpec::default()).unwrap();
        assert_eq!(agg.series.values(), &[3.0]);
        assert_eq!(agg.report.dropped_days, 1);
    }

    #[test]
    fn session_parse_roundtrip() {
        let s: SessionSpec = "09:30-11:30,13:00-15:00".parse().unwrap();
        assert_eq!(s, SessionSpec::default());
        assert_eq!(s.minutes_per_day(), 240);
        assert_eq!(s.to_string(), "09:30-11:30,13:00-15:00");
        assert!("10:00-11:00,10:30-12:00".parse::<SessionSpec>().is_err());
        assert!("11:00-10:00".parse::<SessionSpec>().is_err());
    }

    #[test]
    fn clock_minute_mapping() {
        let s = SessionSpec::default();
        assert_eq!(s.clock_minute(0), Some(570));
        assert_eq!(s.clock_minute(120), Some(780));
        assert_eq!(s.clock_minute(240), None);
        for i in 0..240 {
            assert_eq!(s.session_index_of_clock(s.clock_minute(i).unwrap()), Some(i));
        }
        assert_eq!(s.session_index_of_clock(12 * 60), None);
    }

    #[test]
    fn series_file_roundtrip() {
        let trades = [trade("2003-01-02 09:30:15", 100), trade("2003-01-03 14:00:00", 3)];
        let series = aggregate_volume(&trades, 5, &SessionSpec::default()).unwrap().series;
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let back = VolumeSeries::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, series);
    }

    #[test]
    fn multi_day_file_roundtrip() {
        let values: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let start = NaiveDate::from_ymd_opt(2003, 1, 2).unwrap();
        let series = VolumeSeries::from_values(values, 480, SessionSpec::default(), start).unwrap();
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let back = VolumeSeries::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values(), series.values());
        assert_eq!(back.day_index(), series.day_index());
    }

    #[test]
    fn rescale_rejects_non_multiple() {
        let start = NaiveDate::from_ymd_opt(2003, 1, 2).unwrap();
        let s = VolumeSeries::from_values(vec![1.0; 480], 1, SessionSpec::default(), start).unwrap();
        assert!(s.rescale(7).is_err());
        assert_eq!(s.rescale(240).unwrap().values(), &[240.0, 240.0]);
        assert_eq!(s.rescale(480).unwrap().values(), &[480.0]);
    }
}
