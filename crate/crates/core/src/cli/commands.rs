use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use super::{Command, RunContext, SynthKind};
use crate::error::{Error, Result};
use crate::fluctuation::{DfaResult, FluctuationSurface, MultifractalResult};
use crate::ingest::{aggregate_volume, parse_trades, AggregationReport, RecordError, VolumeSeries};
use crate::intraday::{adjust, average_pattern, compute_pattern, IntradayPattern};
use crate::output::Table;
use crate::scaling::{
    fit_beta_trend, fit_hurst_vs_volume, fit_taylor, gamma_consistency, summarize, GammaReport, InstrumentSummary,
    ScalingFit,
};
use crate::synth::{self, CascadeReference};

pub(super) fn dispatch(ctx: &mut RunContext) -> Result<()> {
    match ctx.config.command {
        Command::Ingest => ingest(ctx),
        Command::Pattern => pattern(ctx),
        Command::Dfa => dfa(ctx),
        Command::Mfdfa => mfdfa(ctx),
        Command::Taylor => taylor(ctx),
        Command::Synth => synth(ctx),
        Command::Report => report(ctx),
    }
}

fn instrument_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn read_series(path: &Path) -> Result<VolumeSeries> {
    VolumeSeries::read_csv(open(path)?)
}

/// Reads every input, recording unreadable ones as failures.
fn load_inputs(ctx: &mut RunContext) -> Vec<(String, VolumeSeries)> {
    let paths = ctx.config.inputs.clone();
    let mut out = Vec::new();
    for path in paths {
        let id = instrument_id(&path);
        match read_series(&path) {
            Ok(s) => out.push((id, s)),
            Err(e) => ctx.fail(&id, &e),
        }
    }
    out
}

fn all_failed<T>(ctx: &RunContext, results: &[T]) -> Result<()> {
    if results.is_empty() {
        let detail = ctx
            .failures
            .first()
            .map(|f| format!("{}: {}", f.instrument, f.message))
            .unwrap_or_default();
        return Err(Error::InsufficientData(format!("no instrument could be processed ({detail})")));
    }
    Ok(())
}

fn series_text(series: &VolumeSeries) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    series.write_csv(&mut buf)?;
    Ok(buf)
}

fn pattern_text(ctx: &RunContext, pattern: &IntradayPattern) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    pattern.write_csv(&ctx.config.session, &mut buf)?;
    Ok(buf)
}

#[derive(Serialize)]
struct IngestEntry {
    instrument: String,
    records: usize,
    record_errors: Vec<RecordError>,
    warnings: Vec<String>,
    aggregations: Vec<(u32, AggregationReport)>,
}

fn ingest(ctx: &mut RunContext) -> Result<()> {
    let mut entries = Vec::new();
    for path in ctx.config.inputs.clone() {
        let id = instrument_id(&path);
        let parsed = match open(&path).and_then(|r| parse_trades(r, &ctx.config.trade_format)) {
            Ok(p) => p,
            Err(e) => {
                ctx.fail(&id, &e);
                continue;
            }
        };
        let mut entry = IngestEntry {
            instrument: id.clone(),
            records: parsed.records.len(),
            record_errors: parsed.errors,
            warnings: parsed.warnings,
            aggregations: Vec::new(),
        };
        for dt in ctx.config.dt.clone() {
            match aggregate_volume(&parsed.records, dt, &ctx.config.session) {
                Ok(agg) => {
                    ctx.write(format!("series/{id}_dt{dt}.csv"), series_text(&agg.series)?)?;
                    entry.aggregations.push((dt, agg.report));
                }
                Err(e) => ctx.fail(&format!("{id}@dt{dt}"), &e),
            }
        }
        entries.push(entry);
    }
    all_failed(ctx, &entries)?;
    ctx.write_json("ingest_report.json", &entries)
}

fn pattern(ctx: &mut RunContext) -> Result<()> {
    let inputs = load_inputs(ctx);
    let mut by_dt: Vec<(u32, Vec<IntradayPattern>)> = Vec::new();
    for (id, series) in &inputs {
        let base = match compute_pattern(series) {
            Ok(p) => p,
            Err(e) => {
                ctx.fail(id, &e);
                continue;
            }
        };
        for dt in ctx.config.dt.clone() {
            let coarse = if dt % base.dt_minutes == 0 {
                base.coarsen((dt / base.dt_minutes) as usize)
            } else {
                Err(Error::Config(format!(
                    "pattern dt {dt} is not a multiple of the series dt {}",
                    base.dt_minutes
                )))
            };
            match coarse {
                Ok(p) => {
                    ctx.write(format!("pattern/{id}_dt{dt}.csv"), pattern_text(ctx, &p)?)?;
                    match by_dt.iter_mut().find(|(d, _)| *d == dt) {
                        Some((_, v)) => v.push(p),
                        None => by_dt.push((dt, vec![p])),
                    }
                }
                Err(e) => ctx.fail(&format!("{id}@dt{dt}"), &e),
            }
        }
    }
    all_failed(ctx, &by_dt)?;
    for (dt, patterns) in &by_dt {
        if patterns.len() > 1 {
            let avg = average_pattern(patterns)?;
            ctx.write(format!("pattern/average_dt{dt}.csv"), pattern_text(ctx, &avg)?)?;
        }
    }
    Ok(())
}

/// The input series and, when it is a whole-day volume series, its
/// deseasonalized counterpart.
fn variants(ctx: &mut RunContext, id: &str, series: &VolumeSeries) -> Vec<(&'static str, Vec<f64>)> {
    let mut out = vec![("original", series.values().to_vec())];
    if series.is_signed() || !series.has_complete_days() {
        ctx.note(format!("{id}: not a whole-day volume series; adjusted variant skipped"));
        return out;
    }
    match adjust(series) {
        Ok((_, adjusted)) => out.push(("adjusted", adjusted.values().to_vec())),
        Err(e) => ctx.fail(&format!("{id}/adjusted"), &e),
    }
    out
}

#[derive(Serialize)]
struct DfaDocument<'a> {
    instrument: &'a str,
    original: &'a DfaResult,
    adjusted: Option<&'a DfaResult>,
}

fn dfa(ctx: &mut RunContext) -> Result<()> {
    let inputs = load_inputs(ctx);
    let digits = ctx.config.precision;
    let mut summary = Table::new(&["instrument", "H1", "H1_stderr", "H2", "H2_stderr"], digits);
    let mut done = Vec::new();
    for (id, series) in &inputs {
        let mut results: Vec<(&str, DfaResult)> = Vec::new();
        for (variant, values) in variants(ctx, id, series) {
            match ctx.config.analysis.dfa(&values) {
                Ok(r) => results.push((variant, r)),
                Err(e) => ctx.fail(&format!("{id}/{variant}"), &e),
            }
        }
        let Some(original) = results.iter().find(|(v, _)| *v == "original").map(|(_, r)| r) else {
            continue;
        };
        let adjusted = results.iter().find(|(v, _)| *v == "adjusted").map(|(_, r)| r);
        ctx.write_json(
            format!("dfa/{id}.json"),
            &DfaDocument {
                instrument: id,
                original,
                adjusted,
            },
        )?;
        let mut curve = Table::new(&["log10_s", "log10_F2_original", "log10_F2_adjusted"], digits);
        for (i, &s) in original.scales.iter().enumerate() {
            let adj = adjusted.map_or(f64::NAN, |a| a.f2[i].log10());
            curve.push_numbers(&[(s as f64).log10(), original.f2[i].log10(), adj]);
        }
        ctx.write(format!("dfa/{id}_f2.csv"), curve.render())?;
        summary.push_labeled(
            id,
            &[
                original.hurst,
                original.stderr,
                adjusted.map_or(f64::NAN, |a| a.hurst),
                adjusted.map_or(f64::NAN, |a| a.stderr),
            ],
        );
        done.push(id.clone());
    }
    all_failed(ctx, &done)?;
    ctx.write("dfa/hurst.csv", summary.render())
}

#[derive(Serialize)]
struct MfdfaDocument<'a> {
    instrument: &'a str,
    variant: &'a str,
    result: &'a MultifractalResult,
    surface: &'a FluctuationSurface,
}

fn write_spectrum(ctx: &mut RunContext, id: &str, variant: &str, surface: &FluctuationSurface, r: &MultifractalResult) -> Result<()> {
    let digits = ctx.config.precision;
    ctx.write_json(
        format!("mfdfa/{id}_{variant}.json"),
        &MfdfaDocument {
            instrument: id,
            variant,
            result: r,
            surface,
        },
    )?;
    let mut header = vec!["log10_s".to_string()];
    header.extend(r.q.iter().map(|q| format!("q={q}")));
    let mut fq = Table::new(&header, digits);
    for (j, &s) in surface.scales.scales().iter().enumerate() {
        let mut row = vec![(s as f64).log10()];
        row.extend(surface.values.iter().map(|col| col[j].log10()));
        fq.push_numbers(&row);
    }
    ctx.write(format!("mfdfa/{id}_{variant}_fq.csv"), fq.render())?;

    let mut tau = Table::new(&["q", "h", "h_stderr", "tau"], digits);
    let mut spec = Table::new(&["q", "alpha", "f_alpha"], digits);
    for i in 0..r.q.len() {
        tau.push_numbers(&[r.q[i], r.h[i], r.h_stderr[i], r.tau[i]]);
        spec.push_numbers(&[r.q[i], r.alpha[i], r.f_alpha[i]]);
    }
    ctx.write(format!("mfdfa/{id}_{variant}_tau.csv"), tau.render())?;
    ctx.write(format!("mfdfa/{id}_{variant}_falpha.csv"), spec.render())
}

struct SpectrumPair {
    original: MultifractalResult,
    adjusted: Option<MultifractalResult>,
}

/// MF-DFA on both variants of one instrument; writes per-variant artifacts.
fn analyze_instrument(ctx: &mut RunContext, id: &str, series: &VolumeSeries, write: bool) -> Option<SpectrumPair> {
    let mut original = None;
    let mut adjusted = None;
    for (variant, values) in variants(ctx, id, series) {
        match ctx.config.analysis.mfdfa(&values) {
            Ok((surface, r)) => {
                if write {
                    if let Err(e) = write_spectrum(ctx, id, variant, &surface, &r) {
                        ctx.fail(&format!("{id}/{variant}"), &e);
                    }
                }
                if variant == "original" {
                    original = Some(r);
                } else {
                    adjusted = Some(r);
                }
            }
            Err(e) => ctx.fail(&format!("{id}/{variant}"), &e),
        }
    }
    original.map(|original| SpectrumPair { original, adjusted })
}

fn opt(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

fn mfdfa(ctx: &mut RunContext) -> Result<()> {
    let inputs = load_inputs(ctx);
    let digits = ctx.config.precision;
    let mut widths = Table::new(&["instrument", "delta_h1", "delta_h2", "delta_alpha1", "delta_alpha2"], digits);
    let mut done = Vec::new();
    for (id, series) in &inputs {
        let Some(pair) = analyze_instrument(ctx, id, series, true) else {
            continue;
        };
        let (o, a) = (&pair.original, pair.adjusted.as_ref());
        widths.push_labeled(
            id,
            &[o.delta_h, opt(a.map(|a| a.delta_h)), o.delta_alpha, opt(a.map(|a| a.delta_alpha))],
        );
        if let Some(a) = a {
            let mut cmp = Table::new(&["q", "h1", "h2", "tau1", "tau2", "alpha1", "alpha2", "f1", "f2"], digits);
            for i in 0..o.q.len() {
                cmp.push_numbers(&[o.q[i], o.h[i], a.h[i], o.tau[i], a.tau[i], o.alpha[i], a.alpha[i], o.f_alpha[i], a.f_alpha[i]]);
            }
            ctx.write(format!("mfdfa/{id}_comparison.csv"), cmp.render())?;
        }
        done.push(id.clone());
    }
    all_failed(ctx, &done)?;
    ctx.write("mfdfa/widths.csv", widths.render())
}

#[derive(Serialize)]
struct TaylorDocument {
    taylor: Vec<ScalingFit>,
    beta_trend: Option<ScalingFit>,
    hurst_vs_volume_original: Option<ScalingFit>,
    hurst_vs_volume_adjusted: Option<ScalingFit>,
    gamma: Option<GammaReport>,
    summaries: Vec<InstrumentSummary>,
}

fn taylor(ctx: &mut RunContext) -> Result<()> {
    let inputs = load_inputs(ctx);
    let digits = ctx.config.precision;
    let mut summaries_by_dt: Vec<(u32, Vec<InstrumentSummary>)> = Vec::new();
    let mut base_summaries = Vec::new();
    for (id, series) in &inputs {
        let mut base = match summarize(id, series) {
            Ok(s) => s,
            Err(e) => {
                ctx.fail(id, &e);
                continue;
            }
        };
        for (variant, values) in variants(ctx, id, series) {
            match ctx.config.analysis.dfa(&values) {
                Ok(r) if variant == "original" => base.hurst_original = Some(r.hurst),
                Ok(r) => base.hurst_adjusted = Some(r.hurst),
                Err(e) => ctx.fail(&format!("{id}/{variant}/dfa"), &e),
            }
        }
        base_summaries.push(base);
        for dt in ctx.config.dt.clone() {
            let summary = series
                .rescale(dt)
                .and_then(|s| {
                    if s.len() < 2 {
                        Err(Error::InsufficientData(format!("fewer than 2 bins at dt {dt}")))
                    } else {
                        summarize(id, &s)
                    }
                });
            match summary {
                Ok(s) => match summaries_by_dt.iter_mut().find(|(d, _)| *d == dt) {
                    Some((_, v)) => v.push(s),
                    None => summaries_by_dt.push((dt, vec![s])),
                },
                Err(e) => ctx.fail(&format!("{id}@dt{dt}"), &e),
            }
        }
    }
    all_failed(ctx, &base_summaries)?;

    let mut fits = Vec::new();
    for (dt, summaries) in &summaries_by_dt {
        let mut t = Table::new(&["instrument", "log10_mean", "log10_std"], digits);
        for s in summaries {
            t.push_labeled(&s.id, &[s.mean.log10(), s.std.log10()]);
        }
        ctx.write(format!("taylor/taylor_dt{dt}.csv"), t.render())?;
        match fit_taylor(summaries) {
            Ok(f) => fits.push(f),
            Err(e) => ctx.fail(&format!("taylor@dt{dt}"), &e),
        }
    }
    let mut beta = Table::new(&["dt_minutes", "log10_dt", "beta", "beta_stderr"], digits);
    for f in &fits {
        let dt = f.dt_minutes.unwrap_or(0) as f64;
        beta.push_numbers(&[dt, dt.log10(), f.exponent, f.stderr]);
    }
    ctx.write("taylor/beta_trend.csv", beta.render())?;
    let beta_trend = fit_beta_trend(&fits).map_err(|e| ctx.fail("beta_trend", &e)).ok();

    let mut hv = Table::new(&["instrument", "log10_mean", "H1", "H2"], digits);
    for s in &base_summaries {
        hv.push_labeled(&s.id, &[s.mean.log10(), opt(s.hurst_original), opt(s.hurst_adjusted)]);
    }
    ctx.write("taylor/hurst_vs_volume.csv", hv.render())?;
    let pairs = |pick: fn(&InstrumentSummary) -> Option<f64>| -> Vec<(f64, f64)> {
        base_summaries.iter().filter_map(|s| pick(s).map(|h| (h, s.mean))).collect()
    };
    let gh1 = fit_hurst_vs_volume(&pairs(|s| s.hurst_original))
        .map_err(|e| ctx.fail("hurst_vs_volume/original", &e))
        .ok();
    let gh2 = fit_hurst_vs_volume(&pairs(|s| s.hurst_adjusted))
        .map_err(|e| ctx.fail("hurst_vs_volume/adjusted", &e))
        .ok();
    let gamma = match (&beta_trend, &gh1) {
        (Some(gb), Some(h1)) => {
            let mut labelled = vec![("original", h1)];
            if let Some(h2) = &gh2 {
                labelled.push(("adjusted", h2));
            }
            gamma_consistency(gb, &labelled).map_err(|e| ctx.fail("gamma", &e)).ok()
        }
        _ => None,
    };
    let doc = TaylorDocument {
        taylor: fits,
        beta_trend,
        hurst_vs_volume_original: gh1,
        hurst_vs_volume_adjusted: gh2,
        gamma,
        summaries: summaries_by_dt.into_iter().flat_map(|(_, v)| v).collect(),
    };
    ctx.write_json("taylor/taylor.json", &doc)
}

fn synth_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2003, 1, 2).expect("valid date")
}

fn synth(ctx: &mut RunContext) -> Result<()> {
    let c = ctx.config.synth.clone();
    let seed = ctx.config.seed;
    let session = ctx.config.session.clone();
    let digits = ctx.config.precision;
    let volume = |values: Vec<f64>| VolumeSeries::from_values(values, 1, session.clone(), synth_start());
    let signal = |values: Vec<f64>| VolumeSeries::from_signal(values, 1, session.clone(), synth_start());
    let spec = match c.kind {
        SynthKind::Fgn => synth::GeneratorSpec::Fgn {
            hurst: c.hurst,
            length: c.length,
            seed,
        },
        SynthKind::Cascade => synth::GeneratorSpec::Cascade {
            p: c.p,
            levels: c.levels,
            randomize: c.randomize,
            seed,
        },
        SynthKind::Iid => synth::GeneratorSpec::Iid { length: c.length, seed },
        SynthKind::Universe => synth::GeneratorSpec::PlantedTaylorUniverse {
            beta: c.beta,
            instruments: c.instruments,
            mean_lo: c.mean_lo,
            mean_hi: c.mean_hi,
            length: c.length,
            seed,
        },
        SynthKind::Modulated => synth::GeneratorSpec::Modulated {
            hurst: c.hurst,
            days: c.days,
            sigma: c.sigma,
            seed,
        },
    };
    ctx.write_json("synth/generator.json", &spec)?;
    match c.kind {
        SynthKind::Fgn => {
            let v = synth::gen_fgn(c.hurst, c.length, seed)?;
            ctx.write("synth/fgn.csv", series_text(&signal(v)?)?)?;
        }
        SynthKind::Iid => {
            ctx.write("synth/iid.csv", series_text(&signal(synth::gen_iid(c.length, seed))?)?)?;
        }
        SynthKind::Cascade => {
            let v = synth::gen_cascade(c.p, c.levels, c.randomize, seed)?;
            ctx.write("synth/cascade.csv", series_text(&volume(v)?)?)?;
            let reference = CascadeReference { p: c.p };
            let mut t = Table::new(&["q", "h_ref", "tau_ref", "alpha_ref", "f_ref"], digits);
            for &q in ctx.config.analysis.q_grid()?.values() {
                t.push_numbers(&[q, reference.h(q), reference.tau(q), reference.alpha(q), reference.f_alpha(q)]);
            }
            ctx.write("synth/cascade_reference.csv", t.render())?;
        }
        SynthKind::Universe => {
            let u = synth::gen_taylor_universe(c.beta, c.instruments, c.mean_lo, c.mean_hi, c.length, seed)?;
            let mut t = Table::new(&["instrument", "planted_mean", "planted_std"], digits);
            let width = c.instruments.to_string().len();
            for (j, (values, mu)) in u.series.into_iter().zip(&u.means).enumerate() {
                let id = format!("universe_{j:0width$}");
                ctx.write(format!("synth/{id}.csv"), series_text(&volume(values)?)?)?;
                t.push_labeled(&id, &[*mu, mu.powf(c.beta)]);
            }
            ctx.write("synth/universe_reference.csv", t.render())?;
            if u.clipped > 0 {
                ctx.note(format!("universe: {} draws raised to the volume floor", u.clipped));
            }
        }
        SynthKind::Modulated => {
            let pattern = synth::stylized_pattern(&session);
            let v = synth::gen_modulated_volume(c.hurst, c.days, c.sigma, &pattern, seed)?;
            ctx.write("synth/modulated.csv", series_text(&volume(v)?)?)?;
            let planted = IntradayPattern {
                dt_minutes: 1,
                values: pattern,
                n_days: c.days,
            };
            ctx.write("synth/modulated_pattern.csv", pattern_text(ctx, &planted)?)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportRow {
    instrument: String,
    h1: Option<f64>,
    h1_stderr: Option<f64>,
    h2: Option<f64>,
    h2_stderr: Option<f64>,
    delta_h1: f64,
    delta_h2: Option<f64>,
    delta_alpha1: f64,
    delta_alpha2: Option<f64>,
}

fn report(ctx: &mut RunContext) -> Result<()> {
    let inputs = load_inputs(ctx);
    let mut rows = Vec::new();
    for (id, series) in &inputs {
        let Some(pair) = analyze_instrument(ctx, id, series, false) else {
            continue;
        };
        let (o, a) = (&pair.original, pair.adjusted.as_ref());
        rows.push(ReportRow {
            instrument: id.clone(),
            h1: o.hurst,
            h1_stderr: o.hurst_stderr,
            h2: a.and_then(|a| a.hurst),
            h2_stderr: a.and_then(|a| a.hurst_stderr),
            delta_h1: o.delta_h,
            delta_h2: a.map(|a| a.delta_h),
            delta_alpha1: o.delta_alpha,
            delta_alpha2: a.map(|a| a.delta_alpha),
        });
    }
    all_failed(ctx, &rows)?;
    let mut table = Table::new(
        &["instrument", "H1", "H1_stderr", "H2", "H2_stderr", "delta_h1", "delta_h2", "delta_alpha1", "delta_alpha2"],
        ctx.config.precision,
    );
    for r in &rows {
        table.push_labeled(
            &r.instrument,
            &[
                opt(r.h1),
                opt(r.h1_stderr),
                opt(r.h2),
                opt(r.h2_stderr),
                r.delta_h1,
                opt(r.delta_h2),
                r.delta_alpha1,
                opt(r.delta_alpha2),
            ],
        );
    }
    ctx.write("report/table1.csv", table.render())?;
    ctx.write_json("report/table1.json", &rows)
}
