use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use proptest::prelude::*;

use volscale::fluctuation::{fluctuation_surface, make_scale_grid, multifractal_analysis, QGrid};
use volscale::ingest::{aggregate_volume, trading_days, SessionSpec, TradeRecord, VolumeSeries};
use volscale::intraday::adjust;

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2003, 1, 2).unwrap()
}

fn trades_strategy() -> impl Strategy<Value = Vec<TradeRecord>> {
    let days = trading_days(start(), 6);
    prop::collection::vec((0..6usize, 9 * 3600..15 * 3600 + 600u32, 1..10_000u64), 1..400).prop_map(move |raw| {
        raw.into_iter()
            .map(|(d, secs, size)| TradeRecord {
                timestamp: NaiveDateTime::new(days[d], NaiveTime::from_num_seconds_from_midnight_opt(secs, 0).unwrap()),
                size,
            })
            .collect()
    })
}

fn positive_days(days: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5..1e4f64, 240 * days)
}

fn signal(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn aggregation_conserves_in_session_volume(trades in trades_strategy(), dt in prop::sample::select(vec![1u32, 2, 5, 30, 120, 240])) {
        let session = SessionSpec::default();
        let agg = aggregate_volume(&trades, dt, &session).unwrap();
        let expected: u64 = trades
            .iter()
            .filter(|t| session.session_minute(t.timestamp.time()).is_some())
            .map(|t| t.size)
            .sum();
        prop_assert_eq!(agg.series.values().iter().sum::<f64>(), expected as f64);
        prop_assert_eq!(agg.report.in_session + agg.report.discarded, trades.len() as u64);
    }

    #[test]
    fn coarse_bins_are_sums_of_fine_bins(trades in trades_strategy(), k in prop::sample::select(vec![2u32, 3, 4, 8, 24])) {
        let session = SessionSpec::default();
        let fine = aggregate_volume(&trades, 5, &session).unwrap().series;
        let coarse = aggregate_volume(&trades, 5 * k, &session).unwrap().series;
        let rescaled = fine.rescale(5 * k).unwrap();
        prop_assert_eq!(rescaled.values(), coarse.values());
    }

    #[test]
    fn aggregation_ignores_input_order(trades in trades_strategy(), seed in any::<u64>()) {
        let session = SessionSpec::default();
        let shuffled = {
            let mut t = trades.clone();
            let order = volscale::synth::shuffle(&(0..t.len()).map(|i| i as f64).collect::<Vec<_>>(), seed);
            let orig = t.clone();
            for (slot, i) in t.iter_mut().zip(order) {
                *slot = orig[i as usize];
            }
            t
        };
        let a = aggregate_volume(&trades, 1, &session).unwrap().series;
        let b = aggregate_volume(&shuffled, 1, &session).unwrap().series;
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn deseasonalization_is_idempotent(values in positive_days(3)) {
        let s = VolumeSeries::from_values(values, 1, SessionSpec::default(), start()).unwrap();
        let (_, once) = adjust(&s).unwrap();
        let (pattern, twice) = adjust(&once).unwrap();
        for p in &pattern.values {
            prop_assert!((p - 1.0).abs() < 1e-10);
        }
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn deseasonalization_ignores_scale(values in positive_days(2), c in 1e-3..1e3f64) {
        let session = SessionSpec::default();
        let s = VolumeSeries::from_values(values.clone(), 1, session.clone(), start()).unwrap();
        let scaled = VolumeSeries::from_values(values.iter().map(|v| v * c).collect(), 1, session, start()).unwrap();
        let (_, a) = adjust(&s).unwrap();
        let (_, b) = adjust(&scaled).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-10 * x.abs().max(1.0));
        }
    }

    #[test]
    fn h_is_affine_invariant(x in signal(1024), a in prop_oneof![-50.0..-0.1f64, 0.1..50.0f64], b in -1e3..1e3f64) {
        let grid = make_scale_grid(x.len(), 16, None, 8).unwrap();
        let q = QGrid::range(-2.0, 2.0, 1.0).unwrap();
        let h = |v: &[f64]| multifractal_analysis(&fluctuation_surface(v, &q, &grid, 1).unwrap()).unwrap().h;
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        for (h1, h2) in h(&x).iter().zip(h(&y)) {
            prop_assert!((h1 - h2).abs() < 1e-9);
        }
    }

    #[test]
    fn fluctuation_non_decreasing_in_q(x in signal(600)) {
        let grid = make_scale_grid(x.len(), 10, None, 6).unwrap();
        let q = QGrid::range(-4.0, 4.0, 0.5).unwrap();
        let surface = fluctuation_surface(&x, &q, &grid, 2).unwrap();
        for j in 0..grid.len() {
            for w in surface.values.windows(2) {
                prop_assert!(w[1][j] >= w[0][j] * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn fluctuation_invariant_under_reversal(x in signal(700)) {
        let grid = make_scale_grid(x.len(), 12, None, 6).unwrap();
        let q = QGrid::range(-3.0, 3.0, 1.0).unwrap();
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let a = fluctuation_surface(&x, &q, &grid, 1).unwrap();
        let b = fluctuation_surface(&rev, &q, &grid, 1).unwrap();
        for (ra, rb) in a.values.iter().zip(&b.values) {
            for (u, v) in ra.iter().zip(rb) {
                prop_assert!((u - v).abs() <= 1e-9 * u.abs());
            }
        }
    }
}
