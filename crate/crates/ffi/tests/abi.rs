use std::ffi::CStr;
use std::ptr;

use volscale_ffi::*;

unsafe fn last_error() -> String {
    let p = vs_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn series_roundtrip() {
    let data = [1.0, 2.5, -3.0];
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(vs_series_new(data.as_ptr(), data.len(), &mut s), VsStatus::Ok);
        assert_eq!(vs_series_len(s), 3);

        let mut small = [0.0; 2];
        let mut n = 0;
        assert_eq!(vs_series_copy(s, small.as_mut_ptr(), 2, &mut n), VsStatus::BufferTooSmall);
        assert_eq!(n, 3);
        assert!(last_error().contains("3 needed"));

        let mut buf = [0.0; 3];
        assert_eq!(vs_series_copy(s, buf.as_mut_ptr(), 3, ptr::null_mut()), VsStatus::Ok);
        assert_eq!(buf, data);
        vs_series_free(s);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(vs_series_new(ptr::null(), 4, &mut ptr::null_mut()), VsStatus::NullPointer);
        assert_eq!(vs_series_len(ptr::null()), 0);
        vs_series_free(ptr::null_mut());
        vs_mf_result_free(ptr::null_mut());
        let mut h = 0.0;
        assert_eq!(vs_dfa(ptr::null(), ptr::null(), &mut h, ptr::null_mut()), VsStatus::NullPointer);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(vs_gen_fgn(1.5, 4096, 0, &mut s), VsStatus::InvalidArgument);
        assert!(s.is_null());

        let short = [1.0; 40];
        assert_eq!(vs_series_new(short.as_ptr(), short.len(), &mut s), VsStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(vs_mfdfa(s, ptr::null(), &mut r), VsStatus::SeriesTooShort);
        assert!(last_error().contains("too short"));
        vs_series_free(s);

        let flat = [2.0; 400];
        assert_eq!(vs_series_new(flat.as_ptr(), flat.len(), &mut s), VsStatus::Ok);
        assert_eq!(vs_mfdfa(s, ptr::null(), &mut r), VsStatus::DegenerateInput);
        vs_series_free(s);
    }
}

#[test]
fn cascade_spectrum() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(vs_gen_cascade(0.3, 14, false, 0, &mut s), VsStatus::Ok);
        assert_eq!(vs_series_len(s), 1 << 14);

        let mut cfg = vs_mfdfa_config_default();
        cfg.grid = VsGrid::Dyadic;
        let mut r = ptr::null_mut();
        assert_eq!(vs_mfdfa(s, &cfg, &mut r), VsStatus::Ok);
        let n = vs_mf_result_len(r);
        assert_eq!(n, 33);

        let mut q = vec![0.0; n];
        let mut h = vec![0.0; n];
        assert_eq!(vs_mf_result_copy(r, VsMfField::Q, q.as_mut_ptr(), n, ptr::null_mut()), VsStatus::Ok);
        assert_eq!(vs_mf_result_copy(r, VsMfField::H, h.as_mut_ptr(), n, ptr::null_mut()), VsStatus::Ok);
        let reference = volscale::synth::CascadeReference { p: 0.3 };
        for (q, h) in q.iter().zip(&h) {
            assert!((h - reference.h(*q)).abs() < 0.05, "q={q} h={h}");
        }

        let (mut dh, mut da, mut h2) = (0.0, 0.0, 0.0);
        assert_eq!(vs_mf_result_delta_h(r, &mut dh), VsStatus::Ok);
        assert_eq!(vs_mf_result_delta_alpha(r, &mut da), VsStatus::Ok);
        assert_eq!(vs_mf_result_hurst(r, &mut h2), VsStatus::Ok);
        assert!(da > dh && dh > 0.5);
        assert!((h2 - reference.h(2.0)).abs() < 0.05);
        vs_mf_result_free(r);
        vs_series_free(s);
    }
}

#[test]
fn shuffled_noise_has_half_hurst() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(vs_gen_fgn(0.8, 1 << 15, 0, &mut s), VsStatus::Ok);
        let mut shuffled = ptr::null_mut();
        assert_eq!(vs_shuffle(s, 100, &mut shuffled), VsStatus::Ok);
        let (mut h, mut hs, mut se) = (0.0, 0.0, 0.0);
        assert_eq!(vs_dfa(s, ptr::null(), &mut h, &mut se), VsStatus::Ok);
        assert_eq!(vs_dfa(shuffled, ptr::null(), &mut hs, ptr::null_mut()), VsStatus::Ok);
        assert!((h - 0.8).abs() < 0.06, "{h}");
        assert!((hs - 0.5).abs() < 0.06, "{hs}");
        assert!(se > 0.0);
        vs_series_free(shuffled);
        vs_series_free(s);
    }
}

#[test]
fn loglog_fit_recovers_exponent() {
    let x: Vec<f64> = (1..=8).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(0.75)).collect();
    let (mut slope, mut intercept) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            vs_loglog_fit(x.as_ptr(), y.as_ptr(), x.len(), &mut slope, &mut intercept, ptr::null_mut()),
            VsStatus::Ok
        );
        assert_eq!(
            vs_loglog_fit(x.as_ptr(), y.as_ptr(), 2, &mut slope, ptr::null_mut(), ptr::null_mut()),
            VsStatus::InsufficientData
        );
    }
    assert!((slope - 0.75).abs() < 1e-12);
    assert!((intercept - 3f64.log10()).abs() < 1e-12);
}
