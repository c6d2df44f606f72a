use std::ffi::CStr;
use std::f64::consts::PI;
use std::ptr;

use mcflow_ffi::*;

fn last_error() -> String {
    let p = mcflow_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn circle_handle_round_trip() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(mcflow_curve_circle(0.0, 0.0, 1.0, 256, &mut c), McflowStatus::Ok);
        assert_eq!(mcflow_curve_len(c), 256);
        let (mut len, mut area) = (0.0, 0.0);
        assert_eq!(mcflow_curve_length(c, &mut len), McflowStatus::Ok);
        assert_eq!(mcflow_curve_area(c, &mut area), McflowStatus::Ok);
        assert!((len - 2.0 * PI).abs() < 1e-3);
        assert!((area - PI).abs() < 1e-3);

        let mut xy = vec![0.0; 2 * 256];
        assert_eq!(mcflow_curve_points(c, xy.as_mut_ptr(), 255), McflowStatus::BufferTooSmall);
        assert_eq!(mcflow_curve_points(c, xy.as_mut_ptr(), 256), McflowStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(mcflow_curve_from_points(xy.as_ptr(), 256, &mut back), McflowStatus::Ok);
        let mut len2 = 0.0;
        mcflow_curve_length(back, &mut len2);
        assert_eq!(len, len2);
        mcflow_curve_free(back);
        mcflow_curve_free(c);
    }
}

#[test]
fn clockwise_points_are_an_invalid_curve() {
    unsafe {
        let xy: Vec<f64> = (0..16)
            .flat_map(|k| {
                let a = -2.0 * PI * k as f64 / 16.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let mut c = ptr::null_mut();
        assert_eq!(mcflow_curve_from_points(xy.as_ptr(), 16, &mut c), McflowStatus::InvalidCurve);
        assert!(c.is_null());
        assert!(last_error().contains("orientation"), "{}", last_error());
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(mcflow_curve_length(ptr::null(), &mut x), McflowStatus::NullPointer);
        assert!(last_error().contains("curve"));
        assert_eq!(mcflow_curve_circle(0.0, 0.0, 1.0, 16, ptr::null_mut()), McflowStatus::NullPointer);
        assert_eq!(mcflow_curve_len(ptr::null()), 0);
        mcflow_curve_free(ptr::null_mut());
        mcflow_trajectory_free(ptr::null_mut());
        mcflow_field_free(ptr::null_mut());
        mcflow_clear_error();
        assert!(mcflow_last_error_message().is_null());
    }
}

#[test]
fn circle_flow_matches_the_radius_law() {
    unsafe {
        let mut c = ptr::null_mut();
        mcflow_curve_circle(0.0, 0.0, 1.0, 128, &mut c);
        let mut cfg = std::mem::zeroed();
        assert_eq!(mcflow_flow_config_default(McflowLaw::Csf, &mut cfg), McflowStatus::Ok);
        cfg.n = 128;
        cfg.t_end = 0.2;
        let mut tr = ptr::null_mut();
        assert_eq!(mcflow_flow_run(c, &cfg, &mut tr), McflowStatus::Ok);
        let mut t = 0.0;
        mcflow_trajectory_final_time(tr, &mut t);
        assert!((t - 0.2).abs() < 1e-12);
        let mut fin = ptr::null_mut();
        assert_eq!(mcflow_trajectory_final_curve(tr, &mut fin), McflowStatus::Ok);
        let mut area = 0.0;
        mcflow_curve_area(fin, &mut area);
        assert!((area - PI * 0.6).abs() < 1e-2, "{area}");
        let count = mcflow_trajectory_record_count(tr);
        assert!(count > 10);
        let mut recs = vec![McflowRecord::default(); count];
        assert_eq!(mcflow_trajectory_records(tr, recs.as_mut_ptr(), count), McflowStatus::Ok);
        assert_eq!(recs[0].t, 0.0);
        assert!(recs.windows(2).all(|w| w[1].length < w[0].length));
        let mut slope = 0.0;
        assert_eq!(mcflow_trajectory_area_slope(tr, 0.1, &mut slope), McflowStatus::Ok);
        assert!((slope / (-2.0 * PI) - 1.0).abs() < 0.01);
        let mut extinct = -1;
        mcflow_trajectory_extinct(tr, &mut extinct);
        assert_eq!(extinct, 0);
        mcflow_curve_free(fin);
        mcflow_trajectory_free(tr);
        mcflow_curve_free(c);
    }
}

#[test]
fn unstable_step_is_rejected() {
    unsafe {
        let mut c = ptr::null_mut();
        mcflow_curve_circle(0.0, 0.0, 1.0, 64, &mut c);
        let mut cfg = std::mem::zeroed();
        mcflow_flow_config_default(McflowLaw::Csf, &mut cfg);
        cfg.dt = 1.0;
        let mut tr = ptr::null_mut();
        let s = mcflow_flow_run(c, &cfg, &mut tr);
        assert!(matches!(s, McflowStatus::Unstable | McflowStatus::InvalidConfig), "{s:?}");
        assert!(tr.is_null());
        assert!(!last_error().is_empty());
        mcflow_curve_free(c);
    }
}

#[test]
fn threshold_and_phase_field_steps() {
    unsafe {
        let n = 64;
        let mut d = ptr::null_mut();
        assert_eq!(mcflow_field_disk(n, 0.3, &mut d), McflowStatus::Ok);
        assert_eq!(mcflow_field_n(d), n);
        let mut next = ptr::null_mut();
        assert_eq!(mcflow_mbo_step(d, 1e-3, &mut next), McflowStatus::Ok);
        let mut vals = vec![0.0; n * n];
        assert_eq!(mcflow_field_values(next, vals.as_mut_ptr(), n * n), McflowStatus::Ok);
        assert!(vals.iter().all(|v| *v == 1.0 || *v == -1.0));
        let (mut a0, mut a1) = (0.0, 0.0);
        mcflow_field_contour_area(d, 0.0, &mut a0);
        mcflow_field_contour_area(next, 0.0, &mut a1);
        assert!(a1 < a0);

        let mut noise = ptr::null_mut();
        mcflow_field_random_phase(n, 3, &mut noise);
        // The noise is not a ±1 indicator.
        let mut bad = ptr::null_mut();
        assert_eq!(mcflow_mbo_step(noise, 1e-3, &mut bad), McflowStatus::Numerical);
        let mut ac = ptr::null_mut();
        assert_eq!(mcflow_allen_cahn_step(noise, 1e-3, 1.0 / 256.0, &mut ac), McflowStatus::InvalidConfig);
        assert!(last_error().contains("epsilon"));
        assert_eq!(mcflow_allen_cahn_step(noise, 1e-3, 6.0 / n as f64, &mut ac), McflowStatus::Ok);
        let mut sat = 0.0;
        mcflow_field_fraction_saturated(ac, 0.9, &mut sat);
        assert!((0.0..=1.0).contains(&sat));

        let mut from = ptr::null_mut();
        assert_eq!(mcflow_field_from_values(n, vals.as_ptr(), &mut from), McflowStatus::Ok);
        assert_eq!(mcflow_field_from_values(48, vals.as_ptr(), &mut bad), McflowStatus::InvalidConfig);
        assert_eq!(mcflow_field_disk(n, 0.7, &mut bad), McflowStatus::InvalidArgument);
        for f in [d, next, noise, ac, from] {
            mcflow_field_free(f);
        }
    }
}

#[test]
fn radial_minimizing_movements() {
    unsafe {
        let mut r = 0.0;
        assert_eq!(mcflow_atw_step(1.0, 0.01, &mut r), McflowStatus::Ok);
        assert!((r - 0.989898).abs() < 1e-6);
        assert_eq!(mcflow_atw_step(1.0, 0.0, &mut r), McflowStatus::InvalidConfig);
        let mut s = McflowAtwSummary::default();
        assert_eq!(mcflow_atw_run(1.0, 1e-3, 0.4, &mut s), McflowStatus::Ok);
        assert_eq!(s.steps, 400);
        assert!(s.sup_error <= 5e-3);
        assert!(s.extinction_time.is_nan());
        mcflow_atw_run(1.0, 1e-2, 1.0, &mut s);
        assert!(s.extinction_time < 0.5 && s.extinction_time > 0.45);
        assert_eq!(s.final_radius, 0.0);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(mcflow_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
