use std::f64::consts::PI;

use mcflow_core::flow::{self, identity_residuals, FlowConfig, Termination, VelocityLaw};
use mcflow_core::scenario::{self, Spiral};
use mcflow_core::{ClosedCurve, Vec2};

fn unit_circle(n: usize) -> ClosedCurve {
    scenario::circle(Vec2::ZERO, 1.0, n).unwrap()
}

fn cfg(law: VelocityLaw, n: usize, dt: f64, t_end: f64, stride: usize) -> FlowConfig {
    FlowConfig {
        law,
        dt,
        t_end,
        n,
        snapshot_stride: stride,
        ..FlowConfig::default()
    }
}

fn max_radius_error(c: &ClosedCurve, r: f64) -> f64 {
    let o = c.centroid();
    c.points().iter().map(|p| ((*p - o).norm() - r).abs()).fold(0.0, f64::max)
}

#[test]
fn circle_radius_at_t_018() {
    let traj = flow::run(&unit_circle(256), &cfg(VelocityLaw::Csf, 256, 1e-5, 0.18, 1000)).unwrap();
    assert_eq!(traj.termination, Termination::EndTime);
    assert!((traj.final_time() - 0.18).abs() < 1e-12);
    let e = max_radius_error(traj.final_curve(), (1.0f64 - 0.36).sqrt());
    assert!(e < 1e-3, "{e}");
}

#[test]
fn extinction_guard_matches_the_area_law() {
    let c = cfg(VelocityLaw::Csf, 64, 1e-4, 1.0, 10);
    let traj = flow::run(&unit_circle(64), &c).unwrap();
    assert_eq!(traj.termination, Termination::Extinction);
    // A(t) = A0 - 2πt reaches 2% of A0 at t = 0.98·A0/(2π).
    let a0 = traj.diagnostics.records[0].area;
    let expect = (1.0 - c.stop_area_fraction) * a0 / (2.0 * PI);
    assert!((traj.final_time() - expect).abs() < 5e-3, "{} vs {expect}", traj.final_time());
    let last = traj.diagnostics.last().unwrap();
    assert!(last.area <= c.stop_area_fraction * a0);
}

#[test]
fn csf_identities_on_the_circle() {
    let traj = flow::run(&unit_circle(256), &cfg(VelocityLaw::Csf, 256, 1e-5, 0.3, 500)).unwrap();
    let res = identity_residuals(&traj);
    assert!(res.len() > 50);
    for (r, (t, c)) in res.iter().zip(&traj.snapshots[1..]) {
        let k2 = c.quantities().curvature_energy();
        assert!(r.length.abs() <= 1e-3 * k2, "t={t}: {} vs {k2}", r.length);
        // ∫κ² ds = 2π/√(1 - 2t).
        assert!((k2 - 2.0 * PI / (1.0 - 2.0 * t).sqrt()).abs() < 2e-3 * k2);
        assert!(r.area.abs() < 1e-2, "t={t}: {}", r.area);
        assert!(r.curvature.unwrap() < 5e-2 * k2, "t={t}: {:?}", r.curvature);
        let kappa = 1.0 / (1.0 - 2.0 * t).sqrt();
        let q = c.quantities();
        for k in &q.curvatures {
            assert!((k - kappa).abs() < 1e-3 * kappa, "t={t}: {k} vs {kappa}");
        }
    }
}

#[test]
fn curve_diffusion_conserves_area_and_dissipates_length() {
    let c0 = scenario::perturbed_circle(1.0, 0.1, 3, 64).unwrap();
    let traj = flow::run(&c0, &cfg(VelocityLaw::CurveDiffusion, 64, 1e-6, 0.05, 1000)).unwrap();
    let a0 = traj.diagnostics.records[0].area;
    for r in &traj.diagnostics.records {
        assert!((r.area - a0).abs() <= 1e-3 * a0, "t={}: {} vs {a0}", r.t, r.area);
    }
    for (r, (_, c)) in identity_residuals(&traj).iter().zip(&traj.snapshots[1..]) {
        let q = c.quantities();
        let v_abs: f64 = VelocityLaw::CurveDiffusion
            .velocity(&q)
            .iter()
            .zip(&q.dual_lengths)
            .map(|(v, ds)| v.abs() * ds)
            .sum();
        assert!(r.area.abs() < 5e-3 * v_abs, "t={}: {} vs {v_abs}", r.t, r.area);
        assert!(r.length.abs() <= 0.05 * r.dissipation, "t={}: {} vs {}", r.t, r.length, r.dissipation);
    }
    // Length is still a Lyapunov function.
    for w in traj.diagnostics.records.windows(2) {
        assert!(w[1].length < w[0].length);
    }
}

#[test]
fn curve_diffusion_area_rate_vanishes_under_refinement() {
    // ∮∂s²κ ds = 0, so dA/dt is pure discretization error.
    let rate = |n: usize| {
        let c0 = scenario::perturbed_circle(1.0, 0.1, 3, n).unwrap();
        let dt = 0.04 * (2.0 * PI / n as f64).powi(4);
        let stride = (2e-4 / dt).round() as usize;
        let traj = flow::run(&c0, &cfg(VelocityLaw::CurveDiffusion, n, dt, 4.0 * stride as f64 * dt, stride)).unwrap();
        identity_residuals(&traj)[0].area.abs()
    };
    let (coarse, fine) = (rate(64), rate(128));
    assert!(fine < 0.35 * coarse, "{coarse} -> {fine}");
}

#[test]
fn curve_diffusion_keeps_a_circle_in_place() {
    let c = unit_circle(64);
    let after = flow::step(&c, VelocityLaw::CurveDiffusion, 1e-6).unwrap();
    for (p, q) in c.points().iter().zip(after.points()) {
        assert!((*p - *q).norm() < 1e-9);
    }
    let after = flow::step(&c, VelocityLaw::Csf, 1e-5).unwrap();
    let r = after.points()[0].norm();
    assert!((r - (1.0 - 1e-5)).abs() < 1e-9, "{r}");
}

#[test]
fn convex_curves_stay_convex_and_get_rounder() {
    for c0 in [
        scenario::ellipse(1.0, 0.5, 256).unwrap(),
        scenario::perturbed_circle(1.0, 0.05, 3, 256).unwrap(),
    ] {
        assert!(c0.quantities().min_curvature() > 0.0);
        let traj = flow::run(&c0, &cfg(VelocityLaw::Csf, 256, 1e-5, 1.0, 200)).unwrap();
        let recs = &traj.diagnostics.records;
        for w in recs.windows(2) {
            assert!(w[1].length < w[0].length);
            assert!(w[1].isoperimetric_ratio <= w[0].isoperimetric_ratio + 1e-6, "t={}", w[1].t);
        }
        for r in recs {
            assert!(r.min_curvature > -1e-6, "t={}", r.t);
            assert!(r.isoperimetric_ratio >= 1.0 - 1e-4);
        }
        let last = recs.last().unwrap();
        assert!(last.isoperimetric_ratio < 1.01, "{}", last.isoperimetric_ratio);
        assert!(traj.self_intersections.is_empty());
    }
}

#[test]
fn spiral_convexifies_and_rounds() {
    let s = Spiral::default();
    let c0 = s.curve(768).unwrap();
    let traj = flow::run(&c0, &cfg(VelocityLaw::Csf, 768, 1e-5, 0.4, 100)).unwrap();
    assert_eq!(traj.termination, Termination::Extinction);
    assert!(traj.self_intersections.is_empty());
    let t_star = traj.diagnostics.convexification_time().expect("becomes convex");
    assert!(t_star > 0.0 && t_star < traj.final_time());
    let recs = &traj.diagnostics.records;
    for r in recs.iter().filter(|r| r.t >= t_star) {
        assert!(r.min_curvature > 0.0);
    }
    let slope = traj.diagnostics.area_slope(0.1).unwrap();
    assert!((slope / (-2.0 * PI) - 1.0).abs() < 0.01, "{slope}");
    assert!(recs.last().unwrap().isoperimetric_ratio < 1.01);
}

#[test]
fn willmore_grows_a_small_circle() {
    let c = scenario::circle(Vec2::ZERO, 0.5, 64).unwrap();
    let traj = flow::run(&c, &cfg(VelocityLaw::Willmore, 64, 1e-7, 1e-3, 1000)).unwrap();
    // V = κ³/2 for a circle: dR/dt = 1/(2R³).
    let r_end = (0.5f64.powi(4) + 2.0 * 1e-3).powf(0.25);
    let e = max_radius_error(traj.final_curve(), r_end);
    assert!(e < 1e-4, "{e}");
}

#[test]
fn unstable_or_invalid_configs_are_rejected() {
    let c = unit_circle(64);
    assert!(flow::run(&c, &cfg(VelocityLaw::Csf, 64, 1.0, 0.1, 1)).is_err());
    assert!(flow::run(&c, &cfg(VelocityLaw::Csf, 64, -1e-5, 0.1, 1)).is_err());
    assert!(flow::run(&c, &cfg(VelocityLaw::Csf, 4, 1e-5, 0.1, 1)).is_err());
}

#[test]
fn diagnostics_csv_header() {
    let traj = flow::run(&unit_circle(64), &cfg(VelocityLaw::Csf, 64, 1e-4, 1e-2, 10)).unwrap();
    let csv = traj.diagnostics.to_csv();
    assert_eq!(csv.lines().next().unwrap(), "t,length,area,dissipation,min_curvature,isoperimetric_ratio");
    assert_eq!(csv.lines().count(), traj.diagnostics.records.len() + 1);
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.0).collect();
    assert!(times.windows(2).all(|w| w[1] > w[0]));
}
