//! Explicit time integration of normal-velocity flows `∂tX = V ν` of closed
//! curves, with equal-arclength resampling and trajectory diagnostics.
//!
//! Velocities in the outward-normal, convex-positive convention:
//!
//! | law              | `V`              |
//! |------------------|------------------|
//! | curve shortening | `-κ`             |
//! | curve diffusion  | `∂s²κ`           |
//! | Willmore         | `∂s²κ + κ³/2`    |

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::curve::{ClosedCurve, CurveQuantities};
use crate::error::{Error, Result};
use crate::geom::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VelocityLaw {
    Csf,
    CurveDiffusion,
    Willmore,
}

impl VelocityLaw {
    /// Largest stable explicit Euler step for a curve whose shortest edge is
    /// `min_ds`.
    pub fn stability_bound(self, min_ds: f64) -> f64 {
        match self {
            VelocityLaw::Csf => 0.25 * min_ds * min_ds,
            VelocityLaw::CurveDiffusion | VelocityLaw::Willmore => 0.05 * min_ds.powi(4),
        }
    }

    /// Normal velocity at every vertex.
    pub fn velocity(self, q: &CurveQuantities) -> Vec<f64> {
        match self {
            VelocityLaw::Csf => q.curvatures.iter().map(|k| -k).collect(),
            VelocityLaw::CurveDiffusion => q.second_derivative(&q.curvatures),
            VelocityLaw::Willmore => q
                .second_derivative(&q.curvatures)
                .into_iter()
                .zip(&q.curvatures)
                .map(|(d, k)| d + 0.5 * k * k * k)
                .collect(),
        }
    }

    /// Dissipation density recorded in the diagnostics: `∫κ² ds` for curve
    /// shortening, `∫(∂sκ)² ds` for curve diffusion, `∫V² ds` for Willmore.
    pub fn dissipation(self, q: &CurveQuantities) -> f64 {
        match self {
            VelocityLaw::Csf => q.curvature_energy(),
            VelocityLaw::CurveDiffusion => q
                .edge_derivative(&q.curvatures)
                .iter()
                .zip(&q.edge_lengths)
                .map(|(d, ds)| d * d * ds)
                .sum(),
            VelocityLaw::Willmore => self
                .velocity(q)
                .iter()
                .zip(&q.dual_lengths)
                .map(|(v, ds)| v * v * ds)
                .sum(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VelocityLaw::Csf => "csf",
            VelocityLaw::CurveDiffusion => "curve_diffusion",
            VelocityLaw::Willmore => "willmore",
        }
    }
}

impl fmt::Display for VelocityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VelocityLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csf" | "mcf" => Ok(VelocityLaw::Csf),
            "curve_diffusion" | "curve-diffusion" | "cd" | "diffusion" => {
                Ok(VelocityLaw::CurveDiffusion)
            }
            "willmore" => Ok(VelocityLaw::Willmore),
            other => Err(Error::config("law", format!("unknown velocity law `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub law: VelocityLaw,
    /// Nominal time step; [`run`] shortens it when the curve shrinks below
    /// the stability bound and to land exactly on snapshot times.
    pub dt: f64,
    pub t_end: f64,
    pub resample_every: usize,
    /// Point count after each resampling.
    pub n: usize,
    /// Integration stops once `A(t) ≤ stop_area_fraction · A(0)`.
    pub stop_area_fraction: f64,
    /// Snapshot and diagnostic record every `snapshot_stride` nominal steps.
    pub snapshot_stride: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            law: VelocityLaw::Csf,
            dt: 1e-5,
            t_end: 0.4,
            resample_every: 10,
            n: 256,
            stop_area_fraction: 0.02,
            snapshot_stride: 100,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if self.n < crate::curve::MIN_POINTS {
            return Err(Error::config("N", format!("must be at least 8, got {}", self.n)));
        }
        if self.resample_every == 0 {
            return Err(Error::config("resample_every", "must be at least 1"));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::config("stride", "must be at least 1"));
        }
        if !(self.stop_area_fraction > 0.0 && self.stop_area_fraction <= 1.0) {
            return Err(Error::config(
                "stop_area_fraction",
                format!("must lie in (0, 1], got {}", self.stop_area_fraction),
            ));
        }
        Ok(())
    }
}

/// One explicit Euler step `X ← X + dt·V·ν`.
///
/// Fails with [`Error::Unstable`] if `dt` exceeds the stability bound of the
/// current curve and with [`Error::Numerical`] if the update is not finite.
/// Simplicity of the result is not checked.
pub fn step(curve: &ClosedCurve, law: VelocityLaw, dt: f64) -> Result<ClosedCurve> {
    let bound = law.stability_bound(curve.min_edge_length());
    if dt > bound {
        return Err(Error::Unstable { dt, bound });
    }
    euler_update(curve, law, dt)
}

fn euler_update(curve: &ClosedCurve, law: VelocityLaw, dt: f64) -> Result<ClosedCurve> {
    let q = curve.quantities();
    let v = law.velocity(&q);
    let points: Vec<Vec2> = curve
        .points()
        .iter()
        .zip(v.iter().zip(&q.normals))
        .map(|(&x, (&vi, &nu))| x + nu * (dt * vi))
        .collect();
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Numerical("non-finite vertex after update".into()));
    }
    ClosedCurve::checked_unsimple(points)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub length: f64,
    pub area: f64,
    pub dissipation: f64,
    pub min_curvature: f64,
    pub isoperimetric_ratio: f64,
}

impl DiagnosticRecord {
    pub fn measure(t: f64, curve: &ClosedCurve, law: VelocityLaw) -> DiagnosticRecord {
        let q = curve.quantities();
        let length = curve.length();
        let area = curve.signed_area();
        DiagnosticRecord {
            t,
            length,
            area,
            dissipation: law.dissipation(&q),
            min_curvature: q.min_curvature(),
            isoperimetric_ratio: length * length / (4.0 * std::f64::consts::PI * area),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticSeries {
    pub records: Vec<DiagnosticRecord>,
}

impl DiagnosticSeries {
    pub const CSV_HEADER: &'static str =
        "t,length,area,dissipation,min_curvature,isoperimetric_ratio";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            let _ = writeln!(
                s,
                "{:.10e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.t, r.length, r.area, r.dissipation, r.min_curvature, r.isoperimetric_ratio
            );
        }
        s
    }

    pub fn last(&self) -> Option<&DiagnosticRecord> {
        self.records.last()
    }

    /// Least-squares slope of `A(t)` over records with `A ≥ floor · A(0)`.
    pub fn area_slope(&self, floor: f64) -> Option<f64> {
        let a0 = self.records.first()?.area;
        let pts: Vec<(f64, f64)> = self
            .records
            .iter()
            .take_while(|r| r.area >= floor * a0)
            .map(|r| (r.t, r.area))
            .collect();
        linear_fit(&pts).map(|(slope, _)| slope)
    }

    /// Earliest record time after which every recorded `min κ` is positive.
    pub fn convexification_time(&self) -> Option<f64> {
        let last_nonconvex = self.records.iter().rposition(|r| r.min_curvature <= 0.0);
        match last_nonconvex {
            None => self.records.first().map(|r| r.t),
            Some(i) => self.records.get(i + 1).map(|r| r.t),
        }
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    /// Reached `t_end`.
    EndTime,
    /// Area fell below the extinction guard.
    Extinction,
    /// The update produced a non-finite or invalid curve; the trajectory
    /// ends at the last valid state.
    Aborted(String),
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub law: VelocityLaw,
    pub snapshots: Vec<(f64, ClosedCurve)>,
    pub diagnostics: DiagnosticSeries,
    pub termination: Termination,
    /// Snapshot times at which the curve failed the simplicity test.
    pub self_intersections: Vec<f64>,
    /// Number of Euler steps taken.
    pub steps: usize,
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.0)
    }

    pub fn final_curve(&self) -> &ClosedCurve {
        &self.snapshots.last().expect("trajectory has a snapshot").1
    }
}

/// Integrates from `curve0` until `t_end` or the extinction guard.
///
/// The initial curve is resampled to `config.n` points. Each Euler step uses
/// `min(dt, stability bound, time to next snapshot)`, so snapshots land on
/// exact multiples of `snapshot_stride · dt`. When the guard fires, a final
/// snapshot is taken at that (off-grid) time.
pub fn run(curve0: &ClosedCurve, config: &FlowConfig) -> Result<Trajectory> {
    config.validate()?;
    let law = config.law;
    let mut curve = curve0.resample(config.n)?;
    let initial_bound = law.stability_bound(curve.min_edge_length());
    if config.dt > initial_bound {
        return Err(Error::Unstable {
            dt: config.dt,
            bound: initial_bound,
        });
    }
    let a0 = curve.enclosed_area()?;
    let interval = config.dt * config.snapshot_stride as f64;

    let mut traj = Trajectory {
        law,
        snapshots: Vec::new(),
        diagnostics: DiagnosticSeries::default(),
        termination: Termination::EndTime,
        self_intersections: Vec::new(),
        steps: 0,
    };
    let record = |t: f64, c: &ClosedCurve, traj: &mut Trajectory| {
        if !c.is_simple() {
            traj.self_intersections.push(t);
        }
        traj.diagnostics.records.push(DiagnosticRecord::measure(t, c, law));
        traj.snapshots.push((t, c.clone()));
    };
    record(0.0, &curve, &mut traj);

    let mut t = 0.0;
    let mut k = 1usize;
    loop {
        let mut next_record = (k as f64 * interval).min(config.t_end);
        if config.t_end - next_record < 1e-9 * interval {
            next_record = config.t_end;
        }
        let remaining = next_record - t;
        if remaining <= 0.0 {
            break;
        }
        let bound = law.stability_bound(curve.min_edge_length());
        let h = config.dt.min(bound);
        let (h, lands) = if h >= remaining * (1.0 - 1e-12) {
            (remaining, true)
        } else {
            (h, false)
        };
        match euler_update(&curve, law, h) {
            Ok(c) => curve = c,
            Err(e) => {
                traj.termination = Termination::Aborted(e.to_string());
                if traj.snapshots.last().map(|s| s.0) != Some(t) {
                    record(t, &curve, &mut traj);
                }
                return Ok(traj);
            }
        }
        traj.steps += 1;
        t = if lands { next_record } else { t + h };
        if traj.steps.is_multiple_of(config.resample_every) {
            match curve.resample(config.n) {
                Ok(c) => curve = c,
                Err(e) => {
                    traj.termination = Termination::Aborted(e.to_string());
                    record(t, &curve, &mut traj);
                    return Ok(traj);
                }
            }
        }
        if curve.signed_area() <= config.stop_area_fraction * a0 {
            traj.termination = Termination::Extinction;
            record(t, &curve, &mut traj);
            return Ok(traj);
        }
        if lands {
            record(t, &curve, &mut traj);
            if next_record >= config.t_end {
                break;
            }
            k += 1;
        }
    }
    traj.termination = Termination::EndTime;
    Ok(traj)
}

/// Finite-difference residuals of the evolution identities at one interior
/// snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResidual {
    pub t: f64,
    /// `dL/dt - ∫κV ds`; for curve shortening `dL/dt + ∫κ² ds`, for curve
    /// diffusion `dL/dt + ∫(∂sκ)² ds`.
    pub length: f64,
    /// The dissipation the length residual is measured against.
    pub dissipation: f64,
    /// `dA/dt + 2π` for curve shortening, `dA/dt` for curve diffusion,
    /// `dA/dt - ∫V ds` for Willmore.
    pub area: f64,
    /// Max over vertices of `|∂tκ - ∂s²κ - κ³|` (curve shortening only).
    pub curvature: Option<f64>,
}

/// Centered-in-time residuals of the length, area and curvature evolution
/// laws, evaluated at every snapshot that has neighbours on both sides.
pub fn identity_residuals(traj: &Trajectory) -> Vec<IdentityResidual> {
    let law = traj.law;
    let snaps = &traj.snapshots;
    let mut out = Vec::new();
    if snaps.len() < 3 {
        return out;
    }
    for i in 1..snaps.len() - 1 {
        let (t0, c0) = (&snaps[i - 1].0, &snaps[i - 1].1);
        let (t1, c1) = (&snaps[i].0, &snaps[i].1);
        let (t2, c2) = (&snaps[i + 1].0, &snaps[i + 1].1);
        let ddt = |f0: f64, f1: f64, f2: f64| three_point_derivative(*t0, *t1, *t2, f0, f1, f2);
        let q = c1.quantities();
        let v = law.velocity(&q);
        let dl = ddt(c0.length(), c1.length(), c2.length());
        let da = ddt(c0.signed_area(), c1.signed_area(), c2.signed_area());
        let kv: f64 = (0..q.len()).map(|j| q.curvatures[j] * v[j] * q.dual_lengths[j]).sum();
        let area = match law {
            VelocityLaw::Csf => da + 2.0 * std::f64::consts::PI,
            VelocityLaw::CurveDiffusion => da,
            VelocityLaw::Willmore => {
                da - v.iter().zip(&q.dual_lengths).map(|(a, b)| a * b).sum::<f64>()
            }
        };
        let dissipation = match law {
            VelocityLaw::Willmore => -kv,
            _ => law.dissipation(&q),
        };
        let length = match law {
            VelocityLaw::Willmore => dl - kv,
            _ => dl + dissipation,
        };
        let curvature = (law == VelocityLaw::Csf).then(|| {
            let k0 = curvature_at_fractions(c0, c1);
            let k2 = curvature_at_fractions(c2, c1);
            let d2 = q.second_derivative(&q.curvatures);
            (0..q.len())
                .map(|j| {
                    let k = q.curvatures[j];
                    let dk = three_point_derivative(*t0, *t1, *t2, k0[j], k, k2[j]);
                    (dk - d2[j] - k * k * k).abs()
                })
                .fold(0.0, f64::max)
        });
        out.push(IdentityResidual {
            t: *t1,
            length,
            dissipation,
            area,
            curvature,
        });
    }
    out
}

fn three_point_derivative(t0: f64, t1: f64, t2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    let hm = t1 - t0;
    let hp = t2 - t1;
    (hm * hm * (f2 - f1) + hp * hp * (f1 - f0)) / (hm * hp * (hm + hp))
}

/// Curvature of `other` sampled at the normalized arclength positions of the
/// vertices of `reference`, by linear interpolation.
fn curvature_at_fractions(other: &ClosedCurve, reference: &ClosedCurve) -> Vec<f64> {
    let fr = arclength_fractions(reference);
    let fo = arclength_fractions(other);
    let ko = other.quantities().curvatures;
    let n = ko.len();
    let mut j = 0;
    fr.iter()
        .map(|&u| {
            while j + 1 < n && fo[j + 1] <= u {
                j += 1;
            }
            let (u0, u1) = (fo[j], if j + 1 < n { fo[j + 1] } else { 1.0 });
            let w = if u1 > u0 { (u - u0) / (u1 - u0) } else { 0.0 };
            ko[j] * (1.0 - w) + ko[(j + 1) % n] * w
        })
        .collect()
}

fn arclength_fractions(c: &ClosedCurve) -> Vec<f64> {
    let total = c.length();
    let mut acc = 0.0;
    (0..c.len())
        .map(|i| {
            let u = acc / total;
            acc += c.edge_length(i);
            u
        })
        .collect()
}
