//! Weak-solution functionals evaluated on interface trajectories.
//!
//! A trajectory is a uniformly spaced list of contours together with the
//! phase field they bound. Against an exact reference (contour, indicator,
//! signed distance and calibration at every time) we measure the normal
//! velocity, the energy-dissipation margin, the tilt-excess, the relative
//! entropy, the bulk error and the distance-weighted energy.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::curve::{ClosedCurve, CurveQuantities};
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::geom::Vec2;
use crate::grid::{
    extract_contour, indicator_contour, mbo_step_smoothed, AllenCahn, Contour, HeatSolver,
    PeriodicField,
};
use crate::scenario;
use crate::sdist::{
    build_calibration, signed_distance, truncation, CalibrationPair, DistanceIndex, SdistField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrajectorySource {
    Mbo,
    AllenCahn,
    ExactCircle,
    CurveFlowRasterized,
}

impl TrajectorySource {
    pub fn name(self) -> &'static str {
        match self {
            TrajectorySource::Mbo => "mbo",
            TrajectorySource::AllenCahn => "allen_cahn",
            TrajectorySource::ExactCircle => "exact_circle",
            TrajectorySource::CurveFlowRasterized => "curve_flow",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InterfaceFrame {
    pub t: f64,
    pub contour: Contour,
    /// Phase field with values in `[-1, 1]`, positive inside.
    pub inside: PeriodicField,
}

#[derive(Clone, Debug)]
pub struct InterfaceTrajectory {
    pub source: TrajectorySource,
    pub dt: f64,
    pub frames: Vec<InterfaceFrame>,
}

impl InterfaceTrajectory {
    /// Checks that frame times are `t0 + k·dt` and all fields share a grid.
    pub fn new(source: TrajectorySource, dt: f64, frames: Vec<InterfaceFrame>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config("dt", format!("must be positive, got {dt}")));
        }
        if let Some(first) = frames.first() {
            for (k, f) in frames.iter().enumerate() {
                let expect = first.t + k as f64 * dt;
                if (f.t - expect).abs() > 1e-9 * dt.max(expect.abs()) {
                    return Err(Error::Numerical(format!(
                        "frame {k} at t = {} breaks the uniform spacing {dt}",
                        f.t
                    )));
                }
                f.inside.same_grid(&first.inside)?;
            }
        }
        Ok(InterfaceTrajectory { source, dt, frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Number of leading frames with a nonempty interface.
    pub fn live_len(&self) -> usize {
        self.frames
            .iter()
            .position(|f| f.contour.is_empty())
            .unwrap_or(self.frames.len())
    }

    /// Shrinking circle `R(t) = √(R0² - 2t)` sampled as an inscribed
    /// `vertices`-gon, with the disk indicator on an `n²` grid. Stops before
    /// the radius drops below two grid spacings.
    pub fn exact_circle(
        center: Vec2,
        r0: f64,
        n: usize,
        vertices: usize,
        dt: f64,
        steps: usize,
    ) -> Result<Self> {
        let mut frames = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let t = k as f64 * dt;
            let r2 = r0 * r0 - 2.0 * t;
            if r2 <= (2.0 / n as f64).powi(2) {
                break;
            }
            frames.push(circle_frame(center, r2.sqrt(), n, vertices, t)?);
        }
        Self::new(TrajectorySource::ExactCircle, dt, frames)
    }

    /// Threshold dynamics with step `h`. Each contour is the zero level of
    /// the smoothed field whose sign is the next indicator.
    pub fn mbo(initial: &PeriodicField, h: f64, steps: usize) -> Result<Self> {
        let solver = HeatSolver::new(initial.n());
        let mut frames = vec![InterfaceFrame {
            t: 0.0,
            contour: indicator_contour(&solver, initial)?,
            inside: initial.clone(),
        }];
        let mut u = initial.clone();
        for k in 1..=steps {
            let out = mbo_step_smoothed(&solver, &u, h)?;
            let contour = extract_contour(&out.smoothed, 0.0);
            u = out.indicator;
            frames.push(InterfaceFrame {
                t: k as f64 * h,
                contour,
                inside: u.clone(),
            });
        }
        Self::new(TrajectorySource::Mbo, h, frames)
    }

    /// Allen–Cahn with zero level sets as interfaces.
    pub fn allen_cahn(initial: &PeriodicField, ac: &AllenCahn, dt: f64, steps: usize) -> Result<Self> {
        let solver = HeatSolver::new(initial.n());
        let mut u = initial.clone();
        let mut frames = vec![InterfaceFrame {
            t: 0.0,
            contour: extract_contour(&u, 0.0),
            inside: u.clone(),
        }];
        for k in 1..=steps {
            u = ac.step(&solver, &u, dt)?;
            frames.push(InterfaceFrame {
                t: k as f64 * dt,
                contour: extract_contour(&u, 0.0),
                inside: u.clone(),
            });
        }
        Self::new(TrajectorySource::AllenCahn, dt, frames)
    }

    /// Snapshots of a parametric flow, rasterized onto an `n²` grid by
    /// point-in-polygon tests. Curves must lie in the open unit square. Only
    /// the uniformly spaced prefix of the snapshots is kept.
    pub fn from_curve_flow(traj: &Trajectory, n: usize) -> Result<Self> {
        let snaps = &traj.snapshots;
        if snaps.len() < 2 {
            return Err(Error::Numerical("need at least two snapshots".into()));
        }
        let dt = snaps[1].0 - snaps[0].0;
        let mut frames = Vec::new();
        for (k, (t, c)) in snaps.iter().enumerate() {
            if (t - snaps[0].0 - k as f64 * dt).abs() > 1e-9 * dt.max(*t) {
                break;
            }
            if c.points().iter().any(|p| !(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0)) {
                return Err(Error::InvalidCurve(format!(
                    "snapshot at t = {t} leaves the unit square"
                )));
            }
            frames.push(InterfaceFrame {
                t: *t,
                contour: Contour::from_curve(c),
                inside: PeriodicField::indicator(n, |p| winds(c.points(), p))?,
            });
        }
        Self::new(TrajectorySource::CurveFlowRasterized, dt, frames)
    }
}

/// Even-odd point-in-polygon test.
fn winds(poly: &[Vec2], p: Vec2) -> bool {
    let mut inside = false;
    let m = poly.len();
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn circle_frame(center: Vec2, r: f64, n: usize, vertices: usize, t: f64) -> Result<InterfaceFrame> {
    let curve = scenario::circle(center, r, vertices)?;
    Ok(InterfaceFrame {
        t,
        contour: Contour::from_curve(&curve),
        inside: PeriodicField::indicator(n, |p| (p - center).norm() < r)?,
    })
}

/// Exact comparison interface at one time.
#[derive(Clone, Debug)]
pub struct ReferenceFrame {
    pub contour: Contour,
    pub inside: PeriodicField,
    pub sdist: SdistField,
    pub calibration: CalibrationPair,
}

impl ReferenceFrame {
    pub fn new(contour: Contour, inside: PeriodicField, delta: f64) -> Result<Self> {
        let sdist = signed_distance(&contour, &inside, delta)?;
        let calibration = build_calibration(&sdist, delta)?;
        Ok(ReferenceFrame {
            contour,
            inside,
            sdist,
            calibration,
        })
    }

    /// Circle of radius `r`. Without an explicit `delta` the band is
    /// [`circle_delta`].
    pub fn circle(center: Vec2, r: f64, n: usize, vertices: usize, delta: Option<f64>) -> Result<Self> {
        let f = circle_frame(center, r, n, vertices, 0.0)?;
        Self::new(f.contour, f.inside, delta.unwrap_or_else(|| circle_delta(r)))
    }

    pub fn delta(&self) -> f64 {
        self.sdist.delta
    }
}

/// Band half-width for a circle of radius `r` centered in the unit cell:
/// `0.4 r`, kept clear of the medial axis between periodic images.
pub fn circle_delta(r: f64) -> f64 {
    (0.4 * r).min(0.8 * (0.5 - r)).min(crate::sdist::MAX_DEFAULT_DELTA)
}

/// Normal velocity at every vertex of frame `index`, from the signed
/// distances to the neighbouring contours: `V = -(s₊ - s₋)/(2dt)`.
///
/// `None` at the ends of the trajectory and when a neighbouring interface
/// is empty.
pub fn estimate_velocity(traj: &InterfaceTrajectory, index: usize) -> Option<Vec<f64>> {
    if index == 0 || index + 1 >= traj.len() {
        return None;
    }
    let prev = &traj.frames[index - 1].contour;
    let next = &traj.frames[index + 1].contour;
    let here = &traj.frames[index].contour;
    if prev.is_empty() || next.is_empty() || here.is_empty() {
        return None;
    }
    let ip = DistanceIndex::new(prev);
    let inx = DistanceIndex::new(next);
    let scale = -0.5 / traj.dt;
    here.vertices()
        .map(|(x, _, _)| Some(scale * (inx.query(x)?.s - ip.query(x)?.s)))
        .collect()
}

/// `∫V² ds` on a contour.
pub fn dissipation(contour: &Contour, velocity: &[f64]) -> f64 {
    contour
        .vertices()
        .zip(velocity)
        .map(|((_, _, ds), v)| v * v * ds)
        .sum()
}

/// Per-frame energy-dissipation bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginRecord {
    pub t: f64,
    pub perimeter: f64,
    /// `∫V² ds`; extrapolated linearly at the two end frames.
    pub dissipation: f64,
    /// `Per(0) - Per(t) - ∫₀ᵗ ∫V² ds dt'`.
    pub margin: f64,
}

/// Energy-dissipation margin on the live prefix of the trajectory. The time
/// integral uses the trapezoid rule.
pub fn dissipation_inequality(traj: &InterfaceTrajectory) -> Vec<MarginRecord> {
    let m = traj.live_len();
    if m == 0 {
        return Vec::new();
    }
    let mut d: Vec<Option<f64>> = (0..m)
        .map(|k| {
            if k + 1 >= m {
                return None;
            }
            estimate_velocity(traj, k).map(|v| dissipation(&traj.frames[k].contour, &v))
        })
        .collect();
    let interior: Vec<(usize, f64)> = d.iter().enumerate().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
    let fill = |k: usize| -> f64 {
        match interior.len() {
            0 => 0.0,
            1 => interior[0].1,
            _ => {
                let (a, b) = if k < interior[0].0 {
                    (interior[0], interior[1])
                } else {
                    (interior[interior.len() - 2], interior[interior.len() - 1])
                };
                let slope = (b.1 - a.1) / (b.0 as f64 - a.0 as f64);
                (a.1 + slope * (k as f64 - a.0 as f64)).max(0.0)
            }
        }
    };
    for (k, dk) in d.iter_mut().enumerate().take(m) {
        if dk.is_none() {
            *dk = Some(fill(k));
        }
    }
    let per0 = traj.frames[0].contour.perimeter();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let dk = d[k].unwrap_or(0.0);
        if k > 0 {
            acc += 0.5 * (d[k - 1].unwrap_or(0.0) + dk) * traj.dt;
        }
        let per = traj.frames[k].contour.perimeter();
        out.push(MarginRecord {
            t: traj.frames[k].t,
            perimeter: per,
            dissipation: dk,
            margin: per0 - per - acc,
        });
    }
    out
}

/// `ℰ = Σ |ν - ξ|² ds` with `ξ` interpolated bilinearly at the vertices.
pub fn tilt_excess(contour: &Contour, cal: &CalibrationPair) -> f64 {
    contour
        .vertices()
        .map(|(x, nu, ds)| (nu - cal.sample_xi(x)).norm_sq() * ds)
        .sum()
}

/// Relative entropy and the quantities it controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyReport {
    /// `E = Σ (1 - ξ·ν) ds`.
    pub entropy: f64,
    /// `ℰ = Σ |ν - ξ|² ds`.
    pub tilt_excess: f64,
    /// `½ Σ (1 - |ξ|) ds`.
    pub length_defect: f64,
    /// `Σ min(s², δ²/4) ds`.
    pub truncated_l2: f64,
}

impl EntropyReport {
    /// `½ℰ + ½Σ(1 - |ξ|)ds`, the pointwise lower bound of the entropy density
    /// integrated.
    pub fn lower_bound(&self) -> f64 {
        0.5 * self.tilt_excess + self.length_defect
    }
}

pub fn relative_entropy(contour: &Contour, cal: &CalibrationPair, sdist: &SdistField) -> EntropyReport {
    let cap = 0.25 * cal.delta * cal.delta;
    let mut r = EntropyReport {
        entropy: 0.0,
        tilt_excess: 0.0,
        length_defect: 0.0,
        truncated_l2: 0.0,
    };
    for (x, nu, ds) in contour.vertices() {
        let xi = cal.sample_xi(x);
        let s = sdist.sample(x);
        r.entropy += (1.0 - xi.dot(nu)) * ds;
        r.tilt_excess += (nu - xi).norm_sq() * ds;
        r.length_defect += 0.5 * (1.0 - xi.norm()) * ds;
        r.truncated_l2 += (s * s).min(cap) * ds;
    }
    r
}

/// `F = Σ (χ - χ*) θ · cell area` with `χ = (u + 1)/2` and
/// `θ = f(|s|)` signed by the exact indicator (negative inside).
///
/// Errors when the sum differs from `Σ |χ - χ*| |θ|` by more than `1e-12`,
/// which happens only if `u` leaves `[-1, 1]` or the two fields disagree in
/// grid size.
pub fn bulk_error(
    inside: &PeriodicField,
    exact_inside: &PeriodicField,
    sdist: &SdistField,
    delta: f64,
) -> Result<f64> {
    inside.same_grid(exact_inside)?;
    if sdist.n() != inside.n() {
        return Err(Error::GridMismatch(format!(
            "distance on n = {}, phase on n = {}",
            sdist.n(),
            inside.n()
        )));
    }
    let mut signed = 0.0;
    let mut abs = 0.0;
    for ((&u, &e), &s) in inside.values().iter().zip(exact_inside.values()).zip(&sdist.s) {
        let chi = 0.5 * (u + 1.0);
        let chi_star = if e > 0.0 { 1.0 } else { 0.0 };
        let theta = if s.is_finite() { truncation(s.abs(), delta) } else { delta };
        let theta = if e > 0.0 { -theta } else { theta };
        signed += (chi - chi_star) * theta;
        abs += (chi - chi_star).abs() * theta.abs();
    }
    let cell = inside.cell_area();
    let (signed, abs) = (signed * cell, abs * cell);
    if (signed - abs).abs() > 1e-12 {
        return Err(Error::Numerical(format!(
            "bulk error {signed} differs from its absolute form {abs}"
        )));
    }
    Ok(signed)
}

/// `Σ f(½s²) ds` over the vertices of `contour`, `s` the distance to the
/// exact interface.
pub fn soner_energy(contour: &Contour, sdist: &SdistField, delta: f64) -> f64 {
    contour
        .vertices()
        .map(|(x, _, ds)| {
            let s = sdist.sample(x);
            let phi = if s.is_finite() { 0.5 * s * s } else { f64::INFINITY };
            truncation(phi.min(2.0 * delta), delta) * ds
        })
        .sum()
}

/// One row of the weak-solution report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakRecord {
    pub t: f64,
    pub perimeter: f64,
    pub dissipation: f64,
    pub margin: f64,
    pub tilt_excess: f64,
    pub rel_entropy: f64,
    pub bulk_error: f64,
    pub soner_energy: f64,
    pub length_defect: f64,
    pub truncated_l2: f64,
}

impl WeakRecord {
    pub const CSV_HEADER: &'static str =
        "t,perimeter,dissipation,margin,tilt_excess,rel_entropy,bulk_error,soner_energy";

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.perimeter,
            self.dissipation,
            self.margin,
            self.tilt_excess,
            self.rel_entropy,
            self.bulk_error,
            self.soner_energy,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

pub fn weak_csv(records: &[WeakRecord]) -> String {
    let mut out = String::from(WeakRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t, r.perimeter, r.dissipation, r.margin, r.tilt_excess, r.rel_entropy, r.bulk_error,
            r.soner_energy
        );
    }
    out
}

/// Evaluates every functional on frames `0, stride, 2·stride, …` of the live
/// prefix. `reference(t)` supplies the exact interface; evaluation stops at
/// the first time it returns `None`.
pub fn weak_records(
    traj: &InterfaceTrajectory,
    stride: usize,
    mut reference: impl FnMut(f64) -> Result<Option<ReferenceFrame>>,
) -> Result<Vec<WeakRecord>> {
    let stride = stride.max(1);
    let margins = dissipation_inequality(traj);
    let mut out = Vec::new();
    for (k, m) in margins.iter().enumerate().step_by(stride) {
        let frame = &traj.frames[k];
        let Some(rf) = reference(frame.t)? else { break };
        let e = relative_entropy(&frame.contour, &rf.calibration, &rf.sdist);
        out.push(WeakRecord {
            t: frame.t,
            perimeter: m.perimeter,
            dissipation: m.dissipation,
            margin: m.margin,
            tilt_excess: e.tilt_excess,
            rel_entropy: e.entropy,
            bulk_error: bulk_error(&frame.inside, &rf.inside, &rf.sdist, rf.delta())?,
            soner_energy: soner_energy(&frame.contour, &rf.sdist, rf.delta()),
            length_defect: e.length_defect,
            truncated_l2: e.truncated_l2,
        });
    }
    Ok(out)
}

/// Exact shrinking circle as a reference, `None` once `R(t)` drops below
/// eight grid spacings.
pub fn circle_reference(
    center: Vec2,
    r0: f64,
    n: usize,
    vertices: usize,
    delta: Option<f64>,
) -> impl FnMut(f64) -> Result<Option<ReferenceFrame>> {
    move |t| {
        let r2 = r0 * r0 - 2.0 * t;
        if r2 <= (8.0 / n as f64).powi(2) {
            return Ok(None);
        }
        ReferenceFrame::circle(center, r2.sqrt(), n, vertices, delta).map(Some)
    }
}

/// Closed-form space-time test functions.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// `exp(-|x - c|²/(2w²))`.
    Gaussian { center: Vec2, width: f64 },
    /// `xᵖ yᵠ`.
    Monomial { px: u32, py: u32 },
    /// `cos(ωt) · inner`.
    Oscillating { omega: f64, inner: Box<TestFunction> },
}

impl TestFunction {
    pub fn value(&self, x: Vec2, t: f64) -> f64 {
        match self {
            TestFunction::Constant(c) => *c,
            TestFunction::Gaussian { center, width } => {
                (-(x - *center).norm_sq() / (2.0 * width * width)).exp()
            }
            TestFunction::Monomial { px, py } => x.x.powi(*px as i32) * x.y.powi(*py as i32),
            TestFunction::Oscillating { omega, inner } => (omega * t).cos() * inner.value(x, t),
        }
    }

    pub fn gradient(&self, x: Vec2, t: f64) -> Vec2 {
        match self {
            TestFunction::Constant(_) => Vec2::ZERO,
            TestFunction::Gaussian { center, width } => {
                let g = self.value(x, t);
                (x - *center) * (-g / (width * width))
            }
            TestFunction::Monomial { px, py } => {
                let (px, py) = (*px as i32, *py as i32);
                let dx = if px == 0 { 0.0 } else { px as f64 * x.x.powi(px - 1) * x.y.powi(py) };
                let dy = if py == 0 { 0.0 } else { py as f64 * x.x.powi(px) * x.y.powi(py - 1) };
                Vec2::new(dx, dy)
            }
            TestFunction::Oscillating { omega, inner } => inner.gradient(x, t) * (omega * t).cos(),
        }
    }

    pub fn time_derivative(&self, x: Vec2, t: f64) -> f64 {
        match self {
            TestFunction::Oscillating { omega, inner } => {
                -omega * (omega * t).sin() * inner.value(x, t)
                    + (omega * t).cos() * inner.time_derivative(x, t)
            }
            _ => 0.0,
        }
    }

    /// The built-in library: a constant, a Gaussian bump, the coordinate
    /// monomials up to degree two, and one time-dependent member.
    pub fn library() -> Vec<(&'static str, TestFunction)> {
        vec![
            ("one", TestFunction::Constant(1.0)),
            (
                "gauss",
                TestFunction::Gaussian {
                    center: Vec2::new(0.3, 0.2),
                    width: 0.5,
                },
            ),
            ("x", TestFunction::Monomial { px: 1, py: 0 }),
            ("y", TestFunction::Monomial { px: 0, py: 1 }),
            ("xx", TestFunction::Monomial { px: 2, py: 0 }),
            ("xy", TestFunction::Monomial { px: 1, py: 1 }),
            (
                "cos_gauss",
                TestFunction::Oscillating {
                    omega: 5.0,
                    inner: Box::new(TestFunction::Gaussian {
                        center: Vec2::ZERO,
                        width: 0.7,
                    }),
                },
            ),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrakkeResidual {
    pub t: f64,
    /// Centered difference of `Σ φ ds`.
    pub lhs: f64,
    /// `Σ (φVκ + V ν·∇φ + ∂tφ) ds`.
    pub rhs: f64,
}

impl BrakkeResidual {
    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn weighted_integral(c: &ClosedCurve, q: &CurveQuantities, phi: &TestFunction, t: f64) -> f64 {
    c.points()
        .iter()
        .zip(&q.dual_lengths)
        .map(|(&x, ds)| phi.value(x, t) * ds)
        .sum()
}

/// Residual of `d/dt ∫φ ds = ∫(φVκ + V ν·∇φ + ∂tφ) ds` at every interior
/// snapshot. `velocity` gives the normal velocity at each vertex.
pub fn brakke_residual(
    snapshots: &[(f64, ClosedCurve)],
    velocity: impl Fn(&ClosedCurve, &CurveQuantities) -> Vec<f64>,
    phi: &TestFunction,
) -> Vec<BrakkeResidual> {
    let q: Vec<CurveQuantities> = snapshots.iter().map(|(_, c)| c.quantities()).collect();
    let w: Vec<f64> = snapshots
        .iter()
        .zip(&q)
        .map(|((t, c), q)| weighted_integral(c, q, phi, *t))
        .collect();
    let mut out = Vec::new();
    for k in 1..snapshots.len().saturating_sub(1) {
        let (t0, t1, t2) = (snapshots[k - 1].0, snapshots[k].0, snapshots[k + 1].0);
        let (hm, hp) = (t1 - t0, t2 - t1);
        if !(hm > 0.0 && hp > 0.0) {
            continue;
        }
        let lhs = (hm * hm * (w[k + 1] - w[k]) + hp * hp * (w[k] - w[k - 1])) / (hm * hp * (hm + hp));
        let (_, c) = &snapshots[k];
        let qk = &q[k];
        let v = velocity(c, qk);
        let rhs = c
            .points()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let ds = qk.dual_lengths[i];
                (phi.value(x, t1) * v[i] * qk.curvatures[i]
                    + v[i] * qk.normals[i].dot(phi.gradient(x, t1))
                    + phi.time_derivative(x, t1))
                    * ds
            })
            .sum();
        out.push(BrakkeResidual { t: t1, lhs, rhs });
    }
    out
}

/// [`brakke_residual`] with the trajectory's own velocity law.
pub fn brakke_residual_for(traj: &Trajectory, phi: &TestFunction) -> Vec<BrakkeResidual> {
    let law = traj.law;
    brakke_residual(&traj.snapshots, |_, q| law.velocity(q), phi)
}

/// Radius of the disk with the contour's enclosed area.
pub fn equivalent_radius(contour: &Contour) -> f64 {
    (contour.enclosed_area().max(0.0) / PI).sqrt()
}
