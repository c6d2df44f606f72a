//! C ABI over `mcflow-core`.
//!
//! Every object crosses the boundary as an opaque handle that the caller
//! releases with the matching `*_free`. Fallible calls return an
//! [`McflowStatus`] and write results through out-pointers; the message for
//! the most recent failure on the calling thread is available from
//! [`mcflow_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mcflow_core::atw;
use mcflow_core::flow::{self, DiagnosticRecord, FlowConfig, Trajectory, VelocityLaw};
use mcflow_core::grid::{self, extract_contour, AllenCahn, HeatSolver, PeriodicField, Splitting};
use mcflow_core::scenario::{self, Spiral};
use mcflow_core::{ClosedCurve, Error, Vec2};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McflowStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCurve = 3,
    InvalidConfig = 4,
    Unstable = 5,
    Numerical = 6,
    GridMismatch = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McflowLaw {
    Csf = 0,
    CurveDiffusion = 1,
    Willmore = 2,
}

impl From<McflowLaw> for VelocityLaw {
    fn from(l: McflowLaw) -> Self {
        match l {
            McflowLaw::Csf => VelocityLaw::Csf,
            McflowLaw::CurveDiffusion => VelocityLaw::CurveDiffusion,
            McflowLaw::Willmore => VelocityLaw::Willmore,
        }
    }
}

/// Parameters of a parametric flow run.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McflowFlowConfig {
    pub law: McflowLaw,
    pub dt: f64,
    pub t_end: f64,
    pub n: usize,
    pub resample_every: usize,
    pub stop_area_fraction: f64,
    pub snapshot_stride: usize,
}

/// One diagnostic row of a trajectory.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct McflowRecord {
    pub t: f64,
    pub length: f64,
    pub area: f64,
    pub dissipation: f64,
    pub min_curvature: f64,
    pub isoperimetric_ratio: f64,
}

impl From<&DiagnosticRecord> for McflowRecord {
    fn from(r: &DiagnosticRecord) -> Self {
        McflowRecord {
            t: r.t,
            length: r.length,
            area: r.area,
            dissipation: r.dissipation,
            min_curvature: r.min_curvature,
            isoperimetric_ratio: r.isoperimetric_ratio,
        }
    }
}

/// Radial minimizing-movement chain summary. `extinction_time` is NaN when
/// the disk survives to the end time.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct McflowAtwSummary {
    pub steps: usize,
    pub final_radius: f64,
    pub sup_error: f64,
    pub extinction_time: f64,
}

/// Closed polygonal curve.
pub struct McflowCurve(ClosedCurve);

/// Result of a parametric flow run.
pub struct McflowTrajectory(Trajectory);

/// Scalar field on the periodic unit square.
pub struct McflowField(PeriodicField);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> McflowStatus {
    match e {
        Error::InvalidCurve(_) | Error::Orientation(_) => McflowStatus::InvalidCurve,
        Error::InvalidConfig { .. } | Error::Parse { .. } => McflowStatus::InvalidConfig,
        Error::Unstable { .. } => McflowStatus::Unstable,
        Error::Numerical(_) => McflowStatus::Numerical,
        Error::GridMismatch(_) => McflowStatus::GridMismatch,
        Error::Io(_) => McflowStatus::Io,
    }
}

struct Fail(McflowStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(McflowStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(McflowStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> McflowStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => McflowStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            McflowStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mcflow_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn mcflow_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn mcflow_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// Curves.

/// Curve through `n_points` vertices given as interleaved `x, y` pairs.
/// The vertices must be counterclockwise and the polygon simple.
///
/// # Safety
/// `xy` must point to `2 * n_points` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_from_points(
    xy: *const f64,
    n_points: usize,
    out: *mut *mut McflowCurve,
) -> McflowStatus {
    guard(|| {
        if xy.is_null() {
            return Err(null("xy"));
        }
        let raw = std::slice::from_raw_parts(xy, 2 * n_points);
        let pts = raw.chunks_exact(2).map(|p| Vec2::new(p[0], p[1])).collect();
        put_handle(out, McflowCurve(ClosedCurve::new(pts)?))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_circle(
    cx: f64,
    cy: f64,
    r: f64,
    n: usize,
    out: *mut *mut McflowCurve,
) -> McflowStatus {
    guard(|| put_handle(out, McflowCurve(scenario::circle(Vec2::new(cx, cy), r, n)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_ellipse(a: f64, b: f64, n: usize, out: *mut *mut McflowCurve) -> McflowStatus {
    guard(|| put_handle(out, McflowCurve(scenario::ellipse(a, b, n)?)))
}

/// The built-in capped Archimedean spiral.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_spiral(n: usize, out: *mut *mut McflowCurve) -> McflowStatus {
    guard(|| put_handle(out, McflowCurve(Spiral::default().curve(n)?)))
}

/// # Safety
/// `curve` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_free(curve: *mut McflowCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Vertex count, 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_len(curve: *const McflowCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_length(curve: *const McflowCurve, out: *mut f64) -> McflowStatus {
    guard(|| put(out, get(curve, "curve")?.0.length(), "out"))
}

/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_area(curve: *const McflowCurve, out: *mut f64) -> McflowStatus {
    guard(|| put(out, get(curve, "curve")?.0.enclosed_area()?, "out"))
}

/// Copies the vertices as interleaved `x, y` pairs. `capacity` counts
/// points, not doubles.
///
/// # Safety
/// `curve` must be a live handle; `xy` must have room for `2 * capacity`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn mcflow_curve_points(
    curve: *const McflowCurve,
    xy: *mut f64,
    capacity: usize,
) -> McflowStatus {
    guard(|| {
        let c = &get(curve, "curve")?.0;
        if xy.is_null() {
            return Err(null("xy"));
        }
        if capacity < c.len() {
            return Err(Fail(
                McflowStatus::BufferTooSmall,
                format!("curve has {} points, buffer holds {capacity}", c.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(xy, 2 * c.len());
        for (d, p) in dst.chunks_exact_mut(2).zip(c.points()) {
            d[0] = p.x;
            d[1] = p.y;
        }
        Ok(())
    })
}

// Parametric flows.

/// Fills `out` with the library defaults for `law`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_flow_config_default(law: McflowLaw, out: *mut McflowFlowConfig) -> McflowStatus {
    guard(|| {
        let d = FlowConfig::default();
        let dt = if law == McflowLaw::Csf { d.dt } else { 1e-6 };
        let cfg = McflowFlowConfig {
            law,
            dt,
            t_end: d.t_end,
            n: d.n,
            resample_every: d.resample_every,
            stop_area_fraction: d.stop_area_fraction,
            snapshot_stride: d.snapshot_stride,
        };
        put(out, cfg, "out")
    })
}

/// Evolves `curve` under `config`.
///
/// # Safety
/// `curve` and `config` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_flow_run(
    curve: *const McflowCurve,
    config: *const McflowFlowConfig,
    out: *mut *mut McflowTrajectory,
) -> McflowStatus {
    guard(|| {
        let c = &get(curve, "curve")?.0;
        let k = get(config, "config")?;
        let cfg = FlowConfig {
            law: k.law.into(),
            dt: k.dt,
            t_end: k.t_end,
            resample_every: k.resample_every,
            n: k.n,
            stop_area_fraction: k.stop_area_fraction,
            snapshot_stride: k.snapshot_stride,
        };
        put_handle(out, McflowTrajectory(flow::run(c, &cfg)?))
    })
}

/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_free(traj: *mut McflowTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_final_time(traj: *const McflowTrajectory, out: *mut f64) -> McflowStatus {
    guard(|| put(out, get(traj, "trajectory")?.0.final_time(), "out"))
}

/// 1 if the run stopped at the area guard, 0 if it reached the end time.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_extinct(traj: *const McflowTrajectory, out: *mut i32) -> McflowStatus {
    guard(|| {
        let t = &get(traj, "trajectory")?.0;
        put(out, i32::from(t.termination == flow::Termination::Extinction), "out")
    })
}

/// Copy of the last snapshot as a new curve handle.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_final_curve(
    traj: *const McflowTrajectory,
    out: *mut *mut McflowCurve,
) -> McflowStatus {
    guard(|| {
        let c = get(traj, "trajectory")?.0.final_curve().clone();
        put_handle(out, McflowCurve(c))
    })
}

/// Slope of a linear fit of the enclosed area over the records with
/// `A ≥ floor · A(0)`.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_area_slope(
    traj: *const McflowTrajectory,
    floor: f64,
    out: *mut f64,
) -> McflowStatus {
    guard(|| {
        let t = &get(traj, "trajectory")?.0;
        let s = t
            .diagnostics
            .area_slope(floor)
            .ok_or_else(|| Fail(McflowStatus::Numerical, "too few records above the floor".into()))?;
        put(out, s, "out")
    })
}

/// First record time after which the curve stays convex, NaN if never.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_convexification_time(
    traj: *const McflowTrajectory,
    out: *mut f64,
) -> McflowStatus {
    guard(|| {
        let t = &get(traj, "trajectory")?.0;
        put(out, t.diagnostics.convexification_time().unwrap_or(f64::NAN), "out")
    })
}

/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_record_count(traj: *const McflowTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.diagnostics.records.len())
}

/// # Safety
/// `traj` must be a live handle; `records` must have room for `capacity`
/// entries.
#[no_mangle]
pub unsafe extern "C" fn mcflow_trajectory_records(
    traj: *const McflowTrajectory,
    records: *mut McflowRecord,
    capacity: usize,
) -> McflowStatus {
    guard(|| {
        let src = &get(traj, "trajectory")?.0.diagnostics.records;
        if records.is_null() {
            return Err(null("records"));
        }
        if capacity < src.len() {
            return Err(Fail(
                McflowStatus::BufferTooSmall,
                format!("{} records, buffer holds {capacity}", src.len()),
            ));
        }
        for (k, r) in src.iter().enumerate() {
            records.add(k).write(r.into());
        }
        Ok(())
    })
}

// Grid fields.

/// Field from `n * n` row-major values at cell centers; `n` must be a power
/// of two.
///
/// # Safety
/// `values` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_from_values(
    n: usize,
    values: *const f64,
    out: *mut *mut McflowField,
) -> McflowStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let len = n.checked_mul(n).ok_or_else(|| invalid("n * n overflows"))?;
        let v = std::slice::from_raw_parts(values, len).to_vec();
        put_handle(out, McflowField(PeriodicField::new(n, v)?))
    })
}

/// `±1` indicator of the disk of radius `r` centered in the cell.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_disk(n: usize, r: f64, out: *mut *mut McflowField) -> McflowStatus {
    guard(|| {
        if !(r > 0.0 && r < 0.5) {
            return Err(invalid(format!("disk radius {r} outside (0, 0.5)")));
        }
        let c = Vec2::new(0.5, 0.5);
        put_handle(out, McflowField(PeriodicField::indicator(n, |p| (p - c).norm() < r)?))
    })
}

/// Uniform noise on `[-1, 1]` from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_random_phase(n: usize, seed: u64, out: *mut *mut McflowField) -> McflowStatus {
    guard(|| put_handle(out, McflowField(PeriodicField::random_phase(n, seed)?)))
}

/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_free(field: *mut McflowField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Grid size per axis, 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_n(field: *const McflowField) -> usize {
    field.as_ref().map_or(0, |f| f.0.n())
}

/// # Safety
/// `field` must be a live handle; `values` must have room for `capacity`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_values(
    field: *const McflowField,
    values: *mut f64,
    capacity: usize,
) -> McflowStatus {
    guard(|| {
        let src = get(field, "field")?.0.values();
        if values.is_null() {
            return Err(null("values"));
        }
        if capacity < src.len() {
            return Err(Fail(
                McflowStatus::BufferTooSmall,
                format!("field has {} values, buffer holds {capacity}", src.len()),
            ));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), values, src.len());
        Ok(())
    })
}

/// One threshold step: heat flow for time `h`, then the sign.
///
/// # Safety
/// `field` must be a live handle holding a `±1` indicator; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_mbo_step(field: *const McflowField, h: f64, out: *mut *mut McflowField) -> McflowStatus {
    guard(|| {
        let f = &get(field, "field")?.0;
        let next = grid::mbo_step(&HeatSolver::new(f.n()), f, h)?;
        put_handle(out, McflowField(next))
    })
}

/// One Lie-split Allen–Cahn step.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_allen_cahn_step(
    field: *const McflowField,
    dt: f64,
    epsilon: f64,
    out: *mut *mut McflowField,
) -> McflowStatus {
    guard(|| {
        let f = &get(field, "field")?.0;
        let ac = AllenCahn::new(epsilon, f.n(), Splitting::Lie)?;
        put_handle(out, McflowField(ac.step(&HeatSolver::new(f.n()), f, dt)?))
    })
}

/// Area enclosed by the `level` contour.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_contour_area(
    field: *const McflowField,
    level: f64,
    out: *mut f64,
) -> McflowStatus {
    guard(|| {
        let f = &get(field, "field")?.0;
        if !level.is_finite() {
            return Err(invalid("level must be finite"));
        }
        put(out, extract_contour(f, level).enclosed_area(), "out")
    })
}

/// Fraction of cells with `|u| > threshold`.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_field_fraction_saturated(
    field: *const McflowField,
    threshold: f64,
    out: *mut f64,
) -> McflowStatus {
    guard(|| put(out, get(field, "field")?.0.fraction_saturated(threshold), "out"))
}

// Radial minimizing movements.

/// Minimizing radius for one step from `r_prev`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_atw_step(r_prev: f64, h: f64, out: *mut f64) -> McflowStatus {
    guard(|| put(out, atw::atw_step(r_prev, h)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcflow_atw_run(r0: f64, h: f64, t_end: f64, out: *mut McflowAtwSummary) -> McflowStatus {
    guard(|| {
        let chain = atw::atw_run(r0, h, t_end)?;
        let summary = McflowAtwSummary {
            steps: chain.radii.len() - 1,
            final_radius: *chain.radii.last().unwrap_or(&f64::NAN),
            sup_error: chain.sup_error(),
            extinction_time: chain.extinction_time().unwrap_or(f64::NAN),
        };
        put(out, summary, "out")
    })
}
