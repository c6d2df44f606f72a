//! Dispatch of a resolved [`RunConfig`] to the solvers, with file output.
//!
//! Every run writes `resolved.cfg` first, then its series and snapshots, and
//! returns a one-line summary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::atw::atw_run;
use crate::config::{Command, RunConfig, Scenario, Scheme};
use crate::error::{Error, Result};
use crate::flow::{self, FlowConfig, Termination};
use crate::geom::Vec2;
use crate::grid::{
    extract_contour, frame_name, indicator_contour, mbo_step_smoothed, AllenCahn, Contour,
    HeatSolver, PeriodicField,
};
use crate::scenario::FieldScenario;
use crate::weak::{circle_reference, weak_csv, weak_records, InterfaceTrajectory};

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig { .. } | Error::Parse { .. } => 2,
        _ => 3,
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs one scenario and returns the summary line.
pub fn run_scenario(cfg: &RunConfig) -> Result<String> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::Io(format!("{}: {e}", cfg.out.display())))?;
    write(&cfg.out.join("resolved.cfg"), cfg.to_cfg_text())?;
    match cfg.command {
        Command::Csf | Command::Flow => run_curve(cfg),
        Command::Mbo | Command::Ac => run_grid(cfg),
        Command::Atw => run_atw(cfg),
        Command::Diag => run_diag(cfg),
    }
}

fn run_curve(cfg: &RunConfig) -> Result<String> {
    let Scenario::Curve(sc) = cfg.scenario else {
        return Err(Error::config("scenario", format!("{} is not a curve scenario", cfg.scenario)));
    };
    let curve = sc.curve(cfg.big_n)?;
    let fc = FlowConfig {
        law: cfg.law,
        dt: cfg.dt,
        t_end: cfg.t_end,
        resample_every: cfg.resample_every,
        n: cfg.big_n,
        snapshot_stride: cfg.stride,
        ..FlowConfig::default()
    };
    let traj = flow::run(&curve, &fc)?;
    write(&cfg.out.join("diagnostics.csv"), traj.diagnostics.to_csv())?;
    let dir = cfg.out.join("curves");
    fs::create_dir_all(&dir)?;
    for (k, (_, c)) in traj.snapshots.iter().enumerate() {
        c.write(dir.join(format!("curve{k:05}.txt")))?;
    }
    let last = traj.diagnostics.last().expect("initial record exists");
    let mut s = format!(
        "summary t={} length={} area={} dissipation={} min_curvature={} isoperimetric_ratio={}",
        last.t, last.length, last.area, last.dissipation, last.min_curvature, last.isoperimetric_ratio
    );
    let conv = traj.diagnostics.convexification_time();
    let _ = write!(s, " convexification_time={}", conv.map_or("none".into(), |t| t.to_string()));
    if let Some(slope) = traj.diagnostics.area_slope(0.1) {
        let _ = write!(s, " area_slope={slope}");
    }
    let _ = write!(
        s,
        " steps={} self_intersections={} termination={}",
        traj.steps,
        traj.self_intersections.len(),
        match &traj.termination {
            Termination::EndTime => "end_time",
            Termination::Extinction => "extinction",
            Termination::Aborted(_) => "aborted",
        }
    );
    if let Termination::Aborted(why) = &traj.termination {
        return Err(Error::Numerical(format!("{why} ({s})")));
    }
    Ok(s)
}

fn field_scenario(cfg: &RunConfig) -> Result<FieldScenario> {
    match cfg.scenario {
        Scenario::Field(f) => Ok(f),
        other => Err(Error::config("scenario", format!("{other} is not a grid scenario"))),
    }
}

fn step_count(cfg: &RunConfig, step: f64) -> usize {
    cfg.steps
        .unwrap_or_else(|| (cfg.t_end / step + 1e-9).round().max(1.0) as usize)
}

fn run_grid(cfg: &RunConfig) -> Result<String> {
    let sc = field_scenario(cfg)?;
    let n = cfg.n;
    let solver = HeatSolver::new(n);
    let (mut u, step, ac) = match cfg.command {
        Command::Mbo => (sc.indicator(n)?, cfg.h, None),
        _ => (
            sc.phase(n)?,
            cfg.dt,
            Some(AllenCahn::new(cfg.epsilon, n, cfg.splitting)?),
        ),
    };
    let steps = step_count(cfg, step);
    let dir = cfg.out.join("frames");
    fs::create_dir_all(&dir)?;
    let mut csv = String::from("t,area,contour_area,perimeter,saturated\n");
    let mut fit = Vec::new();
    let mut under_resolved = false;
    let mut record = |k: usize, u: &PeriodicField, c: Contour, csv: &mut String| -> Result<()> {
        let t = k as f64 * step;
        let ca = c.enclosed_area();
        fit.push((t, ca));
        let _ = writeln!(
            csv,
            "{t},{},{ca},{},{}",
            u.area_above(0.0),
            c.perimeter(),
            u.fraction_saturated(0.9)
        );
        if k.is_multiple_of(cfg.stride) || k == steps {
            u.write_pgm(dir.join(frame_name(k)))?;
        }
        Ok(())
    };
    let c0 = match ac {
        None => indicator_contour(&solver, &u)?,
        Some(_) => extract_contour(&u, 0.0),
    };
    record(0, &u, c0, &mut csv)?;
    for k in 1..=steps {
        match &ac {
            None => {
                let out = mbo_step_smoothed(&solver, &u, step)?;
                under_resolved |= out.under_resolved;
                record(k, &out.indicator, extract_contour(&out.smoothed, 0.0), &mut csv)?;
                u = out.indicator;
            }
            Some(ac) => {
                u = ac.step(&solver, &u, step)?;
                let c = extract_contour(&u, 0.0);
                record(k, &u, c, &mut csv)?;
            }
        }
    }
    write(&cfg.out.join("series.csv"), &csv)?;
    let slope = flow::linear_fit(&fit).map(|(s, _)| s);
    let mut s = format!(
        "summary t={} area={} saturated={} steps={steps}",
        steps as f64 * step,
        u.area_above(0.0),
        u.fraction_saturated(0.9)
    );
    if let Some(slope) = slope {
        let _ = write!(s, " contour_area_slope={slope}");
    }
    if under_resolved {
        s.push_str(" warning=under_resolved_kernel");
    }
    Ok(s)
}

fn run_atw(cfg: &RunConfig) -> Result<String> {
    let chain = atw_run(cfg.r0, cfg.h, cfg.t_end)?;
    write(&cfg.out.join("atw.csv"), chain.to_csv())?;
    Ok(format!(
        "summary steps={} final_r={} extinction_time={} sup_error={}",
        chain.radii.len() - 1,
        chain.radii.last().copied().unwrap_or(0.0),
        chain.extinction_time().map_or("none".into(), |t| t.to_string()),
        chain.sup_error()
    ))
}

/// Polygon resolution of the exact reference circle.
const REFERENCE_VERTICES: usize = 1024;

fn run_diag(cfg: &RunConfig) -> Result<String> {
    let FieldScenario::Disk { r } = field_scenario(cfg)? else {
        return Err(Error::config("scenario", "diag compares against an exact circle; use disk"));
    };
    let n = cfg.n;
    let center = Vec2::new(0.5, 0.5);
    let disk = FieldScenario::Disk { r }.indicator(n)?;
    let traj = match cfg.scheme {
        Scheme::Mbo => InterfaceTrajectory::mbo(&disk, cfg.h, step_count(cfg, cfg.h))?,
        Scheme::AllenCahn => {
            let ac = AllenCahn::new(cfg.epsilon, n, cfg.splitting)?;
            InterfaceTrajectory::allen_cahn(&disk, &ac, cfg.dt, step_count(cfg, cfg.dt))?
        }
        Scheme::Exact => InterfaceTrajectory::exact_circle(
            center,
            r,
            n,
            REFERENCE_VERTICES,
            cfg.h,
            step_count(cfg, cfg.h),
        )?,
    };
    let records = weak_records(
        &traj,
        cfg.stride,
        circle_reference(center, r, n, REFERENCE_VERTICES, cfg.delta),
    )?;
    write(&cfg.out.join("weak.csv"), weak_csv(&records))?;
    let last = records
        .last()
        .ok_or_else(|| Error::Numerical("no record could be evaluated".into()))?;
    if let Some(bad) = records.iter().find(|r| !r.is_finite()) {
        return Err(Error::Numerical(format!("non-finite functional at t = {}", bad.t)));
    }
    let min_margin = records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(format!(
        "summary records={} t={} perimeter={} dissipation={} margin={} tilt_excess={} rel_entropy={} bulk_error={} soner_energy={} min_margin={min_margin}",
        records.len(),
        last.t,
        last.perimeter,
        last.dissipation,
        last.margin,
        last.tilt_excess,
        last.rel_entropy,
        last.bulk_error,
        last.soner_energy
    ))
}
