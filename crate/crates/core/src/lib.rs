//! Mean curvature flow of closed planar interfaces.
//!
//! Four independent discretizations share one set of geometric diagnostics:
//!
//! * [`flow`]: explicit parametric flows of polygonal curves,
//! * [`grid`]: threshold dynamics and Allen–Cahn on the periodic unit torus,
//! * [`atw`]: minimizing movements restricted to concentric disks,
//! * [`sdist`] and [`weak`]: signed distance, calibration fields and the
//!   weak-solution functionals used to compare a trajectory with an exact one.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atw;
pub mod config;
pub mod curve;
pub mod error;
pub mod flow;
pub mod geom;
pub mod grid;
pub mod runner;
pub mod scenario;
pub mod sdist;
pub mod weak;

pub use curve::{compute_quantities, ClosedCurve, CurveQuantities};
pub use error::{Error, Result};
pub use flow::{DiagnosticSeries, FlowConfig, Trajectory, VelocityLaw};
pub use geom::Vec2;
pub use grid::{Contour, PeriodicField};
