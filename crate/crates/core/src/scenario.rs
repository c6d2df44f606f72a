//! Named initial data: polygonal curves in the plane and fields on the unit
//! torus.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::grid::PeriodicField;

/// Counter-clockwise regular `n`-gon inscribed in the circle.
pub fn circle(center: Vec2, r: f64, n: usize) -> Result<ClosedCurve> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::config("R", format!("radius must be positive, got {r}")));
    }
    ClosedCurve::new(
        (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                center + Vec2::new(r * a.cos(), r * a.sin())
            })
            .collect(),
    )
}

/// Axis-aligned ellipse with semi-axes `a`, `b`, resampled to equal chords.
pub fn ellipse(a: f64, b: f64, n: usize) -> Result<ClosedCurve> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::config("axes", format!("semi-axes must be positive, got {a}, {b}")));
    }
    let m = (8 * n).max(2000);
    let dense = ClosedCurve::new(
        (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                Vec2::new(a * t.cos(), b * t.sin())
            })
            .collect(),
    )?;
    dense.resample(n)
}

/// `r(θ) = R(1 + ε cos(kθ))`, resampled to equal chords.
pub fn perturbed_circle(r: f64, eps: f64, k: u32, n: usize) -> Result<ClosedCurve> {
    if !(r > 0.0 && eps.abs() < 1.0) {
        return Err(Error::config("eps", format!("need R > 0 and |eps| < 1, got {r}, {eps}")));
    }
    let m = (8 * n).max(2000);
    let dense = ClosedCurve::new(
        (0..m)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                let rho = r * (1.0 + eps * (k as f64 * t).cos());
                Vec2::new(rho * t.cos(), rho * t.sin())
            })
            .collect(),
    )?;
    dense.resample(n)
}

/// Thickened Archimedean arm `aθ(cos θ, sin θ)`, `θ ∈ [θ0, θ1]`, of
/// half-width `w`, closed with semicircular caps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spiral {
    pub a: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub half_width: f64,
}

impl Default for Spiral {
    fn default() -> Self {
        Spiral {
            a: 0.04,
            theta0: PI,
            theta1: 5.0 * PI,
            half_width: 0.08,
        }
    }
}

impl Spiral {
    fn center(&self, t: f64) -> Vec2 {
        Vec2::new(self.a * t * t.cos(), self.a * t * t.sin())
    }

    fn tangent(&self, t: f64) -> Vec2 {
        Vec2::new(
            self.a * (t.cos() - t * t.sin()),
            self.a * (t.sin() + t * t.cos()),
        )
        .normalized()
    }

    /// Length of the center line.
    pub fn arm_length(&self) -> f64 {
        let prim = |t: f64| 0.5 * self.a * (t * (1.0 + t * t).sqrt() + t.asinh());
        prim(self.theta1) - prim(self.theta0)
    }

    /// Perimeter of the thickened arm: the two offsets together are twice
    /// the center line, the caps add a full circle.
    pub fn perimeter(&self) -> f64 {
        2.0 * self.arm_length() + 2.0 * PI * self.half_width
    }

    pub fn area(&self) -> f64 {
        2.0 * self.half_width * self.arm_length() + PI * self.half_width * self.half_width
    }

    pub fn curve(&self, n: usize) -> Result<ClosedCurve> {
        let w = self.half_width;
        if !(self.a > 0.0 && w > 0.0 && self.theta1 > self.theta0) {
            return Err(Error::config("spiral", "need a > 0, w > 0 and θ1 > θ0"));
        }
        let m = (10 * n).max(4000);
        let cap = ((PI * w / self.perimeter()) * m as f64).ceil().max(8.0) as usize;
        let arm = (m - 2 * cap) / 2;
        let mut pts = Vec::with_capacity(2 * arm + 2 * cap);
        // Left side of the arm runs outwards, right side back in.
        let side = |t: f64, sgn: f64| self.center(t) + self.tangent(t).perp() * (sgn * w);
        for k in 0..arm {
            let t = self.theta0 + (self.theta1 - self.theta0) * k as f64 / arm as f64;
            pts.push(side(t, -1.0));
        }
        let end_cap = |t: f64, from: f64, pts: &mut Vec<Vec2>| {
            let c = self.center(t);
            let e = self.tangent(t).perp() * from;
            for k in 0..cap {
                let a = PI * k as f64 / cap as f64;
                pts.push(c + e.rotated(a) * w);
            }
        };
        end_cap(self.theta1, -1.0, &mut pts);
        for k in 0..arm {
            let t = self.theta1 - (self.theta1 - self.theta0) * k as f64 / arm as f64;
            pts.push(side(t, 1.0));
        }
        end_cap(self.theta0, 1.0, &mut pts);
        ClosedCurve::from_points_any_orientation(pts)?.resample(n)
    }
}

/// Curve scenarios for the parametric flows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveScenario {
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
    Spiral(Spiral),
    Perturbed { r: f64, eps: f64, k: u32 },
}

impl CurveScenario {
    pub fn curve(&self, n: usize) -> Result<ClosedCurve> {
        match *self {
            CurveScenario::Circle { r } => circle(Vec2::ZERO, r, n),
            CurveScenario::Ellipse { a, b } => ellipse(a, b, n),
            CurveScenario::Spiral(s) => s.curve(n),
            CurveScenario::Perturbed { r, eps, k } => perturbed_circle(r, eps, k, n),
        }
    }
}

impl FromStr for CurveScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "circle" => CurveScenario::Circle { r: 1.0 },
            "ellipse" => CurveScenario::Ellipse { a: 1.0, b: 0.5 },
            "spiral" => CurveScenario::Spiral(Spiral::default()),
            "perturbed" | "perturbed_circle" => CurveScenario::Perturbed {
                r: 1.0,
                eps: 0.1,
                k: 3,
            },
            other => {
                return Err(Error::config(
                    "scenario",
                    format!("unknown curve scenario {other:?} (circle, ellipse, spiral, perturbed)"),
                ))
            }
        })
    }
}

impl fmt::Display for CurveScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveScenario::Circle { .. } => "circle",
            CurveScenario::Ellipse { .. } => "ellipse",
            CurveScenario::Spiral(_) => "spiral",
            CurveScenario::Perturbed { .. } => "perturbed",
        })
    }
}

/// Initial fields on the torus, `+1` marking the inside phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldScenario {
    /// Disk centered in the cell.
    Disk { r: f64 },
    /// Horizontal strip `|y - 1/2| < w`.
    Band { w: f64 },
    /// Axis-aligned square of half-side `a`.
    Square { a: f64 },
    /// First and third quadrant blocks around the cell center.
    Cross,
    Random { seed: u64 },
}

impl FieldScenario {
    pub fn indicator(&self, n: usize) -> Result<PeriodicField> {
        let c = Vec2::new(0.5, 0.5);
        match *self {
            FieldScenario::Disk { r } => PeriodicField::indicator(n, |p| (p - c).norm() < r),
            FieldScenario::Band { w } => PeriodicField::indicator(n, |p| (p.y - 0.5).abs() < w),
            FieldScenario::Square { a } => {
                PeriodicField::indicator(n, |p| (p.x - 0.5).abs() < a && (p.y - 0.5).abs() < a)
            }
            FieldScenario::Cross => PeriodicField::indicator(n, |p| (p.x < 0.5) == (p.y < 0.5)),
            FieldScenario::Random { seed } => PeriodicField::random_indicator(n, seed),
        }
    }

    /// Initial phase field: the indicator, or uniform noise for `Random`.
    pub fn phase(&self, n: usize) -> Result<PeriodicField> {
        match *self {
            FieldScenario::Random { seed } => PeriodicField::random_phase(n, seed),
            _ => self.indicator(n),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            FieldScenario::Random { .. } => FieldScenario::Random { seed },
            other => other,
        }
    }
}

impl FromStr for FieldScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "disk" => FieldScenario::Disk { r: 0.3 },
            "band" => FieldScenario::Band { w: 0.25 },
            "square" => FieldScenario::Square { a: 0.25 },
            "cross" => FieldScenario::Cross,
            "random" => FieldScenario::Random { seed: 0 },
            other => {
                return Err(Error::config(
                    "scenario",
                    format!("unknown grid scenario {other:?} (disk, band, square, cross, random)"),
                ))
            }
        })
    }
}

impl fmt::Display for FieldScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldScenario::Disk { .. } => "disk",
            FieldScenario::Band { .. } => "band",
            FieldScenario::Square { .. } => "square",
            FieldScenario::Cross => "cross",
            FieldScenario::Random { .. } => "random",
        })
    }
}
