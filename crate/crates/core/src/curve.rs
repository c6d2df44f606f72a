//! Discrete geometry of closed polygonal curves.
//!
//! Curves are stored counter-clockwise. Vertex quantities use three-point
//! stencils in arclength that account for unequal neighbouring edges:
//!
//! * tangent `τ`: second-order one-sided blend of the two edge differences,
//! * outward normal `ν = -Jτ` (clockwise quarter turn of `τ`),
//! * curvature `κ = -∂s²X · ν`, so a circle of radius `R` has `κ = 1/R`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Minimum number of vertices of a [`ClosedCurve`].
pub const MIN_POINTS: usize = 8;

/// Edges shorter than this fraction of the total length are rejected.
const DEGENERATE_EDGE: f64 = 1e-12;

/// A simple, counter-clockwise polygonal loop with at least [`MIN_POINTS`]
/// vertices. The closing edge from the last vertex back to the first is
/// implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedCurve {
    points: Vec<Vec2>,
}

/// Per-vertex differential quantities of a [`ClosedCurve`].
#[derive(Clone, Debug)]
pub struct CurveQuantities {
    /// `edge_lengths[i] = |X[i+1] - X[i]|` (indices modulo `N`).
    pub edge_lengths: Vec<f64>,
    /// Arclength owned by each vertex: half of its two adjacent edges.
    pub dual_lengths: Vec<f64>,
    pub tangents: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub curvatures: Vec<f64>,
}

impl ClosedCurve {
    /// Validates and builds a curve, including the O(N²) simplicity test.
    /// Clockwise input is rejected rather than silently reversed; use
    /// [`ClosedCurve::from_points_any_orientation`] for that.
    pub fn new(points: Vec<Vec2>) -> Result<Self> {
        let curve = Self::checked_unsimple(points)?;
        if let Some((i, j)) = curve.find_self_intersection() {
            return Err(Error::InvalidCurve(format!(
                "edges {i} and {j} intersect"
            )));
        }
        Ok(curve)
    }

    /// Like [`ClosedCurve::new`] but reverses clockwise input.
    pub fn from_points_any_orientation(mut points: Vec<Vec2>) -> Result<Self> {
        if shoelace(&points) < 0.0 {
            points.reverse();
        }
        Self::new(points)
    }

    /// Validates everything except simplicity; used inside time stepping where
    /// the quadratic intersection test is deferred to snapshot time.
    pub(crate) fn checked_unsimple(points: Vec<Vec2>) -> Result<Self> {
        if points.len() < MIN_POINTS {
            return Err(Error::InvalidCurve(format!(
                "need at least {MIN_POINTS} points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve(format!("point {i} is not finite")));
        }
        let n = points.len();
        let total: f64 = (0..n).map(|i| (points[(i + 1) % n] - points[i]).norm()).sum();
        for i in 0..n {
            let e = (points[(i + 1) % n] - points[i]).norm();
            if e <= DEGENERATE_EDGE * total {
                return Err(Error::InvalidCurve(format!(
                    "degenerate edge {i} of length {e:e}"
                )));
            }
        }
        let area = shoelace(&points);
        if area <= 0.0 {
            return Err(Error::Orientation(area));
        }
        Ok(ClosedCurve { points })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Vec2> {
        self.points
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let n = self.points.len();
        (self.points[(i + 1) % n] - self.points[i]).norm()
    }

    pub fn min_edge_length(&self) -> f64 {
        (0..self.len())
            .map(|i| self.edge_length(i))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge_length(&self) -> f64 {
        (0..self.len()).map(|i| self.edge_length(i)).fold(0.0, f64::max)
    }

    /// Total length `Σ |X[i+1] - X[i]|`.
    pub fn length(&self) -> f64 {
        (0..self.len()).map(|i| self.edge_length(i)).sum()
    }

    /// Enclosed area via the shoelace formula. A non-positive value means the
    /// orientation invariant was broken and is reported as an error.
    pub fn enclosed_area(&self) -> Result<f64> {
        let a = shoelace(&self.points);
        if a > 0.0 {
            Ok(a)
        } else {
            Err(Error::Orientation(a))
        }
    }

    /// Signed shoelace area without the orientation check.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.points)
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.points.len();
        let mut a = 0.0;
        let mut c = Vec2::ZERO;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            let w = p.wedge(q);
            a += w;
            c += (p + q) * w;
        }
        c * (1.0 / (3.0 * a))
    }

    /// First pair of non-adjacent edges that intersect, if any.
    pub fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.points.len();
        let p = &self.points;
        // Bounding boxes prune most pairs.
        let boxes: Vec<(Vec2, Vec2)> = (0..n)
            .map(|i| {
                let a = p[i];
                let b = p[(i + 1) % n];
                (
                    Vec2::new(a.x.min(b.x), a.y.min(b.y)),
                    Vec2::new(a.x.max(b.x), a.y.max(b.y)),
                )
            })
            .collect();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (lo1, hi1) = boxes[i];
                let (lo2, hi2) = boxes[j];
                if lo1.x > hi2.x || lo2.x > hi1.x || lo1.y > hi2.y || lo2.y > hi1.y {
                    continue;
                }
                if segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_simple(&self) -> bool {
        self.find_self_intersection().is_none()
    }

    pub fn translated(&self, d: Vec2) -> ClosedCurve {
        ClosedCurve {
            points: self.points.iter().map(|&p| p + d).collect(),
        }
    }

    pub fn rotated(&self, angle: f64) -> ClosedCurve {
        ClosedCurve {
            points: self.points.iter().map(|&p| p.rotated(angle)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Result<ClosedCurve> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidCurve(format!("scale {s} must be positive")));
        }
        Ok(ClosedCurve {
            points: self.points.iter().map(|&p| p * s).collect(),
        })
    }

    /// Cyclic relabelling so that vertex `k` becomes vertex 0.
    pub fn shifted_start(&self, k: usize) -> ClosedCurve {
        let mut points = self.points.clone();
        points.rotate_left(k % self.len());
        ClosedCurve { points }
    }

    /// Redistributes `target_n` points along the curve, starting at vertex 0.
    ///
    /// Between two vertices the curve is the cubic Hermite segment with the
    /// vertex tangents and handle length `L / cos²(θ/4)` (`L` the chord, `θ`
    /// the turn between the tangents), which reproduces circular arcs to high
    /// order. Straight-chord interpolation would cut every corner and, applied
    /// every few steps, shows up as a spurious area loss of the flow.
    ///
    /// Points start at equal polygon arclength and are then nudged along the
    /// parameter until all output chords are equal to roundoff; equal
    /// arclength alone would leave unequal chords and the operation would not
    /// be idempotent.
    pub fn resample(&self, target_n: usize) -> Result<ClosedCurve> {
        if target_n < MIN_POINTS {
            return Err(Error::InvalidCurve(format!(
                "resample target {target_n} is below {MIN_POINTS}"
            )));
        }
        let n = self.len();
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for i in 0..n {
            let last = cumulative[i];
            cumulative.push(last + self.edge_length(i));
        }
        let total = cumulative[n];
        let tangents = compute_quantities(self).tangents;
        let at = |s: f64| -> Vec2 {
            let edge = cumulative.partition_point(|&c| c <= s).clamp(1, n) - 1;
            let a = self.points[edge];
            let b = self.points[(edge + 1) % n];
            let len = cumulative[edge + 1] - cumulative[edge];
            let t = ((s - cumulative[edge]) / len).clamp(0.0, 1.0);
            let (ta, tb) = (tangents[edge], tangents[(edge + 1) % n]);
            let theta = ta.dot(tb).clamp(-1.0, 1.0).acos();
            let m = len / (0.25 * theta).cos().powi(2);
            let (t2, t3) = (t * t, t * t * t);
            a * (2.0 * t3 - 3.0 * t2 + 1.0)
                + ta * (m * (t3 - 2.0 * t2 + t))
                + b * (3.0 * t2 - 2.0 * t3)
                + tb * (m * (t3 - t2))
        };

        let mut gaps = vec![total / target_n as f64; target_n];
        let mut out: Vec<Vec2> = Vec::with_capacity(target_n);
        for _ in 0..50 {
            out.clear();
            let mut s = 0.0;
            for g in &gaps {
                out.push(at(s));
                s += g;
            }
            let chords: Vec<f64> = (0..target_n)
                .map(|k| (out[(k + 1) % target_n] - out[k]).norm())
                .collect();
            let mean = chords.iter().sum::<f64>() / target_n as f64;
            let spread = chords
                .iter()
                .map(|c| (c / mean - 1.0).abs())
                .fold(0.0, f64::max);
            if spread < 1e-13 {
                break;
            }
            for (g, c) in gaps.iter_mut().zip(&chords) {
                if *c > 0.0 {
                    *g *= mean / c;
                }
            }
            let sum: f64 = gaps.iter().sum();
            gaps.iter_mut().for_each(|g| *g *= total / sum);
        }
        ClosedCurve::checked_unsimple(out)
    }

    /// Evaluates tangents, normals and curvatures with the three-point stencils.
    pub fn quantities(&self) -> CurveQuantities {
        compute_quantities(self)
    }

    /// Reads the plain-text curve format: one `x y` pair per line, `#`
    /// comments, loop closed implicitly.
    pub fn parse(text: &str) -> Result<ClosedCurve> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                let tok = tok.ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    reason: "expected two numbers".into(),
                })?;
                tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    reason: format!("`{tok}`: {e}"),
                })
            };
            let x = parse(it.next())?;
            let y = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    reason: "trailing tokens".into(),
                });
            }
            points.push(Vec2::new(x, y));
        }
        ClosedCurve::new(points)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.len() * 40);
        for p in &self.points {
            let _ = writeln!(s, "{} {}", p.x, p.y);
        }
        s
    }

    pub fn read(path: impl AsRef<Path>) -> Result<ClosedCurve> {
        ClosedCurve::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Tangents, outward normals and curvatures by non-uniform three-point
/// stencils in arclength.
pub fn compute_quantities(curve: &ClosedCurve) -> CurveQuantities {
    let p = curve.points();
    let n = p.len();
    let edge_lengths: Vec<f64> = (0..n).map(|i| (p[(i + 1) % n] - p[i]).norm()).collect();
    let mut dual_lengths = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvatures = Vec::with_capacity(n);
    for i in 0..n {
        let prev = p[(i + n - 1) % n];
        let next = p[(i + 1) % n];
        let x = p[i];
        let hm = edge_lengths[(i + n - 1) % n];
        let hp = edge_lengths[i];
        let d1 = ((next - x) * (hm * hm) + (x - prev) * (hp * hp)) * (1.0 / (hm * hp * (hm + hp)));
        let d2 = ((next - x) * (1.0 / hp) - (x - prev) * (1.0 / hm)) * (2.0 / (hm + hp));
        let tau = d1.normalized();
        let nu = tau.perp_cw();
        dual_lengths.push(0.5 * (hm + hp));
        tangents.push(tau);
        normals.push(nu);
        curvatures.push(-d2.dot(nu));
    }
    CurveQuantities {
        edge_lengths,
        dual_lengths,
        tangents,
        normals,
        curvatures,
    }
}

impl CurveQuantities {
    pub fn len(&self) -> usize {
        self.curvatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curvatures.is_empty()
    }

    /// Total turning `Σ κ_i ds_i` with vertex-dual arclength.
    pub fn total_turning(&self) -> f64 {
        self.curvatures
            .iter()
            .zip(&self.dual_lengths)
            .map(|(k, ds)| k * ds)
            .sum()
    }

    /// `∫ κ² ds`.
    pub fn curvature_energy(&self) -> f64 {
        self.curvatures
            .iter()
            .zip(&self.dual_lengths)
            .map(|(k, ds)| k * k * ds)
            .sum()
    }

    /// Arclength derivative of a vertex field, sampled on edges:
    /// `(f[i+1] - f[i]) / |X[i+1] - X[i]|`.
    pub fn edge_derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| (f[(i + 1) % n] - f[i]) / self.edge_lengths[i])
            .collect()
    }

    /// Second arclength derivative of a vertex field with the same
    /// non-uniform stencil used for `∂s²X`.
    pub fn second_derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let hm = self.edge_lengths[(i + n - 1) % n];
                let hp = self.edge_lengths[i];
                let fp = f[(i + 1) % n];
                let fm = f[(i + n - 1) % n];
                ((fp - f[i]) / hp - (f[i] - fm) / hm) * 2.0 / (hm + hp)
            })
            .collect()
    }

    pub fn min_curvature(&self) -> f64 {
        self.curvatures.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn shoelace(points: &[Vec2]) -> f64 {
    let n = points.len();
    if n == 0 {
        return 0.0;
    }
    // Relative to the first vertex to limit cancellation for translated loops.
    let o = points[0];
    let mut acc = 0.0;
    for i in 1..n.saturating_sub(1) {
        acc += (points[i] - o).wedge(points[i + 1] - o);
    }
    0.5 * acc
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).wedge(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}
