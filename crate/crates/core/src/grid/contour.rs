use std::collections::HashMap;

use super::PeriodicField;
use crate::curve::ClosedCurve;
use crate::geom::{min_image, wrap_unit, Vec2};

/// A closed chain of level-set crossings.
///
/// `points` are unwrapped: consecutive vertices differ by the minimal torus
/// displacement, so a loop that winds around the torus ends one period away
/// from where it started. `winding` records that offset in whole periods.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Vec2>,
    /// Outward unit normals (pointing away from `{field > level}`).
    pub normals: Vec<Vec2>,
    /// Length owned by each vertex: half of its two adjacent segments.
    pub lengths: Vec<f64>,
    pub winding: (i32, i32),
}

impl Polyline {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Vector from vertex `k` to vertex `k + 1`, closing the loop.
    pub fn segment(&self, k: usize) -> (Vec2, Vec2) {
        let a = self.points[k];
        let b = self.points[(k + 1) % self.len()];
        (a, a + min_image(b - a))
    }

    pub fn length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Shoelace area; zero for loops that wind around the torus.
    pub fn signed_area(&self) -> f64 {
        if self.winding != (0, 0) {
            return 0.0;
        }
        let o = self.points[0];
        let mut acc = 0.0;
        for k in 0..self.len() {
            let (a, b) = self.segment(k);
            acc += (a - o).wedge(b - o);
        }
        0.5 * acc
    }

    pub fn starting_at(&self, k: usize) -> Polyline {
        let mut p = self.clone();
        p.points.rotate_left(k);
        p.normals.rotate_left(k);
        p.lengths.rotate_left(k);
        p
    }
}

/// Level set of a periodic field, as closed polylines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Contour {
    pub polylines: Vec<Polyline>,
}

impl Contour {
    /// Wraps a polygonal curve as a single-loop contour. Normals and vertex
    /// lengths come from the curve stencils, so the vertices are taken as
    /// exact interface points.
    pub fn from_curve(curve: &ClosedCurve) -> Contour {
        let q = curve.quantities();
        Contour {
            polylines: vec![Polyline {
                points: curve.points().to_vec(),
                normals: q.normals,
                lengths: q.dual_lengths,
                winding: (0, 0),
            }],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.iter().all(|p| p.is_empty())
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|p| p.len()).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.polylines.iter().map(|p| p.length()).sum()
    }

    /// Area enclosed by the non-winding loops, counter-clockwise loops
    /// positive.
    pub fn enclosed_area(&self) -> f64 {
        self.polylines.iter().map(|p| p.signed_area()).sum()
    }

    /// `(position, outward normal, length weight)` for every vertex.
    pub fn vertices(&self) -> impl Iterator<Item = (Vec2, Vec2, f64)> + '_ {
        self.polylines.iter().flat_map(|p| {
            p.points
                .iter()
                .zip(&p.normals)
                .zip(&p.lengths)
                .map(|((&x, &nu), &ds)| (x, nu, ds))
        })
    }

    /// Every segment as a pair of unwrapped endpoints.
    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.polylines
            .iter()
            .flat_map(|p| (0..p.len()).map(move |k| p.segment(k)))
    }

    /// Local curvature estimate at every vertex, from the circle through the
    /// points `window` arclength behind and ahead along the polyline.
    /// Positive for a convex inside region.
    pub fn curvatures(&self, window: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vertex_count());
        for p in &self.polylines {
            let m = p.len();
            if m < 3 {
                out.extend(std::iter::repeat_n(0.0, m));
                continue;
            }
            // Cumulative unwrapped positions so the walk can cross the seam.
            let mut pos = Vec::with_capacity(3 * m + 1);
            let mut arc = Vec::with_capacity(3 * m + 1);
            let mut x = p.points[0];
            let mut s = 0.0;
            for k in 0..3 * m + 1 {
                pos.push(x);
                arc.push(s);
                let (a, b) = p.segment(k % m);
                x += b - a ;
                s += (b - a).norm();
            }
            let total = arc[m];
            let w = window.min(0.3 * total);
            let at = |target: f64| -> Vec2 {
                let k = arc.partition_point(|&c| c <= target).clamp(1, arc.len() - 1) - 1;
                let seg = arc[k + 1] - arc[k];
                let t = if seg > 0.0 { (target - arc[k]) / seg } else { 0.0 };
                pos[k] + (pos[k + 1] - pos[k]) * t
            };
            for &s in &arc[..m] {
                let s0 = s + total;
                let c = at(s0);
                let a = at(s0 - w);
                let b = at(s0 + w);
                let turn = (c - a).wedge(b - c);
                let kappa = match crate::geom::circumcircle(a, c, b) {
                    Some((_, r)) if r.is_finite() && r > 0.0 => turn.signum() / r,
                    _ => 0.0,
                };
                out.push(kappa);
            }
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Segment {
    from: usize,
    to: usize,
}

/// Marching squares for `{field = level}` on the torus.
///
/// Inside means `value > level`. Crossings are placed by linear
/// interpolation along lattice edges between cell centers, and every segment
/// keeps the inside on its left, so loops around inside regions run
/// counter-clockwise. Saddle cells connect the inside corners when the
/// average of the four corner values is inside, and separate them otherwise.
/// Vertex normals come from the bilinearly interpolated centered-difference
/// gradient, falling back to the neighbouring segment normals where the
/// gradient vanishes.
pub fn extract_contour(field: &PeriodicField, level: f64) -> Contour {
    let n = field.n();
    let h = field.spacing();
    let v = |i: usize, j: usize| field.values()[(j % n) * n + (i % n)];
    let inside = |i: usize, j: usize| v(i, j) > level;
    // Edge ids: horizontal edge from sample (i, j) to (i+1, j) is 2(jn+i),
    // vertical edge from (i, j) to (i, j+1) is 2(jn+i)+1.
    let h_edge = |i: usize, j: usize| 2 * ((j % n) * n + (i % n));
    let v_edge = |i: usize, j: usize| 2 * ((j % n) * n + (i % n)) + 1;

    let crossing = |id: usize| -> Vec2 {
        let cell = id / 2;
        let (i, j) = (cell % n, cell / n);
        let (i2, j2) = if id.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let fa = v(i, j);
        let fb = v(i2, j2);
        let t = ((level - fa) / (fb - fa)).clamp(0.0, 1.0);
        let a = Vec2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
        let b = Vec2::new((i2 as f64 + 0.5) * h, (j2 as f64 + 0.5) * h);
        wrap_unit(a + (b - a) * t)
    };

    let mut segments: Vec<Segment> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            // Corners counter-clockwise and the edge leaving each corner.
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let edges = [h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)];
            let ins = corners.map(|(a, b)| inside(a, b));
            let count = ins.iter().filter(|&&b| b).count();
            if count == 0 || count == 4 {
                continue;
            }
            // (edge, is in→out) in counter-clockwise order around the cell.
            let mut cross: Vec<(usize, bool)> = Vec::with_capacity(4);
            for k in 0..4 {
                let a = ins[k];
                let b = ins[(k + 1) % 4];
                if a != b {
                    cross.push((edges[k], a));
                }
            }
            if cross.len() == 2 {
                let (out_edge, in_edge) = if cross[0].1 {
                    (cross[0].0, cross[1].0)
                } else {
                    (cross[1].0, cross[0].0)
                };
                segments.push(Segment {
                    from: out_edge,
                    to: in_edge,
                });
            } else {
                let avg = corners.iter().map(|&(a, b)| v(a, b)).sum::<f64>() / 4.0;
                let center_inside = avg > level;
                for k in 0..4 {
                    if cross[k].1 {
                        let partner = if center_inside { (k + 1) % 4 } else { (k + 3) % 4 };
                        segments.push(Segment {
                            from: cross[k].0,
                            to: cross[partner].0,
                        });
                    }
                }
            }
        }
    }

    let by_start: HashMap<usize, usize> =
        segments.iter().enumerate().map(|(k, s)| (s.from, k)).collect();
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for first in 0..segments.len() {
        if used[first] {
            continue;
        }
        let mut ids = Vec::new();
        let mut k = first;
        while !used[k] {
            used[k] = true;
            ids.push(segments[k].from);
            match by_start.get(&segments[k].to) {
                Some(&next) => k = next,
                None => break,
            }
        }
        polylines.push(build_polyline(field, &ids, &crossing));
    }
    Contour { polylines }
}

fn build_polyline(
    field: &PeriodicField,
    ids: &[usize],
    crossing: &impl Fn(usize) -> Vec2,
) -> Polyline {
    let m = ids.len();
    let wrapped: Vec<Vec2> = ids.iter().map(|&id| crossing(id)).collect();
    let mut points = Vec::with_capacity(m);
    let mut x = wrapped[0];
    points.push(x);
    for k in 1..m {
        x += min_image(wrapped[k] - wrapped[k - 1]);
        points.push(x);
    }
    let closing = x + min_image(wrapped[0] - wrapped[m - 1]) - points[0];
    let winding = (closing.x.round() as i32, closing.y.round() as i32);

    let seg = |k: usize| -> Vec2 { min_image(wrapped[(k + 1) % m] - wrapped[k]) };
    let seg_len: Vec<f64> = (0..m).map(|k| seg(k).norm()).collect();
    let lengths: Vec<f64> = (0..m)
        .map(|k| 0.5 * (seg_len[k] + seg_len[(k + m - 1) % m]))
        .collect();
    let normals = (0..m)
        .map(|k| {
            let g = field.sample_gradient(wrapped[k]);
            let gn = g.norm();
            if gn > 1e-12 && gn.is_finite() {
                -g * (1.0 / gn)
            } else {
                // Inside is on the left of each segment.
                let t = seg((k + m - 1) % m) + seg(k);
                if t.norm() > 0.0 {
                    t.normalized().perp_cw()
                } else {
                    Vec2::new(1.0, 0.0)
                }
            }
        })
        .collect();
    Polyline {
        points,
        normals,
        lengths,
        winding,
    }
}
