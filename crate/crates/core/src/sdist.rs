//! Signed distance to a contour on the torus, the calibration pair `(ξ, B)`
//! built from it, and finite-difference checks of the transport identities
//! satisfied by the distance function of a smoothly moving interface.
//!
//! `s < 0` inside, `s > 0` outside; `∇s` is the outward normal at the
//! nearest point.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{circumcircle, min_image, wrap_unit, Vec2};
use crate::grid::{bilinear, Contour, PeriodicField};

/// Largest default band half-width.
pub const MAX_DEFAULT_DELTA: f64 = 0.25;

/// `ζ` of the calibration: `1 - s²` on `|s| ≤ δ/2`, zero for `|s| ≥ δ`, and
/// `(1 - s²)·η` in between, where `η` is the quintic that falls from 1 to 0
/// with vanishing first and second derivatives at both ends.
pub fn zeta(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    if a <= 0.5 * delta {
        1.0 - s * s
    } else if a >= delta {
        0.0
    } else {
        let u = (a - 0.5 * delta) / (0.5 * delta);
        (1.0 - s * s) * (1.0 - smoothstep5(u))
    }
}

/// Derivative of [`zeta`] with respect to `s`.
pub fn zeta_prime(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    if a <= 0.5 * delta {
        -2.0 * s
    } else if a >= delta {
        0.0
    } else {
        let half = 0.5 * delta;
        let u = (a - half) / half;
        let eta = 1.0 - smoothstep5(u);
        let deta = -smoothstep5_prime(u) / half * s.signum();
        -2.0 * s * eta + (1.0 - s * s) * deta
    }
}

/// Odd truncation: `f(s) = s` on `[0, δ/2]`, `f = δ` on `[δ, ∞)`, and the
/// quintic Hermite blend matching value, slope and (zero) curvature at both
/// ends in between.
pub fn truncation(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    let half = 0.5 * delta;
    let v = if a <= half {
        a
    } else if a >= delta {
        delta
    } else {
        let u = (a - half) / half;
        // Value δ/2 with slope 1 at u = 0, value δ with slope 0 at u = 1.
        half * (1.0 - h0(u)) + half + half * h1(u)
    };
    v.copysign(s)
}

fn smoothstep5(u: f64) -> f64 {
    u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

fn smoothstep5_prime(u: f64) -> f64 {
    30.0 * u * u * (1.0 - u) * (1.0 - u)
}

fn h0(u: f64) -> f64 {
    1.0 - smoothstep5(u)
}

fn h1(u: f64) -> f64 {
    u * (1.0 + u * u * (-6.0 + u * (8.0 - 3.0 * u)))
}

/// Nearest-point data for one query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nearest {
    /// Signed distance, geometric sign.
    pub s: f64,
    /// Nearest point, unwrapped next to the query.
    pub projection: Vec2,
    /// Unit outward direction `∇s`.
    pub gradient: Vec2,
    /// Index of the nearest segment in [`DistanceIndex`] order.
    pub segment: usize,
    /// Position along that segment, in `[0, 1]`.
    pub param: f64,
}

#[derive(Clone, Debug)]
struct SegInfo {
    /// `v_{k-1}, v_k, v_{k+1}, v_{k+2}`, unwrapped around `v_k`.
    pts: [Vec2; 4],
    /// Global vertex indices of `v_k` and `v_{k+1}`.
    verts: (usize, usize),
}

/// Bucketed exact nearest-segment search on the torus with local circular-arc
/// refinement.
///
/// The polygonal distance has kinks at every vertex, which turn into O(1)
/// noise once the field is differentiated twice. The refinement replaces the
/// polygon near segment `k` by the blend, weighted by the segment parameter,
/// of the circles through `(v_{k-1}, v_k, v_{k+1})` and
/// `(v_k, v_{k+1}, v_{k+2})`; this is continuous from segment to segment and
/// exact when the vertices lie on a common circle.
#[derive(Clone, Debug)]
pub struct DistanceIndex {
    segs: Vec<SegInfo>,
    buckets: Vec<Vec<u32>>,
    nb: usize,
}

impl DistanceIndex {
    pub fn new(contour: &Contour) -> DistanceIndex {
        let mut segs = Vec::new();
        let mut offset = 0;
        for p in &contour.polylines {
            let m = p.len();
            let wrapped: Vec<Vec2> = p.points.clone();
            for k in 0..m {
                let a = wrapped[k];
                let rel = |j: usize| a + min_image(wrapped[j % m] - a);
                let b = rel(k + 1);
                if (b - a).norm() < 1e-14 {
                    continue;
                }
                // Nearest distinct neighbours on either side.
                let mut prev = rel(k + m - 1);
                for back in 2..m {
                    if (prev - a).norm() >= 1e-12 {
                        break;
                    }
                    prev = rel(k + m - back);
                }
                let mut next = rel(k + 2);
                for fwd in 3..m + 1 {
                    if (next - b).norm() >= 1e-12 {
                        break;
                    }
                    next = rel(k + fwd);
                }
                segs.push(SegInfo {
                    pts: [prev, a, b, next],
                    verts: (offset + k, offset + (k + 1) % m),
                });
            }
            offset += m;
        }
        let nb = ((segs.len() as f64).sqrt() as usize).clamp(1, 128);
        let mut buckets = vec![Vec::new(); nb * nb];
        let nbf = nb as f64;
        for (idx, s) in segs.iter().enumerate() {
            let (a, b) = (s.pts[1], s.pts[2]);
            let i0 = (a.x.min(b.x) * nbf).floor() as i64;
            let i1 = (a.x.max(b.x) * nbf).floor() as i64;
            let j0 = (a.y.min(b.y) * nbf).floor() as i64;
            let j1 = (a.y.max(b.y) * nbf).floor() as i64;
            for j in j0..=j1.min(j0 + nb as i64 - 1) {
                for i in i0..=i1.min(i0 + nb as i64 - 1) {
                    let bi = i.rem_euclid(nb as i64) as usize;
                    let bj = j.rem_euclid(nb as i64) as usize;
                    buckets[bj * nb + bi].push(idx as u32);
                }
            }
        }
        DistanceIndex { segs, buckets, nb }
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.segs.len()
    }

    /// Global contour vertex indices bounding segment `k`.
    pub fn segment_vertices(&self, k: usize) -> (usize, usize) {
        self.segs[k].verts
    }

    /// Nearest polygon segment: `(distance, segment, param)`.
    fn nearest_segment(&self, x: Vec2) -> Option<(f64, usize, f64)> {
        if self.segs.is_empty() {
            return None;
        }
        let nb = self.nb as i64;
        let bs = 1.0 / self.nb as f64;
        let xw = wrap_unit(x);
        let bi = ((xw.x * self.nb as f64) as i64).min(nb - 1);
        let bj = ((xw.y * self.nb as f64) as i64).min(nb - 1);
        let mut best = (f64::INFINITY, 0usize, 0.0);
        let max_ring = nb / 2 + 1;
        for r in 0..=max_ring {
            let mut visit = |i: i64, j: i64| {
                let cell = (j.rem_euclid(nb) * nb + i.rem_euclid(nb)) as usize;
                for &idx in &self.buckets[cell] {
                    let s = &self.segs[idx as usize];
                    let (d, t) = point_segment(xw, s.pts[1], s.pts[2]);
                    if d < best.0 {
                        best = (d, idx as usize, t);
                    }
                }
            };
            if r == 0 {
                visit(bi, bj);
            } else {
                for k in -r..=r {
                    visit(bi + k, bj - r);
                    visit(bi + k, bj + r);
                }
                for k in (-r + 1)..r {
                    visit(bi - r, bj + k);
                    visit(bi + r, bj + k);
                }
            }
            if best.0 <= r as f64 * bs {
                break;
            }
        }
        Some(best)
    }

    /// Signed distance, projection and outward direction at `x`.
    pub fn query(&self, x: Vec2) -> Option<Nearest> {
        let (d_poly, k, t) = self.nearest_segment(x)?;
        let seg = &self.segs[k];
        let [p0, p1, p2, p3] = seg.pts;
        let q = p1 + min_image(x - p1);
        let dir = (p2 - p1).normalized();
        let seg_normal = dir.perp_cw();

        // Polygonal answer with pseudo-normal sign.
        let foot = p1 + (p2 - p1) * t;
        let pseudo = if t <= 0.0 {
            (p1 - p0).normalized().perp_cw() + seg_normal
        } else if t >= 1.0 {
            (p3 - p2).normalized().perp_cw() + seg_normal
        } else {
            seg_normal
        };
        let sign_poly = if (q - foot).dot(pseudo) >= 0.0 { 1.0 } else { -1.0 };

        let (s1, n1) = arc_model(p0, p1, p2, q, seg_normal, p1);
        let (s2, n2) = arc_model(p1, p2, p3, q, seg_normal, p1);
        let s = (1.0 - t) * s1 + t * s2;
        let g = (n1 * (1.0 - t) + n2 * t).normalized();
        let consistent = s.is_finite()
            && g.is_finite()
            && g.norm() > 0.5
            && (s.abs() - d_poly).abs() <= 0.25 * (p2 - p1).norm();
        let (s, g) = if consistent {
            (s, g)
        } else if d_poly > 1e-14 {
            (sign_poly * d_poly, (q - foot).normalized() * sign_poly)
        } else {
            (0.0, seg_normal)
        };
        Some(Nearest {
            s,
            projection: q - g * s,
            gradient: g,
            segment: k,
            param: t,
        })
    }
}

/// Signed distance to the circle through `a, b, c`, oriented so that the
/// left side of `a → b → c` is inside. Falls back to the line through `pivot`
/// with normal `line_normal` when the points are collinear.
fn arc_model(a: Vec2, b: Vec2, c: Vec2, q: Vec2, line_normal: Vec2, pivot: Vec2) -> (f64, Vec2) {
    let turn = (b - a).wedge(c - b);
    let scale = (b - a).norm() + (c - b).norm();
    match circumcircle(a, b, c) {
        Some((center, r)) if r < 1e4 * scale => {
            let w = q - center;
            let dist = w.norm();
            if dist < 1e-300 {
                return (f64::NAN, Vec2::ZERO);
            }
            let e = w * (1.0 / dist);
            if turn > 0.0 {
                (dist - r, e)
            } else {
                (r - dist, -e)
            }
        }
        _ => ((q - pivot).dot(line_normal), line_normal),
    }
}

fn point_segment(x: Vec2, a: Vec2, b: Vec2) -> (f64, f64) {
    let q = a + min_image(x - a);
    let ab = b - a;
    let t = ((q - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    ((q - (a + ab * t)).norm(), t)
}

/// Signed distance sampled at cell centers.
#[derive(Clone, Debug)]
pub struct SdistField {
    n: usize,
    pub delta: f64,
    pub s: Vec<f64>,
    /// Nearest interface point, unwrapped next to the sample.
    pub projection: Vec<Vec2>,
    /// Unit outward `∇s` from the projection.
    pub gradient: Vec<Vec2>,
    /// `(segment, param)` of the projection.
    pub foot: Vec<(usize, f64)>,
    /// Global vertex indices bounding each segment.
    pub segment_vertices: Vec<(usize, usize)>,
    /// No interface: `s = +∞` everywhere.
    pub empty: bool,
}

/// Signed distance from every cell center to `contour`.
///
/// Magnitudes come from the refined nearest-point search. The sign is read
/// from `inside` (`inside > 0` means interior) except within one grid spacing
/// of the interface, where the grid cannot resolve the side and the
/// geometric sign is kept.
pub fn signed_distance(contour: &Contour, inside: &PeriodicField, delta: f64) -> Result<SdistField> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::config("delta", format!("must be positive, got {delta}")));
    }
    let n = inside.n();
    let index = DistanceIndex::new(contour);
    if index.is_empty() {
        return Ok(SdistField {
            n,
            delta,
            s: vec![f64::INFINITY; n * n],
            projection: vec![Vec2::new(f64::NAN, f64::NAN); n * n],
            gradient: vec![Vec2::ZERO; n * n],
            foot: vec![(usize::MAX, 0.0); n * n],
            segment_vertices: Vec::new(),
            empty: true,
        });
    }
    let spacing = inside.spacing();
    let mut s = Vec::with_capacity(n * n);
    let mut projection = Vec::with_capacity(n * n);
    let mut gradient = Vec::with_capacity(n * n);
    let mut foot = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let x = inside.center(i, j);
            let near = index.query(x).expect("index is not empty");
            let grid_sign = if inside.values()[j * n + i] > 0.0 { -1.0 } else { 1.0 };
            let (sv, g) = if near.s.abs() < spacing || near.s.signum() == grid_sign {
                (near.s, near.gradient)
            } else {
                (-near.s, -near.gradient)
            };
            s.push(sv);
            gradient.push(g);
            projection.push(near.projection);
            foot.push((near.segment, near.param));
        }
    }
    let segment_vertices = (0..index.segment_count()).map(|k| index.segment_vertices(k)).collect();
    Ok(SdistField {
        n,
        delta,
        s,
        projection,
        gradient,
        foot,
        segment_vertices,
        empty: false,
    })
}

impl SdistField {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn at(&self, i: isize, j: isize) -> f64 {
        let n = self.n as isize;
        self.s[(j.rem_euclid(n) * n + i.rem_euclid(n)) as usize]
    }

    fn idx(&self, i: isize, j: isize) -> usize {
        let n = self.n as isize;
        (j.rem_euclid(n) * n + i.rem_euclid(n)) as usize
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        let h = self.spacing();
        Vec2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
    }

    pub fn in_band(&self, k: usize) -> bool {
        self.s[k].abs() < self.delta
    }

    pub fn sample(&self, p: Vec2) -> f64 {
        bilinear(self.n, p, |i, j| self.at(i, j))
    }

    pub fn as_field(&self) -> Result<PeriodicField> {
        PeriodicField::new(self.n, self.s.clone())
    }

    /// Centered-difference gradient of `s`.
    pub fn fd_gradient(&self, i: isize, j: isize) -> Vec2 {
        let c = 0.5 * self.n as f64;
        Vec2::new(
            (self.at(i + 1, j) - self.at(i - 1, j)) * c,
            (self.at(i, j + 1) - self.at(i, j - 1)) * c,
        )
    }

    pub fn fd_laplacian(&self, i: isize, j: isize) -> f64 {
        let n2 = (self.n * self.n) as f64;
        (self.at(i + 1, j) + self.at(i - 1, j) + self.at(i, j + 1) + self.at(i, j - 1)
            - 4.0 * self.at(i, j))
            * n2
    }

    /// Centered-difference Hessian `(s_xx, s_xy, s_yy)`.
    pub fn fd_hessian(&self, i: isize, j: isize) -> (f64, f64, f64) {
        let n2 = (self.n * self.n) as f64;
        let c = self.at(i, j);
        let sxx = (self.at(i + 1, j) - 2.0 * c + self.at(i - 1, j)) * n2;
        let syy = (self.at(i, j + 1) - 2.0 * c + self.at(i, j - 1)) * n2;
        let sxy = (self.at(i + 1, j + 1) - self.at(i + 1, j - 1) - self.at(i - 1, j + 1)
            + self.at(i - 1, j - 1))
            * 0.25
            * n2;
        (sxx, sxy, syy)
    }

    /// `Δs` by centered differences, bilinearly interpolated at `p`.
    pub fn laplacian_at_point(&self, p: Vec2) -> f64 {
        bilinear(self.n, p, |i, j| self.fd_laplacian(i, j))
    }

    /// Largest jump of the unit gradient between in-band neighbours; a value
    /// near 2 means the band reaches the medial axis.
    pub fn max_gradient_jump(&self, band: f64) -> f64 {
        let n = self.n as isize;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let k = self.idx(i, j);
                if self.s[k].abs() >= band {
                    continue;
                }
                for (di, dj) in [(1, 0), (0, 1)] {
                    let m = self.idx(i + di, j + dj);
                    if self.s[m].abs() < band {
                        worst = worst.max((self.gradient[k] - self.gradient[m]).norm());
                    }
                }
            }
        }
        worst
    }
}

/// `δ = 0.4 ×` the smallest radius of curvature along `contour`, capped at
/// [`MAX_DEFAULT_DELTA`].
pub fn default_delta(contour: &Contour, spacing: f64) -> f64 {
    let kmax = contour
        .curvatures(4.0 * spacing)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
    if kmax > 0.0 {
        (0.4 / kmax).min(MAX_DEFAULT_DELTA)
    } else {
        MAX_DEFAULT_DELTA
    }
}

/// Calibration pair `ξ = ζ(s)∇s`, `B = -(Δs∘P)·ξ`.
#[derive(Clone, Debug)]
pub struct CalibrationPair {
    pub n: usize,
    pub delta: f64,
    pub xi: Vec<Vec2>,
    pub b: Vec<Vec2>,
    /// `max |B|/|ξ|` over the band.
    pub b_bound: f64,
}

/// Jump of `∇s` between neighbours above which the band is taken to cross
/// the medial axis.
const REACH_JUMP: f64 = 0.5;

/// Builds `(ξ, B)` on the band `|s| < δ`.
///
/// `Δs` is evaluated at the nearest point `P(x)` rather than at `x`, so that
/// `B` is the normal extension of the interface velocity `-κν`; with `Δs(x)`
/// the ξ-transport identity picks up an O(1) normal term proportional to
/// `κ²` at the interface.
pub fn build_calibration(sdist: &SdistField, delta: f64) -> Result<CalibrationPair> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::config("delta", format!("must be positive, got {delta}")));
    }
    if sdist.empty {
        return Err(Error::Numerical("no interface to calibrate".into()));
    }
    let jump = sdist.max_gradient_jump(delta);
    if jump > REACH_JUMP {
        return Err(Error::config(
            "delta",
            format!("{delta} exceeds the interface reach (∇s jumps by {jump:.3} inside the band)"),
        ));
    }
    let n = sdist.n();
    let mut xi = Vec::with_capacity(n * n);
    let mut b = Vec::with_capacity(n * n);
    let mut b_bound: f64 = 0.0;
    for k in 0..n * n {
        let s = sdist.s[k];
        if s.abs() >= delta {
            xi.push(Vec2::ZERO);
            b.push(Vec2::ZERO);
            continue;
        }
        let x = zeta(s, delta) * sdist.gradient[k];
        let lap = sdist.laplacian_at_point(sdist.projection[k]);
        b_bound = b_bound.max(lap.abs());
        xi.push(x);
        b.push(-lap * x);
    }
    Ok(CalibrationPair {
        n,
        delta,
        xi,
        b,
        b_bound,
    })
}

impl CalibrationPair {
    fn at(field: &[Vec2], n: usize, i: isize, j: isize) -> Vec2 {
        let ni = n as isize;
        field[(j.rem_euclid(ni) * ni + i.rem_euclid(ni)) as usize]
    }

    pub fn xi_at(&self, i: isize, j: isize) -> Vec2 {
        Self::at(&self.xi, self.n, i, j)
    }

    pub fn b_at(&self, i: isize, j: isize) -> Vec2 {
        Self::at(&self.b, self.n, i, j)
    }

    /// Bilinear interpolation of `ξ`.
    pub fn sample_xi(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            bilinear(self.n, p, |i, j| self.xi_at(i, j).x),
            bilinear(self.n, p, |i, j| self.xi_at(i, j).y),
        )
    }

    /// Centered-difference divergence of `ξ`.
    pub fn div_xi(&self, i: isize, j: isize) -> f64 {
        let c = 0.5 * self.n as f64;
        (self.xi_at(i + 1, j).x - self.xi_at(i - 1, j).x) * c
            + (self.xi_at(i, j + 1).y - self.xi_at(i, j - 1).y) * c
    }
}

/// Residuals of the transport identities at one grid sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSample {
    pub x: f64,
    pub y: f64,
    pub s: f64,
    /// `∂t s + B·∇s` with `B = V(P)ν(P)` from the exact velocity.
    pub transport: f64,
    /// `∂tφ - Δφ + 1`, `φ = s²/2`.
    pub phi: f64,
    /// `|∂tξ + (B·∇)ξ + (∇B)ᵀξ|`.
    pub xi: f64,
    /// `∇·ξ + B·ξ`.
    pub div: f64,
}

#[derive(Clone, Debug)]
pub struct ResidualGrid {
    pub n: usize,
    /// Samples with `|s| < δ` at both times, row-major; `None` elsewhere.
    pub samples: Vec<Option<ResidualSample>>,
}

impl ResidualGrid {
    pub const CSV_HEADER: &'static str = "x,y,s,res_transport,res_phi,res_xi,res_div";

    pub fn iter(&self) -> impl Iterator<Item = &ResidualSample> {
        self.samples.iter().flatten()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in self.iter() {
            let _ = writeln!(
                out,
                "{:.8},{:.8},{:.10e},{:.6e},{:.6e},{:.6e},{:.6e}",
                r.x, r.y, r.s, r.transport, r.phi, r.xi, r.div
            );
        }
        out
    }

    /// Bilinear interpolation of one residual component at `p`; `None` if any
    /// of the four surrounding samples lies outside the band.
    pub fn sample(&self, p: Vec2, pick: impl Fn(&ResidualSample) -> f64) -> Option<f64> {
        if !self.has_full_stencil(p) {
            return None;
        }
        let n = self.n as isize;
        Some(bilinear(self.n, p, |i, j| {
            self.samples[(j.rem_euclid(n) * n + i.rem_euclid(n)) as usize]
                .as_ref()
                .map_or(0.0, &pick)
        }))
    }

    fn has_full_stencil(&self, p: Vec2) -> bool {
        let n = self.n as isize;
        let gx = (p.x * self.n as f64 - 0.5).floor() as isize;
        let gy = (p.y * self.n as f64 - 0.5).floor() as isize;
        [(0, 0), (1, 0), (0, 1), (1, 1)].iter().all(|(di, dj)| {
            self.samples[((gy + dj).rem_euclid(n) * n + (gx + di).rem_euclid(n)) as usize].is_some()
        })
    }

    /// Max over `points` of the interpolated absolute residuals, as
    /// `[transport, phi, xi, div]`.
    pub fn max_at_points(&self, points: &[Vec2]) -> [f64; 4] {
        let mut out = [0.0f64; 4];
        for &p in points {
            let comps = [
                self.sample(p, |r| r.transport),
                self.sample(p, |r| r.phi),
                self.sample(p, |r| r.xi),
                self.sample(p, |r| r.div),
            ];
            for (o, c) in out.iter_mut().zip(comps) {
                if let Some(v) = c {
                    *o = o.max(v.abs());
                }
            }
        }
        out
    }
}

/// Centered-in-time residuals of the distance transport identities between
/// two slices `dt` apart. Spatial terms are averaged over the two slices.
/// `velocity(P, t)` is the exact normal velocity at interface point `P`.
pub fn transport_residuals(
    s0: &SdistField,
    s1: &SdistField,
    c0: &CalibrationPair,
    c1: &CalibrationPair,
    dt: f64,
    t0: f64,
    velocity: impl Fn(Vec2, f64) -> f64,
) -> Result<ResidualGrid> {
    let n = s0.n();
    if s1.n() != n || c0.n != n || c1.n != n {
        return Err(Error::GridMismatch(format!(
            "slices on n = {}, {}, {}, {}",
            n,
            s1.n(),
            c0.n,
            c1.n
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::config("dt", "must be positive"));
    }
    let delta = s0.delta.min(s1.delta);
    let h = 1.0 / n as f64;
    let n2 = (n * n) as f64;
    let phi = |sd: &SdistField, i: isize, j: isize| 0.5 * sd.at(i, j) * sd.at(i, j);
    let lap_phi = |sd: &SdistField, i: isize, j: isize| {
        (phi(sd, i + 1, j) + phi(sd, i - 1, j) + phi(sd, i, j + 1) + phi(sd, i, j - 1)
            - 4.0 * phi(sd, i, j))
            * n2
    };
    let xi_residual_terms = |c: &CalibrationPair, i: isize, j: isize| -> Vec2 {
        let inv2h = 0.5 / h;
        let dxi_dx = (c.xi_at(i + 1, j) - c.xi_at(i - 1, j)) * inv2h;
        let dxi_dy = (c.xi_at(i, j + 1) - c.xi_at(i, j - 1)) * inv2h;
        let db_dx = (c.b_at(i + 1, j) - c.b_at(i - 1, j)) * inv2h;
        let db_dy = (c.b_at(i, j + 1) - c.b_at(i, j - 1)) * inv2h;
        let b = c.b_at(i, j);
        let xi = c.xi_at(i, j);
        let advect = dxi_dx * b.x + dxi_dy * b.y;
        // (∇B)ᵀξ: component m is Σ_l ∂_m B_l ξ_l.
        let stretch = Vec2::new(db_dx.dot(xi), db_dy.dot(xi));
        advect + stretch
    };

    let mut samples = Vec::with_capacity(n * n);
    for j in 0..n as isize {
        for i in 0..n as isize {
            let k = (j as usize) * n + i as usize;
            let in_band = |sd: &SdistField| {
                (-1..=1).all(|dj| (-1..=1).all(|di| sd.at(i + di, j + dj).abs() < delta))
            };
            if !in_band(s0) || !in_band(s1) {
                samples.push(None);
                continue;
            }
            // B·∇s = V(P)ν(P)·∇s = V(P), since ∇s = ν(P).
            let transport = (s1.s[k] - s0.s[k]) / dt
                + 0.5 * (velocity(s0.projection[k], t0) + velocity(s1.projection[k], t0 + dt));
            let dphi = (phi(s1, i, j) - phi(s0, i, j)) / dt;
            let phi_res = dphi - 0.5 * (lap_phi(s0, i, j) + lap_phi(s1, i, j)) + 1.0;
            let dxi = (c1.xi[k] - c0.xi[k]) * (1.0 / dt);
            let xi_res =
                dxi + (xi_residual_terms(c0, i, j) + xi_residual_terms(c1, i, j)) * 0.5;
            let div = 0.5
                * (c0.div_xi(i, j) + c0.b[k].dot(c0.xi[k]) + c1.div_xi(i, j)
                    + c1.b[k].dot(c1.xi[k]));
            let x = s0.center(i as usize, j as usize);
            samples.push(Some(ResidualSample {
                x: x.x,
                y: x.y,
                s: 0.5 * (s0.s[k] + s1.s[k]),
                transport,
                phi: phi_res,
                xi: xi_res.norm(),
                div,
            }));
        }
    }
    Ok(ResidualGrid { n, samples })
}

/// Result of comparing finite-difference Hessian eigenvalues of `s` with the
/// curvature prediction `-σκ/(1 - sσκ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HessianReport {
    /// Sign `σ ∈ {+1, -1}` that fits better.
    pub sign: f64,
    /// Max relative deviation of the dominant eigenvalue under `sign`.
    pub max_deviation: f64,
    /// Same, under the other sign.
    pub other_sign_deviation: f64,
    /// Max of `|λ_small| / |λ_large|`.
    pub max_zero_ratio: f64,
    /// Largest absolute eigenvalue seen (useful for flat interfaces).
    pub max_abs_eigenvalue: f64,
    pub samples: usize,
}

/// Compares `∇²s` at band samples with `|s| < band` against the curvature of
/// the contour at the projection. `curvatures` are per contour vertex in
/// contour order.
pub fn hessian_check(sdist: &SdistField, curvatures: &[f64], band: f64) -> HessianReport {
    let n = sdist.n() as isize;
    let mut dev = [0.0f64; 2];
    let mut zero_ratio: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut samples = 0;
    for j in 0..n {
        for i in 0..n {
            let k = sdist.idx(i, j);
            let s = sdist.s[k];
            if !(s.abs() < band) {
                continue;
            }
            // Keep the stencil inside the band.
            if (-1..=1).any(|dj| (-1..=1).any(|di| !(sdist.at(i + di, j + dj).abs() < band))) {
                continue;
            }
            let (seg, t) = sdist.foot[k];
            let (va, vb) = sdist.segment_vertices[seg];
            let kappa = (1.0 - t) * curvatures[va] + t * curvatures[vb];
            let (sxx, sxy, syy) = sdist.fd_hessian(i, j);
            let mean = 0.5 * (sxx + syy);
            let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
            let (l1, l2) = (mean + disc, mean - disc);
            let (big, small) = if l1.abs() >= l2.abs() { (l1, l2) } else { (l2, l1) };
            max_abs = max_abs.max(big.abs());
            if big.abs() > 0.0 {
                zero_ratio = zero_ratio.max(small.abs() / big.abs());
            }
            for (slot, sigma) in [(0, 1.0), (1, -1.0)] {
                let pred = -sigma * kappa / (1.0 - s * sigma * kappa);
                let scale = pred.abs().max(1e-12);
                dev[slot] = f64::max(dev[slot], (big - pred).abs() / scale);
            }
            samples += 1;
        }
    }
    let (sign, best, other) = if dev[0] <= dev[1] {
        (1.0, dev[0], dev[1])
    } else {
        (-1.0, dev[1], dev[0])
    };
    HessianReport {
        sign,
        max_deviation: best,
        other_sign_deviation: other,
        max_zero_ratio: zero_ratio,
        max_abs_eigenvalue: max_abs,
        samples,
    }
}
