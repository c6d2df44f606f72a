//! Scalar fields on the periodic unit torus and the grid schemes acting on
//! them.
//!
//! Sample `(i, j)` sits at the cell center `((i + ½)/n, (j + ½)/n)`; values
//! are stored row-major with `i` fastest.

mod contour;
mod heat;
mod schemes;

use std::io::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use contour::{extract_contour, Contour, Polyline};
pub use heat::{heat_convolve, HeatOutput, HeatSolver};
pub use schemes::{
    allen_cahn_step, indicator_contour, mbo_step, mbo_step_smoothed, reaction_step, AllenCahn,
    MboOutput, Splitting,
};

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Phase-field values must stay inside `[-PHASE_GUARD, PHASE_GUARD]`.
pub const PHASE_GUARD: f64 = 1.5;

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicField {
    n: usize,
    values: Vec<f64>,
}

impl PeriodicField {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::config("n", format!("grid size must be a power of two ≥ 2, got {n}")));
        }
        if values.len() != n * n {
            return Err(Error::GridMismatch(format!(
                "expected {} values for n = {n}, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite value at index {k}")));
        }
        Ok(PeriodicField { n, values })
    }

    pub(crate) fn from_raw(n: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), n * n);
        PeriodicField { n, values }
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; n * n])
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(n: usize, mut f: impl FnMut(Vec2) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                values.push(f(cell_center(n, i, j)));
            }
        }
        Self::new(n, values)
    }

    /// `+1` where `inside` holds at the cell center, `-1` elsewhere.
    pub fn indicator(n: usize, mut inside: impl FnMut(Vec2) -> bool) -> Result<Self> {
        Self::from_fn(n, |p| if inside(p) { 1.0 } else { -1.0 })
    }

    /// Independent fair `±1` values from a seeded ChaCha generator.
    pub fn random_indicator(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(
            n,
            (0..n * n)
                .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect(),
        )
    }

    /// Independent uniform values on `[-1, 1]` from a seeded ChaCha generator.
    pub fn random_phase(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(n, (0..n * n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at integer indices, wrapped periodically.
    pub fn at(&self, i: isize, j: isize) -> f64 {
        let n = self.n as isize;
        let i = i.rem_euclid(n) as usize;
        let j = j.rem_euclid(n) as usize;
        self.values[j * self.n + i]
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        cell_center(self.n, i, j)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_indicator(&self) -> bool {
        self.values.iter().all(|&v| v == 1.0 || v == -1.0)
    }

    /// Area of `{value > level}` counted by cells.
    pub fn area_above(&self, level: f64) -> f64 {
        self.values.iter().filter(|&&v| v > level).count() as f64 * self.cell_area()
    }

    /// Fraction of cells with `|value| > threshold`.
    pub fn fraction_saturated(&self, threshold: f64) -> f64 {
        self.values.iter().filter(|v| v.abs() > threshold).count() as f64
            / self.values.len() as f64
    }

    pub fn same_grid(&self, other: &PeriodicField) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(format!("n = {} vs n = {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PeriodicField {
        PeriodicField::from_raw(self.n, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Periodic bilinear interpolation between cell centers.
    pub fn sample(&self, p: Vec2) -> f64 {
        bilinear(self.n, p, |i, j| self.at(i, j))
    }

    /// Centered-difference gradient at sample `(i, j)`.
    pub fn gradient_at(&self, i: isize, j: isize) -> Vec2 {
        let s = 0.5 * self.n as f64;
        Vec2::new(
            (self.at(i + 1, j) - self.at(i - 1, j)) * s,
            (self.at(i, j + 1) - self.at(i, j - 1)) * s,
        )
    }

    /// Bilinear interpolation of the centered-difference gradient.
    pub fn sample_gradient(&self, p: Vec2) -> Vec2 {
        let gx = bilinear(self.n, p, |i, j| {
            (self.at(i + 1, j) - self.at(i - 1, j)) * 0.5 * self.n as f64
        });
        let gy = bilinear(self.n, p, |i, j| {
            (self.at(i, j + 1) - self.at(i, j - 1)) * 0.5 * self.n as f64
        });
        Vec2::new(gx, gy)
    }

    /// Five-point Laplacian at sample `(i, j)`.
    pub fn laplacian_at(&self, i: isize, j: isize) -> f64 {
        let n2 = (self.n * self.n) as f64;
        (self.at(i + 1, j) + self.at(i - 1, j) + self.at(i, j + 1) + self.at(i, j - 1)
            - 4.0 * self.at(i, j))
            * n2
    }

    pub fn laplacian(&self) -> PeriodicField {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n as isize {
            for i in 0..n as isize {
                out.push(self.laplacian_at(i, j));
            }
        }
        PeriodicField::from_raw(n, out)
    }

    /// Quarter turn counter-clockwise about the torus center.
    pub fn rotated_quarter(&self) -> PeriodicField {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                // (x, y) ↦ (1 - y, x) on cell indices.
                let (ni, nj) = (n - 1 - j, i);
                out[nj * n + ni] = self.values[j * n + i];
            }
        }
        PeriodicField::from_raw(n, out)
    }

    /// Reflection `x ↦ 1 - x`.
    pub fn reflected_x(&self) -> PeriodicField {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                out[j * n + (n - 1 - i)] = self.values[j * n + i];
            }
        }
        PeriodicField::from_raw(n, out)
    }

    /// Translation by whole cells.
    pub fn shifted(&self, di: isize, dj: isize) -> PeriodicField {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n as isize {
            for i in 0..n as isize {
                out.push(self.at(i - di, j - dj));
            }
        }
        PeriodicField::from_raw(n, out)
    }

    /// Binary 8-bit PGM, `[-1, 1] ↦ [0, 255]`, top image row is the largest `y`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let n = self.n;
        let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
        out.reserve(n * n);
        for j in (0..n).rev() {
            for i in 0..n {
                let v = self.values[j * n + i];
                out.push(((v + 1.0) * 127.5).round().clamp(0.0, 255.0) as u8);
            }
        }
        out
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_pgm())?;
        Ok(())
    }
}

/// Conventional snapshot file name, `frame%05d.pgm`.
pub fn frame_name(index: usize) -> String {
    format!("frame{index:05}.pgm")
}

fn cell_center(n: usize, i: usize, j: usize) -> Vec2 {
    let h = 1.0 / n as f64;
    Vec2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
}

/// Bilinear interpolation of lattice data `f(i, j)` located at cell centers.
pub(crate) fn bilinear(n: usize, p: Vec2, f: impl Fn(isize, isize) -> f64) -> f64 {
    let gx = p.x * n as f64 - 0.5;
    let gy = p.y * n as f64 - 0.5;
    let i0 = gx.floor();
    let j0 = gy.floor();
    let tx = gx - i0;
    let ty = gy - j0;
    let (i0, j0) = (i0 as isize, j0 as isize);
    (1.0 - ty) * ((1.0 - tx) * f(i0, j0) + tx * f(i0 + 1, j0))
        + ty * ((1.0 - tx) * f(i0, j0 + 1) + tx * f(i0 + 1, j0 + 1))
}
