use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::PeriodicField;
use crate::error::{Error, Result};

/// Exact heat semigroup on the unit torus, applied spectrally: mode `k` is
/// multiplied by `exp(-4π²|k|²h)`.
pub struct HeatSolver {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone, Debug)]
pub struct HeatOutput {
    pub field: PeriodicField,
    /// `√h` is below the grid spacing; the kernel is not resolved.
    pub under_resolved: bool,
}

impl std::fmt::Debug for HeatSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeatSolver").field("n", &self.n).finish()
    }
}

impl HeatSolver {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        HeatSolver {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, field: &PeriodicField, h: f64) -> Result<HeatOutput> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config("h", format!("must be positive, got {h}")));
        }
        if field.n() != self.n {
            return Err(Error::GridMismatch(format!(
                "solver built for n = {}, field has n = {}",
                self.n,
                field.n()
            )));
        }
        let n = self.n;
        let mut data: Vec<Complex64> =
            field.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform_2d(&mut data, true);

        let decay: Vec<f64> = (0..n)
            .map(|k| {
                let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                (-4.0 * PI * PI * k * k * h).exp()
            })
            .collect();
        let scale = 1.0 / (n * n) as f64;
        for j in 0..n {
            for i in 0..n {
                data[j * n + i] *= decay[i] * decay[j] * scale;
            }
        }
        self.transform_2d(&mut data, false);
        let values: Vec<f64> = data.iter().map(|c| c.re).collect();
        Ok(HeatOutput {
            field: PeriodicField::from_raw(n, values),
            under_resolved: h.sqrt() < field.spacing(),
        })
    }

    fn transform_2d(&self, data: &mut [Complex64], forward: bool) {
        let n = self.n;
        let fft = if forward { &self.forward } else { &self.inverse };
        fft.process(data);
        transpose(data, n);
        fft.process(data);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}

/// One-shot [`HeatSolver::apply`].
pub fn heat_convolve(field: &PeriodicField, h: f64) -> Result<HeatOutput> {
    HeatSolver::new(field.n()).apply(field, h)
}
