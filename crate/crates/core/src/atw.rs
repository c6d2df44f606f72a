//! Minimizing movements for concentric disks.
//!
//! Each step minimizes `J(r) = 2πr + D(r, r_prev)/h` over `r ≥ 0`, where
//! `D` is the integral of the distance to the previous circle over the
//! annulus between the two disks.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// `∫_{annulus} dist(x, ∂B_{r_prev}) dx = 2π(r³/3 - r_prev r²/2 + r_prev³/6)`,
/// written as `π(r - r_prev)²(2r + r_prev)/3` to avoid cancellation.
pub fn dissipation_distance(r: f64, r_prev: f64) -> Result<f64> {
    if !(r >= 0.0 && r_prev >= 0.0) || !r.is_finite() || !r_prev.is_finite() {
        return Err(Error::config(
            "r",
            format!("radii must be finite and non-negative, got {r}, {r_prev}"),
        ));
    }
    let d = r - r_prev;
    Ok(PI * d * d * (2.0 * r + r_prev) / 3.0)
}

/// The step functional `J(r) = 2πr + D(r, r_prev)/h`.
pub fn step_energy(r: f64, r_prev: f64, h: f64) -> Result<f64> {
    Ok(2.0 * PI * r + dissipation_distance(r, r_prev)? / h)
}

/// Global minimizer of [`step_energy`].
///
/// `J'(r) = 2π + 2π r (r - r_prev)/h` vanishes at
/// `r± = (r_prev ± √(r_prev² - 4h))/2`; `r+` is the local minimum. It is
/// returned only when `J(r+) ≤ J(0)`, otherwise the disk disappears.
pub fn atw_step(r_prev: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::config("h", format!("must be positive, got {h}")));
    }
    let disc = r_prev * r_prev - 4.0 * h;
    if disc <= 0.0 {
        dissipation_distance(0.0, r_prev)?;
        return Ok(0.0);
    }
    let r = 0.5 * (r_prev + disc.sqrt());
    if step_energy(r, r_prev, h)? <= step_energy(0.0, r_prev, h)? {
        Ok(r)
    } else {
        Ok(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialChain {
    pub h: f64,
    pub radii: Vec<f64>,
    /// First `n` with `rₙ = 0`.
    pub extinction: Option<usize>,
}

impl RadialChain {
    /// `√(r0² - 2t)`, zero past extinction.
    pub fn exact(&self, t: f64) -> f64 {
        (self.radii[0] * self.radii[0] - 2.0 * t).max(0.0).sqrt()
    }

    pub fn extinction_time(&self) -> Option<f64> {
        self.extinction.map(|n| n as f64 * self.h)
    }

    /// Largest `|rₙ - √(r0² - 2nh)|` over steps where both are positive.
    pub fn sup_error(&self) -> f64 {
        self.radii
            .iter()
            .enumerate()
            .filter_map(|(n, &r)| {
                let e = self.exact(n as f64 * self.h);
                (r > 0.0 && e > 0.0).then(|| (r - e).abs())
            })
            .fold(0.0, f64::max)
    }

    pub const CSV_HEADER: &'static str = "n,t,r,exact_r,error";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (n, &r) in self.radii.iter().enumerate() {
            let t = n as f64 * self.h;
            let e = self.exact(t);
            let _ = writeln!(out, "{n},{t},{r},{e},{}", (r - e).abs());
        }
        out
    }
}

/// Iterates [`atw_step`] from `r0` up to `t_end` or extinction. Every step
/// is checked against the competitor `r = r_prev`, which costs `2πr_prev`.
pub fn atw_run(r0: f64, h: f64, t_end: f64) -> Result<RadialChain> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::config("r0", format!("must be positive, got {r0}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::config("h", format!("must be positive, got {h}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::config("t_end", format!("must be non-negative, got {t_end}")));
    }
    let steps = (t_end / h + 1e-9).floor() as usize;
    let mut radii = Vec::with_capacity(steps + 1);
    radii.push(r0);
    let mut extinction = None;
    for n in 1..=steps {
        let prev = radii[n - 1];
        let r = atw_step(prev, h)?;
        if step_energy(r, prev, h)? > 2.0 * PI * prev * (1.0 + 1e-14) {
            return Err(Error::Numerical(format!("energy increased at step {n}")));
        }
        radii.push(r);
        if r == 0.0 {
            extinction = Some(n);
            break;
        }
    }
    Ok(RadialChain { h, radii, extinction })
}
