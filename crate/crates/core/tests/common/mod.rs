//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

/// Five-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_889),
    (-0.538_469_310_105_683, 0.478_628_670_499_366),
    (0.538_469_310_105_683, 0.478_628_670_499_366),
    (-0.906_179_845_938_664, 0.236_926_885_056_189),
    (0.906_179_845_938_664, 0.236_926_885_056_189),
];

/// Composite Gauss–Legendre rule with `panels` equal panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let c = a + (k as f64 + 0.5) * w;
            GL5.iter().map(|(x, wt)| wt * f(c + 0.5 * w * x)).sum::<f64>() * 0.5 * w
        })
        .sum()
}

/// Tensor-product rule on a rectangle.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    panels: usize,
) -> f64 {
    integrate(|y| integrate(|x| f(x, y), ax, bx, panels), ay, by, panels)
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Global minimizer on `[a, b]`: a coarse scan picks the best bracket, the
/// golden-section search refines it; the end points compete as well.
pub fn global_minimum(f: impl Fn(f64) -> f64, a: f64, b: f64, scan: usize) -> f64 {
    let xs: Vec<f64> = (0..=scan).map(|k| a + (b - a) * k as f64 / scan as f64).collect();
    let best = (0..=scan)
        .min_by(|&i, &j| f(xs[i]).total_cmp(&f(xs[j])))
        .unwrap();
    let lo = xs[best.saturating_sub(1)];
    let hi = xs[(best + 1).min(scan)];
    let inner = golden_section(&f, lo, hi, 1e-13);
    [a, b, inner]
        .into_iter()
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap()
}

/// Least-squares slope of `y` against `x`.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
