//! Composite Gauss-Legendre quadrature with panel doubling.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let n = order as f64;
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d.is_finite() {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub order: usize,
    /// Absolute change between successive doublings accepted as converged.
    pub tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            order: 20,
            tol: 1e-13,
            initial_panels: 2,
            max_panels: 1 << 14,
        }
    }
}

/// Integrates `f` over `[a, b]` split at `breaks`, each piece subdivided into equal panels.
///
/// The panel count doubles until two successive estimates of every component
/// differ by less than `cfg.tol`. `f` returns `N` values at once so related
/// integrands share evaluations.
pub fn integrate<const N: usize>(
    f: impl Fn(f64) -> [f64; N],
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<[f64; N]> {
    if breaks.len() < 2
        || breaks
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(core::cmp::Ordering::Greater))
    {
        return Err(domain("quadrature breakpoints must be increasing"));
    }
    if cfg.order == 0 || cfg.initial_panels == 0 {
        return Err(domain("quadrature order and panel count must be positive"));
    }
    let (x, w) = gauss_legendre(cfg.order);
    let estimate = |panels: usize| -> [f64; N] {
        let mut acc = [0.0; N];
        for seg in breaks.windows(2) {
            let h = (seg[1] - seg[0]) / panels as f64;
            for p in 0..panels {
                let mid = seg[0] + (p as f64 + 0.5) * h;
                for (xi, wi) in x.iter().zip(&w) {
                    let v = f(mid + 0.5 * h * xi);
                    for k in 0..N {
                        acc[k] += 0.5 * h * wi * v[k];
                    }
                }
            }
        }
        acc
    };
    let mut panels = cfg.initial_panels;
    let mut prev = estimate(panels);
    let mut change = f64::INFINITY;
    while panels * 2 <= cfg.max_panels {
        panels *= 2;
        let next = estimate(panels);
        change = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prev = next;
        if change < cfg.tol {
            return Ok(prev);
        }
    }
    Err(Error::Quadrature { panels, change })
}
