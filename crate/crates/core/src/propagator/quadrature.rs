use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use super::kernel::{KernelCoefficients, QuadraticKernel};
use super::wave::{Grid, WaveFunction};
use crate::error::{Error, Result};

/// Samples of the initial state below this fraction of the peak are treated
/// as outside its support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Steps between exact re-evaluations of the rotating cross factor.
const RESEED: usize = 64;

/// `sum_j w_j exp(i beta y_j)` for a uniform `y_j = y0 + j dy`, using a
/// rotation recurrence with periodic reseeding.
fn rotated_sum(weights: &[Complex64], y0: f64, dy: f64, beta: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, beta * dy);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut rot = Complex64::new(1.0, 0.0);
    for (j, w) in weights.iter().enumerate() {
        if j % RESEED == 0 {
            rot = Complex64::from_polar(1.0, beta * (y0 + j as f64 * dy));
        }
        acc += w * rot;
        rot *= step;
    }
    acc
}

fn check_phase_resolution(max_slope: f64, dx: f64) -> Result<()> {
    if max_slope * dx > FRAC_PI_2 {
        let wavelength = std::f64::consts::TAU / max_slope;
        return Err(Error::GridTooCoarse {
            wavelength,
            limit: 4.0 * dx,
        });
    }
    Ok(())
}

fn corners(a: (f64, f64), b: (f64, f64)) -> [(f64, f64); 4] {
    [(a.0, b.0), (a.0, b.1), (a.1, b.0), (a.1, b.1)]
}

/// `psi(x, t) = dx~ sum K(x, t; x~, 0) psi0(x~)` (trapezoid) on the grid
/// of `psi0`.
pub fn propagate<K: QuadraticKernel + ?Sized>(kernel: &K, psi0: &WaveFunction, t: f64) -> Result<WaveFunction> {
    propagate_onto(kernel, psi0, t, psi0.grid())
}

/// Like [`propagate`] with a separate output grid.
pub fn propagate_onto<K: QuadraticKernel + ?Sized>(
    kernel: &K,
    psi0: &WaveFunction,
    t: f64,
    out: Grid,
) -> Result<WaveFunction> {
    let st = kernel.structure(t)?;
    let peak = psi0.max_abs();
    if peak == 0.0 {
        return WaveFunction::new(out.x_min, out.dx, vec![Complex64::new(0.0, 0.0); out.n]);
    }
    if psi0.edge_amplitude() > SUPPORT_THRESHOLD * peak {
        return Err(Error::InvalidGrid("initial state does not decay at the grid edges"));
    }
    let (first, last) = psi0.support(SUPPORT_THRESHOLD).expect("nonzero state has support");
    let src = (psi0.x(first), psi0.x(last));
    let dst = (out.x_min, out.x_max());
    let max_slope = corners(dst, src)
        .iter()
        .map(|&(x, xs)| st.source_slope(x, xs).abs())
        .fold(0.0, f64::max);
    check_phase_resolution(max_slope, psi0.dx)?;

    Ok(WaveFunction {
        x_min: out.x_min,
        dx: out.dx,
        values: apply_structure(&st, psi0, out),
    })
}

fn apply_structure(st: &KernelCoefficients, psi0: &WaveFunction, out: Grid) -> Vec<Complex64> {
    let n = psi0.n();
    let inv_hbar = 1.0 / st.hbar;
    let weights: Vec<Complex64> = psi0
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let xs = psi0.x(j);
            let trap = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            v * Complex64::from_polar(trap * psi0.dx, (st.c * xs * xs + st.e * xs) * inv_hbar)
        })
        .collect();
    (0..out.n)
        .into_par_iter()
        .map(|i| {
            let x = out.x(i);
            let sum = rotated_sum(&weights, psi0.x_min, psi0.dx, st.b * x * inv_hbar);
            st.prefactor * Complex64::from_polar(1.0, (st.a * x * x + st.d * x + st.g) * inv_hbar) * sum
        })
        .collect()
}

/// `||(K * g)(t) - g|| / ||g||`.
pub fn delta_limit_error<K: QuadraticKernel + ?Sized>(kernel: &K, g: &WaveFunction, t: f64) -> Result<f64> {
    let evolved = propagate(kernel, g, t)?;
    Ok(evolved.l2_distance(g)? / g.l2_norm())
}

/// Intermediate-point quadrature for [`compose`]: a uniform grid on
/// `[-cutoff, cutoff]` weighted by a smooth window equal to 1 on
/// `[-flat, flat]` and vanishing with all derivatives at `+-cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposeQuadrature {
    pub flat: f64,
    pub cutoff: f64,
    pub dy: f64,
}

impl ComposeQuadrature {
    pub fn new(flat: f64, cutoff: f64, dy: f64) -> Result<Self> {
        if !(flat > 0.0 && cutoff > flat && dy > 0.0 && dy < cutoff) {
            return Err(Error::InvalidGrid("need 0 < flat < cutoff and 0 < dy < cutoff"));
        }
        Ok(ComposeQuadrature { flat, cutoff, dy })
    }

    pub fn grid(&self) -> Grid {
        Grid::spanning(-self.cutoff, self.cutoff, self.dy).expect("validated quadrature")
    }

    pub fn window(&self, y: f64) -> f64 {
        let u = (y.abs() - self.flat) / (self.cutoff - self.flat);
        if u <= 0.0 {
            1.0
        } else if u >= 1.0 {
            0.0
        } else {
            let bump = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
            let (rise, fall) = (bump(1.0 - u), bump(u));
            rise / (rise + fall)
        }
    }
}

/// `sum_y dy w(y) K(x, t2; y, t1) K(y, t1; x~, 0)` at each `(x, x~)`.
pub fn compose<K: QuadraticKernel + ?Sized>(
    kernel: &K,
    t1: f64,
    t2: f64,
    points: &[(f64, f64)],
    quad: &ComposeQuadrature,
) -> Result<Vec<Complex64>> {
    if !(t1 > 0.0 && t2 > t1) {
        return Err(Error::InvalidParameter {
            name: "t1",
            value: t1,
            reason: "need 0 < t1 < t2",
        });
    }
    let outer = kernel.between(t2, t1)?;
    let inner = kernel.structure(t1)?;
    let hbar = kernel.hbar();
    let grid = quad.grid();

    // Combined phase in y: p y^2 + beta(x, x~) y.
    let p = outer.c + inner.a;
    let beta = |x: f64, xs: f64| outer.b * x + inner.b * xs + outer.e + inner.d;
    let (xs_lo, xs_hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    let (x_lo, x_hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(v, _)| (lo.min(v), hi.max(v)));
    let max_beta = corners((x_lo, x_hi), (xs_lo, xs_hi))
        .iter()
        .map(|&(x, xs)| beta(x, xs).abs())
        .fold(0.0, f64::max);
    check_phase_resolution((2.0 * p.abs() * quad.cutoff + max_beta) / hbar, grid.dx)?;

    let weights: Vec<Complex64> = (0..grid.n)
        .map(|j| {
            let y = grid.x(j);
            Complex64::from_polar(quad.window(y) * grid.dx, p * y * y / hbar)
        })
        .collect();
    let pref = outer.prefactor * inner.prefactor;
    Ok(points
        .par_iter()
        .map(|&(x, xs)| {
            let sum = rotated_sum(&weights, grid.x_min, grid.dx, beta(x, xs) / hbar);
            let rest = outer.a * x * x + outer.d * x + outer.g + inner.c * xs * xs + inner.e * xs + inner.g;
            pref * Complex64::from_polar(1.0, rest / hbar) * sum
        })
        .collect())
}
