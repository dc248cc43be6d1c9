//! Adaptive Dormand-Prince 5(4) integration for small real systems.
//!
//! Everything in this crate that needs an ODE solve (the linearized Riccati
//! system, Newtonian trajectories, the Pinney equation) has at most a handful
//! of real components, so the state is a fixed-size array.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub const fn uniform(tol: f64) -> Self {
        Tolerance { rtol: tol, atol: tol }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::uniform(1e-10)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 5_000_000;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..N {
            out[i] += h * coef * k[i];
        }
    }
    out
}

/// Adaptive stepper holding the current state. Steps never overshoot the
/// requested end time.
pub struct Stepper<F, const N: usize> {
    rhs: F,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    tol: Tolerance,
}

impl<F, const N: usize> Stepper<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], tol: Tolerance) -> Self {
        let k1 = rhs(t0, &y0);
        Stepper {
            rhs,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            tol,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    fn initial_step(&self, span: f64) -> f64 {
        let scale = |i: usize| self.tol.atol + self.tol.rtol * self.y[i].abs();
        let d0 = (0..N).map(|i| (self.y[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
        let d1 = (0..N).map(|i| (self.k1[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span.abs())
    }

    /// Advances to `t_end` through accepted steps, calling `observe` after each.
    pub fn advance_to<O>(&mut self, t_end: f64, mut observe: O) -> Result<()>
    where
        O: FnMut(f64, &[f64; N]),
    {
        let span = t_end - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let dir = span.signum();
        if self.h == 0.0 {
            self.h = self.initial_step(span);
        }
        let mut steps = 0usize;
        while (t_end - self.t) * dir > 0.0 {
            steps += 1;
            let remaining = (t_end - self.t).abs();
            let mut h = self.h.min(remaining);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let hs = h * dir;
            if steps > MAX_STEPS || h <= 1e-14 * self.t.abs().max(1.0) || !h.is_finite() {
                return Err(Error::StepFailure { t: self.t, step: h });
            }

            let (t, y, k1) = (self.t, self.y, self.k1);
            let rhs = &mut self.rhs;
            let k2 = rhs(t + C2 * hs, &combine(&y, hs, &[(A21, &k1)]));
            let k3 = rhs(t + C3 * hs, &combine(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(t + C4 * hs, &combine(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = rhs(
                t + C5 * hs,
                &combine(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                t + hs,
                &combine(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = combine(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let t_new = if last { t_end } else { t + hs };
            let k7 = rhs(t_new, &y_new);

            let mut err = 0.0f64;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                self.h = h * 0.2;
                continue;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                self.t = t_new;
                self.y = y_new;
                self.k1 = k7;
                observe(self.t, &self.y);
                if !last {
                    self.h = h * factor;
                }
            } else {
                self.h = h * factor.min(1.0);
            }
        }
        Ok(())
    }
}

/// Integrates from `t0` to `t1`.
pub fn integrate<F, const N: usize>(rhs: F, t0: f64, y0: [f64; N], t1: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut stepper = Stepper::new(rhs, t0, y0, tol);
    stepper.advance_to(t1, |_, _| {})?;
    Ok(*stepper.y())
}

/// Integrates across a monotone grid, returning the state at every grid time.
/// `y0` is the state at `grid[0]`.
pub fn integrate_on_grid<F, const N: usize>(rhs: F, grid: &[f64], y0: [f64; N], tol: Tolerance) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    check_grid(grid)?;
    let mut stepper = Stepper::new(rhs, grid[0], y0, tol);
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    for &t in &grid[1..] {
        stepper.advance_to(t, |_, _| {})?;
        out.push(*stepper.y());
    }
    Ok(out)
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("time grid is empty"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("time grid has non-finite entries"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("time grid must be strictly increasing"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 2.0, Tolerance::uniform(1e-12)).unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn oscillator_on_grid() {
        let grid: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
        let ys = integrate_on_grid(|_, y: &[f64; 2]| [y[1], -y[0]], &grid, [1.0, 0.0], Tolerance::uniform(1e-12)).unwrap();
        for (t, y) in grid.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn backwards_integration() {
        let y = integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], 0.0, Tolerance::uniform(1e-12)).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn blow_up_is_reported() {
        let err = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::StepFailure { .. }));
    }

    #[test]
    fn rejects_non_monotone_grid() {
        let err = integrate_on_grid(|_, y: &[f64; 1]| [y[0]], &[0.0, 1.0, 1.0], [1.0], Tolerance::default());
        assert!(matches!(err, Err(Error::InvalidGrid(_))));
    }
}
