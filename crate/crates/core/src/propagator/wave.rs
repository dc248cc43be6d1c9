use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 16;

/// Uniform spatial grid `x_i = x_min + i dx`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, dx: f64, n: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) || !x_min.is_finite() {
            return Err(Error::InvalidGrid("grid spacing must be positive and finite"));
        }
        if n < 2 {
            return Err(Error::InvalidGrid("grid needs at least two points"));
        }
        Ok(Grid { x_min, dx, n })
    }

    /// Grid covering `[a, b]` with spacing as close to `dx` as fits evenly.
    pub fn spanning(a: f64, b: f64, dx: f64) -> Result<Self> {
        if !(b > a) || !(dx > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidGrid("need a < b and dx > 0"));
        }
        let intervals = ((b - a) / dx).round().max(1.0) as usize;
        Grid::new(a, (b - a) / intervals as f64, intervals + 1)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Sampled wavefunction on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub x_min: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(x_min: f64, dx: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() < MIN_SAMPLES {
            return Err(Error::InvalidGrid("wavefunction needs at least 16 samples"));
        }
        Grid::new(x_min, dx, values.len())?;
        let psi = WaveFunction { x_min, dx, values };
        if !psi.norm().is_finite() {
            return Err(Error::InvalidGrid("wavefunction has non-finite samples"));
        }
        Ok(psi)
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid, f: F) -> Result<Self> {
        Self::new(grid.x_min, grid.dx, (0..grid.n).map(|i| f(grid.x(i))).collect())
    }

    /// Normalized Gaussian packet centred at `x0` with momentum `p0` and
    /// width `w`: `(pi w^2)^(-1/4) exp(-(x - x0)^2 / 2w^2 + i p0 x / hbar)`.
    pub fn gaussian(grid: Grid, x0: f64, p0: f64, w: f64, hbar: f64) -> Result<Self> {
        if !(w > 0.0) || !(hbar > 0.0) {
            return Err(Error::InvalidParameter {
                name: "w",
                value: w,
                reason: "width and hbar must be positive",
            });
        }
        let norm = (PI * w * w).powf(-0.25);
        Self::from_fn(grid, |x| {
            let u = (x - x0) / w;
            Complex64::from_polar(norm * (-0.5 * u * u).exp(), p0 * x / hbar)
        })
    }

    pub fn grid(&self) -> Grid {
        Grid {
            x_min: self.x_min,
            dx: self.dx,
            n: self.values.len(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// `dx sum |psi|^2`.
    pub fn norm(&self) -> f64 {
        self.dx * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm().sqrt()
    }

    fn check_same_grid(&self, other: &WaveFunction) -> Result<()> {
        if self.values.len() != other.values.len() || self.x_min != other.x_min || self.dx != other.dx {
            return Err(Error::InvalidGrid("wavefunctions live on different grids"));
        }
        Ok(())
    }

    /// `sqrt(dx sum |a - b|^2)`.
    pub fn l2_distance(&self, other: &WaveFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        let sum: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((self.dx * sum).sqrt())
    }

    /// `dx sum conj(a) b`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let sum: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * self.dx)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Larger of the two endpoint moduli.
    pub fn edge_amplitude(&self) -> f64 {
        let n = self.values.len();
        self.values[0].norm().max(self.values[n - 1].norm())
    }

    /// Index range where `|psi| > rel * max |psi|`.
    pub fn support(&self, rel: f64) -> Option<(usize, usize)> {
        let cut = rel * self.max_abs();
        let first = self.values.iter().position(|v| v.norm() > cut)?;
        let last = self.values.iter().rposition(|v| v.norm() > cut)?;
        Some((first, last))
    }

    /// `<x>` under `|psi|^2`.
    pub fn mean_position(&self) -> f64 {
        let weighted: f64 = self.values.iter().enumerate().map(|(i, v)| self.x(i) * v.norm_sqr()).sum();
        self.dx * weighted / self.norm()
    }

    /// Standard deviation of `x` under `|psi|^2`.
    pub fn position_spread(&self) -> f64 {
        let mean = self.mean_position();
        let var: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.x(i) - mean).powi(2) * v.norm_sqr())
            .sum();
        (self.dx * var / self.norm()).sqrt()
    }
}
