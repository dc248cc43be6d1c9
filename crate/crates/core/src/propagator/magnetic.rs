use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernel::FreeKernel;
use crate::error::{Error, Result};
use crate::hj::Action3D;
use crate::scenario::MagneticParams;

/// Propagator of a charge in a static field `B0 z`: a planar oscillator at
/// the Larmor frequency seen from the co-rotating frame, times a free
/// particle along `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticKernel {
    pub params: MagneticParams,
    pub hbar: f64,
}

pub fn kernel_magnetic(mp: &MagneticParams, hbar: f64) -> Result<MagneticKernel> {
    mp.validate()?;
    if mp.b1 != 0.0 {
        return Err(Error::UnsupportedRegime { b1: mp.b1 });
    }
    if mp.larmor() == 0.0 {
        return Err(Error::InvalidParameter {
            name: "B0",
            value: mp.b0,
            reason: "closed form needs a nonzero Larmor frequency",
        });
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            value: hbar,
            reason: "must be positive",
        });
    }
    Ok(MagneticKernel { params: *mp, hbar })
}

impl MagneticKernel {
    pub fn frequency(&self) -> f64 {
        self.params.larmor()
    }

    fn check_time(&self, t: f64) -> Result<(f64, f64)> {
        let (sin, cos) = (self.frequency() * t).sin_cos();
        if t == 0.0 || sin.abs() <= 1e-12 {
            return Err(Error::SingularTime { t });
        }
        Ok((sin, cos))
    }

    /// `m omega / (2 pi i hbar sin(omega t))`.
    pub fn transverse_prefactor(&self, t: f64) -> Result<Complex64> {
        let (sin, _) = self.check_time(t)?;
        let m = self.params.mass;
        Ok(Complex64::new(0.0, -m * self.frequency() / (2.0 * PI * self.hbar * sin)))
    }

    fn transverse_phase(&self, x: f64, y: f64, xs: f64, ys: f64, sin: f64, cos: f64) -> f64 {
        let w = self.frequency();
        let m = self.params.mass;
        0.5 * m * (w * cos / sin * ((x - xs).powi(2) + (y - ys).powi(2)) + 2.0 * w * (x * ys - xs * y))
    }

    /// Planar factor `K_xy(x, y, t; x~, y~)`.
    pub fn transverse(&self, x: f64, y: f64, xs: f64, ys: f64, t: f64) -> Result<Complex64> {
        let (sin, cos) = self.check_time(t)?;
        let phase = self.transverse_phase(x, y, xs, ys, sin, cos) / self.hbar;
        Ok(self.transverse_prefactor(t)? * Complex64::from_polar(1.0, phase))
    }

    /// Factor along the field.
    pub fn longitudinal(&self) -> FreeKernel {
        FreeKernel {
            mass: self.params.mass,
            hbar: self.hbar,
        }
    }

    /// Full kernel, evaluated as a single Gaussian.
    pub fn eval(&self, r: [f64; 3], t: f64, rs: [f64; 3]) -> Result<Complex64> {
        let (sin, cos) = self.check_time(t)?;
        let m = self.params.mass;
        let w = self.frequency();
        let [x, y, z] = r;
        let [xs, ys, zs] = rs;
        let pref = Complex64::new(0.0, -m * w / (2.0 * PI * self.hbar * sin))
            * Complex64::new(0.0, -m / (2.0 * PI * self.hbar * t)).sqrt();
        let bracket = w * cos / sin * ((x - xs).powi(2) + (y - ys).powi(2))
            + 2.0 * w * (x * ys - xs * y)
            + (z - zs).powi(2) / t;
        Ok(pref * Complex64::from_polar(1.0, 0.5 * m * bracket / self.hbar))
    }

    /// `-i hbar ln K` as a function of the target point, with the source
    /// fixed; the log of the prefactor is taken on the principal branch.
    pub fn action_from(&self, source: [f64; 3]) -> KernelAction {
        KernelAction { kernel: *self, source }
    }
}

/// The kernel read as `exp(i S / hbar)`, for residual checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAction {
    pub kernel: MagneticKernel,
    pub source: [f64; 3],
}

impl Action3D for KernelAction {
    fn action(&self, r: [f64; 3], t: f64) -> Result<Complex64> {
        let k = &self.kernel;
        let (sin, cos) = k.check_time(t)?;
        let m = k.params.mass;
        let [xs, ys, zs] = self.source;
        let pref = k.transverse_prefactor(t)? * Complex64::new(0.0, -m / (2.0 * PI * k.hbar * t)).sqrt();
        let phase = k.transverse_phase(r[0], r[1], xs, ys, sin, cos) + 0.5 * m * (r[2] - zs).powi(2) / t;
        Ok(Complex64::new(0.0, -k.hbar) * pref.ln() + phase)
    }
}
