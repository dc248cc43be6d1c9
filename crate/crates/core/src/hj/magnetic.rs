//! Principal function of a charge in `B0 z` (no oscillating component).
//!
//! The transverse plane is an isotropic oscillator at the Larmor frequency
//! `omega_L = gamma B0 / 2c` seen from a frame rotating at `omega_L`; `z` is
//! free.

use num_complex::Complex64;

use super::action::{central, central2, CURVATURE_STEP, SPACE_STEP, TIME_STEP};
use super::coefficients::{unwound_ln_cos, CAUSTIC_EPS};
use crate::error::{Error, Result};
use crate::scenario::MagneticParams;

/// How `sigma` enters the constant term and the boundary condition.
///
/// `AsPrinted`: constant term `(tan/2m)(sigma/omega)^2/omega`, boundary value
/// `sigma = omega hbar k_x`. `MassScaled`: constant term
/// `(tan/2m) sigma^2/(m^2 omega)`, boundary value `sigma = m hbar k_x`. The
/// two agree when `m = omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaConvention {
    AsPrinted,
    #[default]
    MassScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub sigma: f64,
    pub k: [f64; 3],
}

impl MagneticConstants {
    /// Constants giving `S(r, 0) = hbar k . r`.
    pub fn from_boundary(mp: &MagneticParams, hbar: f64, k: [f64; 3], convention: SigmaConvention) -> Self {
        let sigma = match convention {
            SigmaConvention::AsPrinted => mp.larmor() * hbar * k[0],
            SigmaConvention::MassScaled => mp.mass * hbar * k[0],
        };
        MagneticConstants {
            c1: 0.0,
            c2: hbar * k[1],
            c3: hbar * k[2],
            c4: 0.0,
            c5: 0.0,
            c6: 0.0,
            sigma,
            k,
        }
    }

    pub fn zero() -> Self {
        MagneticConstants {
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            c4: 0.0,
            c5: 0.0,
            c6: 0.0,
            sigma: 0.0,
            k: [0.0; 3],
        }
    }

    pub fn constant_sum(&self) -> f64 {
        self.c4 + self.c5 + self.c6
    }
}

/// Coefficients of the general quadratic ansatz
/// `S = (alpha1 x^2 + alpha2 y^2 + alpha3 z^2)/2 + xi . r
///      + zeta1 xy + zeta2 xz + zeta3 yz + lambda1 + lambda2 + lambda3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticAnsatz {
    pub alpha: [f64; 3],
    pub xi: [f64; 3],
    pub zeta: [f64; 3],
    pub lambda: [Complex64; 3],
}

impl MagneticAnsatz {
    pub fn eval(&self, r: [f64; 3]) -> Complex64 {
        let [x, y, z] = r;
        let quad = 0.5 * (self.alpha[0] * x * x + self.alpha[1] * y * y + self.alpha[2] * z * z)
            + self.xi[0] * x
            + self.xi[1] * y
            + self.xi[2] * z
            + self.zeta[0] * x * y
            + self.zeta[1] * x * z
            + self.zeta[2] * y * z;
        Complex64::new(quad, 0.0) + self.lambda[0] + self.lambda[1] + self.lambda[2]
    }
}

/// A complex action in three dimensions.
pub trait Action3D {
    fn action(&self, r: [f64; 3], t: f64) -> Result<Complex64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticPrincipalFunction {
    pub params: MagneticParams,
    pub constants: MagneticConstants,
    pub hbar: f64,
    pub convention: SigmaConvention,
}

pub fn magnetic_principal_function(
    mp: &MagneticParams,
    mc: MagneticConstants,
    hbar: f64,
    convention: SigmaConvention,
) -> Result<MagneticPrincipalFunction> {
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
    if !(hbar >= 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            value: hbar,
            reason: "must be finite and non-negative",
        });
    }
    Ok(MagneticPrincipalFunction {
        params: *mp,
        constants: mc,
        hbar,
        convention,
    })
}

impl MagneticPrincipalFunction {
    pub fn ansatz(&self, t: f64) -> Result<MagneticAnsatz> {
        let m = self.params.mass;
        let w = self.params.larmor();
        let c = &self.constants;
        let theta = w * t + c.c1;
        let cos = theta.cos();
        if cos.abs() <= CAUSTIC_EPS {
            return Err(Error::Caustic { t, cos_abs: cos.abs() });
        }
        let tan = theta.tan();
        let sm = c.sigma / m;
        let sigma_term = match self.convention {
            SigmaConvention::AsPrinted => (c.sigma / w).powi(2) / w,
            SigmaConvention::MassScaled => sm * sm / w,
        };
        let half_log = Complex64::new(0.0, 0.5 * self.hbar) * unwound_ln_cos(theta);
        Ok(MagneticAnsatz {
            alpha: [-m * w * tan, -m * w * tan, 0.0],
            xi: [sm - c.c2 * tan, sm * tan + c.c2, c.c3],
            zeta: [0.0; 3],
            lambda: [
                half_log + (-tan * sigma_term / (2.0 * m) + c.c4),
                half_log + (-tan * c.c2 * c.c2 / (2.0 * m * w) + c.c5),
                Complex64::new(-c.c3 * c.c3 * t / (2.0 * m) + c.c6, 0.0),
            ],
        })
    }

    pub fn eval(&self, r: [f64; 3], t: f64) -> Result<Complex64> {
        Ok(self.ansatz(t)?.eval(r))
    }
}

impl Action3D for MagneticPrincipalFunction {
    fn action(&self, r: [f64; 3], t: f64) -> Result<Complex64> {
        self.eval(r, t)
    }
}

fn shifted(r: [f64; 3], axis: usize, d: f64) -> [f64; 3] {
    let mut out = r;
    out[axis] += d;
    out
}

/// Residual of the quantum Hamilton-Jacobi equation for a charge in
/// `B1 cos(omega t) x + B0 z` with zero scalar potential, by central
/// differences.
pub fn magnetic_qhje_residual<A: Action3D + ?Sized>(
    action: &A,
    mp: &MagneticParams,
    hbar: f64,
    r: [f64; 3],
    t: f64,
) -> Result<Complex64> {
    let m = mp.mass;
    let [x, y, z] = r;
    let s_t = central(|d| action.action(r, t + d), TIME_STEP)?;
    let mut grad = [Complex64::new(0.0, 0.0); 3];
    let mut laplacian = Complex64::new(0.0, 0.0);
    for axis in 0..3 {
        grad[axis] = central(|d| action.action(shifted(r, axis, d), t), SPACE_STEP)?;
        laplacian += central2(|d| action.action(shifted(r, axis, d), t), CURVATURE_STEP)?;
    }
    let [sx, sy, sz] = grad;
    let g = mp.gamma / mp.light_c;
    let (sin, cos) = (mp.omega_field * t).sin_cos();
    let l_x = sz * y - sy * z;
    let l_y = sx * z - sz * x;
    let l_z = sy * x - sx * y;
    let tilt = x * sin - y * cos;
    let potential = m * g * g * mp.b0 * mp.b0 / 8.0 * (x * x + y * y)
        + m * g * g * mp.b1 * mp.b1 / 8.0 * (z * z + tilt * tilt)
        - m * g * g * mp.b0 * mp.b1 / 4.0 * z * (y * sin - x * cos)
        + mp.scalar_potential();
    let kinetic = (sx * sx + sy * sy + sz * sz) / (2.0 * m);
    let angular = l_x * (0.5 * g * mp.b1 * cos) - l_y * (0.5 * g * mp.b1 * sin) + l_z * (0.5 * g * mp.b0);
    Ok(s_t + kinetic + potential + angular - Complex64::new(0.0, hbar / (2.0 * m)) * laplacian)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mass: f64, b0: f64) -> MagneticParams {
        MagneticParams::new(b0, 0.0, 3.0, 2.0, 1.0, mass).unwrap()
    }

    #[test]
    fn boundary_condition() {
        for (mass, b0, convention) in [(1.0, 1.0, SigmaConvention::AsPrinted), (2.5, 1.7, SigmaConvention::MassScaled)] {
            let mp = params(mass, b0);
            let k = [0.6, -1.1, 0.9];
            let mc = MagneticConstants::from_boundary(&mp, 1.0, k, convention);
            assert_eq!(mc.constant_sum(), 0.0);
            let pf = magnetic_principal_function(&mp, mc, 1.0, convention).unwrap();
            let r = [0.3, -0.8, 1.4];
            let expected = k[0] * r[0] + k[1] * r[1] + k[2] * r[2];
            assert!((pf.eval(r, 0.0).unwrap() - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn printed_boundary_needs_mass_equal_to_frequency() {
        let mp = params(2.5, 1.7);
        let mc = MagneticConstants::from_boundary(&mp, 1.0, [1.0, 0.0, 0.0], SigmaConvention::AsPrinted);
        let pf = magnetic_principal_function(&mp, mc, 1.0, SigmaConvention::AsPrinted).unwrap();
        assert!((pf.eval([1.0, 0.0, 0.0], 0.0).unwrap().re - 1.0).abs() > 0.1);
    }

    #[test]
    fn residual_vanishes() {
        for mass in [1.0, 2.5] {
            let mp = params(mass, 1.7);
            let mc = MagneticConstants {
                c1: 0.2,
                c2: 0.4,
                c3: -0.7,
                c4: 0.1,
                c5: 0.0,
                c6: -0.1,
                sigma: 0.9,
                k: [0.0; 3],
            };
            let pf = magnetic_principal_function(&mp, mc, 1.0, SigmaConvention::MassScaled).unwrap();
            for i in 0..8 {
                let r = [0.3 * i as f64 - 1.0, 0.5 - 0.2 * i as f64, 0.1 * i as f64];
                let t = 0.05 + 0.03 * i as f64;
                let res = magnetic_qhje_residual(&pf, &mp, 1.0, r, t).unwrap();
                assert!(res.norm() < 1e-7, "mass {mass}: residual {res}");
            }
        }
    }

    #[test]
    fn rejects_oscillating_component() {
        let mp = MagneticParams::new(1.0, 0.5, 3.0, 2.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            magnetic_principal_function(&mp, MagneticConstants::zero(), 1.0, SigmaConvention::MassScaled),
            Err(Error::UnsupportedRegime { .. })
        ));
    }

    #[test]
    fn free_z_sector() {
        let mp = params(1.3, 1.0);
        let mut with_z = MagneticConstants::zero();
        with_z.c3 = 0.8;
        let a = magnetic_principal_function(&mp, with_z, 1.0, SigmaConvention::MassScaled).unwrap();
        let b = magnetic_principal_function(&mp, MagneticConstants::zero(), 1.0, SigmaConvention::MassScaled).unwrap();
        let r = [0.2, 0.1, -0.4];
        for t in [0.1, 0.4, 0.7] {
            let sz = central(|d| a.action(shifted(r, 2, d), t), 1e-4).unwrap();
            assert!((sz - Complex64::new(0.8, 0.0)).norm() < 1e-10);
            let dt = central(|d| Ok(a.action(r, t + d)? - b.action(r, t + d)?), 1e-4).unwrap();
            assert!((dt + Complex64::new(0.64 / 2.6, 0.0)).norm() < 1e-9);
        }
    }
}
