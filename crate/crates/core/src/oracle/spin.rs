use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scenario::MagneticParams;

/// Field seen in the frame rotating with the drive:
/// `(B1, 0, B0 + omega / gamma)`.
pub fn rotating_frame_field(mp: &MagneticParams) -> [f64; 3] {
    [mp.b1, 0.0, mp.b0 + mp.omega_field / mp.gamma]
}

/// Spin-1/2 state in the `z` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub up: Complex64,
    pub down: Complex64,
}

impl Spinor {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(up: Complex64, down: Complex64) -> Result<Self> {
        let s = Spinor { up, down };
        if (s.norm_sqr() - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidParameter {
                name: "spinor",
                value: s.norm_sqr(),
                reason: "must be normalized",
            });
        }
        Ok(s)
    }

    pub fn up() -> Self {
        Spinor {
            up: Complex64::new(1.0, 0.0),
            down: Complex64::new(0.0, 0.0),
        }
    }

    pub fn down() -> Self {
        Spinor {
            up: Complex64::new(0.0, 0.0),
            down: Complex64::new(1.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// `(|up|^2, |down|^2)`.
    pub fn populations(&self) -> (f64, f64) {
        (self.up.norm_sqr(), self.down.norm_sqr())
    }
}

/// Exact evolution under `H = -gamma B_ef . L`, `L = (hbar/2) sigma`:
/// `U = cos(phi) + i sin(phi) n . sigma`, `phi = gamma |B_ef| t / 2`.
pub fn spin_half_evolution(mp: &MagneticParams, s0: Spinor, t: f64) -> Result<Spinor> {
    if (s0.norm_sqr() - 1.0).abs() > Spinor::NORM_TOL {
        return Err(Error::InvalidParameter {
            name: "spinor",
            value: s0.norm_sqr(),
            reason: "must be normalized",
        });
    }
    let b = rotating_frame_field(mp);
    let magnitude = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if magnitude == 0.0 {
        return Ok(s0);
    }
    let phi = 0.5 * mp.gamma * magnitude * t;
    let (sin, cos) = phi.sin_cos();
    let [nx, ny, nz] = b.map(|c| c / magnitude);
    let i = Complex64::new(0.0, 1.0);
    // n . sigma = [[nz, nx - i ny], [nx + i ny, -nz]]
    let u11 = cos + i * sin * nz;
    let u12 = i * sin * Complex64::new(nx, -ny);
    let u21 = i * sin * Complex64::new(nx, ny);
    let u22 = cos - i * sin * nz;
    Ok(Spinor {
        up: u11 * s0.up + u12 * s0.down,
        down: u21 * s0.up + u22 * s0.down,
    })
}

/// Probability of leaving spin-up after time `t`.
pub fn flip_probability(mp: &MagneticParams, t: f64) -> f64 {
    spin_half_evolution(mp, Spinor::up(), t)
        .expect("spin-up is normalized")
        .populations()
        .1
}
