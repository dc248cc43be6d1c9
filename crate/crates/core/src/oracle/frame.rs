//! Rotating-frame reduction for the field `B1 cos(omega t) x`, and the
//! Ermakov-Pinney scale equation it leads to.
//!
//! Rotating about `x` by `alpha(t)` with `alpha' = -gamma B1 cos(omega t) / 2c`
//! cancels the `L_x` coupling. The remaining `z` factor is an oscillator
//! with frequency `alpha'`; the substitution `z = s(T) z~`, `dT/dtau = mu`
//! and a quadratic phase turn it into a fixed-frequency oscillator provided
//! `m s^2 mu` is constant and `(m s^2 / mu)(alpha'^2 + Omega^2)` matches.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numdiff;
use crate::ode::{Stepper, Tolerance};
use crate::scenario::MagneticParams;

pub const IDENTIFICATION_TOL: f64 = 1e-8;
pub const COLLAPSE_EPS: f64 = 1e-8;

/// Scale law `v(T)` with `s = 1/v` and its first two `T` derivatives.
pub trait ScaleLaw {
    fn v(&self, big_t: f64) -> Result<f64>;
    fn v_prime(&self, big_t: f64) -> f64;
    fn v_second(&self, big_t: f64) -> f64;
}

/// `v = A cos(eta T + delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinneyParticular {
    pub amplitude: f64,
    pub eta: f64,
    pub delta: f64,
    pub omega0: f64,
}

pub fn pinney_particular(a: f64, eta: f64, delta: f64, omega0: f64) -> Result<PinneyParticular> {
    if omega0 * omega0 <= eta * eta {
        return Err(Error::DomainError {
            omega0_sq: omega0 * omega0,
            eta_sq: eta * eta,
        });
    }
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "A",
            value: a,
            reason: "amplitude must be finite and nonzero",
        });
    }
    Ok(PinneyParticular {
        amplitude: a,
        eta,
        delta,
        omega0,
    })
}

impl PinneyParticular {
    /// `sqrt(omega0^2 - eta^2)`.
    pub fn gap(&self) -> f64 {
        (self.omega0 * self.omega0 - self.eta * self.eta).sqrt()
    }

    /// `mu = alpha' / sqrt(omega0^2 - eta^2)`.
    pub fn mu(&self, alpha_dot: f64) -> f64 {
        alpha_dot / self.gap()
    }

    /// `s = 1 / (A cos(eta T + delta))`.
    pub fn s(&self, big_t: f64) -> Result<f64> {
        Ok(1.0 / self.v(big_t)?)
    }

    /// `v'' + Xi^2 v` with `Xi^2 = omega0^2 - alpha'^2 / mu^2`, second
    /// derivative by central differences.
    pub fn oscillator_residual(&self, big_t: f64, alpha_dot: f64) -> Result<f64> {
        let xi_sq = self.omega0 * self.omega0 - (alpha_dot / self.mu(alpha_dot)).powi(2);
        let v = self.v(big_t)?;
        let v2 = numdiff::second_derivative(|u| self.amplitude * (self.eta * u + self.delta).cos(), big_t, 1e-3);
        Ok(v2 + xi_sq * v)
    }

    /// `v'' + omega0^2 v - alpha'^2 / v^3`.
    pub fn pinney_residual(&self, big_t: f64, alpha_dot: f64) -> Result<f64> {
        let v = self.v(big_t)?;
        Ok(self.v_second(big_t) + self.omega0 * self.omega0 * v - alpha_dot * alpha_dot / v.powi(3))
    }
}

impl ScaleLaw for PinneyParticular {
    fn v(&self, big_t: f64) -> Result<f64> {
        let c = (self.eta * big_t + self.delta).cos();
        if c.abs() <= 1e-12 {
            return Err(Error::Pole { t: big_t });
        }
        Ok(self.amplitude * c)
    }

    fn v_prime(&self, big_t: f64) -> f64 {
        -self.amplitude * self.eta * (self.eta * big_t + self.delta).sin()
    }

    fn v_second(&self, big_t: f64) -> f64 {
        -self.amplitude * self.eta * self.eta * (self.eta * big_t + self.delta).cos()
    }
}

/// Residuals of the identification at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentificationSample {
    pub tau: f64,
    pub m0: f64,
    /// `(m s^2 / mu)(alpha'^2 + Omega^2) - m0 omega0^2`, relative.
    pub frequency_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationReport {
    pub samples: Vec<IdentificationSample>,
    /// `max |m0(tau) - m0(tau_0)| / |m0(tau_0)|`.
    pub m0_drift: f64,
    pub max_frequency_residual: f64,
}

impl IdentificationReport {
    pub fn holds(&self) -> bool {
        self.m0_drift <= IDENTIFICATION_TOL && self.max_frequency_residual <= IDENTIFICATION_TOL
    }
}

/// Rotating-frame reduction of the oscillating-field problem, with the
/// particular Pinney scale law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameReduction {
    pub params: MagneticParams,
    pub law: PinneyParticular,
}

pub fn frame_reduce(mp: &MagneticParams, law: PinneyParticular) -> Result<FrameReduction> {
    mp.validate()?;
    Ok(FrameReduction { params: *mp, law })
}

impl FrameReduction {
    fn coupling(&self) -> f64 {
        self.params.gamma * self.params.b1 / (2.0 * self.params.light_c)
    }

    /// `alpha'(tau) = -gamma B1 cos(omega tau) / 2c`.
    pub fn rotation_rate(&self, tau: f64) -> f64 {
        -self.coupling() * (self.params.omega_field * tau).cos()
    }

    pub fn rotation_acceleration(&self, tau: f64) -> f64 {
        let w = self.params.omega_field;
        self.coupling() * w * (w * tau).sin()
    }

    /// `alpha(tau)` with `alpha(0) = 0`.
    pub fn rotation_angle(&self, tau: f64) -> f64 {
        let w = self.params.omega_field;
        if w == 0.0 {
            -self.coupling() * tau
        } else {
            -self.coupling() * (w * tau).sin() / w
        }
    }

    /// True when the field has no oscillating part, so nothing couples.
    pub fn is_uncoupled(&self) -> bool {
        self.params.b1 == 0.0
    }

    /// `mu = dT/dtau`.
    pub fn mu(&self, tau: f64) -> f64 {
        self.law.mu(self.rotation_rate(tau))
    }

    /// `T(tau) = integral of mu`, `T(0) = 0`.
    pub fn rescaled_time(&self, tau: f64) -> f64 {
        self.rotation_angle(tau) / self.law.gap()
    }

    /// `(s, ds/dT, d^2s/dT^2)` at `tau`.
    fn scale(&self, tau: f64) -> Result<(f64, f64, f64)> {
        let big_t = self.rescaled_time(tau);
        let v = self.law.v(big_t)?;
        let v1 = self.law.v_prime(big_t);
        let v2 = self.law.v_second(big_t);
        let s = 1.0 / v;
        let s1 = -v1 / (v * v);
        let s2 = 2.0 * v1 * v1 / v.powi(3) - v2 / (v * v);
        Ok((s, s1, s2))
    }

    /// `Omega^2 = (mu / m s^2) d/dT(m mu s s') - mu^2 (s'/s)^2`.
    pub fn frame_frequency_sq(&self, tau: f64) -> Result<f64> {
        let (s, s1, s2) = self.scale(tau)?;
        let mu = self.mu(tau);
        let mu_dot = self.law.mu(self.rotation_acceleration(tau));
        Ok(mu_dot * s1 / s + mu * mu * s2 / s)
    }

    /// Quadratic phase `m mu s s' z~^2 / 2 + i ln s^(1/2)`.
    pub fn phase(&self, z: f64, tau: f64) -> Result<Complex64> {
        let (s, s1, _) = self.scale(tau)?;
        let m = self.params.mass;
        Ok(Complex64::new(0.5 * m * self.mu(tau) * s * s1 * z * z, 0.0) + self.time_phase(tau)?)
    }

    /// `i ln s^(1/2)`.
    pub fn time_phase(&self, tau: f64) -> Result<Complex64> {
        let (s, _, _) = self.scale(tau)?;
        Ok(Complex64::new(0.0, 1.0) * Complex64::new(s, 0.0).sqrt().ln())
    }

    /// `m0 = m s^2 mu`.
    pub fn m0(&self, tau: f64) -> Result<f64> {
        let (s, _, _) = self.scale(tau)?;
        Ok(self.params.mass * s * s * self.mu(tau))
    }

    /// `Xi^2 = omega0^2 - alpha'^2 / mu^2`.
    pub fn effective_frequency_sq(&self, tau: f64) -> f64 {
        let rate = self.rotation_rate(tau);
        self.law.omega0 * self.law.omega0 - (rate / self.mu(tau)).powi(2)
    }

    pub fn identification(&self, taus: &[f64]) -> Result<IdentificationReport> {
        if taus.is_empty() {
            return Err(Error::InvalidGrid("no sample times"));
        }
        let w0 = self.law.omega0;
        let mut samples = Vec::with_capacity(taus.len());
        for &tau in taus {
            let (s, _, _) = self.scale(tau)?;
            let mu = self.mu(tau);
            let m0 = self.m0(tau)?;
            let rate = self.rotation_rate(tau);
            let lhs = self.params.mass * s * s / mu * (rate * rate + self.frame_frequency_sq(tau)?);
            let rhs = m0 * w0 * w0;
            samples.push(IdentificationSample {
                tau,
                m0,
                frequency_residual: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE),
            });
        }
        let reference = samples[0].m0;
        let m0_drift = samples
            .iter()
            .map(|p| (p.m0 - reference).abs() / reference.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let max_frequency_residual = samples.iter().map(|p| p.frequency_residual).fold(0.0, f64::max);
        Ok(IdentificationReport {
            samples,
            m0_drift,
            max_frequency_residual,
        })
    }

    /// Like [`identification`](Self::identification), failing when either
    /// residual exceeds `1e-8`.
    pub fn verify_identification(&self, taus: &[f64]) -> Result<IdentificationReport> {
        let report = self.identification(taus)?;
        if !report.holds() {
            return Err(Error::IdentificationViolated {
                m0_drift: report.m0_drift,
                frequency_residual: report.max_frequency_residual,
            });
        }
        Ok(report)
    }
}

/// Samples of a Pinney solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PinneySolution {
    pub grid: Vec<f64>,
    pub v: Vec<f64>,
    pub v_dot: Vec<f64>,
}

/// Integrates `v'' + omega0^2 v = alpha'(t)^2 / v^3` from `(v0, v_dot0)`
/// at `grid[0]`.
pub fn pinney_solve<F: Fn(f64) -> f64>(omega0: f64, alpha_dot: F, init: (f64, f64), grid: &[f64]) -> Result<PinneySolution> {
    pinney_solve_with(omega0, alpha_dot, init, grid, Tolerance::default())
}

pub fn pinney_solve_with<F: Fn(f64) -> f64>(
    omega0: f64,
    alpha_dot: F,
    init: (f64, f64),
    grid: &[f64],
    tol: Tolerance,
) -> Result<PinneySolution> {
    crate::ode::check_grid(grid)?;
    if init.0.abs() < COLLAPSE_EPS {
        return Err(Error::Collapse { t: grid[0], v: init.0 });
    }
    let w2 = omega0 * omega0;
    let rhs = |t: f64, y: &[f64; 2]| {
        let k = alpha_dot(t);
        [y[1], k * k / y[0].powi(3) - w2 * y[0]]
    };
    let mut stepper = Stepper::new(rhs, grid[0], [init.0, init.1], tol);
    let mut out = PinneySolution {
        grid: grid.to_vec(),
        v: vec![init.0],
        v_dot: vec![init.1],
    };
    for &t in &grid[1..] {
        let mut collapse: Option<(f64, f64)> = None;
        let mut last = stepper.y()[0];
        let advanced = stepper.advance_to(t, |ts, y| {
            // Crossing zero inside a step also counts.
            if collapse.is_none() && (y[0].abs() < COLLAPSE_EPS || y[0].signum() != last.signum()) {
                collapse = Some((ts, y[0]));
            }
            last = y[0];
        });
        if let Some((tc, v)) = collapse {
            return Err(Error::Collapse { t: tc, v });
        }
        if let Err(e) = advanced {
            let v = stepper.y()[0];
            return Err(if v.abs() < 1e-4 { Error::Collapse { t: stepper.t(), v } } else { e });
        }
        out.v.push(stepper.y()[0]);
        out.v_dot.push(stepper.y()[1]);
    }
    Ok(out)
}

/// `(v'^2 + omega0^2 v^2 + kappa^2 / v^2) / 2`, conserved when `alpha' = kappa`.
pub fn pinney_energy(omega0: f64, kappa: f64, v: f64, v_dot: f64) -> f64 {
    0.5 * (v_dot * v_dot + omega0 * omega0 * v * v + kappa * kappa / (v * v))
}
