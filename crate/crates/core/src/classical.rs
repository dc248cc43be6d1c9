//! Classical trajectories from the principal function and from Newton's law.
//!
//! With `hbar = 0` the condition `dS/dc1 = B` gives
//! `x(t) = (c2/omega) sin(theta) +- sqrt(-c2^2/omega^2 - 2B/omega) cos(theta) + f(t)`
//! with `theta = omega t + c1`.

use crate::error::{Error, Result};
use crate::ode::{self, Tolerance};
use crate::scenario::{ConstantSet, Scenario, ScenarioKind, ShiftProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectorySource {
    FromAction,
    Newton,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub grid: Vec<f64>,
    pub x: Vec<f64>,
    pub source: TrajectorySource,
}

impl ClassicalTrajectory {
    /// Largest pointwise difference; the grids must coincide.
    pub fn sup_distance(&self, other: &ClassicalTrajectory) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("trajectories are sampled on different grids"));
        }
        Ok(self.x.iter().zip(&other.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

fn shift_of(s: &Scenario, op: &'static str) -> Result<ShiftProfile> {
    if s.kind == ScenarioKind::Magnetic {
        return Err(Error::UnsupportedKind {
            op,
            kind: s.kind.to_string(),
        });
    }
    s.shift_profile()
}

/// `-c2^2/omega^2 - 2B/omega`.
pub fn radicand(s: &Scenario, c: &ConstantSet) -> f64 {
    -c.c2 * c.c2 / (s.omega * s.omega) - 2.0 * c.b / s.omega
}

/// Position on the `branch` trajectory at time `t`.
pub fn classical_trajectory(s: &Scenario, c: &ConstantSet, branch: Branch, t: f64) -> Result<f64> {
    let shift = shift_of(s, "classical_trajectory")?;
    let rad = radicand(s, c);
    if rad < 0.0 {
        return Err(Error::NegativeRadicand { radicand: rad });
    }
    let (sin, cos) = (s.omega * t + c.c1).sin_cos();
    Ok(c.c2 / s.omega * sin + branch.sign() * rad.sqrt() * cos + shift.f(t))
}

pub fn classical_path(s: &Scenario, c: &ConstantSet, branch: Branch, grid: &[f64]) -> Result<ClassicalTrajectory> {
    ode::check_grid(grid)?;
    let x = grid
        .iter()
        .map(|&t| classical_trajectory(s, c, branch, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassicalTrajectory {
        grid: grid.to_vec(),
        x,
        source: TrajectorySource::FromAction,
    })
}

/// Integrates `x'' + omega^2 x = drive(t)` from `(x0, v0)` at `grid[0]`.
pub fn newton_oracle(s: &Scenario, x0: f64, v0: f64, grid: &[f64]) -> Result<ClassicalTrajectory> {
    newton_oracle_with(s, x0, v0, grid, Tolerance::default())
}

pub fn newton_oracle_with(s: &Scenario, x0: f64, v0: f64, grid: &[f64], tol: Tolerance) -> Result<ClassicalTrajectory> {
    let shift = shift_of(s, "newton_oracle")?;
    let w2 = s.omega * s.omega;
    let states = ode::integrate_on_grid(|t, y: &[f64; 2]| [y[1], shift.drive(t) - w2 * y[0]], grid, [x0, v0], tol)?;
    Ok(ClassicalTrajectory {
        grid: grid.to_vec(),
        x: states.iter().map(|y| y[0]).collect(),
        source: TrajectorySource::Newton,
    })
}

/// Constants and branch reproducing `x(0) = x0`, `x'(0) = v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialFit {
    pub constants: ConstantSet,
    pub branch: Branch,
}

/// Inverts the trajectory formula at `t = 0` with `c1 = 0`. A particle at
/// rest at the equilibrium gets the zero constant set on the `Plus` branch.
pub fn constants_from_initial(s: &Scenario, x0: f64, v0: f64) -> Result<InitialFit> {
    let shift = shift_of(s, "constants_from_initial")?;
    if !x0.is_finite() || !v0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "x0",
            value: if x0.is_finite() { v0 } else { x0 },
            reason: "initial data must be finite",
        });
    }
    let (f0, fdot0) = shift.eval(0.0);
    let offset = x0 - f0;
    let c2 = v0 - fdot0;
    let amplitude = offset.abs();
    let b = -0.5 * s.omega * (amplitude * amplitude + c2 * c2 / (s.omega * s.omega));
    let branch = if offset < 0.0 { Branch::Minus } else { Branch::Plus };
    let mut constants = ConstantSet::new(0.0, c2, 0.0.into()).with_b(b);
    if offset == 0.0 && c2 == 0.0 {
        constants = ConstantSet::new(0.0, 0.0, 0.0.into());
    }
    Ok(InitialFit { constants, branch })
}

/// `x'' + omega^2 x - drive(t)` for a trajectory given as a function,
/// with the second derivative from central differences.
pub fn eom_residual<F: Fn(f64) -> f64>(s: &Scenario, x: F, t: f64, h: f64) -> Result<f64> {
    let shift = shift_of(s, "eom_residual")?;
    let acc = crate::numdiff::second_derivative(&x, t, h);
    Ok(acc + s.omega * s.omega * x(t) - shift.drive(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::principal_function;

    #[test]
    fn harmonic_unit_amplitude() {
        let s = Scenario::harmonic(1.0).unwrap();
        let c = ConstantSet::new(0.0, 0.0, 0.0.into()).with_b(-0.5);
        for i in 0..20 {
            let t = 0.3 * i as f64;
            assert!((classical_trajectory(&s, &c, Branch::Plus, t).unwrap() - t.cos()).abs() < 1e-15);
            assert!((classical_trajectory(&s, &c, Branch::Minus, t).unwrap() + t.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_radicand() {
        let s = Scenario::harmonic(1.0).unwrap();
        let c = ConstantSet::new(0.0, 0.0, 0.0.into()).with_b(0.5);
        assert!(matches!(
            classical_trajectory(&s, &c, Branch::Plus, 0.0),
            Err(Error::NegativeRadicand { .. })
        ));
    }

    #[test]
    fn newton_cosine() {
        let s = Scenario::harmonic(1.0).unwrap();
        let grid: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
        let tr = newton_oracle(&s, 1.0, 0.0, &grid).unwrap();
        for (t, x) in grid.iter().zip(&tr.x) {
            assert!((x - t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn sine_from_initial_data() {
        let s = Scenario::harmonic(1.0).unwrap();
        let fit = constants_from_initial(&s, 0.0, 1.0).unwrap();
        assert_eq!(fit.constants.c2, 1.0);
        assert_eq!(fit.constants.b, -0.5);
        for i in 0..30 {
            let t = 0.2 * i as f64;
            let x = classical_trajectory(&s, &fit.constants, fit.branch, t).unwrap();
            assert!((x - t.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn rest_at_equilibrium() {
        let s = Scenario::driven(1.0, 0.3, 0.5).unwrap();
        let (f0, fd0) = s.shift_profile().unwrap().eval(0.0);
        let fit = constants_from_initial(&s, f0, fd0).unwrap();
        assert_eq!(fit.constants, ConstantSet::new(0.0, 0.0, 0.0.into()));
        let x = classical_trajectory(&s, &fit.constants, fit.branch, 2.0).unwrap();
        assert!((x - s.shift_profile().unwrap().f(2.0)).abs() < 1e-15);
    }

    #[test]
    fn resonance_growth_is_the_particular_solution() {
        let s = Scenario::resonance(1.0, 2.0).unwrap();
        let grid: Vec<f64> = (0..=200).map(|i| 0.1 * i as f64).collect();
        let tr = newton_oracle(&s, 0.0, 0.0, &grid).unwrap();
        for (t, x) in grid.iter().zip(&tr.x) {
            assert!((x - t * t.sin()).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn constraint_on_c1_derivative() {
        // dS/dc1 at hbar = 0 equals B on both branches.
        let s = Scenario::driven(1.2, 0.4, 0.7).unwrap();
        let c = ConstantSet::new(0.3, 0.5, 0.0.into()).with_b(-1.1);
        for branch in [Branch::Plus, Branch::Minus] {
            for i in 0..10 {
                let t = 0.1 * i as f64;
                let x = classical_trajectory(&s, &c, branch, t).unwrap();
                let ds = crate::numdiff::derivative(
                    |c1| {
                        let mut cc = c;
                        cc.c1 = c1;
                        principal_function(&s, cc, 0.0).unwrap().eval(x, t).unwrap().re
                    },
                    c.c1,
                    1e-4,
                );
                assert!((ds - c.b).abs() < 1e-8, "t = {t}: {ds}");
            }
        }
    }

    #[test]
    fn jacobian_of_initial_map_is_nonsingular() {
        let s = Scenario::harmonic(0.8).unwrap();
        let map = |c2: f64, b: f64| {
            let c = ConstantSet::new(0.0, c2, 0.0.into()).with_b(b);
            let x = |t: f64| classical_trajectory(&s, &c, Branch::Plus, t).unwrap();
            (x(0.0), crate::numdiff::derivative(x, 0.0, 1e-4))
        };
        let (c2, b, h) = (0.3, -1.0, 1e-6);
        let (x0, v0) = map(c2, b);
        let (xa, va) = map(c2 + h, b);
        let (xb, vb) = map(c2, b + h);
        let det = ((xa - x0) * (vb - v0) - (xb - x0) * (va - v0)) / (h * h);
        assert!(det.abs() > 0.1);
    }
}
