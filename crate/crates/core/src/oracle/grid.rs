//! Split-operator Schrodinger solver for
//! `H = p^2/2 + c(t) p + omega^2 (x - f(t))^2 / 2`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::propagator::{propagate, Grid, QuadraticKernel, WaveFunction};
use crate::scenario::{Scenario, ScenarioKind, ShiftProfile};

pub const STABILITY_LIMIT: f64 = 0.1;
pub const LEAK_LIMIT: f64 = 1e-8;

/// Time-dependent quadratic Hamiltonian on a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticHamiltonian {
    pub omega: f64,
    pub shift: ShiftProfile,
}

impl QuadraticHamiltonian {
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        if s.kind == ScenarioKind::Magnetic {
            return Err(Error::UnsupportedKind {
                op: "evolve_grid",
                kind: s.kind.to_string(),
            });
        }
        Ok(QuadraticHamiltonian {
            omega: s.omega,
            shift: s.shift_profile()?,
        })
    }

    pub fn free() -> Self {
        QuadraticHamiltonian {
            omega: 0.0,
            shift: ShiftProfile::None,
        }
    }

    /// Coefficient of `p`.
    pub fn coupling(&self, t: f64) -> f64 {
        self.shift.momentum_coupling(t)
    }

    pub fn potential(&self, x: f64, t: f64) -> f64 {
        let y = x - self.shift.f(t);
        0.5 * self.omega * self.omega * y * y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEvolution {
    pub grid: Grid,
    /// Largest allowed time step; the actual step divides the interval evenly.
    pub dt: f64,
    pub hamiltonian: QuadraticHamiltonian,
    pub hbar: f64,
}

impl GridEvolution {
    pub fn new(hamiltonian: QuadraticHamiltonian, grid: Grid, dt: f64, hbar: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "must be positive",
            });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                value: hbar,
                reason: "must be positive",
            });
        }
        Ok(GridEvolution {
            grid,
            dt,
            hamiltonian,
            hbar,
        })
    }

    /// Solver for a scenario with the step set to `safety` times the largest
    /// stable step over `[0, t_final]`.
    pub fn for_scenario(s: &Scenario, grid: Grid, hbar: f64, t_final: f64, safety: f64) -> Result<Self> {
        let h = QuadraticHamiltonian::from_scenario(s)?;
        let probe = GridEvolution::new(h, grid, 1.0, hbar)?;
        let samples = 200;
        let e_max = (0..=samples)
            .map(|i| probe.energy_scale(t_final * i as f64 / samples as f64))
            .fold(0.0, f64::max);
        GridEvolution::new(h, grid, safety * STABILITY_LIMIT * hbar / e_max, hbar)
    }

    fn momentum_max(&self) -> f64 {
        PI * self.hbar / self.grid.dx
    }

    /// Largest local energy on the grid at time `t`.
    pub fn energy_scale(&self, t: f64) -> f64 {
        let p = self.momentum_max();
        let h = &self.hamiltonian;
        let v = h.potential(self.grid.x_min, t).max(h.potential(self.grid.x_max(), t));
        0.5 * p * p + h.coupling(t).abs() * p + v
    }

    fn momenta(&self) -> Vec<f64> {
        let n = self.grid.n;
        let dk = 2.0 * PI / (n as f64 * self.grid.dx);
        (0..n)
            .map(|k| {
                let idx = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
                self.hbar * dk * idx
            })
            .collect()
    }
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Plans {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Plans {
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }
}

/// Strang splitting `exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2)` with both
/// parts evaluated at the midpoint of each step.
pub fn evolve_grid(ge: &GridEvolution, psi0: &WaveFunction, t_final: f64) -> Result<WaveFunction> {
    if psi0.grid() != ge.grid {
        return Err(Error::InvalidGrid("initial state is not on the solver grid"));
    }
    let norm0 = psi0.l2_norm();
    if psi0.edge_amplitude() > LEAK_LIMIT * norm0 {
        return Err(Error::BoundaryLeak {
            edge: psi0.edge_amplitude(),
            limit: LEAK_LIMIT * norm0,
        });
    }
    if t_final == 0.0 {
        return Ok(psi0.clone());
    }
    let steps = (t_final.abs() / ge.dt).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let n = ge.grid.n;
    let h = &ge.hamiltonian;
    let momenta = ge.momenta();
    let xs = ge.grid.points();
    let mut plans = Plans::new(n);
    let scale = 1.0 / n as f64;
    let mut psi = psi0.values.clone();

    for step in 0..steps {
        let t_mid = (step as f64 + 0.5) * dt;
        let ratio = dt.abs() * ge.energy_scale(t_mid) / ge.hbar;
        if ratio > STABILITY_LIMIT * (1.0 + 1e-12) {
            return Err(Error::UnstableStep { dt, ratio });
        }
        let half_v: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::from_polar(1.0, -0.5 * dt * h.potential(x, t_mid) / ge.hbar))
            .collect();
        let coupling = h.coupling(t_mid);
        for (v, k) in psi.iter_mut().zip(&half_v) {
            *v *= k;
        }
        plans.forward.process_with_scratch(&mut psi, &mut plans.scratch);
        for (v, &p) in psi.iter_mut().zip(&momenta) {
            *v *= Complex64::from_polar(scale, -dt * (0.5 * p * p + coupling * p) / ge.hbar);
        }
        plans.inverse.process_with_scratch(&mut psi, &mut plans.scratch);
        for (v, k) in psi.iter_mut().zip(&half_v) {
            *v *= k;
        }
    }

    let out = WaveFunction {
        x_min: psi0.x_min,
        dx: psi0.dx,
        values: psi,
    };
    if out.edge_amplitude() > LEAK_LIMIT * norm0 {
        return Err(Error::BoundaryLeak {
            edge: out.edge_amplitude(),
            limit: LEAK_LIMIT * norm0,
        });
    }
    Ok(out)
}

/// Distances between kernel-propagated and grid-evolved states, relative to
/// the initial norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    /// `|| |psi_K| - |psi_grid| ||`.
    pub mod_err: f64,
    /// `min over phi of || psi_K - exp(i phi) psi_grid ||`.
    pub phase_err: f64,
    /// Minimizing global phase.
    pub global_phase: f64,
}

pub fn compare_states(kernel_state: &WaveFunction, grid_state: &WaveFunction, reference_norm: f64) -> Result<OracleComparison> {
    let overlap = grid_state.inner(kernel_state)?;
    let global_phase = overlap.arg();
    let rot = Complex64::from_polar(1.0, global_phase);
    let dx = kernel_state.dx;
    let (mut m, mut p) = (0.0, 0.0);
    for (a, b) in kernel_state.values.iter().zip(&grid_state.values) {
        m += (a.norm() - b.norm()).powi(2);
        p += (a - rot * b).norm_sqr();
    }
    Ok(OracleComparison {
        mod_err: (dx * m).sqrt() / reference_norm,
        phase_err: (dx * p).sqrt() / reference_norm,
        global_phase,
    })
}

/// Propagates `psi0` with the kernel and with the grid solver and compares.
pub fn kernel_vs_oracle<K: QuadraticKernel + ?Sized>(
    s: &Scenario,
    kernel: &K,
    psi0: &WaveFunction,
    t: f64,
) -> Result<OracleComparison> {
    let ge = GridEvolution::for_scenario(s, psi0.grid(), kernel.hbar(), t, 0.95)?;
    kernel_vs_oracle_with(&ge, kernel, psi0, t)
}

pub fn kernel_vs_oracle_with<K: QuadraticKernel + ?Sized>(
    ge: &GridEvolution,
    kernel: &K,
    psi0: &WaveFunction,
    t: f64,
) -> Result<OracleComparison> {
    let by_kernel = propagate(kernel, psi0, t)?;
    let by_grid = evolve_grid(ge, psi0, t)?;
    compare_states(&by_kernel, &by_grid, psi0.l2_norm())
}
