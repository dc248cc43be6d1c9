use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qhj_core::classical::{classical_path, classical_trajectory, constants_from_initial, eom_residual, newton_oracle};
use qhj_core::hj::{
    closed_form_coefficients, coefficient_odes, integrate_coefficients, magnetic_principal_function,
    magnetic_qhje_residual, principal_function, qhje_residual, MagneticConstants, SigmaConvention, TruncatedAnsatz,
};
use qhj_core::oracle::{
    compare_states, evolve_grid, flip_probability, frame_reduce, pinney_energy, pinney_particular, pinney_solve,
    rotating_frame_field, spin_half_evolution, GridEvolution, Spinor,
};
use qhj_core::propagator::{
    compose, delta_limit_error, kernel_fourier, kernel_from_action, kernel_from_plane_waves, kernel_magnetic, propagate,
    ComposeQuadrature, Grid, QuadraticKernel, SourceShift, WaveFunction,
};
use qhj_core::scenario::{ConstantSet, MagneticParams, Scenario, ScenarioKind};
use qhj_core::{Error, Result};

use crate::report::{Check, Report, Table};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn require_1d(s: &Scenario, op: &'static str) -> Result<()> {
    if s.kind.is_one_dimensional() {
        Ok(())
    } else {
        Err(Error::UnsupportedKind {
            op,
            kind: s.kind.to_string(),
        })
    }
}

fn caustic_free(rng: &mut ChaCha8Rng, omega: f64, c1: f64, t_max: f64, margin: f64) -> f64 {
    loop {
        let t = rng.gen_range(0.0..t_max);
        if (omega * t + c1).cos().abs() >= margin {
            return t;
        }
    }
}

fn regular_time(rng: &mut ChaCha8Rng, omega: f64, t_max: f64) -> f64 {
    loop {
        let t = rng.gen_range(0.0..t_max);
        let (sin, cos) = (omega * t).sin_cos();
        if sin.abs() >= 0.05 && cos.abs() >= 0.05 {
            return t;
        }
    }
}

fn ode_consistency(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<Check> {
    let field = coefficient_odes(s)?;
    let c = ConstantSet::new(0.4, 0.8, Complex64::new(0.3, -0.1));
    let h = 4e-4;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let theta = rng.gen_range(1..=3) as f64 * PI + rng.gen_range(-PI / 3.0..PI / 3.0);
        let t = (theta - c.c1) / s.omega;
        let at = |t: f64| closed_form_coefficients(s, &c, t);
        let d = |step: f64| -> Result<_> { Ok((at(t + step)? - at(t - step)?) * (0.5 / step)) };
        let fine = d(0.5 * h)?;
        let derivative = fine + (fine - d(h)?) * (1.0 / 3.0);
        worst = worst.max((derivative - field.rhs(&at(t)?)).max_norm());
    }
    Ok(Check::at_most("closed_form_coefficients", worst, 1e-9))
}

fn integration(s: &Scenario) -> Result<Check> {
    let c = ConstantSet::new(0.0, 0.7, Complex64::new(0.2, 0.1));
    let init = closed_form_coefficients(s, &c, 0.0)?;
    let grid = linspace(0.0, 0.9 * FRAC_PI_2 / s.omega, 60);
    let traj = integrate_coefficients(s, init, &grid)?;
    let mut worst: f64 = 0.0;
    for (&t, got) in traj.grid.iter().zip(&traj.samples) {
        let exact = closed_form_coefficients(s, &c, t)?;
        worst = worst.max((*got - exact).max_norm() / exact.max_norm().max(1.0));
    }
    Ok(Check::at_most("integrate_coefficients", worst, 1e-8))
}

fn qhje(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<Check> {
    let sets = [
        ConstantSet::plane_wave(s, s.wavevector[0])?,
        ConstantSet::new(0.3, 0.5, Complex64::new(0.1, 0.2)),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let c = sets[i % 2];
        let pf = principal_function(s, c, s.hbar)?;
        let x = rng.gen_range(-3.0..3.0);
        let t = caustic_free(rng, s.omega, c.c1, 5.0, 0.2);
        worst = worst.max(qhje_residual(&pf, s, x, t)?.norm());
    }
    Ok(Check::at_most("qhje_residual", worst, 1e-7))
}

fn truncated(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<Check> {
    let harmonic = Scenario::harmonic(s.omega)?.with_hbar(s.hbar)?;
    let ansatz = TruncatedAnsatz { omega: s.omega, c1: 0.0 };
    let mut smallest = f64::INFINITY;
    for _ in 0..50 {
        let x = rng.gen_range(-3.0..3.0);
        let t = regular_time(rng, s.omega, 6.0);
        smallest = smallest.min(qhje_residual(&ansatz, &harmonic, x, t)?.norm());
    }
    Ok(Check::at_least("qhje_residual/truncated", smallest, 1e-3))
}

fn dual(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<(Check, Check)> {
    let kernel = kernel_fourier(s, s.hbar)?;
    let (mut action, mut waves) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (x, xs) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let t = regular_time(rng, s.omega, 6.0);
        let k = kernel.eval(x, t, xs)?;
        action = action.max((kernel_from_action(s, s.hbar, SourceShift::Initial, x, t, xs)? - k).norm() / k.norm());
        waves = waves.max((kernel_from_plane_waves(s, s.hbar, SourceShift::Initial, x, t, xs)? - k).norm() / k.norm());
    }
    Ok((
        Check::at_most("kernel_from_action", action, 1e-10),
        Check::at_most("kernel_from_plane_waves", waves, 1e-10),
    ))
}

fn delta(s: &Scenario) -> Result<Check> {
    let t = 1e-3;
    let half = 2.7;
    let slope = 2.0 * half / (s.hbar * t);
    let dx = (0.95 * FRAC_PI_2 / slope).min(1e-3);
    let g = WaveFunction::gaussian(Grid::spanning(-half, half, dx)?, 0.0, 0.0, 0.35, s.hbar)?;
    Ok(Check::at_most("delta_limit_error", delta_limit_error(&kernel_fourier(s, s.hbar)?, &g, t)?, 5e-3))
}

fn unitarity(s: &Scenario) -> Result<Check> {
    let kernel = kernel_fourier(s, s.hbar)?;
    let psi0 = WaveFunction::gaussian(Grid::spanning(-10.0, 10.0, 0.01)?, 0.5, 0.5, 1.0, s.hbar)?;
    let mut drift: f64 = 0.0;
    for t in [0.3, 0.9, 1.5, 2.1, 2.7] {
        if (s.omega * t).sin().abs() < 0.1 {
            continue;
        }
        drift = drift.max((propagate(&kernel, &psi0, t)?.norm() - psi0.norm()).abs());
    }
    Ok(Check::at_most("propagate", drift, 1e-6))
}

fn semigroup(s: &Scenario) -> Result<Check> {
    let kernel = kernel_fourier(s, s.hbar)?;
    let axis = linspace(-3.0, 3.0, 13);
    let points: Vec<(f64, f64)> = axis.iter().flat_map(|&x| axis.iter().map(move |&xs| (x, xs))).collect();
    let table = compose(&kernel, 0.3, 0.7, &points, &ComposeQuadrature::new(10.0, 20.0, 0.005)?)?;
    let mut worst: f64 = 0.0;
    for (&(x, xs), v) in points.iter().zip(&table) {
        worst = worst.max((v - kernel.eval(x, 0.7, xs)?).norm());
    }
    Ok(Check::at_most("compose", worst, 1e-6))
}

fn oracle(s: &Scenario) -> Result<(Check, Check)> {
    let grid = Grid::new(-12.0, 24.0 / 512.0, 512)?;
    let psi0 = WaveFunction::gaussian(grid, 1.0, 0.5, 0.8, s.hbar)?;
    let ge = GridEvolution::for_scenario(s, grid, s.hbar, 1.0, 0.95)?;
    let by_kernel = propagate(&kernel_fourier(s, s.hbar)?, &psi0, 1.0)?;
    let cmp = compare_states(&by_kernel, &evolve_grid(&ge, &psi0, 1.0)?, psi0.l2_norm())?;
    let phase = if s.kind == ScenarioKind::Harmonic {
        Check::at_most("kernel_vs_oracle/phase", cmp.phase_err, 1e-4)
    } else {
        Check::reported("kernel_vs_oracle/phase", cmp.phase_err, 1e-4)
    };
    Ok((Check::at_most("kernel_vs_oracle/modulus", cmp.mod_err, 1e-4), phase))
}

fn classical(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<(Check, Check)> {
    let grid = linspace(0.0, 10.0, 201);
    let (mut eom, mut newton) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let (x0, v0) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let fit = constants_from_initial(s, x0, v0)?;
        for _ in 0..10 {
            let t = rng.gen_range(0.0..10.0);
            let x = |t: f64| classical_trajectory(s, &fit.constants, fit.branch, t).expect("fitted radicand is non-negative");
            eom = eom.max(eom_residual(s, x, t, 1e-3)?.abs());
        }
        let path = classical_path(s, &fit.constants, fit.branch, &grid)?;
        newton = newton.max(path.sup_distance(&newton_oracle(s, x0, v0, &grid)?)?);
    }
    Ok((Check::at_most("eom_residual", eom, 1e-7), Check::at_most("newton_oracle", newton, 1e-6)))
}

fn push_pair(report: &mut Report, names: [(&str, f64); 2], pair: Result<(Check, Check)>) {
    match pair {
        Ok((a, b)) => {
            report.push(a);
            report.push(b);
        }
        Err(e) => {
            for (name, tol) in names {
                report.push(Check::failed(name, tol, &e));
            }
        }
    }
}

/// Full invariant suite for a one-dimensional scenario; magnetic configs get
/// [`magnetic_suite`].
pub fn check_suite(s: &Scenario, seed: u64) -> Result<Report> {
    if s.kind == ScenarioKind::Magnetic {
        return magnetic_suite(s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("check", s.to_config());
    report.env("hbar", s.hbar);
    report.env("seed", seed as f64);
    report.env("oracle_grid_points", 512.0);
    report.env("oracle_grid_half_width", 12.0);

    report.record("closed_form_coefficients", 1e-9, ode_consistency(s, &mut rng));
    report.record("integrate_coefficients", 1e-8, integration(s));
    report.record("qhje_residual", 1e-7, qhje(s, &mut rng));
    report.record("qhje_residual/truncated", 1e-3, truncated(s, &mut rng));
    push_pair(&mut report, [("kernel_from_action", 1e-10), ("kernel_from_plane_waves", 1e-10)], dual(s, &mut rng));
    report.record("delta_limit_error", 5e-3, delta(s));
    report.record("propagate", 1e-6, unitarity(s));
    report.record("compose", 1e-6, semigroup(s));
    push_pair(&mut report, [("kernel_vs_oracle/modulus", 1e-4), ("kernel_vs_oracle/phase", 1e-4)], oracle(s));
    push_pair(&mut report, [("eom_residual", 1e-7), ("newton_oracle", 1e-6)], classical(s, &mut rng));
    Ok(report)
}

fn magnetic_params(s: &Scenario) -> Result<MagneticParams> {
    s.magnetic.ok_or(Error::UnsupportedKind {
        op: "magnetic",
        kind: s.kind.to_string(),
    })
}

fn static_part(mp: &MagneticParams) -> Result<MagneticParams> {
    MagneticParams::new(mp.b0, 0.0, mp.omega_field, mp.gamma, mp.light_c, mp.mass)
}

fn factorization(mp: &MagneticParams, hbar: f64) -> Result<Check> {
    let kernel = kernel_magnetic(mp, hbar)?;
    let free = kernel.longitudinal();
    let mut worst: f64 = 0.0;
    for i in 0..40 {
        let u = i as f64;
        let r = [(0.7 * u).sin() * 2.0, (1.3 * u).cos() * 2.0, (0.4 * u).sin() * 2.0];
        let rs = [(0.9 * u).cos() * 2.0, (0.2 * u).sin() * 2.0, (1.1 * u).cos() * 2.0];
        let t = 0.05 + 0.07 * u;
        if (kernel.frequency() * t).sin().abs() < 0.1 {
            continue;
        }
        let whole = kernel.eval(r, t, rs)?;
        let split = kernel.transverse(r[0], r[1], rs[0], rs[1], t)? * free.eval(r[2], t, rs[2])?;
        worst = worst.max((whole - split).norm() / whole.norm());
    }
    Ok(Check::at_most("kernel_magnetic", worst, 1e-12))
}

fn boundary(mp: &MagneticParams, hbar: f64, k: [f64; 3]) -> Result<(Check, Check)> {
    let conv = SigmaConvention::MassScaled;
    let s = magnetic_principal_function(mp, MagneticConstants::from_boundary(mp, hbar, k, conv), hbar, conv)?;
    let mut worst: f64 = 0.0;
    let mut qhje: f64 = 0.0;
    for i in 0..30 {
        let u = i as f64;
        let r = [(0.7 * u).sin() * 2.5, (1.3 * u).cos() * 2.5, (0.4 * u).cos() * 2.5];
        let plane = hbar * (k[0] * r[0] + k[1] * r[1] + k[2] * r[2]);
        worst = worst.max((s.eval(r, 0.0)? - plane).norm());
        let t = (0.05 + 0.1 * u) / mp.larmor().abs();
        if (mp.larmor() * t).cos().abs() > 0.2 {
            qhje = qhje.max(magnetic_qhje_residual(&s, mp, hbar, r, t)?.norm());
        }
    }
    Ok((
        Check::at_most("magnetic_principal_function", worst, 1e-12),
        Check::at_most("magnetic_qhje_residual", qhje, 1e-7),
    ))
}

fn rabi(mp: &MagneticParams) -> Result<Check> {
    let b = rotating_frame_field(mp);
    let b2 = b[0] * b[0] + b[2] * b[2];
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let t = 0.2 * i as f64;
        let s = spin_half_evolution(mp, Spinor::up(), t)?;
        let expected = if b2 == 0.0 { 0.0 } else { b[0] * b[0] / b2 * (0.5 * mp.gamma * b2.sqrt() * t).sin().powi(2) };
        worst = worst.max((s.populations().1 - expected).abs());
    }
    Ok(Check::at_most("spin_half_evolution", worst, 1e-12))
}

fn flip(mp: &MagneticParams) -> Result<Check> {
    let b1 = if mp.b1 != 0.0 { mp.b1 } else { 0.25 };
    let tuned = MagneticParams::new(mp.b0, b1, -mp.gamma * mp.b0, mp.gamma, mp.light_c, mp.mass)?;
    let p = flip_probability(&tuned, PI / (mp.gamma * b1).abs());
    Ok(Check::at_most("flip_probability", (p - 1.0).abs(), 1e-10))
}

fn pinney(mp: &MagneticParams) -> Result<(Check, Check)> {
    let coupling = mp.gamma * mp.b1 / (2.0 * mp.light_c);
    let kappa = if coupling != 0.0 { coupling } else { 0.8 };
    let w0 = 1.3;
    let law = pinney_particular(1.3, 0.4, 0.2, 1.1)?;
    let mut oscillator: f64 = 0.0;
    for i in 0..100 {
        oscillator = oscillator.max(law.oscillator_residual(0.03 * i as f64, kappa)?.abs());
    }
    let grid = linspace(0.0, 50.0, 501);
    let sol = pinney_solve(w0, |_| kappa, (1.0, 0.4), &grid)?;
    let e0 = pinney_energy(w0, kappa, sol.v[0], sol.v_dot[0]);
    let drift = sol
        .v
        .iter()
        .zip(&sol.v_dot)
        .map(|(v, vd)| (pinney_energy(w0, kappa, *v, *vd) - e0).abs() / e0)
        .fold(0.0, f64::max);
    Ok((Check::at_most("pinney_particular", oscillator, 1e-8), Check::at_most("pinney_solve", drift, 1e-8)))
}

fn identification(mp: &MagneticParams) -> Result<(Check, Check)> {
    let coupling = mp.gamma * mp.b1 / (2.0 * mp.light_c);
    let tilt_rate = if coupling != 0.0 { coupling } else { 0.6 };
    let w0: f64 = 1.2;
    let tilt = MagneticParams::new(mp.b0, 2.0 * tilt_rate * mp.light_c / mp.gamma, 0.0, mp.gamma, mp.light_c, mp.mass)?;
    let law = pinney_particular((tilt_rate * tilt_rate / (w0 * w0)).powf(0.25), 0.0, 0.0, w0)?;
    let taus = linspace(0.0, 4.0, 41);
    let degenerate = frame_reduce(&tilt, law)?.identification(&taus)?;
    let generic = frame_reduce(mp, pinney_particular(1.0, 0.5, 0.1, w0)?)?.identification(&linspace(0.0, 1.0, 21))?;
    Ok((
        Check::at_most(
            "frame_reduce/static",
            degenerate.m0_drift.max(degenerate.max_frequency_residual),
            1e-8,
        ),
        Check::reported("frame_reduce", generic.m0_drift.max(generic.max_frequency_residual), 1e-8),
    ))
}

/// Field, spin, Pinney and frame checks, plus the static-field kernel and
/// principal function.
pub fn magnetic_suite(s: &Scenario) -> Result<Report> {
    let mp = magnetic_params(s)?;
    let mut report = Report::new("magnetic", s.to_config());
    report.env("hbar", s.hbar);
    report.env("larmor", mp.larmor());

    let b = rotating_frame_field(&mp);
    let exact = b == [mp.b1, 0.0, mp.b0 + mp.omega_field / mp.gamma];
    report.push(Check::at_most("rotating_frame_field", if exact { 0.0 } else { 1.0 }, 0.0));
    report.record("spin_half_evolution", 1e-12, rabi(&mp));
    report.record("flip_probability", 1e-10, flip(&mp));
    push_pair(&mut report, [("pinney_particular", 1e-8), ("pinney_solve", 1e-8)], pinney(&mp));
    push_pair(&mut report, [("frame_reduce/static", 1e-8), ("frame_reduce", 1e-8)], identification(&mp));

    if mp.larmor() != 0.0 {
        let fixed = static_part(&mp);
        report.record("kernel_magnetic", 1e-12, fixed.clone().and_then(|f| factorization(&f, s.hbar)));
        push_pair(
            &mut report,
            [("magnetic_principal_function", 1e-12), ("magnetic_qhje_residual", 1e-7)],
            fixed.and_then(|f| boundary(&f, s.hbar, s.wavevector)),
        );
    }
    Ok(report)
}

/// `K(x, t; x~, 0)` on `grid` x `sources`, columns `t, x, x~, re, im`.
pub fn kernel_table(s: &Scenario, t: f64, grid: Grid, sources: &[f64]) -> Result<Table> {
    require_1d(s, "kernel")?;
    let kernel = kernel_fourier(s, s.hbar)?;
    let st = kernel.structure(t)?;
    let mut table = Table::new(vec!["t", "x", "x_source", "re", "im"]);
    for i in 0..grid.n {
        let x = grid.x(i);
        for &xs in sources {
            let k = st.eval(x, xs);
            table.push(vec![t, x, xs, k.re, k.im]);
        }
    }
    Ok(table)
}

/// Gaussian initial state parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub x0: f64,
    pub p0: f64,
    pub width: f64,
}

/// Propagated state on `grid`, columns `t, x, re, im`, and the norm check.
pub fn propagate_table(s: &Scenario, psi0: GaussianState, t: f64, grid: Grid) -> Result<(Table, Report)> {
    require_1d(s, "propagate")?;
    let start = WaveFunction::gaussian(grid, psi0.x0, psi0.p0, psi0.width, s.hbar)?;
    let psi = propagate(&kernel_fourier(s, s.hbar)?, &start, t)?;
    let mut table = Table::new(vec!["t", "x", "re", "im"]);
    for (i, v) in psi.values.iter().enumerate() {
        table.push(vec![t, psi.x(i), v.re, v.im]);
    }
    let mut report = Report::new("propagate", s.to_config());
    report.env("hbar", s.hbar);
    report.env("t", t);
    report.env("dx", grid.dx);
    report.push(Check::at_most("propagate", (psi.norm() - start.norm()).abs(), 1e-6));
    report.push(Check::reported("propagate/mean_position", psi.mean_position(), 0.0));
    Ok((table, report))
}

/// Trajectory from the principal function next to the Newton solution,
/// columns `t, x, x_newton`.
pub fn classical_table(s: &Scenario, x0: f64, v0: f64, t_max: f64, samples: usize) -> Result<(Table, Report)> {
    require_1d(s, "classical")?;
    let grid = linspace(0.0, t_max, samples.max(2));
    let fit = constants_from_initial(s, x0, v0)?;
    let path = classical_path(s, &fit.constants, fit.branch, &grid)?;
    let newton = newton_oracle(s, x0, v0, &grid)?;
    let mut table = Table::new(vec!["t", "x", "x_newton"]);
    for i in 0..grid.len() {
        table.push(vec![grid[i], path.x[i], newton.x[i]]);
    }
    let x = |t: f64| classical_trajectory(s, &fit.constants, fit.branch, t).expect("fitted radicand is non-negative");
    let eom = grid.iter().map(|&t| eom_residual(s, x, t, 1e-3).map(f64::abs)).try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))?;
    let mut report = Report::new("classical", s.to_config());
    report.env("x0", x0);
    report.env("v0", v0);
    report.env("tmax", t_max);
    report.push(Check::at_most("eom_residual", eom, 1e-7));
    report.push(Check::at_most("newton_oracle", path.sup_distance(&newton)?, 1e-6));
    Ok((table, report))
}
