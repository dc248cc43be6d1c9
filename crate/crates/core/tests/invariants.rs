use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qhj_core::classical::{classical_trajectory, constants_from_initial, Branch};
use qhj_core::hj::{closed_form_coefficients, integrate_coefficients, principal_function, unwound_ln_cos};
use qhj_core::numdiff::derivative;
use qhj_core::oracle::{pinney_particular, spin_half_evolution, Spinor};
use qhj_core::propagator::{kernel_fourier, kernel_magnetic, propagate, Grid, QuadraticKernel, WaveFunction};
use qhj_core::scenario::{parse_scenario, ConstantSet, MagneticParams, Scenario};

fn one_dimensional() -> impl Strategy<Value = Scenario> {
    let omega = 0.3..2.5f64;
    prop_oneof![
        omega.clone().prop_map(|w| Scenario::harmonic(w).unwrap()),
        (omega.clone(), -1.0..1.0f64, 0.1..3.0f64)
            .prop_filter("away from resonance", |(w, _, big)| (w - big).abs() > 0.1)
            .prop_map(|(w, h, big)| Scenario::driven(w, h, big).unwrap()),
        (omega, -1.0..1.0f64).prop_map(|(w, h)| Scenario::resonance(w, h).unwrap()),
    ]
}

fn any_scenario() -> impl Strategy<Value = Scenario> {
    let magnetic = (0.1..3.0f64, 0.0..1.0f64, -3.0..3.0f64, 0.5..3.0f64, 0.5..2.0f64, 0.5..3.0f64, -2.0..2.0f64)
        .prop_map(|(b0, b1, w, g, c, m, kx)| {
            let mp = MagneticParams::new(b0, b1, w, g, c, m).unwrap();
            Scenario::magnetic(mp).unwrap().with_wavevector([kx, -0.5 * kx, 0.25])
        });
    prop_oneof![one_dimensional(), magnetic]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_velocity_is_the_time_derivative(s in one_dimensional(), t in 0.0..10.0f64) {
        let shift = s.shift_profile().unwrap();
        let fd = derivative(|u| shift.f(u), t, 1e-3);
        prop_assert!((fd - shift.eval(t).1).abs() < 1e-8);
    }

    #[test]
    fn config_round_trip(s in any_scenario(), hbar in 0.1..2.0f64) {
        let s = s.with_hbar(hbar).unwrap();
        let back = parse_scenario(&s.to_config()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn action_is_quadratic_in_x(
        s in one_dimensional(),
        c1 in -1.0..1.0f64,
        c2 in -2.0..2.0f64,
        t in 0.0..6.0f64,
    ) {
        prop_assume!((s.omega * t + c1).cos().abs() > 0.1);
        let pf = principal_function(&s, ConstantSet::new(c1, c2, Complex64::new(0.2, -0.3)), s.hbar).unwrap();
        let at = |x: f64| pf.eval(x, t).unwrap();
        let scale = [-1.0, 0.0, 1.0, 2.0].iter().map(|&x| at(x).norm()).fold(1.0, f64::max);
        let cubic = (at(2.0) - at(1.0) * 3.0 + at(0.0) * 3.0 - at(-1.0)) / 6.0;
        prop_assert!(cubic.norm() <= 1e-10 * scale);
    }

    #[test]
    fn quantum_correction_is_the_logarithm(
        s in one_dimensional(),
        c1 in -1.0..1.0f64,
        c2 in -2.0..2.0f64,
        x in -3.0..3.0f64,
        t in 0.0..6.0f64,
        hbar in 0.1..2.0f64,
    ) {
        let theta = s.omega * t + c1;
        prop_assume!(theta.cos().abs() > 0.05);
        let c = ConstantSet::new(c1, c2, Complex64::new(0.4, 0.0));
        let quantum = principal_function(&s, c, hbar).unwrap().eval(x, t).unwrap();
        let classical = principal_function(&s, c, 0.0).unwrap().eval(x, t).unwrap();
        let expected = Complex64::new(0.0, 0.5 * hbar) * unwound_ln_cos(theta);
        prop_assert!((quantum - classical - expected).norm() < 1e-12 * quantum.norm().max(1.0));
    }

    #[test]
    fn harmonic_kernel_is_symmetric(omega in 0.3..2.5f64, x in -3.0..3.0f64, xs in -3.0..3.0f64, t in 0.01..6.0f64) {
        prop_assume!((omega * t).sin().abs() > 0.05);
        let k = kernel_fourier(&Scenario::harmonic(omega).unwrap(), 1.0).unwrap();
        let (a, b) = (k.eval(x, t, xs).unwrap(), k.eval(xs, t, x).unwrap());
        prop_assert!((a - b).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn kernel_modulus_matches_prefactor(s in one_dimensional(), x in -3.0..3.0f64, xs in -3.0..3.0f64, t in 0.01..6.0f64) {
        let sin = (s.omega * t).sin();
        prop_assume!(sin.abs() > 0.05);
        let k = kernel_fourier(&s, 1.0).unwrap();
        let expected = (s.omega / (2.0 * PI * sin.abs())).sqrt();
        prop_assert!((k.eval(x, t, xs).unwrap().norm() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn magnetic_kernel_reverses_under_source_swap(
        b0 in 0.2..2.0f64,
        m in 0.5..2.0f64,
        r in prop::array::uniform3(-2.0..2.0f64),
        rs in prop::array::uniform3(-2.0..2.0f64),
        t in 0.01..3.0f64,
    ) {
        let mp = MagneticParams::new(b0, 0.0, 1.0, 2.0, 1.0, m).unwrap();
        prop_assume!((mp.larmor() * t).sin().abs() > 0.05);
        let k = kernel_magnetic(&mp, 1.0).unwrap();
        // Swapping source and target flips the sense of rotation.
        let reversed = kernel_magnetic(&MagneticParams::new(-b0, 0.0, 1.0, 2.0, 1.0, m).unwrap(), 1.0).unwrap();
        let (a, b) = (k.eval(r, t, rs).unwrap(), reversed.eval(rs, t, r).unwrap());
        prop_assert!((a - b).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn spin_evolution_preserves_norm(
        b0 in -2.0..2.0f64,
        b1 in 0.0..1.0f64,
        w in -3.0..3.0f64,
        t in 0.0..20.0f64,
        angle in 0.0..PI,
    ) {
        let mp = MagneticParams::new(b0, b1, w, 2.0, 1.0, 1.0).unwrap();
        let s0 = Spinor::new(Complex64::new(angle.cos(), 0.0), Complex64::new(0.0, angle.sin())).unwrap();
        let s = spin_half_evolution(&mp, s0, t).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn constant_scale_solves_pinney(a in 0.3..2.0f64, omega0 in 0.3..2.0f64, big_t in 0.0..5.0f64) {
        let law = pinney_particular(a, 0.0, 0.0, omega0).unwrap();
        let kappa = a * a * omega0;
        prop_assert!(law.pinney_residual(big_t, kappa).unwrap().abs() < 1e-12 * a * omega0 * omega0);
    }

    #[test]
    fn initial_fit_reproduces_data(s in one_dimensional(), x0 in -2.0..2.0f64, v0 in -2.0..2.0f64) {
        let fit = constants_from_initial(&s, x0, v0).unwrap();
        let x = |t: f64| classical_trajectory(&s, &fit.constants, fit.branch, t).unwrap();
        prop_assert!((x(0.0) - x0).abs() < 1e-12);
        prop_assert!((derivative(x, 0.0, 1e-4) - v0).abs() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn integrated_coefficients_track_closed_forms(s in one_dimensional(), c1 in -0.5..0.5f64, c2 in -1.0..1.0f64) {
        let c = ConstantSet::new(c1, c2, Complex64::new(0.1, 0.0));
        let init = closed_form_coefficients(&s, &c, 0.0).unwrap();
        let end = (PI / 2.0 - c1 - 0.1) / s.omega;
        prop_assume!(end > 0.1);
        let grid: Vec<f64> = (0..=20).map(|i| end * i as f64 / 20.0).collect();
        let traj = integrate_coefficients(&s, init, &grid).unwrap();
        for (&t, got) in traj.grid.iter().zip(&traj.samples) {
            let exact = closed_form_coefficients(&s, &c, t).unwrap();
            prop_assert!((*got - exact).max_norm() <= 1e-8 * exact.max_norm().max(1.0));
        }
    }

    #[test]
    fn propagation_is_unitary(s in one_dimensional(), x0 in -1.0..1.0f64, p0 in -1.0..1.0f64, w in 0.7..1.3f64, t in 0.2..2.8f64) {
        prop_assume!((s.omega * t).sin().abs() > 0.3);
        let grid = Grid::spanning(-10.0, 10.0, 0.005).unwrap();
        let psi0 = WaveFunction::gaussian(grid, x0, p0, w, 1.0).unwrap();
        let psi = propagate(&kernel_fourier(&s, 1.0).unwrap(), &psi0, t).unwrap();
        prop_assert!((psi.norm() - psi0.norm()).abs() < 1e-6);
    }
}

#[test]
fn branches_are_mirror_images_about_the_shift() {
    let s = Scenario::driven(1.1, 0.4, 0.6).unwrap();
    let c = ConstantSet::new(0.2, 0.0, 0.0.into()).with_b(-0.9);
    let shift = s.shift_profile().unwrap();
    for i in 0..40 {
        let t = 0.25 * i as f64;
        let plus = classical_trajectory(&s, &c, Branch::Plus, t).unwrap() - shift.f(t);
        let minus = classical_trajectory(&s, &c, Branch::Minus, t).unwrap() - shift.f(t);
        assert!((plus + minus).abs() < 1e-14);
    }
}
