use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, Stepper, Tolerance};
use crate::scenario::{ConstantSet, Scenario, ScenarioKind};

/// Coefficients of the quadratic ansatz `S = alpha y^2 / 2 + xi y + zeta`,
/// with `y` the (possibly shifted) coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HJCoefficients {
    pub alpha: Complex64,
    pub xi: Complex64,
    pub zeta: Complex64,
}

impl HJCoefficients {
    pub fn new(alpha: Complex64, xi: Complex64, zeta: Complex64) -> Self {
        HJCoefficients { alpha, xi, zeta }
    }

    pub fn real(alpha: f64, xi: f64, zeta: f64) -> Self {
        Self::new(alpha.into(), xi.into(), zeta.into())
    }

    pub fn is_finite(&self) -> bool {
        [self.alpha, self.xi, self.zeta].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest componentwise modulus.
    pub fn max_norm(&self) -> f64 {
        self.alpha.norm().max(self.xi.norm()).max(self.zeta.norm())
    }

    /// `S(y) = alpha y^2 / 2 + xi y + zeta`.
    pub fn action(&self, y: f64) -> Complex64 {
        self.alpha * (0.5 * y * y) + self.xi * y + self.zeta
    }
}

impl Add for HJCoefficients {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.alpha + o.alpha, self.xi + o.xi, self.zeta + o.zeta)
    }
}

impl Sub for HJCoefficients {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.alpha - o.alpha, self.xi - o.xi, self.zeta - o.zeta)
    }
}

impl Mul<f64> for HJCoefficients {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.alpha * s, self.xi * s, self.zeta * s)
    }
}

/// Right-hand side of the coefficient system
///
/// ```text
/// alpha' = -alpha^2 - omega^2
/// xi'    = -alpha xi
/// zeta'  = -xi^2 / 2 + (i hbar / 2) alpha
/// ```
///
/// which is the same for every 1D scenario once the drive is absorbed into
/// the shifted coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientField {
    pub omega: f64,
    pub hbar: f64,
    /// Test hook: pins `alpha' = 0`.
    pub freeze_alpha: bool,
}

impl CoefficientField {
    pub fn rhs(&self, c: &HJCoefficients) -> HJCoefficients {
        let alpha_dot = if self.freeze_alpha {
            Complex64::new(0.0, 0.0)
        } else {
            -(c.alpha * c.alpha) - self.omega * self.omega
        };
        HJCoefficients {
            alpha: alpha_dot,
            xi: -(c.alpha * c.xi),
            zeta: -(c.xi * c.xi) * 0.5 + Complex64::new(0.0, 0.5 * self.hbar) * c.alpha,
        }
    }

    /// Integrates `(alpha, xi, zeta)` directly. Cannot cross a caustic, where
    /// `alpha` has a pole; kept as an independent route for comparisons.
    pub fn integrate_direct(&self, init: HJCoefficients, grid: &[f64], tol: Tolerance) -> Result<Vec<HJCoefficients>> {
        let pack = |c: &HJCoefficients| [c.alpha.re, c.alpha.im, c.xi.re, c.xi.im, c.zeta.re, c.zeta.im];
        let unpack = |y: &[f64; 6]| {
            HJCoefficients::new(
                Complex64::new(y[0], y[1]),
                Complex64::new(y[2], y[3]),
                Complex64::new(y[4], y[5]),
            )
        };
        let states = ode::integrate_on_grid(|_, y: &[f64; 6]| pack(&self.rhs(&unpack(y))), grid, pack(&init), tol)?;
        Ok(states.iter().map(unpack).collect())
    }
}

/// Coefficient vector field for a 1D scenario.
pub fn coefficient_odes(s: &Scenario) -> Result<CoefficientField> {
    if s.kind == ScenarioKind::Magnetic {
        return Err(Error::UnsupportedKind {
            op: "coefficient_odes",
            kind: s.kind.to_string(),
        });
    }
    Ok(CoefficientField {
        omega: s.omega,
        hbar: s.hbar,
        freeze_alpha: false,
    })
}

/// `ln cos(theta)` continued through the zeros of `cos`: the imaginary part
/// gains `+pi` at each zero crossed with increasing `theta`. Agrees with the
/// principal branch for `theta` in `(-pi/2, 3pi/2)`.
pub fn unwound_ln_cos(theta: f64) -> Complex64 {
    let winding = ((theta + 0.5 * PI) / PI).floor();
    Complex64::new(theta.cos().abs().ln(), PI * winding)
}

pub(crate) const CAUSTIC_EPS: f64 = 1e-12;

pub(crate) fn closed_form_raw(omega: f64, hbar: f64, c: &ConstantSet, t: f64) -> Result<HJCoefficients> {
    let theta = omega * t + c.c1;
    let (sin, cos) = theta.sin_cos();
    if cos.abs() <= CAUSTIC_EPS {
        return Err(Error::Caustic { t, cos_abs: cos.abs() });
    }
    let tan = sin / cos;
    let log = unwound_ln_cos(theta);
    Ok(HJCoefficients {
        alpha: Complex64::new(-omega * tan, 0.0),
        xi: Complex64::new(c.c2 / cos, 0.0),
        zeta: Complex64::new(-c.c2 * c.c2 * tan / (2.0 * omega), 0.0) + Complex64::new(0.0, 0.5 * hbar) * log + c.c3,
    })
}

/// Closed-form solution of the coefficient system:
/// `alpha = -omega tan(theta)`, `xi = c2 sec(theta)`,
/// `zeta = -(c2^2 / 2 omega) tan(theta) + (i hbar / 2) ln cos(theta) + c3`,
/// with `theta = omega t + c1`.
pub fn closed_form_coefficients(s: &Scenario, c: &ConstantSet, t: f64) -> Result<HJCoefficients> {
    if s.kind == ScenarioKind::Magnetic {
        return Err(Error::UnsupportedKind {
            op: "closed_form_coefficients",
            kind: s.kind.to_string(),
        });
    }
    closed_form_raw(s.omega, s.hbar, c, t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTrajectory {
    pub grid: Vec<f64>,
    pub samples: Vec<HJCoefficients>,
    /// Set where `|cos(omega t + c1)| < 1e-8`; such samples are unreliable.
    pub caustic_flags: Vec<bool>,
}

impl CoefficientTrajectory {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub const CAUSTIC_FLAG_EPS: f64 = 1e-8;

/// Integrates the coefficient system across caustics.
///
/// The Riccati equation is linearized with `alpha = u'/u`, `u'' + omega^2 u = 0`,
/// normalized to `u(t0) = 1`. With `y1`, `y2` the real fundamental solutions
/// at `t0`, `u = y1 + alpha0 y2` and the remaining coefficients follow in
/// closed form:
///
/// ```text
/// xi   = xi0 / u
/// zeta = zeta0 - (xi0^2 / 2) y2 / u + (i hbar / 2) ln u
/// ```
///
/// where `ln u` is continued along the integration path (each real sign
/// change of `u` adds `+i pi`).
pub fn integrate_coefficients(s: &Scenario, init: HJCoefficients, grid: &[f64]) -> Result<CoefficientTrajectory> {
    integrate_coefficients_with(s, init, grid, Tolerance::default())
}

pub fn integrate_coefficients_with(
    s: &Scenario,
    init: HJCoefficients,
    grid: &[f64],
    tol: Tolerance,
) -> Result<CoefficientTrajectory> {
    let field = coefficient_odes(s)?;
    ode::check_grid(grid)?;
    if !init.is_finite() {
        return Err(Error::InvalidParameter {
            name: "init",
            value: f64::NAN,
            reason: "initial coefficients must be finite",
        });
    }
    let omega2 = field.omega * field.omega;
    let rhs = move |_t: f64, y: &[f64; 4]| [y[1], -omega2 * y[0], y[3], -omega2 * y[2]];
    let u_of = |y: &[f64; 4]| Complex64::new(y[0], 0.0) + init.alpha * y[2];

    let mut stepper = Stepper::new(rhs, grid[0], [1.0, 0.0, 0.0, 1.0], tol);
    let mut last_u = Complex64::new(1.0, 0.0);
    let mut phase = 0.0f64;

    let mut samples = Vec::with_capacity(grid.len());
    let mut flags = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        if i > 0 {
            stepper.advance_to(t, |_, y| {
                let u = u_of(y);
                if u.norm() > 0.0 && last_u.norm() > 0.0 {
                    phase += (u / last_u).arg();
                    last_u = u;
                }
            })?;
        }
        let y = stepper.y();
        let u = u_of(y);
        let u_dot = Complex64::new(y[1], 0.0) + init.alpha * y[3];
        let amplitude = (u.norm_sqr() + u_dot.norm_sqr() / omega2).sqrt();
        flags.push(u.norm() < CAUSTIC_FLAG_EPS * amplitude);

        let log_u = Complex64::new(u.norm().ln(), phase);
        samples.push(HJCoefficients {
            alpha: u_dot / u,
            xi: init.xi / u,
            zeta: init.zeta - init.xi * init.xi * 0.5 * y[2] / u + Complex64::new(0.0, 0.5 * field.hbar) * log_u,
        });
    }
    Ok(CoefficientTrajectory {
        grid: grid.to_vec(),
        samples,
        caustic_flags: flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> Scenario {
        Scenario::harmonic(1.0).unwrap()
    }

    #[test]
    fn field_at_origin() {
        let f = coefficient_odes(&harmonic()).unwrap();
        let d = f.rhs(&HJCoefficients::default());
        assert_eq!(d, HJCoefficients::real(-1.0, 0.0, 0.0));
    }

    #[test]
    fn classical_field_keeps_zeta_real() {
        let f = CoefficientField {
            omega: 1.3,
            hbar: 0.0,
            freeze_alpha: false,
        };
        let d = f.rhs(&HJCoefficients::real(-0.4, 0.7, 0.2));
        assert_eq!(d.zeta.im, 0.0);
    }

    #[test]
    fn closed_form_at_origin() {
        let c = ConstantSet::new(0.0, 1.0, 0.0.into());
        let k = closed_form_coefficients(&harmonic(), &c, 0.0).unwrap();
        assert_eq!(k, HJCoefficients::real(0.0, 1.0, 0.0));
        let k = closed_form_coefficients(&harmonic(), &c, 0.5).unwrap();
        assert!((k.alpha.re + 0.5f64.tan()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_caustic() {
        let c = ConstantSet::new(0.0, 1.0, 0.0.into());
        let err = closed_form_coefficients(&harmonic(), &c, PI / 2.0).unwrap_err();
        assert!(matches!(err, Error::Caustic { .. }));
    }

    #[test]
    fn closed_form_matches_analytic_derivatives() {
        // d/dt of the closed forms, written out by hand.
        for &(omega, c1, c2, hbar) in &[(1.0, 0.0, 1.0, 1.0), (0.5, 0.3, -2.0, 0.7), (2.0, -0.2, 0.4, 1.0)] {
            let s = Scenario::harmonic(omega).unwrap().with_hbar(hbar).unwrap();
            let c = ConstantSet::new(c1, c2, Complex64::new(0.3, -0.1));
            let field = coefficient_odes(&s).unwrap();
            for i in 0..40 {
                let t = (i as f64 / 40.0 - 0.5) * 2.6 / omega;
                let th = omega * t + c1;
                let (sn, cs) = th.sin_cos();
                let sec = 1.0 / cs;
                let tan = sn / cs;
                let exact = HJCoefficients::new(
                    (-omega * omega * sec * sec).into(),
                    (c2 * omega * sec * tan).into(),
                    Complex64::new(-0.5 * c2 * c2 * sec * sec, -0.5 * hbar * omega * tan),
                );
                let k = closed_form_coefficients(&s, &c, t).unwrap();
                let resid = field.rhs(&k) - exact;
                assert!(resid.max_norm() < 1e-10 * (1.0 + exact.max_norm()), "t = {t}");
            }
        }
    }

    #[test]
    fn imaginary_parts_of_closed_form() {
        let s = Scenario::harmonic(1.0).unwrap().with_hbar(0.8).unwrap();
        let c = ConstantSet::new(0.2, 0.9, 0.5.into());
        for i in 0..30 {
            let t = 0.1 * i as f64;
            if ((t + 0.2) as f64).cos().abs() < 1e-3 {
                continue;
            }
            let k = closed_form_coefficients(&s, &c, t).unwrap();
            assert_eq!(k.alpha.im, 0.0);
            assert_eq!(k.xi.im, 0.0);
            assert!((k.zeta.im - 0.4 * (t + 0.2).cos().abs().ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn unwound_log_matches_principal_on_first_two_branches() {
        for i in 1..300 {
            let th = -PI / 2.0 + 2.0 * PI * i as f64 / 300.0;
            if th.cos().abs() < 1e-9 {
                continue;
            }
            let principal = Complex64::new(th.cos(), 0.0).ln();
            assert!((unwound_ln_cos(th) - principal).norm() < 1e-12, "theta = {th}");
        }
        assert!((unwound_ln_cos(2.0 * PI).im - 2.0 * PI).abs() < 1e-15);
        assert!((unwound_ln_cos(-PI).im + PI).abs() < 1e-15);
    }

    #[test]
    fn integration_matches_closed_form() {
        let s = harmonic();
        let c = ConstantSet::new(0.0, 1.0, 0.0.into());
        let grid: Vec<f64> = (0..=140).map(|i| 0.01 * i as f64).collect();
        let init = closed_form_coefficients(&s, &c, 0.0).unwrap();
        let traj = integrate_coefficients(&s, init, &grid).unwrap();
        for (t, k) in grid.iter().zip(&traj.samples) {
            let exact = closed_form_coefficients(&s, &c, *t).unwrap();
            assert!((*k - exact).max_norm() <= 1e-8 * exact.max_norm().max(1.0), "t = {t}");
        }
        assert!(traj.caustic_flags.iter().all(|f| !f));
    }

    #[test]
    fn crosses_the_caustic() {
        let s = harmonic();
        let c = ConstantSet::new(0.0, 1.0, 0.0.into());
        let mut grid: Vec<f64> = (0..=60).map(|i| 0.05 * i as f64).collect();
        grid.push(PI / 2.0);
        grid.sort_by(f64::total_cmp);
        let init = closed_form_coefficients(&s, &c, 0.0).unwrap();
        let traj = integrate_coefficients(&s, init, &grid).unwrap();
        let flagged: Vec<f64> = grid.iter().zip(&traj.caustic_flags).filter(|(_, f)| **f).map(|(t, _)| *t).collect();
        assert_eq!(flagged, vec![PI / 2.0]);
        for (t, k) in grid.iter().zip(&traj.samples) {
            if *t > PI / 2.0 + 0.02 && *t < PI - 0.02 {
                let exact = closed_form_coefficients(&s, &c, *t).unwrap();
                assert!((k.alpha.re + t.tan()).abs() <= 1e-8 * t.tan().abs().max(1.0));
                assert!((*k - exact).max_norm() <= 1e-8 * exact.max_norm().max(1.0), "t = {t}");
            }
        }
    }

    #[test]
    fn frozen_alpha_keeps_xi_constant() {
        let field = CoefficientField {
            omega: 1.0,
            hbar: 1.0,
            freeze_alpha: true,
        };
        let grid: Vec<f64> = (0..=20).map(|i| 0.1 * i as f64).collect();
        let out = field
            .integrate_direct(HJCoefficients::real(0.0, 0.75, 0.0), &grid, Tolerance::default())
            .unwrap();
        assert!(out.iter().all(|k| k.xi == Complex64::new(0.75, 0.0)));
    }

    #[test]
    fn direct_route_agrees_before_caustic() {
        let s = harmonic();
        let c = ConstantSet::new(0.1, -0.5, 0.2.into());
        let grid: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
        let init = closed_form_coefficients(&s, &c, 0.0).unwrap();
        let field = coefficient_odes(&s).unwrap();
        let direct = field.integrate_direct(init, &grid, Tolerance::uniform(1e-12)).unwrap();
        let linear = integrate_coefficients(&s, init, &grid).unwrap();
        for (a, b) in direct.iter().zip(&linear.samples) {
            assert!((*a - *b).max_norm() < 1e-8);
        }
    }

    #[test]
    fn complex_initial_data() {
        // Complex alpha keeps u away from zero; compare with the direct route.
        let s = harmonic();
        let init = HJCoefficients::new(Complex64::new(0.3, 0.8), Complex64::new(0.5, -0.2), Complex64::new(0.0, 0.1));
        let grid: Vec<f64> = (0..=30).map(|i| 0.1 * i as f64).collect();
        let field = coefficient_odes(&s).unwrap();
        let direct = field.integrate_direct(init, &grid, Tolerance::uniform(1e-12)).unwrap();
        let linear = integrate_coefficients(&s, init, &grid).unwrap();
        for (a, b) in direct.iter().zip(&linear.samples) {
            assert!((*a - *b).max_norm() < 1e-8 * a.max_norm().max(1.0));
        }
    }
}
