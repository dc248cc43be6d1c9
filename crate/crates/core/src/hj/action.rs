use num_complex::Complex64;

use super::coefficients::{closed_form_raw, HJCoefficients};
use crate::error::{Error, Result};
use crate::scenario::{ConstantSet, Scenario, ScenarioKind, ShiftProfile};

/// A complex action `S(x, t)` on a line.
pub trait Action1D {
    fn action(&self, x: f64, t: f64) -> Result<Complex64>;
}

/// Quantum principal function `S = alpha y^2/2 + xi y + zeta` with
/// `y = x - f(t)` and closed-form coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalFunction {
    pub scenario: Scenario,
    pub constants: ConstantSet,
    /// `hbar` in the coefficients; 0 gives the classical action.
    pub hbar: f64,
    shift: ShiftProfile,
}

/// Principal function of a 1D scenario. `hbar` may be 0.
pub fn principal_function(s: &Scenario, c: ConstantSet, hbar: f64) -> Result<PrincipalFunction> {
    if s.kind == ScenarioKind::Magnetic {
        return Err(Error::UnsupportedKind {
            op: "principal_function",
            kind: s.kind.to_string(),
        });
    }
    if !(hbar >= 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            value: hbar,
            reason: "must be finite and non-negative",
        });
    }
    Ok(PrincipalFunction {
        scenario: *s,
        constants: c,
        hbar,
        shift: s.shift_profile()?,
    })
}

impl PrincipalFunction {
    pub fn coefficients(&self, t: f64) -> Result<HJCoefficients> {
        closed_form_raw(self.scenario.omega, self.hbar, &self.constants, t)
    }

    pub fn shift(&self) -> ShiftProfile {
        self.shift
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.coefficients(t)?.action(x - self.shift.f(t)))
    }
}

impl Action1D for PrincipalFunction {
    fn action(&self, x: f64, t: f64) -> Result<Complex64> {
        self.eval(x, t)
    }
}

/// `S = alpha x^2 / 2` with `alpha = -omega tan(omega t + c1)` and nothing
/// else: the ansatz without linear or constant terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedAnsatz {
    pub omega: f64,
    pub c1: f64,
}

impl Action1D for TruncatedAnsatz {
    fn action(&self, x: f64, t: f64) -> Result<Complex64> {
        let theta = self.omega * t + self.c1;
        let cos = theta.cos();
        if cos.abs() <= super::coefficients::CAUSTIC_EPS {
            return Err(Error::Caustic { t, cos_abs: cos.abs() });
        }
        Ok(Complex64::new(-0.5 * self.omega * theta.tan() * x * x, 0.0))
    }
}

pub(crate) const TIME_STEP: f64 = 1e-5;
pub(crate) const SPACE_STEP: f64 = 1e-5;
pub(crate) const CURVATURE_STEP: f64 = 1e-3;

pub(crate) fn richardson(fine: Complex64, coarse: Complex64) -> Complex64 {
    fine + (fine - coarse) / 3.0
}

pub(crate) fn central<F>(f: F, h: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let d = |step: f64| -> Result<Complex64> { Ok((f(step)? - f(-step)?) / (2.0 * step)) };
    Ok(richardson(d(0.5 * h)?, d(h)?))
}

pub(crate) fn central2<F>(f: F, h: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let center = f(0.0)?;
    let d2 = |step: f64| -> Result<Complex64> { Ok((f(step)? + f(-step)? - center * 2.0) / (step * step)) };
    Ok(richardson(d2(0.5 * h)?, d2(h)?))
}

/// `S_t + S_x^2/2 + f'(t) S_x + omega^2 (x - f)^2 / 2 - (i hbar / 2) S_xx`
/// for the scenario's Hamiltonian, by central differences.
pub fn qhje_residual<A: Action1D + ?Sized>(action: &A, s: &Scenario, x: f64, t: f64) -> Result<Complex64> {
    let shift = s.shift_profile()?;
    let s_t = central(|d| action.action(x, t + d), TIME_STEP)?;
    let s_x = central(|d| action.action(x + d, t), SPACE_STEP)?;
    let s_xx = central2(|d| action.action(x + d, t), CURVATURE_STEP)?;
    let y = x - shift.f(t);
    let coupling = shift.momentum_coupling(t);
    let potential = 0.5 * s.omega * s.omega * y * y;
    Ok(s_t + s_x * s_x * 0.5 + s_x * coupling + potential - Complex64::new(0.0, 0.5 * s.hbar) * s_xx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::MomentumCoupling;

    #[test]
    fn plane_wave_at_time_zero() {
        let s = Scenario::harmonic(1.3).unwrap().with_hbar(0.7).unwrap();
        let pf = principal_function(&s, ConstantSet::plane_wave(&s, 2.0).unwrap(), s.hbar).unwrap();
        for i in -5..=5 {
            let x = 0.4 * i as f64;
            let v = pf.eval(x, 0.0).unwrap();
            assert!((v - Complex64::new(0.7 * 2.0 * x, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn resonance_plane_wave_at_time_zero() {
        let s = Scenario::resonance(1.0, 2.0).unwrap();
        let pf = principal_function(&s, ConstantSet::plane_wave(&s, 1.5).unwrap(), 1.0).unwrap();
        assert!((pf.eval(0.8, 0.0).unwrap() - Complex64::new(1.2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn driven_without_drive_matches_harmonic() {
        let h = Scenario::harmonic(0.9).unwrap();
        let d = Scenario::driven(0.9, 0.0, 0.3).unwrap();
        let c = ConstantSet::new(0.2, 0.5, Complex64::new(0.1, 0.0));
        let ph = principal_function(&h, c, 1.0).unwrap();
        let pd = principal_function(&d, c, 1.0).unwrap();
        for i in 0..20 {
            let (x, t) = (-2.0 + 0.2 * i as f64, 0.07 * i as f64);
            assert_eq!(ph.eval(x, t).unwrap(), pd.eval(x, t).unwrap());
        }
    }

    #[test]
    fn classical_limit_difference() {
        let s = Scenario::driven(1.1, 0.4, 0.5).unwrap();
        let c = ConstantSet::new(0.3, -0.6, Complex64::new(0.2, 0.0));
        let q = principal_function(&s, c, 1.0).unwrap();
        let cl = principal_function(&s, c, 0.0).unwrap();
        for i in 0..20 {
            let (x, t) = (-1.5 + 0.15 * i as f64, 0.05 * i as f64);
            let diff = q.eval(x, t).unwrap() - cl.eval(x, t).unwrap();
            let expected = Complex64::new(0.0, 0.5 * (1.1 * t + 0.3).cos().ln());
            assert!((diff - expected).norm() < 1e-12);
            assert_eq!(cl.eval(x, t).unwrap().im, 0.0);
        }
    }

    #[test]
    fn residuals_vanish() {
        let cases = [
            Scenario::harmonic(1.0).unwrap(),
            Scenario::driven(1.2, 0.5, 0.4).unwrap(),
            Scenario::resonance(1.0, 2.0).unwrap(),
        ];
        for s in cases {
            let pf = principal_function(&s, ConstantSet::new(0.1, 0.7, Complex64::new(0.0, 0.3)), s.hbar).unwrap();
            for i in 0..10 {
                let (x, t) = (-2.0 + 0.4 * i as f64, 0.1 + 0.09 * i as f64);
                let r = qhje_residual(&pf, &s, x, t).unwrap();
                assert!(r.norm() < 1e-7, "{:?}: residual {r} at ({x}, {t})", s.kind);
            }
        }
    }

    #[test]
    fn printed_resonance_coupling_breaks_the_equation() {
        let s = Scenario::resonance(1.0, 2.0).unwrap().with_coupling(MomentumCoupling::AsPrinted);
        let pf = principal_function(&s, ConstantSet::new(0.0, 0.7, 0.0.into()), 1.0).unwrap();
        let r = qhje_residual(&pf, &s, 0.5, 1.3).unwrap();
        assert!(r.norm() > 1e-3);
    }

    #[test]
    fn truncated_ansatz_fails() {
        let s = Scenario::harmonic(1.0).unwrap();
        let tr = TruncatedAnsatz { omega: 1.0, c1: 0.0 };
        let r = qhje_residual(&tr, &s, 0.7, 0.6).unwrap();
        assert!((r - Complex64::new(0.0, 0.5 * 0.6f64.tan())).norm() < 1e-7);
    }
}
