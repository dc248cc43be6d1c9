use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hj::{principal_function, unwound_ln_cos};
use crate::scenario::{ConstantSet, Scenario, ScenarioKind, ShiftProfile};

const SINGULAR_EPS: f64 = 1e-12;

/// `K(x, x~) = A exp((i/hbar)(a x^2 + b x x~ + c x~^2 + d x + e x~ + g))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCoefficients {
    pub prefactor: Complex64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub g: f64,
    pub hbar: f64,
}

impl KernelCoefficients {
    pub fn phase(&self, x: f64, xs: f64) -> f64 {
        self.a * x * x + self.b * x * xs + self.c * xs * xs + self.d * x + self.e * xs + self.g
    }

    pub fn eval(&self, x: f64, xs: f64) -> Complex64 {
        self.prefactor * Complex64::from_polar(1.0, self.phase(x, xs) / self.hbar)
    }

    /// `d(phase)/d x~ / hbar`.
    pub fn source_slope(&self, x: f64, xs: f64) -> f64 {
        (2.0 * self.c * xs + self.b * x + self.e) / self.hbar
    }

    /// `d(phase)/d x / hbar`.
    pub fn target_slope(&self, x: f64, xs: f64) -> f64 {
        (2.0 * self.a * x + self.b * xs + self.d) / self.hbar
    }
}

/// A propagator whose log is quadratic in both arguments.
pub trait QuadraticKernel {
    /// Structure of `K(x, t_to; x~, t_from)`.
    fn between(&self, t_to: f64, t_from: f64) -> Result<KernelCoefficients>;

    fn hbar(&self) -> f64;

    /// `K(x, t; x~, 0)`.
    fn structure(&self, t: f64) -> Result<KernelCoefficients> {
        self.between(t, 0.0)
    }

    fn eval(&self, x: f64, t: f64, xs: f64) -> Result<Complex64> {
        Ok(self.structure(t)?.eval(x, xs))
    }
}

/// Time at which the source-side shift is evaluated in a driven kernel.
///
/// `Initial` places `f` at the source time, which makes the kernel solve the
/// Schrodinger equation of the shifted oscillator exactly. `Final` puts
/// `f(t)` in both slots, the form obtained when the delta constant is taken
/// as `c2 = omega (x~ - f(t))`; its modulus differs from the true evolution
/// whenever `f` moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceShift {
    #[default]
    Initial,
    Final,
}

/// Mehler kernel of the unit-mass oscillator in shifted variables
/// `y = x - f1`, `y~ = x~ - f2`, for elapsed time `tau`.
///
/// The square root in the prefactor follows `tau` continuously from
/// `0+`: each zero of `sin(omega tau)` crossed contributes `exp(-i pi/2)`.
pub fn oscillator_structure(omega: f64, hbar: f64, tau: f64, f1: f64, f2: f64) -> Result<KernelCoefficients> {
    let theta = omega * tau;
    let (sin, cos) = theta.sin_cos();
    if tau == 0.0 || sin.abs() <= SINGULAR_EPS {
        return Err(Error::SingularTime { t: tau });
    }
    let branch = (theta / PI).floor();
    let modulus = (omega / (2.0 * PI * hbar * sin.abs())).sqrt();
    let prefactor = Complex64::from_polar(modulus, -FRAC_PI_4 - FRAC_PI_2 * branch);
    let half_cot = 0.5 * omega * cos / sin;
    Ok(KernelCoefficients {
        prefactor,
        a: half_cot,
        b: -omega / sin,
        c: half_cot,
        d: omega * (f2 - f1 * cos) / sin,
        e: omega * (f1 - f2 * cos) / sin,
        g: half_cot * (f1 * f1 + f2 * f2) - omega * f1 * f2 / sin,
        hbar,
    })
}

/// Propagator of a 1D scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    pub scenario: Scenario,
    pub hbar: f64,
    pub source: SourceShift,
    shift: ShiftProfile,
}

impl GaussianKernel {
    pub fn shift(&self) -> ShiftProfile {
        self.shift
    }

    /// `(f1, f2)` used for `K(x, t_to; x~, t_from)`.
    pub fn shifts(&self, t_to: f64, t_from: f64) -> (f64, f64) {
        let f1 = self.shift.f(t_to);
        let f2 = match self.source {
            SourceShift::Initial => self.shift.f(t_from),
            SourceShift::Final => f1,
        };
        (f1, f2)
    }
}

impl QuadraticKernel for GaussianKernel {
    fn between(&self, t_to: f64, t_from: f64) -> Result<KernelCoefficients> {
        let (f1, f2) = self.shifts(t_to, t_from);
        oscillator_structure(self.scenario.omega, self.hbar, t_to - t_from, f1, f2)
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            value: hbar,
            reason: "must be positive",
        });
    }
    Ok(())
}

fn require_1d(s: &Scenario, op: &'static str) -> Result<()> {
    if s.kind == ScenarioKind::Magnetic {
        return Err(Error::UnsupportedKind {
            op,
            kind: s.kind.to_string(),
        });
    }
    Ok(())
}

/// Propagator assembled from plane-wave principal functions, with the
/// source shift at the initial time.
pub fn kernel_fourier(s: &Scenario, hbar: f64) -> Result<GaussianKernel> {
    kernel_fourier_with(s, hbar, SourceShift::Initial)
}

pub fn kernel_fourier_with(s: &Scenario, hbar: f64, source: SourceShift) -> Result<GaussianKernel> {
    require_1d(s, "kernel_fourier")?;
    check_hbar(hbar)?;
    Ok(GaussianKernel {
        scenario: *s,
        hbar,
        source,
        shift: s.shift_profile()?,
    })
}

/// Constants of the plane-wave principal function with wavenumber `k` whose
/// `x` offset is `f_src`: `c1 = 0`, `c2 = hbar k`, `c3 = hbar k f_src`.
fn plane_wave_constants(hbar: f64, k: f64, f_src: f64) -> ConstantSet {
    let mut c = ConstantSet::new(0.0, hbar * k, Complex64::new(hbar * k * f_src, 0.0));
    c.k = k;
    c
}

fn source_offset(shift: &ShiftProfile, source: SourceShift, t: f64) -> f64 {
    match source {
        SourceShift::Initial => shift.f(0.0),
        SourceShift::Final => shift.f(t),
    }
}

/// `(1/2pi) int dk exp((i/hbar)(S_k(x, t) - S_k(x~, 0)))` with the
/// `k`-integral done in closed form, term by term from the plane-wave
/// coefficients. Fails at caustics of the plane waves (`cos(omega t) = 0`)
/// where the coefficients themselves diverge.
pub fn kernel_from_plane_waves(s: &Scenario, hbar: f64, source: SourceShift, x: f64, t: f64, xs: f64) -> Result<Complex64> {
    require_1d(s, "kernel_from_plane_waves")?;
    check_hbar(hbar)?;
    let shift = s.shift_profile()?;
    let omega = s.omega;
    let theta = omega * t;
    let (sin, cos) = theta.sin_cos();
    if sin.abs() <= SINGULAR_EPS {
        return Err(Error::SingularTime { t });
    }
    if cos.abs() <= SINGULAR_EPS {
        return Err(Error::Caustic { t, cos_abs: cos.abs() });
    }
    let f_src = source_offset(&shift, source, t);
    let y = x - shift.f(t);
    let tan = sin / cos;

    // S_k(x, t) - S_k(x~, 0) = q k^2 + l k + r with
    let unit = plane_wave_constants(hbar, 1.0, f_src);
    let q = Complex64::new(-unit.c2 * unit.c2 * tan / (2.0 * omega), 0.0);
    let l = Complex64::new(unit.c2 * y / cos + unit.c3.re - unit.c2 * xs, 0.0);
    let r = Complex64::new(-0.5 * omega * tan * y * y, 0.0) + Complex64::new(0.0, 0.5 * hbar) * unwound_ln_cos(theta);

    // int dk exp(-A k^2 + B k) = sqrt(pi / A) exp(B^2 / 4A), principal root.
    let i_over_hbar = Complex64::new(0.0, 1.0 / hbar);
    let big_a = -(i_over_hbar * q);
    let big_b = i_over_hbar * l;
    let gauss = (Complex64::new(PI, 0.0) / big_a).sqrt() * (big_b * big_b / (big_a * 4.0)).exp();
    Ok(gauss * (i_over_hbar * r).exp() / (2.0 * PI))
}

/// Delta-limit constants at the source point `x~` with the initial-time
/// shift: `c1 = pi/2`, `c2 = omega (x~ - f(0))`, `c3 = -(i hbar/2) ln(i omega / 2 pi hbar)`.
pub fn kernel_delta(s: &Scenario, hbar: f64, xs: f64) -> Result<ConstantSet> {
    kernel_delta_at(s, hbar, xs, SourceShift::Initial, 0.0)
}

/// Delta-limit constants; with `SourceShift::Final` the shift in `c2` is
/// taken at time `t`.
pub fn kernel_delta_at(s: &Scenario, hbar: f64, xs: f64, source: SourceShift, t: f64) -> Result<ConstantSet> {
    require_1d(s, "kernel_delta")?;
    check_hbar(hbar)?;
    let shift = s.shift_profile()?;
    let f_src = source_offset(&shift, source, t);
    let log = Complex64::new(0.0, s.omega / (2.0 * PI * hbar)).ln();
    Ok(ConstantSet::new(
        FRAC_PI_2,
        s.omega * (xs - f_src),
        Complex64::new(0.0, -0.5 * hbar) * log,
    ))
}

/// `exp(i S / hbar)` for the principal function carrying the delta-limit
/// constants.
pub fn kernel_from_action(s: &Scenario, hbar: f64, source: SourceShift, x: f64, t: f64, xs: f64) -> Result<Complex64> {
    let c = kernel_delta_at(s, hbar, xs, source, t)?;
    let pf = principal_function(s, c, hbar)?;
    let action = pf.eval(x, t).map_err(|e| match e {
        Error::Caustic { t, .. } => Error::SingularTime { t },
        other => other,
    })?;
    Ok((Complex64::new(0.0, 1.0 / hbar) * action).exp())
}

/// Free-particle kernel `(m / 2 pi i hbar t)^(1/2) exp(i m (z - z~)^2 / 2 hbar t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeKernel {
    pub mass: f64,
    pub hbar: f64,
}

impl FreeKernel {
    pub fn new(mass: f64, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: mass,
                reason: "must be positive",
            });
        }
        Ok(FreeKernel { mass, hbar })
    }
}

impl QuadraticKernel for FreeKernel {
    fn between(&self, t_to: f64, t_from: f64) -> Result<KernelCoefficients> {
        let tau = t_to - t_from;
        if tau == 0.0 {
            return Err(Error::SingularTime { t: tau });
        }
        let m = self.mass;
        let prefactor = (Complex64::new(0.0, -m / (2.0 * PI * self.hbar * tau))).sqrt();
        Ok(KernelCoefficients {
            prefactor,
            a: 0.5 * m / tau,
            b: -m / tau,
            c: 0.5 * m / tau,
            d: 0.0,
            e: 0.0,
            g: 0.0,
            hbar: self.hbar,
        })
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mehler(omega: f64, hbar: f64, t: f64, y: f64, ys: f64) -> Complex64 {
        // Textbook form, valid for 0 < omega t < pi.
        let (s, c) = (omega * t).sin_cos();
        let pref = (Complex64::new(omega, 0.0) / Complex64::new(0.0, 2.0 * PI * hbar * s)).sqrt();
        let phase = omega / (2.0 * hbar * s) * ((y * y + ys * ys) * c - 2.0 * y * ys);
        pref * Complex64::from_polar(1.0, phase)
    }

    #[test]
    fn quarter_period() {
        let k = kernel_fourier(&Scenario::harmonic(1.0).unwrap(), 1.0).unwrap();
        let expected_pref = (Complex64::new(0.0, -1.0 / (2.0 * PI))).sqrt();
        for (x, xs) in [(0.3, -1.2), (1.0, 2.0), (-0.7, 0.4)] {
            let v = k.eval(x, FRAC_PI_2, xs).unwrap();
            let expected = expected_pref * Complex64::from_polar(1.0, -x * xs);
            assert!((v - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn matches_textbook_form() {
        let s = Scenario::harmonic(1.4).unwrap();
        let k = kernel_fourier(&s, 0.8).unwrap();
        for i in 1..20 {
            let t = 0.1 * i as f64;
            if 1.4 * t >= PI {
                break;
            }
            let v = k.eval(0.4, t, -0.9).unwrap();
            assert!((v - mehler(1.4, 0.8, t, 0.4, -0.9)).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_times() {
        let k = kernel_fourier(&Scenario::harmonic(1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(k.eval(0.0, 0.0, 0.0), Err(Error::SingularTime { .. })));
        assert!(matches!(k.eval(0.0, PI, 0.0), Err(Error::SingularTime { .. })));
    }

    #[test]
    fn maslov_phase_across_half_period() {
        let k = kernel_fourier(&Scenario::harmonic(1.0).unwrap(), 1.0).unwrap();
        let before = k.structure(PI - 1e-3).unwrap().prefactor;
        let after = k.structure(PI + 1e-3).unwrap().prefactor;
        assert!(((after / before).arg() + FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn plane_waves_and_delta_agree() {
        for s in [
            Scenario::harmonic(1.0).unwrap(),
            Scenario::driven(1.3, 0.6, 0.5).unwrap(),
            Scenario::resonance(0.9, 2.0).unwrap(),
        ] {
            let k = kernel_fourier(&s, 1.0).unwrap();
            for &t in &[0.3, 1.1, 2.0, 4.0, 6.0] {
                for &(x, xs) in &[(0.2, -0.4), (1.5, 0.7), (-2.0, 1.0)] {
                    let v = k.eval(x, t, xs).unwrap();
                    let pw = kernel_from_plane_waves(&s, 1.0, SourceShift::Initial, x, t, xs).unwrap();
                    let da = kernel_from_action(&s, 1.0, SourceShift::Initial, x, t, xs).unwrap();
                    assert!((pw - v).norm() < 1e-10 * v.norm(), "{:?} t = {t}: {pw} vs {v}", s.kind);
                    assert!((da - v).norm() < 1e-10 * v.norm(), "{:?} t = {t}: {da} vs {v}", s.kind);
                }
            }
        }
    }

    #[test]
    fn final_convention_uses_final_shift_twice() {
        let s = Scenario::resonance(1.0, 2.0).unwrap();
        let printed = kernel_fourier_with(&s, 1.0, SourceShift::Final).unwrap();
        let plain = kernel_fourier(&Scenario::harmonic(1.0).unwrap(), 1.0).unwrap();
        let t = 1.2;
        let f = s.shift_profile().unwrap().f(t);
        let v = printed.eval(0.5, t, -0.3).unwrap();
        let expected = plain.eval(0.5 - f, t, -0.3 - f).unwrap();
        assert!((v - expected).norm() < 1e-13);
        let da = kernel_from_action(&s, 1.0, SourceShift::Final, 0.5, t, -0.3).unwrap();
        assert!((da - v).norm() < 1e-10);
    }

    #[test]
    fn delta_constants() {
        let c = kernel_delta(&Scenario::harmonic(2.0).unwrap(), 1.0, 0.7).unwrap();
        assert_eq!(c.c1, FRAC_PI_2);
        assert!((c.c2 - 1.4).abs() < 1e-15);
        let log = Complex64::new(0.0, 1.0 / PI).ln();
        assert!((c.c3 - Complex64::new(0.0, -0.5) * log).norm() < 1e-15);

        let d = Scenario::driven(1.0, 0.3, 0.5).unwrap();
        let f = d.shift_profile().unwrap();
        let c = kernel_delta_at(&d, 1.0, 0.7, SourceShift::Final, 0.9).unwrap();
        assert!((c.c2 - (0.7 - f.f(0.9))).abs() < 1e-15);
    }

    #[test]
    fn free_kernel_prefactor() {
        let k = FreeKernel::new(2.0, 1.0).unwrap();
        let p = k.structure(0.5).unwrap().prefactor;
        let expected = (Complex64::new(2.0, 0.0) / Complex64::new(0.0, 2.0 * PI * 0.5)).sqrt();
        assert!((p - expected).norm() < 1e-15);
    }
}
