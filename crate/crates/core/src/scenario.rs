//! Physical scenarios, drive-shift profiles and the `key = value` config format.
//!
//! The three one-dimensional systems are unit-mass oscillators
//! `x'' + omega^2 x = drive(t)`. The drive is absorbed into a shift `f(t)`
//! so that `x - f(t)` obeys the free oscillator:
//!
//! | kind        | drive            | f(t)                               |
//! |-------------|------------------|------------------------------------|
//! | `Harmonic`  | 0                | 0                                  |
//! | `Driven`    | `h cos(Omega t)` | `h cos(Omega t) / (omega^2 - Omega^2)` |
//! | `Resonance` | `h cos(omega t)` | `(h t / 2 omega) sin(omega t)`     |
//!
//! `Magnetic` describes a charge in the field `B1 cos(omega t) x + B0 z`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Harmonic,
    Driven,
    Resonance,
    Magnetic,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Harmonic => "harmonic",
            ScenarioKind::Driven => "driven",
            ScenarioKind::Resonance => "resonance",
            ScenarioKind::Magnetic => "magnetic",
        }
    }

    pub fn is_one_dimensional(self) -> bool {
        !matches!(self, ScenarioKind::Magnetic)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "harmonic" => Ok(ScenarioKind::Harmonic),
            "driven" => Ok(ScenarioKind::Driven),
            "resonance" => Ok(ScenarioKind::Resonance),
            "magnetic" => Ok(ScenarioKind::Magnetic),
            _ => Err(()),
        }
    }
}

/// Which coefficient multiplies `p` in the resonance Hamiltonian.
///
/// `Analytic` uses the true derivative of `f`,
/// `(h/2) t cos(omega t) + (h / 2 omega) sin(omega t)`. `AsPrinted` keeps the
/// published coefficient `(h/2) t cos(omega t) + (h t / 2 omega) sin(omega t)`,
/// which differs from `f'` by a factor `t` in the second term. Only affects
/// `Resonance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentumCoupling {
    #[default]
    Analytic,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticParams {
    pub b0: f64,
    pub b1: f64,
    /// Angular frequency of the oscillating field component.
    pub omega_field: f64,
    /// Charge-to-mass ratio `e/m`.
    pub gamma: f64,
    pub light_c: f64,
    pub mass: f64,
}

impl MagneticParams {
    pub fn new(b0: f64, b1: f64, omega_field: f64, gamma: f64, light_c: f64, mass: f64) -> Result<Self> {
        let mp = MagneticParams {
            b0,
            b1,
            omega_field,
            gamma,
            light_c,
            mass,
        };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("B0", self.b0),
            ("B1", self.b1),
            ("omega", self.omega_field),
            ("gamma", self.gamma),
            ("c", self.light_c),
            ("mass", self.mass),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        if self.gamma == 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                reason: "must be nonzero",
            });
        }
        if self.light_c <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                value: self.light_c,
                reason: "must be positive",
            });
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: self.mass,
                reason: "must be positive",
            });
        }
        Ok(())
    }

    /// Larmor frequency `gamma B0 / 2c`: the oscillator frequency of the
    /// transverse plane when `B1 = 0`.
    pub fn larmor(&self) -> f64 {
        self.gamma * self.b0 / (2.0 * self.light_c)
    }

    /// Scalar potential; zero in every solved case.
    pub fn scalar_potential(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Oscillator frequency (1D kinds) or field frequency (`Magnetic`).
    pub omega: f64,
    pub h: f64,
    pub big_omega: f64,
    pub hbar: f64,
    pub mass: f64,
    pub magnetic: Option<MagneticParams>,
    /// Boundary wavenumbers `(k_x, k_y, k_z)`; 1D kinds use `k_x` only.
    pub wavevector: [f64; 3],
    pub coupling: MomentumCoupling,
}

impl Scenario {
    fn one_dimensional(kind: ScenarioKind, omega: f64, h: f64, big_omega: f64) -> Self {
        Scenario {
            kind,
            omega,
            h,
            big_omega,
            hbar: 1.0,
            mass: 1.0,
            magnetic: None,
            wavevector: [0.0; 3],
            coupling: MomentumCoupling::Analytic,
        }
    }

    pub fn harmonic(omega: f64) -> Result<Self> {
        let s = Self::one_dimensional(ScenarioKind::Harmonic, omega, 0.0, 0.0);
        s.validate()?;
        Ok(s)
    }

    pub fn driven(omega: f64, h: f64, big_omega: f64) -> Result<Self> {
        let s = Self::one_dimensional(ScenarioKind::Driven, omega, h, big_omega);
        s.validate()?;
        Ok(s)
    }

    pub fn resonance(omega: f64, h: f64) -> Result<Self> {
        let s = Self::one_dimensional(ScenarioKind::Resonance, omega, h, omega);
        s.validate()?;
        Ok(s)
    }

    pub fn magnetic(mp: MagneticParams) -> Result<Self> {
        let s = Scenario {
            kind: ScenarioKind::Magnetic,
            omega: mp.omega_field,
            h: 0.0,
            big_omega: 0.0,
            hbar: 1.0,
            mass: mp.mass,
            magnetic: Some(mp),
            wavevector: [0.0; 3],
            coupling: MomentumCoupling::Analytic,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_wavevector(mut self, k: [f64; 3]) -> Self {
        self.wavevector = k;
        self
    }

    pub fn with_coupling(mut self, coupling: MomentumCoupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                value: self.hbar,
                reason: "must be positive",
            });
        }
        if !self.wavevector.iter().all(|k| k.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "k",
                value: f64::NAN,
                reason: "wavevector must be finite",
            });
        }
        match self.kind {
            ScenarioKind::Magnetic => {
                let mp = self.magnetic.ok_or(Error::MissingRequiredKey("B0".into()))?;
                mp.validate()?;
                if mp.mass != self.mass || mp.omega_field != self.omega {
                    return Err(Error::InvalidParameter {
                        name: "mass",
                        value: self.mass,
                        reason: "scenario and magnetic parameters disagree",
                    });
                }
            }
            _ => {
                if !(self.omega > 0.0 && self.omega.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "omega",
                        value: self.omega,
                        reason: "must be positive",
                    });
                }
                if self.mass != 1.0 {
                    return Err(Error::InvalidParameter {
                        name: "mass",
                        value: self.mass,
                        reason: "one-dimensional scenarios use unit mass",
                    });
                }
                if !self.h.is_finite() || !self.big_omega.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "h",
                        value: self.h,
                        reason: "drive parameters must be finite",
                    });
                }
                if self.kind == ScenarioKind::Driven
                    && self.omega * self.omega - self.big_omega * self.big_omega == 0.0
                {
                    return Err(Error::ResonantDenominator { omega: self.omega });
                }
            }
        }
        Ok(())
    }

    pub fn shift_profile(&self) -> Result<ShiftProfile> {
        ShiftProfile::from_scenario(self)
    }

    /// Serializes to the config format; `parse_scenario` inverts it exactly.
    pub fn to_config(&self) -> String {
        let mut out = format!("scenario = {}\n", self.kind);
        let mut push = |key: &str, v: f64| out.push_str(&format!("{key} = {v:?}\n"));
        match self.kind {
            ScenarioKind::Magnetic => {
                let mp = self.magnetic.expect("validated magnetic scenario");
                push("B0", mp.b0);
                push("B1", mp.b1);
                push("gamma", mp.gamma);
                push("c", mp.light_c);
                push("omega", mp.omega_field);
                push("mass", mp.mass);
                push("hbar", self.hbar);
                push("kx", self.wavevector[0]);
                push("ky", self.wavevector[1]);
                push("kz", self.wavevector[2]);
            }
            kind => {
                push("omega", self.omega);
                if kind != ScenarioKind::Harmonic {
                    push("h", self.h);
                }
                if kind == ScenarioKind::Driven {
                    push("Omega", self.big_omega);
                }
                push("hbar", self.hbar);
                push("kx", self.wavevector[0]);
            }
        }
        out
    }
}

/// Recognized config keys.
pub const CONFIG_KEYS: [&str; 13] = [
    "scenario", "omega", "h", "Omega", "hbar", "mass", "B0", "B1", "gamma", "c", "kx", "ky", "kz",
];

fn applicable(kind: ScenarioKind, key: &str) -> bool {
    match kind {
        ScenarioKind::Harmonic => matches!(key, "omega" | "hbar" | "mass" | "kx"),
        ScenarioKind::Driven => matches!(key, "omega" | "h" | "Omega" | "hbar" | "mass" | "kx"),
        // Omega is accepted and ignored: the drive frequency is omega.
        ScenarioKind::Resonance => matches!(key, "omega" | "h" | "Omega" | "hbar" | "mass" | "kx"),
        ScenarioKind::Magnetic => !matches!(key, "h" | "Omega"),
    }
}

/// Parses a `key = value` config document into a validated scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut kind: Option<(ScenarioKind, usize)> = None;
    let mut values: Vec<(&str, f64, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::MalformedLine {
            line: line_no,
            text: line.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !CONFIG_KEYS.contains(&key) {
            return Err(Error::UnknownKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        let seen = key == "scenario" && kind.is_some() || values.iter().any(|(k, _, _)| *k == key);
        if seen {
            return Err(Error::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        if key == "scenario" {
            let k = value.parse::<ScenarioKind>().map_err(|_| Error::MalformedLine {
                line: line_no,
                text: format!("unknown scenario `{value}`"),
            })?;
            kind = Some((k, line_no));
            continue;
        }
        let number = value.parse::<f64>().map_err(|_| Error::NonNumericValue {
            line: line_no,
            key: key.to_string(),
            value: value.to_string(),
        })?;
        values.push((key, number, line_no));
    }

    let (kind, _) = kind.ok_or_else(|| Error::MissingRequiredKey("scenario".into()))?;
    for &(key, _, line) in &values {
        if !applicable(kind, key) {
            return Err(Error::InapplicableKey {
                line,
                key: key.to_string(),
                kind: kind.to_string(),
            });
        }
    }
    let get = |key: &str| values.iter().find(|(k, _, _)| *k == key).map(|(_, v, _)| *v);
    let require = |key: &str| get(key).ok_or_else(|| Error::MissingRequiredKey(key.into()));

    let hbar = get("hbar").unwrap_or(1.0);
    let mut scenario = match kind {
        ScenarioKind::Harmonic | ScenarioKind::Driven | ScenarioKind::Resonance => {
            let omega = require("omega")?;
            let mut s = match kind {
                ScenarioKind::Harmonic => Scenario::one_dimensional(kind, omega, 0.0, 0.0),
                ScenarioKind::Driven => Scenario::one_dimensional(kind, omega, require("h")?, require("Omega")?),
                _ => Scenario::one_dimensional(kind, omega, require("h")?, omega),
            };
            s.mass = get("mass").unwrap_or(1.0);
            s
        }
        ScenarioKind::Magnetic => {
            let mp = MagneticParams {
                b0: require("B0")?,
                b1: require("B1")?,
                omega_field: require("omega")?,
                gamma: require("gamma")?,
                light_c: require("c")?,
                mass: get("mass").unwrap_or(1.0),
            };
            Scenario {
                kind,
                omega: mp.omega_field,
                h: 0.0,
                big_omega: 0.0,
                hbar,
                mass: mp.mass,
                magnetic: Some(mp),
                wavevector: [0.0; 3],
                coupling: MomentumCoupling::Analytic,
            }
        }
    };
    scenario.hbar = hbar;
    scenario.wavevector = [
        get("kx").unwrap_or(0.0),
        get("ky").unwrap_or(0.0),
        get("kz").unwrap_or(0.0),
    ];
    scenario.validate()?;
    Ok(scenario)
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_scenario(s)
    }
}

/// Equilibrium shift `f(t)` absorbing the drive of a 1D scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftProfile {
    None,
    Driven {
        h: f64,
        omega: f64,
        big_omega: f64,
    },
    Resonance {
        h: f64,
        omega: f64,
        coupling: MomentumCoupling,
    },
}

impl ShiftProfile {
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        match s.kind {
            ScenarioKind::Harmonic => Ok(ShiftProfile::None),
            ScenarioKind::Driven => Ok(ShiftProfile::Driven {
                h: s.h,
                omega: s.omega,
                big_omega: s.big_omega,
            }),
            ScenarioKind::Resonance => Ok(ShiftProfile::Resonance {
                h: s.h,
                omega: s.omega,
                coupling: s.coupling,
            }),
            ScenarioKind::Magnetic => Err(Error::UnsupportedKind {
                op: "shift_eval",
                kind: s.kind.to_string(),
            }),
        }
    }

    /// `(f(t), f'(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match *self {
            ShiftProfile::None => (0.0, 0.0),
            ShiftProfile::Driven { h, omega, big_omega } => {
                let den = omega * omega - big_omega * big_omega;
                let (s, c) = (big_omega * t).sin_cos();
                (h * c / den, -h * big_omega * s / den)
            }
            ShiftProfile::Resonance { h, omega, .. } => {
                let (s, c) = (omega * t).sin_cos();
                (h * t * s / (2.0 * omega), 0.5 * h * t * c + h * s / (2.0 * omega))
            }
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Coefficient of `p` in the Hamiltonian; equals `f'(t)` except for the
    /// printed resonance variant.
    pub fn momentum_coupling(&self, t: f64) -> f64 {
        match *self {
            ShiftProfile::Resonance {
                h,
                omega,
                coupling: MomentumCoupling::AsPrinted,
            } => {
                let (s, c) = (omega * t).sin_cos();
                0.5 * h * t * c + h * t * s / (2.0 * omega)
            }
            _ => self.eval(t).1,
        }
    }

    /// Right-hand side of `x'' + omega^2 x = drive(t)`.
    pub fn drive(&self, t: f64) -> f64 {
        match *self {
            ShiftProfile::None => 0.0,
            ShiftProfile::Driven { h, big_omega, .. } => h * (big_omega * t).cos(),
            ShiftProfile::Resonance { h, omega, .. } => h * (omega * t).cos(),
        }
    }
}

/// `(f(t), f'(t))` for a 1D scenario.
pub fn shift_eval(s: &Scenario, t: f64) -> Result<(f64, f64)> {
    Ok(ShiftProfile::from_scenario(s)?.eval(t))
}

/// Integration constants of the 1D principal function.
///
/// `c3` is complex: the delta-limit construction puts a logarithm there.
/// `b` is the classical constant fixed by `dS/dc1 = B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSet {
    pub c1: f64,
    pub c2: f64,
    pub c3: Complex64,
    pub b: f64,
    pub k: f64,
}

impl ConstantSet {
    pub fn new(c1: f64, c2: f64, c3: Complex64) -> Self {
        ConstantSet {
            c1,
            c2,
            c3,
            b: 0.0,
            k: 0.0,
        }
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    /// Constants imposing `S(x, 0) = hbar k x`: `c1 = 0`, `c2 = hbar k`,
    /// `c3 = hbar k f(0)`.
    pub fn plane_wave(s: &Scenario, k: f64) -> Result<Self> {
        let f0 = ShiftProfile::from_scenario(s)?.f(0.0);
        Ok(ConstantSet {
            c1: 0.0,
            c2: s.hbar * k,
            c3: Complex64::new(s.hbar * k * f0, 0.0),
            b: 0.0,
            k,
        })
    }
}
