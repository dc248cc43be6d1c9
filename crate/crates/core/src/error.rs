use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` does not apply to scenario `{kind}`")]
    InapplicableKey { line: usize, key: String, kind: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },

    #[error("missing required key `{0}`")]
    MissingRequiredKey(String),

    #[error("line {line}: value `{value}` for `{key}` is not a number")]
    NonNumericValue { line: usize, key: String, value: String },

    #[error("line {line}: malformed entry `{text}`")]
    MalformedLine { line: usize, text: String },

    #[error("driven scenario is resonant: omega^2 - Omega^2 = 0 (omega = {omega})")]
    ResonantDenominator { omega: f64 },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("operation `{op}` does not support scenario kind `{kind}`")]
    UnsupportedKind { op: &'static str, kind: String },

    #[error("closed form requires B1 = 0, got B1 = {b1}")]
    UnsupportedRegime { b1: f64 },

    #[error("caustic at t = {t}: |cos(phase)| = {cos_abs:e}")]
    Caustic { t: f64, cos_abs: f64 },

    #[error("kernel is singular at t = {t} (sin(omega t) = 0 or t = 0)")]
    SingularTime { t: f64 },

    #[error("grid too coarse: kernel phase wavelength {wavelength:e} < 4 dx = {limit:e}")]
    GridTooCoarse { wavelength: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("adaptive step failed at t = {t} (step {step:e})")]
    StepFailure { t: f64, step: f64 },

    #[error("radicand -c2^2/omega^2 - 2B/omega = {radicand} is negative")]
    NegativeRadicand { radicand: f64 },

    #[error("time step {dt} violates stability bound: dt * E_max / hbar = {ratio} > 0.1")]
    UnstableStep { dt: f64, ratio: f64 },

    #[error("edge amplitude {edge:e} exceeds {limit:e}")]
    BoundaryLeak { edge: f64, limit: f64 },

    #[error("frame identification violated: m0 drift {m0_drift:e}, frequency residual {frequency_residual:e}")]
    IdentificationViolated {
        m0_drift: f64,
        frequency_residual: f64,
    },

    #[error("Pinney solution collapsed at t = {t}: |v| = {v:e}")]
    Collapse { t: f64, v: f64 },

    #[error("domain error: omega0^2 = {omega0_sq} must exceed eta^2 = {eta_sq}")]
    DomainError { omega0_sq: f64, eta_sq: f64 },

    #[error("pole at T = {t}: cos(eta T + delta) = 0")]
    Pole { t: f64 },
}
