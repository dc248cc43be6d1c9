//! Quadratic-ansatz solutions of the quantum Hamilton-Jacobi equation.

mod action;
mod coefficients;
mod magnetic;

pub use action::{principal_function, qhje_residual, Action1D, PrincipalFunction, TruncatedAnsatz};
pub use coefficients::{
    closed_form_coefficients, coefficient_odes, integrate_coefficients, integrate_coefficients_with, unwound_ln_cos,
    CoefficientField, CoefficientTrajectory, HJCoefficients, CAUSTIC_FLAG_EPS,
};
pub use magnetic::{
    magnetic_principal_function, magnetic_qhje_residual, Action3D, MagneticAnsatz, MagneticConstants,
    MagneticPrincipalFunction, SigmaConvention,
};
