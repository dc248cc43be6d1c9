//! Quantum Hamilton-Jacobi solutions, propagators and their numerical checks
//! for driven oscillators and a charge in a magnetic field.

pub mod classical;
pub mod error;
pub mod hj;
pub mod numdiff;
pub mod ode;
pub mod oracle;
pub mod propagator;
pub mod scenario;

pub use error::{Error, Result};
