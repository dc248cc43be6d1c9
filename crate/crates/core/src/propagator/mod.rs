//! Propagators built from the principal functions, and their quadrature.

mod kernel;
mod magnetic;
mod quadrature;
mod wave;

pub use kernel::{
    kernel_delta, kernel_delta_at, kernel_fourier, kernel_fourier_with, kernel_from_action, kernel_from_plane_waves,
    oscillator_structure, FreeKernel, GaussianKernel, KernelCoefficients, QuadraticKernel, SourceShift,
};
pub use magnetic::{kernel_magnetic, KernelAction, MagneticKernel};
pub use quadrature::{
    compose, delta_limit_error, propagate, propagate_onto, ComposeQuadrature, SUPPORT_THRESHOLD,
};
pub use wave::{Grid, WaveFunction, MIN_SAMPLES};
