//! Independent checks: a grid Schrodinger solver, exact spin-1/2 dynamics in
//! the rotating frame, and the Pinney reduction.

mod frame;
mod grid;
mod spin;

pub use frame::{
    frame_reduce, pinney_energy, pinney_particular, pinney_solve, pinney_solve_with, FrameReduction,
    IdentificationReport, IdentificationSample, PinneyParticular, PinneySolution, ScaleLaw, COLLAPSE_EPS,
    IDENTIFICATION_TOL,
};
pub use grid::{
    compare_states, evolve_grid, kernel_vs_oracle, kernel_vs_oracle_with, GridEvolution, OracleComparison,
    QuadraticHamiltonian, LEAK_LIMIT, STABILITY_LIMIT,
};
pub use spin::{flip_probability, rotating_frame_field, spin_half_evolution, Spinor};
