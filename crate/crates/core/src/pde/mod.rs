//! Finite-difference solvers on `[0, ell] x [0, T]` with Neumann data.

pub mod grid;
pub mod io;
pub mod memory;
pub mod remainder;
pub mod solver;

pub use grid::{Field, Grid};
pub use io::{read_field_csv, save_field_csv, write_field_csv, Snapshot};
pub use memory::{
    compare_memory_parabolic, mapped_initial_velocity, solve_memory, MemoryComparison,
};
pub use remainder::{
    kink_field, picard_remainder, remainder_field, sup_profile, PicardResult, PicardSettings,
    UxxtSource,
};
pub use solver::{
    boundary_flux, energy_profile, solve_hyperbolic, solve_hyperbolic_with, solve_parabolic,
    solve_parabolic_with, SolverOptions,
};
