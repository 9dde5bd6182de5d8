//! Best-response dynamics and their linearised convergence analysis.

mod brd;
mod linear;
mod spectral;

pub use brd::{
    best_response, run_brd, spread_start, BrdMode, StopReason, TrajectoryLog, TrajectoryStep, DEFAULT_BETA_FRACTION,
    DEFAULT_MAX_STEPS,
};
pub use linear::{
    composed_sequential_map, convergence_certificate, g_alpha, linearized_model, sequential_update_matrix,
    ConvergenceCertificate, LinearBrdModel,
};
pub use spectral::{row_sum_bounds, spectral_radius, spectral_radius_with, DEFAULT_TOL as SPECTRAL_TOL};
