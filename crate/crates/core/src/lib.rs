//! One-dimensional base-station location game.
//!
//! `K` base stations choose positions on a segment `[0, L]` populated by a
//! uniform continuum of mobile terminals, each attached to its nearest
//! station. A station's utility is the interference integral over its cell.
//! The crate computes Nash, Stackelberg and socially optimal profiles, the
//! price of anarchy, best-response dynamics with spectral convergence
//! certificates, and reward-inaction learning over finite location grids.

pub mod dynamics;
pub mod equilibria;
mod error;
pub mod learning;
pub mod quadrature;
pub mod scenario;
pub mod utility;

pub use error::{Error, Result};
pub use scenario::{partition, random_ordered_profile, CellPartition, LocationProfile, ScenarioConfig};
pub use utility::{
    attenuation, grad_utility, hessian_diag, interference, utilities, UtilityReport,
};
