//! Independent numerical checks: direct integration of the radial equation
//! and companion-matrix polynomial roots.

pub mod compare;
pub mod ode;
pub mod polyroots;

pub use compare::{compare, Comparison, OracleReport, Tolerances};
pub use ode::{
    integrate_regular, numeric_bound_states, numeric_phase_shift, numeric_scattering_length, phase_distance_mod_pi,
    wrap_half_pi, BoundStateScan, IntegrationConfig, PotentialTable, Solution,
};
pub use polyroots::{poly_residual, polyroots_companion, quartic_discriminant};
