pub mod atlas;
pub mod feshbach;
pub mod invert;
pub mod observables;
pub mod potential;
pub mod spectrum;
pub mod verify;

use anyhow::Result;
use cox_core::TwoChannelParams;

use crate::exit::{fail, INVALID};

/// Rejects parameters with an indefinite `K + U0`, naming the first singularity.
pub fn require_regular(p: &TwoChannelParams) -> Result<()> {
    let report = p.regularity();
    if report.is_regular() {
        return Ok(());
    }
    let state = cox_core::FactorizationState::new(p.to_general())?;
    let place = match state.singular_points().first() {
        Some(s) => format!("; potential singular at r = {} (bracket [{}, {}])", s.r, s.lo, s.hi),
        None => String::new(),
    };
    Err(fail(
        INVALID,
        format!(
            "irregular parameters: K + U0 not positive definite (smallest eigenvalue {}){place}",
            report.min_eigenvalue
        ),
    ))
}
