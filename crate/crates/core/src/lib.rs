//! Two-channel (and N-channel) Cox potentials: parameterization, potential
//! matrix, Jost function zeros, inversion from spectral data, scattering
//! observables and the magnetic Feshbach layer.

// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod feshbach;
pub mod format;
pub mod inverse;
pub mod jost;
pub mod observables;
pub mod oracle;
pub mod params;
pub mod potential;
pub mod sampling;
pub mod spectrum;

pub use error::{CoxError, Result};
pub use feshbach::{Continuation, EventKind, FeshbachData, FeshbachFit, FieldModel, Scenario, TrajectoryEvent};
pub use inverse::{Branch, InversionResult, ResonanceSpec};
pub use jost::{SpectralZero, ZeroKind, C64};
pub use observables::ObservableSample;
pub use params::{CoxParamsN, Regularity, RegularityReport, TwoChannelParams};
pub use potential::{FactorizationState, PotentialSample, TwoChannelPotential};
pub use spectrum::{AtlasConfig, BoundCount, RegionPoint, SpectrumReport};
