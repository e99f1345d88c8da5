use thiserror::Error;

/// Errors produced by the Cox-potential library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoxError {
    #[error("factorization energy {energy} not below all thresholds (lowest {lowest})")]
    FactorizationEnergyTooHigh { energy: f64, lowest: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameterization boundary: {0} is singular")]
    ParameterizationBoundary(&'static str),

    #[error("singular potential near r = {r} (bracket [{lo}, {hi}])")]
    SingularPotential { r: f64, lo: f64, hi: f64 },

    #[error("Jost pole at spurious point k = -i*kappa in channel {channel}")]
    JostPole { channel: usize },

    #[error("not a zero of the Jost determinant (residual {residual:e})")]
    NotAZero { residual: f64 },

    #[error("energy {energy} outside the domain: {reason}")]
    EnergyOutOfRange { energy: f64, reason: &'static str },

    #[error("irregular parameters: K + U0 not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    Irregular { min_eigenvalue: f64 },

    #[error("coupling too small: beta = {beta} but beta >= {minimum} is required")]
    CouplingTooSmall { beta: f64, minimum: f64 },

    #[error("restriction violated: {0}")]
    Restriction(String),

    #[error("branch infeasible: {0}")]
    BranchInfeasible(String),

    #[error("branch mismatch: no sign combination reproduces the quartic roots (residual {residual:e})")]
    BranchMismatch { residual: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("field B = {b} outside the window: threshold difference {delta} <= 0")]
    OutOfWindow { b: f64, delta: f64 },

    #[error("no magnetic resonance for these parameters: {0}")]
    NoMagneticResonance(String),

    #[error("integration configuration: {0}")]
    Integration(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, CoxError>;
