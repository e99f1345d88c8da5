use cox_core::CoxError;

pub const VERIFY_FAILED: u8 = 1;
pub const INVALID: u8 = 2;
pub const INFEASIBLE: u8 = 3;

/// Error carrying an explicit exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

pub fn fail(code: u8, message: impl Into<String>) -> anyhow::Error {
    Exit {
        code,
        message: message.into(),
    }
    .into()
}

pub fn cox_code(e: &CoxError) -> u8 {
    match e {
        CoxError::CouplingTooSmall { .. }
        | CoxError::Restriction(_)
        | CoxError::BranchInfeasible(_)
        | CoxError::BranchMismatch { .. }
        | CoxError::Infeasible(_)
        | CoxError::NoMagneticResonance(_) => INFEASIBLE,
        _ => INVALID,
    }
}

/// Exit code for an error anywhere in the chain; I/O and parse errors count as invalid input.
pub fn code_of(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(x) = cause.downcast_ref::<Exit>() {
            return x.code;
        }
        if let Some(c) = cause.downcast_ref::<CoxError>() {
            return cox_code(c);
        }
    }
    INVALID
}
