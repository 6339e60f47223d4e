// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use junctionlab_core::JunctionError;

/// Stable process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const VALIDITY: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const ORACLE_DEVIATION: i32 = 4;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const CANT_CREATE: i32 = 73;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            code: exit::DATA,
            message: message.into(),
        }
    }

    pub fn cant_create(message: impl Into<String>) -> Self {
        CliError {
            code: exit::CANT_CREATE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<JunctionError> for CliError {
    fn from(e: JunctionError) -> Self {
        use JunctionError::*;
        let code = match &e {
            Domain(_) | NoJunction { .. } | DegenerateJunction { .. } => exit::USAGE,
            FlatBandExceeded { .. }
            | InvalidAtEquilibrium { .. }
            | PunchThrough { .. }
            | OutsideWindow { .. }
            | UnreachablePotential { .. }
            | SurfaceReached
            | StackExhausted { .. } => exit::VALIDITY,
            Parse { .. } | Validation(_) | InsufficientData { .. } | UnfittableData => exit::DATA,
            NonFinite { .. } | NoConvergence(_) => exit::INTERNAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}
