// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the junction models, solvers and data tools.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JunctionError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no metallurgical junction: N0 = {n0:e} m^-3 must exceed N_B = {nb:e} m^-3")]
    NoJunction { n0: f64, nb: f64 },

    #[error("degenerate junction: N0*N_B = {product:e} does not exceed n_i^2 = {ni2:e}")]
    DegenerateJunction { product: f64, ni2: f64 },

    #[error("forward bias {forward} V reaches or exceeds flat band (V_bi = {v_bi} V)")]
    FlatBandExceeded { forward: f64, v_bi: f64 },

    #[error(
        "junction cannot be represented even at equilibrium (v_max_reverse = {v_max_reverse} V)"
    )]
    InvalidAtEquilibrium { v_max_reverse: f64 },

    #[error("punch-through: log argument {log_argument:e} <= 0 (reverse bias must stay below {v_max_reverse} V)")]
    PunchThrough {
        log_argument: f64,
        v_max_reverse: f64,
    },

    #[error(
        "bias {bias} V lies outside the validity window (-{v_max_forward} V, {v_max_reverse} V)"
    )]
    OutsideWindow {
        bias: f64,
        v_max_reverse: f64,
        v_max_forward: f64,
    },

    #[error("non-finite integrand {value} at x = {x:e} m")]
    NonFinite { x: f64, value: f64 },

    #[error(
        "target potential {target} V unreachable; the moment integral is bounded by {supremum} V"
    )]
    UnreachablePotential { target: f64, supremum: f64 },

    #[error("space charge region reaches the surface (x_left would be negative)")]
    SurfaceReached,

    #[error("space charge region exits the layer stack at {thickness:e} m")]
    StackExhausted { thickness: f64 },

    #[error("root finder did not converge: {0}")]
    NoConvergence(String),

    #[error("insufficient data: {got} points, at least {need} required")]
    InsufficientData { got: usize, need: usize },

    #[error("unfittable data: every start violates the model validity window")]
    UnfittableData,

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, JunctionError>;

pub(crate) fn domain(msg: impl Into<String>) -> JunctionError {
    JunctionError::Domain(msg.into())
}
