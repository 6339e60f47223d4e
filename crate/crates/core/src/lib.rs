// SPDX-License-Identifier: Apache-2.0

//! Depletion-region width and barrier capacitance of Gaussian diffused
//! semiconductor junctions.
//!
//! * [`physcore`]: constants, materials, unit helpers
//! * [`profile`]: the Gaussian doping profile and its space charge
//! * [`closedform`]: analytic depletion width and capacitance
//! * [`momentsolver`]: quadrature/root-finding solver used as the oracle
//! * [`cvtools`]: C-V sweeps, CSV/JSON files and parameter extraction

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod cvtools;
pub mod error;
pub mod momentsolver;
pub mod physcore;
pub mod profile;

pub use closedform::{
    capacitance, default_vbi, solve, solve_auto, total_potential, validity_window, w_sc_deep,
    w_sc_general, w_sc_shallow, Bias, BiasDirection, JunctionSpec, Regime, SolveResult,
    ValidityWindow,
};
pub use cvtools::{CvCurve, CvPoint, FitOptions, FitResult, Format};
pub use error::{JunctionError, Result};
pub use momentsolver::{
    ChargeProfileFn, FieldSample, HeteroStack, Layer, Permittivity, ScrSolution,
};
pub use physcore::{builtin_materials, thermal_voltage, Material};
pub use profile::{ChargeModel, DiffusionRecipe, GaussianProfile, Polarity};
