// SPDX-License-Identifier: Apache-2.0

//! C-V curves: sweep generation, file formats and parameter extraction.

mod fit;
mod io;

use serde::{Deserialize, Serialize};

pub use fit::{fit, FitOptions, FitResult, InitialGuess};
pub use io::{deserialize, serialize, Format, CSV_HEADER, CSV_HEADER_MEASURED};

use crate::closedform::{self, Bias, JunctionSpec, Regime};
use crate::error::{domain, JunctionError, Result};

/// One bias point. `v_bias` is signed: positive reverse, negative forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvPoint {
    /// V
    pub v_bias: f64,
    /// F/m^2
    pub c_b: f64,
    /// m; absent for measured data without widths
    pub w_sc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvCurve {
    points: Vec<CvPoint>,
    #[serde(rename = "spec")]
    spec_echo: Option<JunctionSpec>,
}

impl CvCurve {
    /// Validates strictly increasing bias and positive capacitance.
    pub fn new(points: Vec<CvPoint>, spec_echo: Option<JunctionSpec>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !(p.c_b > 0.0 && p.c_b.is_finite()) {
                return Err(JunctionError::Validation(format!(
                    "point {i}: capacitance {} must be positive",
                    p.c_b
                )));
            }
            if !p.v_bias.is_finite() || p.w_sc.is_some_and(|w| !w.is_finite() || w < 0.0) {
                return Err(JunctionError::Validation(format!(
                    "point {i}: non-finite value"
                )));
            }
        }
        if let Some(w) = points.windows(2).position(|w| !(w[1].v_bias > w[0].v_bias)) {
            return Err(JunctionError::Validation(format!(
                "bias must be strictly increasing: {} then {} at point {}",
                points[w].v_bias,
                points[w + 1].v_bias,
                w + 1
            )));
        }
        Ok(CvCurve { points, spec_echo })
    }

    /// An empty measured curve.
    pub fn empty() -> Self {
        CvCurve {
            points: Vec::new(),
            spec_echo: None,
        }
    }

    pub fn points(&self) -> &[CvPoint] {
        &self.points
    }

    pub fn spec_echo(&self) -> Option<&JunctionSpec> {
        self.spec_echo.as_ref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evenly spaced bias grid from `v_start` to `v_stop` inclusive.
pub fn bias_grid(v_start: f64, v_stop: f64, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(domain(format!(
            "a sweep needs at least 2 points, got {n_points}"
        )));
    }
    if !(v_start.is_finite() && v_stop.is_finite() && v_stop > v_start) {
        return Err(domain(format!(
            "sweep needs v_start < v_stop, got [{v_start}, {v_stop}]"
        )));
    }
    let span = v_stop - v_start;
    let last = n_points - 1;
    Ok((0..n_points)
        .map(|i| {
            if i == last {
                v_stop
            } else {
                v_start + span * (i as f64 / last as f64)
            }
        })
        .collect())
}

/// Solves every grid point with the closed form of `regime`.
pub fn sweep(
    spec: &JunctionSpec,
    v_start: f64,
    v_stop: f64,
    n_points: usize,
    regime: Regime,
) -> Result<CvCurve> {
    let grid = bias_grid(v_start, v_stop, n_points)?;
    let mut points = Vec::with_capacity(grid.len());
    for v in grid {
        let r = closedform::solve(spec, Bias::from_signed(v)?, regime).map_err(|e| match e {
            JunctionError::PunchThrough { v_max_reverse, .. } => JunctionError::OutsideWindow {
                bias: v,
                v_max_reverse,
                v_max_forward: spec.v_bi,
            },
            JunctionError::FlatBandExceeded { .. } => JunctionError::OutsideWindow {
                bias: v,
                v_max_reverse: closedform::validity_window(spec)
                    .map_or(f64::NAN, |w| w.v_max_reverse),
                v_max_forward: spec.v_bi,
            },
            other => other,
        })?;
        points.push(CvPoint {
            v_bias: v,
            c_b: r.c_b,
            w_sc: Some(r.w_sc),
        });
    }
    CvCurve::new(points, Some(spec.clone()))
}
