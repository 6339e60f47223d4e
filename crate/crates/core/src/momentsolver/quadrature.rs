// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive 15-point Gauss-Kronrod quadrature.
//!
//! The interval list is refined by always bisecting the segment with the
//! largest error estimate, so the tolerance applies to the whole integral
//! across all initial breakpoints rather than to each piece separately.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{JunctionError, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-30,
            max_segments: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(JunctionError::NonFinite { x, value: v })
        }
    };
    let fc = eval(center)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for (j, &xk) in XGK[..7].iter().enumerate() {
        let dx = half * xk;
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let value = k * half;
    let abs = abs * half.abs();
    let error = ((k - g) * half).abs();
    Ok(Segment {
        a,
        b,
        value,
        error,
        abs,
    })
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, splitting initially at
/// every interior break. Breaks must be non-decreasing; empty pieces are skipped.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&f, w[0], w[1])?);
        }
    }
    let mut evaluations = 15 * heap.len();
    loop {
        let (value, error, abs) = heap.iter().fold((0.0, 0.0, 0.0), |(v, e, s), seg| {
            (v + seg.value, e + seg.error, s + seg.abs)
        });
        let target = tol.abs.max(tol.rel * value.abs());
        let roundoff = 50.0 * f64::EPSILON * abs;
        if error <= target || error <= roundoff || heap.is_empty() {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() >= tol.max_segments {
            return Err(JunctionError::NoConvergence(format!(
                "quadrature error {error:e} above target {target:e} after {} segments",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Segment at floating-point resolution; accept its estimate.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            continue;
        }
        heap.push(kronrod(&f, worst.a, mid)?);
        heap.push(kronrod(&f, mid, worst.b)?);
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let est = integrate(|x| x * x, &[0.0, 3.0], Tolerance::default()).unwrap();
        assert!((est.value - 9.0).abs() < 1e-13);
        let est = integrate(|x| x * x, &[-1.0, 1.0], Tolerance::default()).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_piecewise() {
        let est = integrate(|x: f64| (-x * x).exp(), &[0.0, 10.0], Tolerance::default()).unwrap();
        let exact = 0.5 * std::f64::consts::PI.sqrt();
        assert!((est.value / exact - 1.0).abs() < 1e-12);
        let step = |x: f64| if x < 1.0 { 2.0 } else { -1.0 };
        let est = integrate(step, &[0.0, 1.0, 3.0], Tolerance::default()).unwrap();
        assert!(est.value.abs() < 1e-14);
    }

    #[test]
    fn non_finite_reports_location() {
        let r = integrate(|x: f64| 1.0 / (x - 0.5), &[0.0, 1.0], Tolerance::default());
        match r {
            Err(JunctionError::NonFinite { x, .. }) => assert_eq!(x, 0.5),
            other => panic!("{other:?}"),
        }
        let r = integrate(
            |x: f64| if x > 0.7 { f64::NAN } else { 1.0 },
            &[0.0, 1.0],
            Tolerance::default(),
        );
        match r {
            Err(JunctionError::NonFinite { x, .. }) => assert!(x > 0.7),
            other => panic!("{other:?}"),
        }
    }
}
