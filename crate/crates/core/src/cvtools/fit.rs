// SPDX-License-Identifier: Apache-2.0

//! Extraction of (N0, L_d, V_bi) from C-V data by least squares on the
//! general closed-form capacitance.
//!
//! The search runs a Nelder-Mead simplex over (ln N0, ln L_d[, V_bi]) with
//! reflection 1, expansion 2, contraction 0.5 and shrink 0.5. Points that
//! fall outside the model's validity window are penalized rather than
//! rejected so the simplex can walk back into the feasible region.

use super::CvCurve;
use crate::closedform::{default_vbi, width_at_potential, JunctionSpec, Regime};
use crate::error::{JunctionError, Result};
use crate::physcore::Material;
use crate::profile::{GaussianProfile, Polarity};

const MIN_POINTS: usize = 5;
const PENALTY: f64 = 1e6;
const VBI_RANGE: (f64, f64) = (0.05, 2.0);
const STALL_LIMIT: usize = 5;
const REL_DECREASE: f64 = 1e-10;

/// Starting point for the search, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialGuess {
    pub n0: f64,
    pub ld: f64,
    /// With `fit_vbi` off this value is held fixed instead of using the
    /// default built-in potential model.
    pub vbi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Background concentration, m^-3; fixed during the fit.
    pub nb: f64,
    pub polarity: Polarity,
    pub fit_vbi: bool,
    pub initial_guess: Option<InitialGuess>,
    pub max_iterations: usize,
}

impl FitOptions {
    pub fn new(nb: f64) -> Self {
        FitOptions {
            nb,
            polarity: Polarity::DonorIntoP,
            fit_vbi: false,
            initial_guess: None,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub n0_hat: f64,
    pub ld_hat: f64,
    pub vbi_hat: f64,
    /// Sum of squared relative residuals (plus any remaining penalty).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    v: Vec<f64>,
    c: Vec<f64>,
    material: &'a Material,
    temp: f64,
    opts: &'a FitOptions,
}

impl Problem<'_> {
    fn vbi_for(&self, n0: f64, theta: &[f64]) -> std::result::Result<(f64, f64), f64> {
        if self.opts.fit_vbi {
            let raw = theta[2];
            let clamped = raw.clamp(VBI_RANGE.0, VBI_RANGE.1);
            return Ok((clamped, PENALTY * (raw - clamped).abs()));
        }
        if let Some(v) = self.opts.initial_guess.and_then(|g| g.vbi) {
            return Ok((v, 0.0));
        }
        let p = GaussianProfile {
            n0,
            ld: 1.0,
            nb: self.opts.nb,
            polarity: self.opts.polarity,
        };
        default_vbi(&p, self.material, self.temp)
            .map(|v| (v, 0.0))
            .map_err(|_| PENALTY)
    }

    /// Model parameters for `theta`, or a penalty if no junction exists.
    fn spec(&self, theta: &[f64]) -> std::result::Result<(JunctionSpec, f64), f64> {
        let (n0, ld) = (theta[0].exp(), theta[1].exp());
        if !(n0 > self.opts.nb) || !ld.is_finite() {
            return Err(PENALTY * (1.0 + (self.opts.nb.ln() - theta[0]).max(0.0)));
        }
        let (vbi, vbi_penalty) = self.vbi_for(n0, theta)?;
        let profile =
            GaussianProfile::new(n0, ld, self.opts.nb, self.opts.polarity).map_err(|_| PENALTY)?;
        let spec = JunctionSpec::new(self.material.clone(), profile, self.temp)
            .and_then(|s| s.override_vbi(vbi))
            .map_err(|_| PENALTY)?;
        Ok((spec, vbi_penalty))
    }

    fn objective(&self, theta: &[f64]) -> f64 {
        let (spec, mut total) = match self.spec(theta) {
            Ok(s) => s,
            Err(p) => return p,
        };
        let eps = spec.eps();
        let v_limit = spec.moment_scale() * spec.junction_factor() - spec.v_bi;
        for (&v, &c) in self.v.iter().zip(&self.c) {
            let v_total = spec.v_bi + v;
            let violation = if v_total <= 0.0 {
                Some(-v_total)
            } else if v >= v_limit {
                Some(v - v_limit)
            } else {
                None
            };
            match violation.map_or_else(
                || width_at_potential(&spec, Regime::General, v_total).ok(),
                |_| None,
            ) {
                Some((w, _)) if w > 0.0 => {
                    let r = (eps / w - c) / c;
                    total += r * r;
                }
                _ => total += 1.0 + PENALTY * violation.unwrap_or(0.0),
            }
        }
        total
    }
}

/// Fits the general closed-form capacitance to `measured`.
pub fn fit(
    measured: &CvCurve,
    material: &Material,
    temp: f64,
    opts: &FitOptions,
) -> Result<FitResult> {
    if measured.len() < MIN_POINTS {
        return Err(JunctionError::InsufficientData {
            got: measured.len(),
            need: MIN_POINTS,
        });
    }
    if !(opts.nb > 0.0 && opts.nb.is_finite()) {
        return Err(crate::error::domain(
            "background concentration must be positive",
        ));
    }
    let problem = Problem {
        v: measured.points().iter().map(|p| p.v_bias).collect(),
        c: measured.points().iter().map(|p| p.c_b).collect(),
        material,
        temp,
        opts,
    };
    let dim = if opts.fit_vbi { 3 } else { 2 };
    let base = match opts.initial_guess {
        Some(g) => {
            let mut t = vec![g.n0.ln(), g.ld.ln()];
            if opts.fit_vbi {
                t.push(g.vbi.unwrap_or(0.7));
            }
            t
        }
        None => grid_guess(&problem, dim),
    };
    if !base.iter().all(|x| x.is_finite()) {
        return Err(crate::error::domain(
            "initial guess must be positive and finite",
        ));
    }

    let mut best: Option<(Vec<f64>, f64, usize, bool)> = None;
    let mut iterations = 0;
    for factor in [0.5f64, 1.0, 2.0] {
        let mut start = base.clone();
        start[0] += factor.ln();
        start[1] += factor.ln();
        let run = nelder_mead(|t| problem.objective(t), &start, opts.max_iterations);
        iterations += run.iterations;
        if best.as_ref().is_none_or(|b| run.value < b.1) {
            best = Some((run.point, run.value, run.iterations, run.converged));
        }
    }
    let (mut point, mut value, _, mut converged) = best.expect("three starts");
    // Restart from the winner with a fresh simplex to guard against a collapsed one.
    let polish = nelder_mead(|t| problem.objective(t), &point, opts.max_iterations);
    iterations += polish.iterations;
    if polish.value <= value {
        point = polish.point;
        value = polish.value;
        converged = polish.converged;
    }

    let (spec, _) = problem
        .spec(&point)
        .map_err(|_| JunctionError::UnfittableData)?;
    if value >= PENALTY {
        return Err(JunctionError::UnfittableData);
    }
    Ok(FitResult {
        n0_hat: spec.profile.n0,
        ld_hat: spec.profile.ld,
        vbi_hat: spec.v_bi,
        objective: value,
        iterations,
        converged,
    })
}

// Coarse log grid used when no initial guess is supplied.
fn grid_guess(problem: &Problem<'_>, dim: usize) -> Vec<f64> {
    let nb = problem.opts.nb;
    let mut best = (f64::INFINITY, Vec::new());
    for i in 0..=36 {
        let n0 = nb * 10f64.powf(0.25 + 0.25 * i as f64);
        for j in 0..=40 {
            let ld = 1e-9 * 10f64.powf(0.15 * j as f64);
            let mut t = vec![n0.ln(), ld.ln()];
            if dim == 3 {
                let p = GaussianProfile {
                    n0,
                    ld,
                    nb,
                    polarity: problem.opts.polarity,
                };
                let v = default_vbi(&p, problem.material, problem.temp).unwrap_or(0.7);
                t.push(v.clamp(VBI_RANGE.0, VBI_RANGE.1));
            }
            let f = problem.objective(&t);
            if f < best.0 {
                best = (f, t);
            }
        }
    }
    best.1
}

pub(crate) struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead minimization. Converged once the best value has decreased by
/// less than 1e-10 (relative) for 5 consecutive iterations and the simplex
/// has collapsed in either value or position.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], max_iter: usize) -> Minimum {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += if i < 2 { 0.2 } else { 0.05 };
        let v = f(&p);
        simplex.push((p, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    let mut stall = 0;
    let mut last_best = simplex[0].1;
    for it in 1..=max_iter {
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = along(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[n].1 {
                let p = along(0.5);
                let v = f(&p);
                (p, v)
            } else {
                let p = along(-0.5);
                let v = f(&p);
                (p, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    for (x, b) in p.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    *v = f(p);
                }
            }
        }
        order(&mut simplex);

        let best = simplex[0].1;
        let decrease = (last_best - best) / last_best.abs().max(f64::MIN_POSITIVE);
        stall = if decrease < REL_DECREASE {
            stall + 1
        } else {
            0
        };
        last_best = best;
        if stall >= STALL_LIMIT {
            let spread = simplex[n].1 - best;
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= REL_DECREASE * best.abs() + 1e-300 || diameter <= 1e-10 {
                return Minimum {
                    point: simplex[0].0.clone(),
                    value: best,
                    iterations: it,
                    converged: true,
                };
            }
        }
    }
    Minimum {
        point: simplex[0].0.clone(),
        value: simplex[0].1,
        iterations: max_iter,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvtools::{sweep, CvPoint};
    use crate::physcore::{builtin_materials, find_material};

    #[test]
    fn rosenbrock() {
        let m = nelder_mead(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            10_000,
        );
        assert!(m.converged);
        assert!((m.point[0] - 1.0).abs() < 1e-6 && (m.point[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn too_few_points() {
        let si = find_material(&builtin_materials(), "Si").unwrap().clone();
        let pts = (0..4)
            .map(|i| CvPoint {
                v_bias: i as f64,
                c_b: 1e-4 / (1.0 + i as f64),
                w_sc: None,
            })
            .collect();
        let c = CvCurve::new(pts, None).unwrap();
        assert!(matches!(
            fit(&c, &si, 300.0, &FitOptions::new(1e21)),
            Err(JunctionError::InsufficientData { got: 4, .. })
        ));
    }

    #[test]
    fn noiseless_round_trip() {
        let si = find_material(&builtin_materials(), "Si").unwrap().clone();
        let p = GaussianProfile::new(1e24, 1e-5, 1e21, Polarity::DonorIntoP).unwrap();
        let s = JunctionSpec::new(si.clone(), p, 300.0).unwrap();
        let c = sweep(&s, -0.3, 60.0, 25, Regime::General).unwrap();
        let r = fit(&c, &si, 300.0, &FitOptions::new(1e21)).unwrap();
        assert!((r.n0_hat / 1e24 - 1.0).abs() < 1e-3, "{r:?}");
        assert!((r.ld_hat / 1e-5 - 1.0).abs() < 1e-3, "{r:?}");
        assert!(r.objective < 1e-12);
        assert!(r.converged);
    }
}
