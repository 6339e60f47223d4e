// SPDX-License-Identifier: Apache-2.0

//! Numerical depletion-region solver built directly on Gauss's law.
//!
//! The solver never uses the closed forms. It evaluates the moment
//! integral of x*rho(x)/eps(x) by adaptive quadrature and root-finds the
//! depletion boundaries, so it can serve as an independent check of every
//! closed-form width. Positions are handled as an origin plus local
//! offsets: a depletion layer a micron thick next to a junction tens of
//! microns deep keeps its full relative precision.

pub mod quadrature;
pub mod roots;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, JunctionError, Result};
use crate::physcore::Material;
use crate::profile::{ChargeModel, GaussianProfile};

use quadrature::{integrate, Tolerance};
use roots::{brent, BrentOptions};

/// Gaussian charge beyond this many diffusion lengths underflows to zero.
const GAUSSIAN_SUPPORT_LENGTHS: f64 = 28.0;
const MAX_EXPANSIONS: usize = 1100;

/// Tolerance of the public moment integral.
pub const MOMENT_TOLERANCE: Tolerance = Tolerance {
    rel: 1e-10,
    abs: 1e-30,
    max_segments: 4000,
};

// Tighter tolerance used inside the root-finding loops.
const SOLVE_TOLERANCE: Tolerance = Tolerance {
    rel: 1e-12,
    abs: 1e-30,
    max_segments: 4000,
};

const ROOT_OPTIONS: BrentOptions = BrentOptions {
    xtol_abs: 0.0,
    xtol_rel: 1e-14,
    max_iter: 300,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChargeTag {
    Bare,
    Net,
    CustomStep,
    Custom,
}

/// rho(x) in C/m^3 on a declared support; zero outside it.
#[derive(Clone)]
pub struct ChargeProfileFn {
    rho: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lo: f64,
    hi: f64,
    tag: ChargeTag,
    steps: Vec<f64>,
    length_scale: f64,
}

impl fmt::Debug for ChargeProfileFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChargeProfileFn")
            .field("support", &(self.lo, self.hi))
            .field("tag", &self.tag)
            .field("steps", &self.steps)
            .field("length_scale", &self.length_scale)
            .finish()
    }
}

impl ChargeProfileFn {
    /// Gaussian charge under either charge model. The bare model is
    /// supported on [0, 28 L_d]; the net model extends into the background.
    pub fn gaussian(profile: &GaussianProfile, model: ChargeModel) -> Self {
        let p = *profile;
        match model {
            ChargeModel::Bare => ChargeProfileFn {
                rho: Arc::new(move |x| crate::physcore::Q * p.gaussian(x)),
                lo: 0.0,
                hi: GAUSSIAN_SUPPORT_LENGTHS * p.ld,
                tag: ChargeTag::Bare,
                steps: Vec::new(),
                length_scale: p.ld,
            },
            ChargeModel::Net => ChargeProfileFn {
                rho: Arc::new(move |x| p.net_charge(x)),
                lo: 0.0,
                hi: f64::INFINITY,
                tag: ChargeTag::Net,
                steps: Vec::new(),
                length_scale: p.ld,
            },
        }
    }

    /// Uniform charge density on [lo, hi].
    pub fn constant(rho: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::build(
            Arc::new(move |_| rho),
            lo,
            hi,
            ChargeTag::CustomStep,
            Vec::new(),
        )
    }

    /// `left` below `at`, `right` from `at` on.
    pub fn step(at: f64, left: f64, right: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(at > lo && at < hi) {
            return Err(domain(format!(
                "step at {at:e} outside support [{lo:e}, {hi:e}]"
            )));
        }
        Self::build(
            Arc::new(move |x| if x < at { left } else { right }),
            lo,
            hi,
            ChargeTag::CustomStep,
            vec![at],
        )
    }

    /// A user-supplied density; `steps` lists its discontinuities.
    pub fn custom<F>(f: F, lo: f64, hi: f64, steps: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let tag = if steps.is_empty() {
            ChargeTag::Custom
        } else {
            ChargeTag::CustomStep
        };
        Self::build(Arc::new(f), lo, hi, tag, steps)
    }

    fn build(
        rho: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lo: f64,
        hi: f64,
        tag: ChargeTag,
        mut steps: Vec<f64>,
    ) -> Result<Self> {
        if !(lo.is_finite() && hi > lo) {
            return Err(domain(format!("invalid support [{lo:e}, {hi:e}]")));
        }
        steps.sort_by(f64::total_cmp);
        let length_scale = if hi.is_finite() {
            hi - lo
        } else {
            lo.abs().max(1.0)
        };
        Ok(ChargeProfileFn {
            rho,
            lo,
            hi,
            tag,
            steps,
            length_scale,
        })
    }

    /// Sets the length used for the initial bracket guess (one hundredth of it).
    pub fn with_length_scale(mut self, scale: f64) -> Self {
        if scale > 0.0 && scale.is_finite() {
            self.length_scale = scale;
        }
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            0.0
        } else {
            (self.rho)(x)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn tag(&self) -> ChargeTag {
        self.tag
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: Material,
    /// m
    pub thickness: f64,
}

/// Ordered layers starting at x = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroStack {
    layers: Vec<Layer>,
    ends: Vec<f64>,
}

impl HeteroStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(domain("a layer stack needs at least one layer"));
        }
        let mut ends = Vec::with_capacity(layers.len());
        let mut acc = 0.0;
        for l in &layers {
            if !(l.thickness > 0.0 && l.thickness.is_finite()) {
                return Err(domain(format!(
                    "layer {} thickness {} m must be positive",
                    l.material.name, l.thickness
                )));
            }
            acc += l.thickness;
            ends.push(acc);
        }
        Ok(HeteroStack { layers, ends })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn thickness(&self) -> f64 {
        *self.ends.last().expect("non-empty stack")
    }

    /// Interior layer boundaries.
    pub fn boundaries(&self) -> &[f64] {
        &self.ends[..self.ends.len() - 1]
    }

    pub fn permittivity_at(&self, x: f64) -> f64 {
        let i = self
            .ends
            .partition_point(|&end| end <= x)
            .min(self.layers.len() - 1);
        self.layers[i].material.permittivity()
    }
}

/// eps(x) in F/m: uniform or layered.
#[derive(Debug, Clone, PartialEq)]
pub enum Permittivity {
    Uniform(f64),
    Layered(HeteroStack),
}

impl Permittivity {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            Permittivity::Uniform(e) => *e,
            Permittivity::Layered(s) => s.permittivity_at(x),
        }
    }

    fn boundaries(&self) -> &[f64] {
        match self {
            Permittivity::Uniform(_) => &[],
            Permittivity::Layered(s) => s.boundaries(),
        }
    }

    fn extent(&self) -> f64 {
        match self {
            Permittivity::Uniform(_) => f64::INFINITY,
            Permittivity::Layered(s) => s.thickness(),
        }
    }
}

/// One (x, E, u) sample of a reconstructed depletion region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    /// m
    pub x: f64,
    /// V/m
    pub e: f64,
    /// V, relative to u(x_left) = 0
    pub u: f64,
}

/// Depletion region boundaries found by the solver.
///
/// `x_left = origin - extent_left` and `x_right = origin + extent_right`;
/// the extents are the quantities actually solved for.
#[derive(Debug, Clone, PartialEq)]
pub struct ScrSolution {
    pub x_left: f64,
    pub x_right: f64,
    pub origin: f64,
    pub extent_left: f64,
    pub extent_right: f64,
    /// Signed moment integral over the region, V.
    pub moment_value: f64,
    pub field_samples: Vec<FieldSample>,
    /// u(x_right) - u(x_left) once a profile has been reconstructed.
    pub potential_drop: Option<f64>,
}

impl ScrSolution {
    fn new(origin: f64, extent_left: f64, extent_right: f64, moment_value: f64) -> Self {
        ScrSolution {
            x_left: origin - extent_left,
            x_right: origin + extent_right,
            origin,
            extent_left,
            extent_right,
            moment_value,
            field_samples: Vec::new(),
            potential_drop: None,
        }
    }

    pub fn width(&self) -> f64 {
        self.extent_left + self.extent_right
    }

    /// Reconstructs E and u over the region and stores them on the solution.
    pub fn reconstruct(
        &mut self,
        rho: &ChargeProfileFn,
        eps: &Permittivity,
        n_samples: usize,
    ) -> Result<&[FieldSample]> {
        let samples = reconstruct_local(
            rho,
            eps,
            self.origin,
            -self.extent_left,
            self.extent_right,
            n_samples,
        )?;
        self.potential_drop = Some(samples[samples.len() - 1].u - samples[0].u);
        self.field_samples = samples;
        Ok(&self.field_samples)
    }
}

fn local_breaks(
    rho: &ChargeProfileFn,
    eps: &Permittivity,
    origin: f64,
    t0: f64,
    t1: f64,
) -> Vec<f64> {
    let mut breaks = vec![t0, t1];
    let ends = [rho.lo, rho.hi];
    let interior = rho
        .steps
        .iter()
        .chain(eps.boundaries())
        .chain(ends.iter())
        .map(|&x| x - origin)
        .filter(|&t| t > t0 && t < t1);
    breaks.extend(interior);
    breaks.sort_by(f64::total_cmp);
    breaks
}

fn check_extent(eps: &Permittivity, origin: f64, t1: f64) -> Result<()> {
    let extent = eps.extent();
    if origin + t1 > extent * (1.0 + 4.0 * f64::EPSILON) {
        return Err(JunctionError::StackExhausted { thickness: extent });
    }
    Ok(())
}

fn moment_local(
    rho: &ChargeProfileFn,
    eps: &Permittivity,
    origin: f64,
    t0: f64,
    t1: f64,
    tol: Tolerance,
) -> Result<f64> {
    check_extent(eps, origin, t1)?;
    let breaks = local_breaks(rho, eps, origin, t0, t1);
    let f = |t: f64| {
        let x = origin + t;
        x * rho.eval(x) / eps.at(x)
    };
    Ok(integrate(f, &breaks, tol)?.value)
}

fn charge_local(
    rho: &ChargeProfileFn,
    origin: f64,
    t0: f64,
    t1: f64,
    tol: Tolerance,
) -> Result<f64> {
    let breaks = local_breaks(rho, &Permittivity::Uniform(1.0), origin, t0, t1);
    Ok(integrate(|t| rho.eval(origin + t), &breaks, tol)?.value)
}

/// Definite integral of x*rho(x)/eps(x) over [a, b], V.
///
/// The integration is split at every charge step and permittivity boundary.
pub fn moment_integral(rho: &ChargeProfileFn, eps: &Permittivity, a: f64, b: f64) -> Result<f64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!(
            "moment integral needs a < b, got [{a:e}, {b:e}]"
        )));
    }
    moment_local(rho, eps, a, 0.0, b - a, MOMENT_TOLERANCE)
}

enum Expansion {
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    /// The limit was reached with f still negative; carries f(limit).
    Limit(f64),
}

// Geometric (factor 2) expansion of [0, w] until f(w) >= 0. f(0) is `f_zero`.
fn expand<F>(f: &mut F, f_zero: f64, guess: f64, limit: f64) -> Result<Expansion>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut f_lo) = (0.0, f_zero);
    let mut w = guess.min(limit);
    for _ in 0..MAX_EXPANSIONS {
        let fw = f(w)?;
        if fw >= 0.0 {
            return Ok(Expansion::Bracket {
                lo,
                hi: w,
                f_lo,
                f_hi: fw,
            });
        }
        if w >= limit || !(2.0 * w).is_finite() {
            return Ok(Expansion::Limit(fw));
        }
        lo = w;
        f_lo = fw;
        w = (2.0 * w).min(limit);
    }
    Ok(Expansion::Limit(f_lo))
}

fn check_target(target: f64) -> Result<()> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(domain(format!(
            "target potential {target} V must be positive"
        )));
    }
    Ok(())
}

/// Finds x_right > x_start such that |moment over [x_start, x_right]| = target.
pub fn solve_one_sided(
    rho: &ChargeProfileFn,
    eps: &Permittivity,
    x_start: f64,
    target: f64,
) -> Result<ScrSolution> {
    check_target(target)?;
    if !x_start.is_finite() {
        return Err(domain("x_start must be finite"));
    }
    let support_room = rho.hi - x_start;
    let stack_room = eps.extent() - x_start;
    let stack_limited = stack_room < support_room;
    let limit = support_room.min(stack_room);
    if !(limit > 0.0) {
        return Err(if stack_limited {
            JunctionError::StackExhausted {
                thickness: eps.extent(),
            }
        } else {
            JunctionError::UnreachablePotential {
                target,
                supremum: 0.0,
            }
        });
    }
    let mut f =
        |w: f64| Ok(moment_local(rho, eps, x_start, 0.0, w, SOLVE_TOLERANCE)?.abs() - target);
    let (lo, hi, f_lo, f_hi) = match expand(&mut f, -target, rho.length_scale / 100.0, limit)? {
        Expansion::Bracket { lo, hi, f_lo, f_hi } => (lo, hi, f_lo, f_hi),
        Expansion::Limit(f_limit) => {
            return Err(if stack_limited {
                JunctionError::StackExhausted {
                    thickness: eps.extent(),
                }
            } else {
                JunctionError::UnreachablePotential {
                    target,
                    supremum: f_limit + target,
                }
            })
        }
    };
    let w = brent(&mut f, lo, hi, f_lo, f_hi, ROOT_OPTIONS)?;
    let m = moment_local(rho, eps, x_start, 0.0, w, SOLVE_TOLERANCE)?;
    Ok(ScrSolution::new(x_start, 0.0, w, m))
}

/// Two-boundary solution around the sign change of a net charge profile at
/// `x_j`: overall neutrality and |moment| = target hold simultaneously.
pub fn solve_two_sided(
    rho: &ChargeProfileFn,
    eps: &Permittivity,
    x_j: f64,
    target: f64,
) -> Result<ScrSolution> {
    check_target(target)?;
    let (lo_support, hi_support) = rho.support();
    if !(x_j > lo_support && x_j < hi_support) {
        return Err(domain(format!(
            "x_j = {x_j:e} m lies outside the charge support"
        )));
    }
    let probe = 1e-6 * rho.length_scale;
    let (left_sign, right_sign) = (
        rho.eval(x_j - probe).signum(),
        rho.eval(x_j + probe).signum(),
    );
    if left_sign == right_sign || left_sign == 0.0 || right_sign == 0.0 {
        return Err(domain(format!(
            "charge does not change sign at x_j = {x_j:e} m"
        )));
    }

    let surface_room = x_j - lo_support;
    let q_left_max = charge_local(rho, x_j, -surface_room, 0.0, SOLVE_TOLERANCE)?.abs();
    let q_left = |w: f64| charge_local(rho, x_j, -w, 0.0, SOLVE_TOLERANCE).map(f64::abs);
    let q_right = |w: f64| charge_local(rho, x_j, 0.0, w, SOLVE_TOLERANCE).map(f64::abs);
    let guess = rho.length_scale / 100.0;

    // Left extent that balances the charge on the right.
    let left_for = |w_r: f64| -> Result<f64> {
        let q = q_right(w_r)?;
        if q == 0.0 {
            return Ok(0.0);
        }
        if q >= q_left_max {
            return Ok(surface_room);
        }
        let mut f = |w: f64| Ok(q_left(w)? - q);
        match expand(&mut f, -q, w_r.min(guess), surface_room)? {
            Expansion::Bracket { lo, hi, f_lo, f_hi } => {
                brent(&mut f, lo, hi, f_lo, f_hi, ROOT_OPTIONS)
            }
            Expansion::Limit(_) => Ok(surface_room),
        }
    };

    let support_room = hi_support - x_j;
    let stack_room = eps.extent() - x_j;
    let outer_room = support_room.min(stack_room);
    if !(outer_room > 0.0) {
        return Err(JunctionError::StackExhausted {
            thickness: eps.extent(),
        });
    }
    // Largest right extent the surface side can still neutralize.
    let mut f_cap = |w: f64| Ok(q_right(w)? - q_left_max);
    let (right_cap, surface_limited) = match expand(&mut f_cap, -q_left_max, guess, outer_room)? {
        Expansion::Bracket { lo, hi, f_lo, f_hi } => {
            (brent(&mut f_cap, lo, hi, f_lo, f_hi, ROOT_OPTIONS)?, true)
        }
        Expansion::Limit(_) => (outer_room, false),
    };

    let mut g = |w_r: f64| -> Result<f64> {
        let w_l = left_for(w_r)?;
        Ok(moment_local(rho, eps, x_j, -w_l, w_r, SOLVE_TOLERANCE)?.abs() - target)
    };
    let (lo, hi, f_lo, f_hi) = match expand(&mut g, -target, guess, right_cap)? {
        Expansion::Bracket { lo, hi, f_lo, f_hi } => (lo, hi, f_lo, f_hi),
        Expansion::Limit(f_limit) => {
            return Err(if surface_limited {
                JunctionError::SurfaceReached
            } else if stack_room < support_room {
                JunctionError::StackExhausted {
                    thickness: eps.extent(),
                }
            } else {
                JunctionError::UnreachablePotential {
                    target,
                    supremum: f_limit + target,
                }
            })
        }
    };
    let w_r = brent(&mut g, lo, hi, f_lo, f_hi, ROOT_OPTIONS)?;
    let w_l = left_for(w_r)?;
    let residual = charge_local(rho, x_j, -w_l, w_r, SOLVE_TOLERANCE)?.abs();
    let positive = q_right(w_r)?;
    if residual > 1e-10 * positive {
        return Err(JunctionError::NoConvergence(format!(
            "neutrality residual {residual:e} C/m^2 exceeds 1e-10 of {positive:e}"
        )));
    }
    let m = moment_local(rho, eps, x_j, -w_l, w_r, SOLVE_TOLERANCE)?;
    Ok(ScrSolution::new(x_j, w_l, w_r, m))
}

/// One-sided solve with a layered permittivity.
pub fn solve_hetero(
    stack: &HeteroStack,
    rho: &ChargeProfileFn,
    x_start: f64,
    target: f64,
) -> Result<ScrSolution> {
    if !(x_start >= 0.0 && x_start < stack.thickness()) {
        return Err(domain(format!(
            "x_start = {x_start:e} m lies outside the {:e} m stack",
            stack.thickness()
        )));
    }
    solve_one_sided(rho, &Permittivity::Layered(stack.clone()), x_start, target)
}

/// E(x) = integral of rho/eps from x_left, u(x) = -integral of E with u(x_left) = 0,
/// on `n_samples` evenly spaced points including both ends.
pub fn reconstruct_field_potential(
    rho: &ChargeProfileFn,
    eps: &Permittivity,
    x_left: f64,
    x_right: f64,
    n_samples: usize,
) -> Result<Vec<FieldSample>> {
    if !(x_left < x_right) {
        return Err(domain("reconstruction needs x_left < x_right"));
    }
    reconstruct_local(rho, eps, x_left, 0.0, x_right - x_left, n_samples)
}

fn reconstruct_local(
    rho: &ChargeProfileFn,
    eps: &Permittivity,
    origin: f64,
    t0: f64,
    t1: f64,
    n_samples: usize,
) -> Result<Vec<FieldSample>> {
    if n_samples < 2 {
        return Err(domain("at least two samples are required"));
    }
    check_extent(eps, origin, t1)?;
    let span = t1 - t0;
    let at = |i: usize| {
        if i + 1 == n_samples {
            t1
        } else {
            t0 + span * i as f64 / (n_samples - 1) as f64
        }
    };
    let field_density = |t: f64| {
        let x = origin + t;
        rho.eval(x) / eps.at(x)
    };
    // Absolute floors from the field scale of the whole region: near a sign
    // change of rho a single sub-interval carries almost no charge, and
    // cancellation noise in rho would otherwise block convergence there.
    let whole = local_breaks(rho, eps, origin, t0, t1);
    let coarse = Tolerance {
        rel: 1e-6,
        ..SOLVE_TOLERANCE
    };
    let e_scale = integrate(|t| field_density(t).abs(), &whole, coarse)?.value;
    let e_tol = Tolerance {
        abs: 1e-14 * e_scale,
        ..SOLVE_TOLERANCE
    };
    let u_tol = Tolerance {
        abs: 1e-14 * e_scale * span,
        ..SOLVE_TOLERANCE
    };
    let mut out = Vec::with_capacity(n_samples);
    let (mut e, mut u) = (0.0, 0.0);
    out.push(FieldSample {
        x: origin + t0,
        e,
        u,
    });
    for i in 1..n_samples {
        let (a, b) = (at(i - 1), at(i));
        let breaks = local_breaks(rho, eps, origin, a, b);
        let de = integrate(field_density, &breaks, e_tol)?.value;
        // Integral of E over [a, b] = E(a)(b - a) + integral of (b - s) rho/eps ds.
        let lever = integrate(|s| (b - s) * field_density(s), &breaks, u_tol)?.value;
        u -= e * (b - a) + lever;
        e += de;
        out.push(FieldSample {
            x: origin + b,
            e,
            u,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{gaussian_moment, validity_window, w_sc_general, Bias, JunctionSpec};
    use crate::physcore::{builtin_materials, find_material, EPS0, Q};
    use crate::profile::Polarity;

    fn si() -> Material {
        find_material(&builtin_materials(), "Si").unwrap().clone()
    }

    fn worked() -> JunctionSpec {
        let p = GaussianProfile::new(1e24, 1e-5, 1e21, Polarity::DonorIntoP).unwrap();
        JunctionSpec::new(si(), p, 300.0).unwrap()
    }

    #[test]
    fn constant_charge_moment() {
        let rho = ChargeProfileFn::constant(3.0, 0.0, 10.0).unwrap();
        let m = moment_integral(&rho, &Permittivity::Uniform(2.0), 0.0, 4.0).unwrap();
        assert!((m - 3.0 * 16.0 / 4.0).abs() < 1e-13);
    }

    #[test]
    fn odd_charge_moment() {
        let rho = ChargeProfileFn::custom(|x| x, -1.0, 1.0, vec![]).unwrap();
        let m = moment_integral(&rho, &Permittivity::Uniform(1.0), -1.0, 1.0).unwrap();
        assert!((m - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moment_matches_antiderivative() {
        let s = worked();
        let rho = ChargeProfileFn::gaussian(&s.profile, ChargeModel::Bare);
        let eps = Permittivity::Uniform(s.eps());
        for w in [1e-9, 2.84e-7, 5e-6, 4e-5] {
            let m = moment_integral(&rho, &eps, s.x_j, s.x_j + w).unwrap();
            let exact = gaussian_moment(&s.profile, s.eps(), s.x_j, s.x_j + w);
            assert!((m / exact - 1.0).abs() < 1e-10, "w = {w}: {m} vs {exact}");
        }
    }

    #[test]
    fn one_sided_matches_closed_form() {
        let s = worked();
        let rho = ChargeProfileFn::gaussian(&s.profile, ChargeModel::Bare);
        let eps = Permittivity::Uniform(s.eps());
        let r = w_sc_general(&s, Bias::reverse(10.0).unwrap()).unwrap();
        let sol = solve_one_sided(&rho, &eps, s.x_j, r.total_potential).unwrap();
        assert!((sol.width() / r.w_sc - 1.0).abs() < 1e-6);
        assert!((sol.moment_value / r.total_potential - 1.0).abs() < 1e-10);
        assert_eq!(sol.x_left, s.x_j);
    }

    #[test]
    fn constant_charge_inverse() {
        let (rho_v, eps_v, target) = (Q * 1e22, 11.7 * EPS0, 5.0);
        let rho = ChargeProfileFn::constant(rho_v, 0.0, 1.0)
            .unwrap()
            .with_length_scale(1e-6);
        let sol = solve_one_sided(&rho, &Permittivity::Uniform(eps_v), 0.0, target).unwrap();
        let exact = (2.0 * eps_v * target / rho_v).sqrt();
        assert!((sol.width() / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unreachable_reports_supremum() {
        let s = worked();
        let rho = ChargeProfileFn::gaussian(&s.profile, ChargeModel::Bare);
        let eps = Permittivity::Uniform(s.eps());
        let bound = validity_window(&s).unwrap().v_max_reverse + s.v_bi;
        match solve_one_sided(&rho, &eps, s.x_j, 1.01 * bound) {
            Err(JunctionError::UnreachablePotential { supremum, .. }) => {
                assert!((supremum / bound - 1.0).abs() < 1e-9)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symmetric_step_depletes_symmetrically() {
        let n = Q * 1e22;
        let rho = ChargeProfileFn::step(5e-6, n, -n, 0.0, 1e-4)
            .unwrap()
            .with_length_scale(1e-5);
        let sol = solve_two_sided(&rho, &Permittivity::Uniform(11.7 * EPS0), 5e-6, 1.0).unwrap();
        assert!((sol.extent_left / sol.extent_right - 1.0).abs() < 1e-10);
    }

    #[test]
    fn asymmetric_step_ratio() {
        let nd = Q * 1e21;
        let rho = ChargeProfileFn::step(5e-5, nd, -100.0 * nd, 0.0, 1e-3)
            .unwrap()
            .with_length_scale(1e-5);
        let sol = solve_two_sided(&rho, &Permittivity::Uniform(11.7 * EPS0), 5e-5, 2.0).unwrap();
        assert!((sol.extent_left / sol.extent_right - 100.0).abs() < 1e-7);
    }

    #[test]
    fn two_sided_field_contract() {
        let s = worked();
        let rho = ChargeProfileFn::gaussian(&s.profile, ChargeModel::Net);
        let eps = Permittivity::Uniform(s.eps());
        let target = s.v_bi + 10.0;
        let mut sol = solve_two_sided(&rho, &eps, s.x_j, target).unwrap();
        assert!((sol.moment_value.abs() / target - 1.0).abs() < 1e-10);
        let samples = sol.reconstruct(&rho, &eps, 201).unwrap().to_vec();
        let e_max = samples.iter().map(|p| p.e.abs()).fold(0.0, f64::max);
        assert!(samples[0].e.abs() <= 1e-9 * e_max);
        assert!(
            samples[200].e.abs() <= 1e-9 * e_max,
            "{}",
            samples[200].e / e_max
        );
        let drop = sol.potential_drop.unwrap();
        assert!((drop.abs() / target - 1.0).abs() < 1e-8, "{drop}");
    }

    #[test]
    fn reconstruct_through_cancelling_charge() {
        // Deep junction with N0/N_B ~ 13: rho is a near-cancelling difference at x_j.
        let p = GaussianProfile::new(
            1.0072553193027093e22,
            8.728981500706692e-5,
            7.562397759379273e20,
            Polarity::DonorIntoP,
        )
        .unwrap();
        let s = JunctionSpec::new(si(), p, 300.0).unwrap();
        let rho = ChargeProfileFn::gaussian(&s.profile, ChargeModel::Net);
        let eps = Permittivity::Uniform(s.eps());
        let mut sol = solve_two_sided(&rho, &eps, s.x_j, s.v_bi + 1.0).unwrap();
        let samples = sol.reconstruct(&rho, &eps, 201).unwrap().to_vec();
        let e_max = samples.iter().map(|p| p.e.abs()).fold(0.0, f64::max);
        assert!(samples[200].e.abs() <= 1e-9 * e_max);
    }

    #[test]
    fn surface_reached() {
        // Thin heavily doped cap cannot neutralize a large depletion.
        let n = Q * 1e22;
        let rho = ChargeProfileFn::step(1e-8, n, -n, 0.0, 1e-3)
            .unwrap()
            .with_length_scale(1e-6);
        assert!(matches!(
            solve_two_sided(&rho, &Permittivity::Uniform(11.7 * EPS0), 1e-8, 10.0),
            Err(JunctionError::SurfaceReached)
        ));
    }

    #[test]
    fn constant_field_is_affine() {
        let rho = ChargeProfileFn::constant(2.0, 0.0, 1.0).unwrap();
        let samples =
            reconstruct_field_potential(&rho, &Permittivity::Uniform(4.0), 0.0, 1.0, 11).unwrap();
        for p in &samples {
            assert!((p.e - 0.5 * p.x).abs() < 1e-12);
            assert!((p.u + 0.25 * p.x * p.x).abs() < 1e-12);
        }
    }

    #[test]
    fn hetero_cases() {
        let (rho_v, eps1) = (Q * 1e22, 11.7 * EPS0);
        let m1 = Material::new("A", 11.7, 1e16, 300.0).unwrap();
        let m2 = Material::new("B", 23.4, 1e16, 300.0).unwrap();
        let rho = ChargeProfileFn::constant(rho_v, 0.0, 1.0)
            .unwrap()
            .with_length_scale(1e-6);
        let (a, b1) = (1e-7, 3e-7);
        let stack = HeteroStack::new(vec![
            Layer {
                material: m1.clone(),
                thickness: b1,
            },
            Layer {
                material: m2,
                thickness: 1e-3,
            },
        ])
        .unwrap();
        let target = 2.0;
        let sol = solve_hetero(&stack, &rho, a, target).unwrap();
        let head = rho_v / (2.0 * eps1) * (b1 * b1 - a * a);
        let b = (b1 * b1 + 4.0 * eps1 / rho_v * (target - head)).sqrt();
        assert!((sol.x_right / b - 1.0).abs() < 1e-10);

        let single = HeteroStack::new(vec![Layer {
            material: m1.clone(),
            thickness: 1e-3,
        }])
        .unwrap();
        let s1 = solve_hetero(&single, &rho, a, target).unwrap();
        let h =
            solve_one_sided(&rho, &Permittivity::Uniform(m1.permittivity()), a, target).unwrap();
        assert!((s1.width() / h.width() - 1.0).abs() < 1e-12);

        let thin = HeteroStack::new(vec![Layer {
            material: m1,
            thickness: 2e-7,
        }])
        .unwrap();
        assert!(matches!(
            solve_hetero(&thin, &rho, a, target),
            Err(JunctionError::StackExhausted { .. })
        ));
    }
}
