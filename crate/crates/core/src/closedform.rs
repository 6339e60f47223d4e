// SPDX-License-Identifier: Apache-2.0

//! Closed-form depletion width and barrier capacitance of a Gaussian
//! diffused junction, in the general, shallow and deep-diffused forms.
//!
//! All three forms share the reduced variables
//!
//! * `a = x_j / L_d`
//! * `V_ref = q N0 L_d^2 / (2 eps)`, the scale of the Gauss moment
//! * `u = V_tot e^{a^2} / V_ref`, so the log argument is `A = e^{-a^2} (1 - u)`
//!
//! and the general width `L_d sqrt(-ln A) - x_j` is evaluated as
//! `L_d (-ln(1-u)) / (sqrt(-ln A) + a)`. The two expressions are equal;
//! the second keeps full precision when the depletion layer is thin
//! compared to `x_j`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, JunctionError, Result};
use crate::physcore::{thermal_voltage, Material, Q};
use crate::profile::GaussianProfile;

/// A solvable junction: material, profile, junction depth and built-in potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionSpec {
    pub material: Material,
    pub profile: GaussianProfile,
    /// Junction depth, m.
    pub x_j: f64,
    /// Built-in potential, V.
    pub v_bi: f64,
    /// Temperature, K.
    pub temp: f64,
}

impl JunctionSpec {
    /// Builds a spec with x_j taken from the profile and V_bi from [`default_vbi`].
    pub fn new(material: Material, profile: GaussianProfile, temp: f64) -> Result<Self> {
        let x_j = profile.junction_depth()?;
        let v_bi = default_vbi(&profile, &material, temp)?;
        Self::with_values(material, profile, x_j, v_bi, temp)
    }

    /// Builds a spec with explicit x_j and V_bi.
    pub fn with_values(
        material: Material,
        profile: GaussianProfile,
        x_j: f64,
        v_bi: f64,
        temp: f64,
    ) -> Result<Self> {
        if !(x_j >= 0.0 && x_j.is_finite()) {
            return Err(domain(format!("x_j = {x_j} m must be non-negative")));
        }
        if !(v_bi > 0.0 && v_bi.is_finite()) {
            return Err(domain(format!("V_bi = {v_bi} V must be positive")));
        }
        if !(temp > 0.0 && temp.is_finite()) {
            return Err(domain(format!("temperature {temp} K must be positive")));
        }
        Ok(JunctionSpec {
            material,
            profile,
            x_j,
            v_bi,
            temp,
        })
    }

    pub fn override_xj(mut self, x_j: f64) -> Result<Self> {
        self = Self::with_values(self.material, self.profile, x_j, self.v_bi, self.temp)?;
        Ok(self)
    }

    pub fn override_vbi(mut self, v_bi: f64) -> Result<Self> {
        self = Self::with_values(self.material, self.profile, self.x_j, v_bi, self.temp)?;
        Ok(self)
    }

    /// Absolute permittivity, F/m.
    pub fn eps(&self) -> f64 {
        self.material.permittivity()
    }

    /// q N0 L_d^2 / (2 eps), V.
    pub fn moment_scale(&self) -> f64 {
        let p = &self.profile;
        Q * p.n0 * p.ld * p.ld / (2.0 * self.eps())
    }

    /// exp(-x_j^2 / L_d^2).
    pub fn junction_factor(&self) -> f64 {
        let a = self.x_j / self.profile.ld;
        (-a * a).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasDirection {
    Reverse,
    Forward,
}

/// A bias magnitude and direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bias {
    value: f64,
    direction: BiasDirection,
}

impl Bias {
    pub fn reverse(value: f64) -> Result<Self> {
        Self::new(value, BiasDirection::Reverse)
    }

    pub fn forward(value: f64) -> Result<Self> {
        Self::new(value, BiasDirection::Forward)
    }

    pub fn new(value: f64, direction: BiasDirection) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(domain(format!(
                "bias magnitude {value} V must be non-negative"
            )));
        }
        Ok(Bias { value, direction })
    }

    /// Positive values are reverse bias, negative values forward bias.
    pub fn from_signed(v: f64) -> Result<Self> {
        if v < 0.0 {
            Self::forward(-v)
        } else {
            Self::reverse(v)
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn direction(&self) -> BiasDirection {
        self.direction
    }

    /// Reverse positive, forward negative.
    pub fn signed(&self) -> f64 {
        match self.direction {
            BiasDirection::Reverse => self.value,
            BiasDirection::Forward => -self.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    General,
    Shallow,
    Deep,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::General, Regime::Shallow, Regime::Deep];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::General => "general",
            Regime::Shallow => "shallow",
            Regime::Deep => "deep",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = JunctionError;

    /// `auto` is accepted and always resolves to [`Regime::General`].
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" | "auto" => Ok(Regime::General),
            "shallow" => Ok(Regime::Shallow),
            "deep" => Ok(Regime::Deep),
            _ => Err(domain(format!("unknown regime `{s}`"))),
        }
    }
}

/// One solved bias point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// V_bi + V_R or V_bi - V_F, V.
    pub total_potential: f64,
    /// Depletion width, m.
    pub w_sc: f64,
    /// Barrier capacitance per area, F/m^2.
    pub c_b: f64,
    pub regime: Regime,
    /// The bracketed logarithm argument of the chosen form.
    pub log_argument: f64,
}

/// Admissible bias range; both bounds are exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityWindow {
    pub v_max_reverse: f64,
    pub v_max_forward: f64,
}

impl ValidityWindow {
    /// Whether a signed bias (reverse positive) lies strictly inside the window.
    pub fn contains(&self, signed_bias: f64) -> bool {
        signed_bias < self.v_max_reverse && -signed_bias < self.v_max_forward
    }
}

/// Total potential across the depletion layer.
pub fn total_potential(spec: &JunctionSpec, bias: Bias) -> Result<f64> {
    match bias.direction {
        BiasDirection::Reverse => Ok(spec.v_bi + bias.value),
        BiasDirection::Forward => {
            if bias.value >= spec.v_bi {
                Err(JunctionError::FlatBandExceeded {
                    forward: bias.value,
                    v_bi: spec.v_bi,
                })
            } else {
                Ok(spec.v_bi - bias.value)
            }
        }
    }
}

/// V_T ln(N0 N_B / n_i^2).
pub fn default_vbi(profile: &GaussianProfile, material: &Material, temp: f64) -> Result<f64> {
    let vt = thermal_voltage(temp)?;
    let product = profile.n0 * profile.nb;
    let ni2 = material.n_i * material.n_i;
    if !(product > ni2) {
        return Err(JunctionError::DegenerateJunction { product, ni2 });
    }
    // ln(N0/n_i) + ln(N_B/n_i) avoids overflow of the product for extreme inputs.
    Ok(vt * ((profile.n0 / material.n_i).ln() + (profile.nb / material.n_i).ln()))
}

/// Reverse bias limit from the log argument reaching zero; forward limit V_bi.
pub fn validity_window(spec: &JunctionSpec) -> Result<ValidityWindow> {
    let v_max_reverse = reverse_limit(spec);
    if !(v_max_reverse > 0.0) {
        return Err(JunctionError::InvalidAtEquilibrium { v_max_reverse });
    }
    Ok(ValidityWindow {
        v_max_reverse,
        v_max_forward: spec.v_bi,
    })
}

fn reverse_limit(spec: &JunctionSpec) -> f64 {
    spec.moment_scale() * spec.junction_factor() - spec.v_bi
}

/// Depletion width for a given total potential, m. A zero potential gives
/// zero width in the general and deep forms and `x_j` in the shallow form.
pub fn width_at_potential(spec: &JunctionSpec, regime: Regime, v_total: f64) -> Result<(f64, f64)> {
    if !(v_total >= 0.0) || !v_total.is_finite() {
        return Err(domain(format!(
            "total potential {v_total} V must be non-negative"
        )));
    }
    let ld = spec.profile.ld;
    let scale = spec.moment_scale();
    match regime {
        Regime::General | Regime::Shallow => {
            let a = spec.x_j / ld;
            let e = spec.junction_factor();
            let log_argument = e - v_total / scale;
            let u = v_total / (scale * e);
            if !(log_argument > 0.0) || !(u < 1.0) {
                return Err(JunctionError::PunchThrough {
                    log_argument,
                    v_max_reverse: reverse_limit(spec),
                });
            }
            // -ln(1 - u) = -ln A - a^2
            let excess = -(-u).ln_1p();
            let s = (a * a + excess).sqrt();
            let w = match regime {
                Regime::Shallow => ld * s,
                _ if excess == 0.0 => 0.0,
                _ if a == 0.0 => ld * s,
                _ => ld * excess / (s + a),
            };
            Ok((w, log_argument))
        }
        Regime::Deep => {
            let r = v_total / scale;
            let log_argument = 1.0 - r;
            if !(r < 1.0) {
                return Err(JunctionError::PunchThrough {
                    log_argument,
                    v_max_reverse: scale - spec.v_bi,
                });
            }
            Ok((ld * (-(-r).ln_1p()).sqrt(), log_argument))
        }
    }
}

fn solve_regime(spec: &JunctionSpec, bias: Bias, regime: Regime) -> Result<SolveResult> {
    let v_total = total_potential(spec, bias)?;
    let (w_sc, log_argument) = width_at_potential(spec, regime, v_total)?;
    if !(w_sc > 0.0) {
        return Err(domain(format!(
            "zero depletion width at total potential {v_total} V"
        )));
    }
    Ok(SolveResult {
        total_potential: v_total,
        w_sc,
        c_b: spec.eps() / w_sc,
        regime,
        log_argument,
    })
}

/// General closed form: W = L_d sqrt(ln(1/A)) - x_j, C_b = eps/W.
pub fn w_sc_general(spec: &JunctionSpec, bias: Bias) -> Result<SolveResult> {
    solve_regime(spec, bias, Regime::General)
}

/// Shallow form: W = L_d sqrt(-ln A), no x_j subtraction.
pub fn w_sc_shallow(spec: &JunctionSpec, bias: Bias) -> Result<SolveResult> {
    solve_regime(spec, bias, Regime::Shallow)
}

/// Deep-diffused form: the junction factor exp(-x_j^2/L_d^2) taken as one.
pub fn w_sc_deep(spec: &JunctionSpec, bias: Bias) -> Result<SolveResult> {
    solve_regime(spec, bias, Regime::Deep)
}

pub fn solve(spec: &JunctionSpec, bias: Bias, regime: Regime) -> Result<SolveResult> {
    solve_regime(spec, bias, regime)
}

/// The automatic choice is always the general form.
pub fn solve_auto(spec: &JunctionSpec, bias: Bias) -> Result<SolveResult> {
    solve_regime(spec, bias, Regime::General)
}

/// Barrier capacitance eps / W, F/m^2.
pub fn capacitance(spec: &JunctionSpec, bias: Bias, regime: Regime) -> Result<f64> {
    Ok(solve_regime(spec, bias, regime)?.c_b)
}

/// Closed antiderivative of the Gauss moment:
/// (q N0 L_d^2 / 2 eps) [exp(-lo^2/L_d^2) - exp(-hi^2/L_d^2)], V.
pub fn gaussian_moment(profile: &GaussianProfile, eps: f64, lo: f64, hi: f64) -> f64 {
    gaussian_moment_from(profile, eps, lo, hi - lo)
}

/// [`gaussian_moment`] over [start, start + width]. Takes the width itself so a
/// layer much thinner than `start` keeps its precision.
pub fn gaussian_moment_from(profile: &GaussianProfile, eps: f64, start: f64, width: f64) -> f64 {
    let ld = profile.ld;
    let scale = Q * profile.n0 * ld * ld / (2.0 * eps);
    let (l, d) = (start / ld, width / ld);
    scale * (-l * l).exp() * -(-d * (2.0 * l + d)).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physcore::{builtin_materials, find_material};
    use crate::profile::Polarity;

    fn si() -> Material {
        find_material(&builtin_materials(), "Si").unwrap().clone()
    }

    fn worked(ld: f64) -> JunctionSpec {
        let p = GaussianProfile::new(1e24, ld, 1e21, Polarity::DonorIntoP).unwrap();
        JunctionSpec::new(si(), p, 300.0).unwrap()
    }

    #[test]
    fn total_potential_examples() {
        let s = worked(1e-5).override_vbi(0.774).unwrap();
        assert!(
            (total_potential(&s, Bias::reverse(10.0).unwrap()).unwrap() - 10.774).abs() < 1e-12
        );
        assert!((total_potential(&s, Bias::forward(0.3).unwrap()).unwrap() - 0.474).abs() < 1e-12);
        assert!(matches!(
            total_potential(&s, Bias::forward(0.774).unwrap()),
            Err(JunctionError::FlatBandExceeded { .. })
        ));
        assert!(Bias::reverse(-1.0).is_err());
    }

    #[test]
    fn default_vbi_examples() {
        let s = worked(1e-5);
        assert!((s.v_bi - 0.77385).abs() < 1e-4);
        let p = s.profile;
        let mut m = si();
        m.n_i = (p.n0 * p.nb).sqrt();
        assert!(matches!(
            default_vbi(&p, &m, 300.0),
            Err(JunctionError::DegenerateJunction { .. })
        ));
        let mut doubled = si();
        doubled.n_i *= 2.0;
        let v1 = default_vbi(&p, &si(), 300.0).unwrap();
        let v2 = default_vbi(&p, &doubled, 300.0).unwrap();
        let vt = thermal_voltage(300.0).unwrap();
        assert!((v1 - v2 - 2.0 * vt * 2f64.ln()).abs() < 1e-12);
    }

    // Independent bisection on the printed log argument reaching zero.
    fn bisect_punch_through(s: &JunctionSpec) -> f64 {
        let arg = |vr: f64| {
            let a = s.x_j / s.profile.ld;
            (-a * a).exp()
                - 2.0 * s.eps() / (Q * s.profile.n0 * s.profile.ld.powi(2)) * (vr + s.v_bi)
        };
        let (mut lo, mut hi) = (0.0, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if arg(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        lo
    }

    #[test]
    fn validity_examples() {
        let s = worked(1e-5);
        let w = validity_window(&s).unwrap();
        assert!((w.v_max_reverse - 76.56).abs() < 0.01);
        assert!((w.v_max_reverse - bisect_punch_through(&s)).abs() < 1e-9 * w.v_max_reverse);
        assert_eq!(w.v_max_forward, s.v_bi);
        assert!(matches!(
            validity_window(&worked(1e-6)),
            Err(JunctionError::InvalidAtEquilibrium { .. })
        ));
    }

    #[test]
    fn general_worked_example() {
        let s = worked(1e-5);
        let r = w_sc_general(&s, Bias::reverse(10.0).unwrap()).unwrap();
        assert!((r.w_sc / 2.84e-7 - 1.0).abs() < 5e-3, "{}", r.w_sc);
        assert!((r.c_b / 3.65e-4 - 1.0).abs() < 5e-3, "{}", r.c_b);
        assert_eq!(r.regime, Regime::General);
        assert!(r.log_argument > 0.0 && r.log_argument <= s.junction_factor());
        assert!((r.c_b * r.w_sc / s.eps() - 1.0).abs() < 1e-12);

        let sh = w_sc_shallow(&s, Bias::reverse(10.0).unwrap()).unwrap();
        assert!((sh.w_sc - 2.65665e-5).abs() < 1e-10);
    }

    #[test]
    fn printed_form_agrees() {
        // The literal expression, usable where cancellation is harmless.
        let s = worked(1e-5);
        for vr in [0.0, 1.0, 10.0, 50.0, 76.0] {
            let v = vr + s.v_bi;
            let a = s.x_j / s.profile.ld;
            let arg = (-a * a).exp() - v / s.moment_scale();
            let printed = s.profile.ld * (1.0 / arg).ln().sqrt() - s.x_j;
            let r = w_sc_general(&s, Bias::reverse(vr).unwrap()).unwrap();
            assert!((r.w_sc - printed).abs() <= 1e-9 * r.w_sc + 1e-14 * s.x_j);
        }
    }

    #[test]
    fn zero_potential_limits() {
        let s = worked(1e-5);
        assert_eq!(width_at_potential(&s, Regime::General, 0.0).unwrap().0, 0.0);
        assert_eq!(width_at_potential(&s, Regime::Deep, 0.0).unwrap().0, 0.0);
        let (sh, _) = width_at_potential(&s, Regime::Shallow, 0.0).unwrap();
        assert!((sh - s.x_j).abs() < 1e-15);
        let s0 = s.clone().override_xj(0.0).unwrap();
        assert_eq!(
            width_at_potential(&s0, Regime::General, 0.0).unwrap().0,
            0.0
        );
    }

    #[test]
    fn divergence_at_punch_through() {
        let s = worked(1e-5);
        let scale = s.moment_scale();
        let mut last = 0.0;
        for target_a in [1e-6, 1e-9] {
            let v_total = (s.junction_factor() - target_a) * scale;
            let (w, arg) = width_at_potential(&s, Regime::General, v_total).unwrap();
            assert!((arg - target_a).abs() < 1e-4 * target_a);
            assert!(w > last);
            last = w;
        }
        let wmax = validity_window(&s).unwrap().v_max_reverse;
        assert!(matches!(
            w_sc_general(&s, Bias::reverse(wmax * 1.0001).unwrap()),
            Err(JunctionError::PunchThrough { .. })
        ));
    }

    #[test]
    fn regime_relations() {
        let s = worked(1e-5);
        for vr in [0.0, 0.5, 5.0, 20.0, 70.0] {
            let b = Bias::reverse(vr).unwrap();
            let g = w_sc_general(&s, b).unwrap();
            let sh = w_sc_shallow(&s, b).unwrap();
            assert!((sh.w_sc - g.w_sc - s.x_j).abs() <= 1e-12 * sh.w_sc);
            for r in [g, sh, w_sc_deep(&s, b).unwrap()] {
                assert!((r.c_b * r.w_sc / s.eps() - 1.0).abs() <= 1e-12);
                assert_eq!(capacitance(&s, b, r.regime).unwrap(), r.c_b);
            }
        }
        let s0 = s.clone().override_xj(0.0).unwrap();
        let b = Bias::reverse(3.0).unwrap();
        assert_eq!(
            w_sc_general(&s0, b).unwrap().w_sc,
            w_sc_shallow(&s0, b).unwrap().w_sc
        );
    }

    #[test]
    fn deep_matches_abrupt_limit() {
        let s = worked(1e-5);
        let v = 1e-4 * s.moment_scale();
        let (w, _) = width_at_potential(&s, Regime::Deep, v).unwrap();
        let abrupt = (2.0 * s.eps() * v / (Q * s.profile.n0)).sqrt();
        assert!((w / abrupt - 1.0).abs() < 1e-4);
    }

    #[test]
    fn deep_and_shallow_log_arguments() {
        let s = worked(1e-5);
        let s = s.clone().override_xj(0.01 * s.profile.ld).unwrap();
        for vr in [0.0, 10.0, 1000.0, 30000.0] {
            let b = Bias::reverse(vr).unwrap();
            let sh = w_sc_shallow(&s, b).unwrap();
            let d = w_sc_deep(&s, b).unwrap();
            let gap = (d.log_argument - sh.log_argument).abs() / d.log_argument;
            assert!(gap <= (1.0 - (-1e-4f64).exp()) * 1.0001 / d.log_argument);
        }
    }

    #[test]
    fn capacitance_monotone_in_reverse_bias() {
        let s = worked(1e-5);
        let vmax = validity_window(&s).unwrap().v_max_reverse;
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let c = capacitance(
                &s,
                Bias::reverse(vmax * i as f64 / 100.0).unwrap(),
                Regime::General,
            )
            .unwrap();
            assert!(c < last);
            last = c;
        }
    }

    #[test]
    fn moment_of_thin_layer() {
        let s = worked(1e-5);
        // Far forward bias: width ~1e-6 of x_j.
        let r = w_sc_general(&s, Bias::forward(s.v_bi * (1.0 - 1e-9)).unwrap()).unwrap();
        let m = gaussian_moment_from(&s.profile, s.eps(), s.x_j, r.w_sc);
        assert!(
            (m / r.total_potential - 1.0).abs() < 1e-12,
            "{}",
            m / r.total_potential - 1.0
        );
    }

    #[test]
    fn regime_parse() {
        assert_eq!("auto".parse::<Regime>().unwrap(), Regime::General);
        assert_eq!("deep".parse::<Regime>().unwrap(), Regime::Deep);
        assert!("bogus".parse::<Regime>().is_err());
    }
}
