// SPDX-License-Identifier: Apache-2.0

use junctionlab_core::closedform::gaussian_moment_from;
use junctionlab_core::physcore::{builtin_materials, find_material};
use junctionlab_core::{
    validity_window, w_sc_general, Bias, GaussianProfile, JunctionSpec, Polarity,
};
use proptest::prelude::*;

fn junction(log_n0: f64, log_ratio: f64, log_ld: f64) -> Option<JunctionSpec> {
    let si = find_material(&builtin_materials(), "Si").unwrap().clone();
    let n0 = 10f64.powf(log_n0);
    let p = GaussianProfile::new(
        n0,
        10f64.powf(log_ld),
        n0 / 10f64.powf(log_ratio),
        Polarity::DonorIntoP,
    )
    .ok()?;
    let s = JunctionSpec::new(si, p, 300.0).ok()?;
    validity_window(&s).ok()?;
    Some(s)
}

proptest! {
    #[test]
    fn width_grows_with_reverse_bias(
        log_n0 in 22.0..26.0f64, log_ratio in 1.0..4.0f64, log_ld in -7.0..-4.0f64,
        f1 in 0.0..0.99f64, f2 in 0.0..0.99f64,
    ) {
        let Some(s) = junction(log_n0, log_ratio, log_ld) else { return Ok(()) };
        let vmax = validity_window(&s).unwrap().v_max_reverse;
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let a = w_sc_general(&s, Bias::reverse(lo * vmax).unwrap()).unwrap();
        let b = w_sc_general(&s, Bias::reverse(hi * vmax).unwrap()).unwrap();
        prop_assert!(a.w_sc <= b.w_sc);
        prop_assert!(a.c_b >= b.c_b);
    }

    #[test]
    fn back_substitution(
        log_n0 in 22.0..26.0f64, log_ratio in 1.0..4.0f64, log_ld in -7.0..-4.0f64,
        signed in -0.999..0.999f64,
    ) {
        let Some(s) = junction(log_n0, log_ratio, log_ld) else { return Ok(()) };
        let w = validity_window(&s).unwrap();
        let v = if signed < 0.0 { signed * w.v_max_forward } else { signed * w.v_max_reverse };
        let r = w_sc_general(&s, Bias::from_signed(v).unwrap()).unwrap();
        let m = gaussian_moment_from(&s.profile, s.eps(), s.x_j, r.w_sc);
        prop_assert!((m / r.total_potential - 1.0).abs() <= 1e-12);
        prop_assert!((r.c_b * r.w_sc / s.eps() - 1.0).abs() <= 1e-14);
    }
}
