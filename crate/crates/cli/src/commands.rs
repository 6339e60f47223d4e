// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use junctionlab_core::cvtools::{self, FitOptions, Format, InitialGuess};
use junctionlab_core::momentsolver::{solve_one_sided, solve_two_sided, FieldSample};
use junctionlab_core::physcore::units;
use junctionlab_core::{
    solve, validity_window, Bias, ChargeModel, ChargeProfileFn, JunctionError, JunctionSpec,
    Permittivity, SolveResult,
};

use crate::args::{
    material_database, read_material_file, FitArgs, FormatArg, MaterialsArgs, ModelArg, OracleArgs,
    SolveArgs, SweepArgs,
};
use crate::error::{exit, CliError};

/// Deviation threshold of the oracle command.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: exit::OK,
            stdout,
        }
    }
}

/// Same rendering as the CSV files.
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn dev(v: f64) -> String {
    format!("{v:.9e}")
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<28}{value}");
}

fn describe_junction(out: &mut String, spec: &JunctionSpec) {
    let p = &spec.profile;
    line(
        out,
        "material",
        format!("{} (eps_r {})", spec.material.name, spec.material.eps_r),
    );
    line(out, "temperature_K", spec.temp);
    line(out, "N0_cm3", dev(units::per_m3_to_per_cm3(p.n0)));
    line(out, "N_B_cm3", dev(units::per_m3_to_per_cm3(p.nb)));
    line(out, "L_d_um", dev(units::m_to_um(p.ld)));
    line(out, "x_j_um", dev(units::m_to_um(spec.x_j)));
    line(out, "V_bi_V", sci(spec.v_bi));
}

fn describe_window(out: &mut String, spec: &JunctionSpec) {
    match validity_window(spec) {
        Ok(w) => {
            line(out, "window_reverse_max_V", sci(w.v_max_reverse));
            line(out, "window_forward_max_V", sci(w.v_max_forward));
        }
        Err(e) => line(out, "window", e),
    }
}

fn validity_failure(spec: &JunctionSpec, e: JunctionError) -> CliError {
    let mut msg = e.to_string();
    msg.push('\n');
    describe_window(&mut msg, spec);
    let mut err = CliError::from(e);
    err.message = msg.trim_end().to_owned();
    err
}

fn solve_point(
    spec: &JunctionSpec,
    bias: f64,
    regime: junctionlab_core::Regime,
) -> Result<SolveResult, CliError> {
    let bias = Bias::from_signed(bias)?;
    solve(spec, bias, regime).map_err(|e| validity_failure(spec, e))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Outcome, CliError> {
    let spec = args.junction.spec()?;
    let r = solve_point(&spec, args.bias, args.regime.into())?;
    let mut out = String::new();
    describe_junction(&mut out, &spec);
    line(&mut out, "bias_V", args.bias);
    line(&mut out, "total_potential_V", sci(r.total_potential));
    describe_window(&mut out, &spec);
    line(&mut out, "regime", r.regime.as_str());
    line(&mut out, "log_argument", sci(r.log_argument));
    line(&mut out, "W_SC_um", dev(units::m_to_um(r.w_sc)));
    line(&mut out, "W_SC_m", sci(r.w_sc));
    line(
        &mut out,
        "C_b_nF_per_cm2",
        dev(units::f_per_m2_to_nf_per_cm2(r.c_b)),
    );
    line(&mut out, "C_b_F_per_m2", sci(r.c_b));
    Ok(Outcome::ok(out))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if path.as_os_str() == "-" {
        return std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::cant_create(format!("stdout: {e}")));
    }
    std::fs::write(path, bytes)
        .map_err(|e| CliError::cant_create(format!("{}: {e}", path.display())))
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let spec = args.junction.spec()?;
    if args.steps < 2 {
        return Err(CliError::usage(format!(
            "--steps must be at least 2, got {}",
            args.steps
        )));
    }
    if !(args.vstop > args.vstart) {
        return Err(CliError::usage("--vstop must exceed --vstart"));
    }
    let curve = cvtools::sweep(
        &spec,
        args.vstart,
        args.vstop,
        args.steps,
        args.regime.into(),
    )
    .map_err(|e| validity_failure(&spec, e))?;
    write_output(
        &args.out,
        &cvtools::serialize(&curve, format_of(args.format)),
    )?;
    let (lo, hi) = curve
        .points()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p.c_b), hi.max(p.c_b))
        });
    let mut out = String::new();
    let _ = writeln!(
        out,
        "points {} C_b {} .. {} F/m^2 ({} .. {} nF/cm^2)",
        curve.len(),
        sci(lo),
        sci(hi),
        dev(units::f_per_m2_to_nf_per_cm2(lo)),
        dev(units::f_per_m2_to_nf_per_cm2(hi))
    );
    // Data goes to stdout when --out is `-`; keep the summary on stderr then.
    if args.out.as_os_str() == "-" {
        eprint!("{out}");
        out.clear();
    }
    Ok(Outcome::ok(out))
}

pub fn cmd_fit(args: &FitArgs) -> Result<Outcome, CliError> {
    let material = args.material.resolve()?;
    let bytes = std::fs::read(&args.data)
        .map_err(|e| CliError::data(format!("{}: {e}", args.data.display())))?;
    let format = match args.format {
        Some(f) => format_of(f),
        None if args
            .data
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json")) =>
        {
            Format::Json
        }
        None => Format::Csv,
    };
    let curve = cvtools::deserialize(&bytes, format)
        .map_err(|e| CliError::data(format!("{}: {e}", args.data.display())))?;
    let mut opts = FitOptions::new(units::per_cm3_to_per_m3(args.nb));
    opts.polarity = args.polarity.into();
    opts.fit_vbi = args.fit_vbi;
    opts.initial_guess = match (args.n0_guess, args.ld_guess) {
        (Some(n0), Some(ld)) => Some(InitialGuess {
            n0: units::per_cm3_to_per_m3(n0),
            ld: units::um_to_m(ld),
            vbi: args.vbi_guess,
        }),
        _ if args.vbi_guess.is_some() => {
            return Err(CliError::usage(
                "--vbi-guess needs --n0-guess and --ld-guess",
            ))
        }
        _ => None,
    };
    let r = cvtools::fit(&curve, &material, args.material.temp, &opts)?;
    let mut out = String::new();
    line(&mut out, "points", curve.len());
    line(&mut out, "N0_cm3", dev(units::per_m3_to_per_cm3(r.n0_hat)));
    line(&mut out, "L_d_um", dev(units::m_to_um(r.ld_hat)));
    line(&mut out, "V_bi_V", dev(r.vbi_hat));
    line(&mut out, "objective", dev(r.objective));
    line(&mut out, "iterations", r.iterations);
    line(&mut out, "converged", r.converged);
    Ok(Outcome {
        code: if r.converged {
            exit::OK
        } else {
            exit::NOT_CONVERGED
        },
        stdout: out,
    })
}

fn write_profile(path: &Path, samples: &[FieldSample]) -> Result<(), CliError> {
    let mut s = String::from("x_m,e_field_V_per_m,potential_V\n");
    for p in samples {
        let _ = writeln!(s, "{},{},{}", sci(p.x), sci(p.e), sci(p.u));
    }
    write_output(path, s.as_bytes())
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<Outcome, CliError> {
    let spec = args.junction.spec()?;
    if args.samples < 2 {
        return Err(CliError::usage("--samples must be at least 2"));
    }
    let closed = solve_point(&spec, args.bias, junctionlab_core::Regime::General)?;
    let eps = Permittivity::Uniform(spec.eps());
    let (model, model_name) = match args.model {
        ModelArg::Bare => (ChargeModel::Bare, "bare"),
        ModelArg::Net => (ChargeModel::Net, "net"),
    };
    let rho = ChargeProfileFn::gaussian(&spec.profile, model);
    let mut numeric = solve_one_sided(&rho, &eps, spec.x_j, closed.total_potential)?;
    let deviation = numeric.width() - closed.w_sc;
    let relative = deviation.abs() / closed.w_sc;

    let mut out = String::new();
    line(&mut out, "model", model_name);
    line(&mut out, "total_potential_V", sci(closed.total_potential));
    line(&mut out, "closed_form_W_SC_m", sci(closed.w_sc));
    line(&mut out, "numerical_W_SC_m", sci(numeric.width()));
    line(&mut out, "abs_deviation_m", dev(deviation.abs()));
    line(&mut out, "rel_deviation", dev(relative));

    let mut profile_source = None;
    if args.two_sided {
        let net = ChargeProfileFn::gaussian(&spec.profile, ChargeModel::Net);
        let mut two = solve_two_sided(&net, &eps, spec.x_j, closed.total_potential)?;
        let rel = (two.width() - closed.w_sc).abs() / closed.w_sc;
        line(&mut out, "two_sided_x_left_m", sci(two.x_left));
        line(&mut out, "two_sided_x_right_m", sci(two.x_right));
        line(&mut out, "two_sided_width_m", sci(two.width()));
        line(&mut out, "two_sided_rel_deviation", dev(rel));
        if args.emit_profile.is_some() {
            two.reconstruct(&net, &eps, args.samples)?;
            profile_source = Some(two);
        }
    } else if args.emit_profile.is_some() {
        numeric.reconstruct(&rho, &eps, args.samples)?;
        profile_source = Some(numeric);
    }
    if let (Some(path), Some(sol)) = (&args.emit_profile, &profile_source) {
        write_profile(path, &sol.field_samples)?;
        let e_max = sol
            .field_samples
            .iter()
            .map(|p| p.e.abs())
            .fold(0.0, f64::max);
        let last = sol.field_samples[sol.field_samples.len() - 1];
        line(&mut out, "profile_samples", sol.field_samples.len());
        line(
            &mut out,
            "profile_end_field_ratio",
            dev(last.e.abs() / e_max),
        );
        line(
            &mut out,
            "profile_potential_drop_V",
            sci(sol.potential_drop.unwrap_or(f64::NAN)),
        );
    }

    let gated = matches!(args.model, ModelArg::Bare);
    let pass = !gated || relative < ORACLE_TOLERANCE;
    line(
        &mut out,
        "verdict",
        match (gated, pass) {
            (false, _) => "diagnostic",
            (true, true) => "agree",
            (true, false) => "DEVIATION",
        },
    );
    Ok(Outcome {
        code: if pass {
            exit::OK
        } else {
            exit::ORACLE_DEVIATION
        },
        stdout: out,
    })
}

pub fn cmd_materials(args: &MaterialsArgs) -> Result<Outcome, CliError> {
    let mut db = material_database()?;
    if let Some(path) = &args.file {
        db = junctionlab_core::physcore::merge_materials(db, read_material_file(path)?);
    }
    let mut out = String::from("name,eps_r,n_i_cm3,temp_K\n");
    for m in &db {
        let _ = writeln!(
            out,
            "{},{},{:e},{}",
            m.name,
            m.eps_r,
            units::per_m3_to_per_cm3(m.n_i),
            m.temp_ref
        );
    }
    Ok(Outcome::ok(out))
}
