// SPDX-License-Identifier: Apache-2.0

//! Command-line flags. Device units (cm^-3, µm, cm^2/s) are converted to SI
//! here and nowhere else.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use junctionlab_core::physcore::{
    builtin_materials, find_material, merge_materials, parse_material_table, units,
};
use junctionlab_core::{
    default_vbi, DiffusionRecipe, GaussianProfile, JunctionSpec, Material, Polarity, Regime,
};

use crate::error::CliError;

pub const MATERIALS_ENV: &str = "JUNCTIONLAB_MATERIALS";

#[derive(Debug, Parser)]
#[command(
    name = "junctionlab",
    version,
    about = "Depletion width and capacitance of Gaussian diffused junctions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one bias point.
    Solve(SolveArgs),
    /// Write a C-V sweep to CSV or JSON.
    Sweep(SweepArgs),
    /// Extract N0, L_d (and V_bi) from C-V data.
    Fit(FitArgs),
    /// Compare the closed form with the numerical moment solver.
    Oracle(OracleArgs),
    /// List the material database.
    Materials(MaterialsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegimeArg {
    General,
    Shallow,
    Deep,
    Auto,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::General | RegimeArg::Auto => Regime::General,
            RegimeArg::Shallow => Regime::Shallow,
            RegimeArg::Deep => Regime::Deep,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolarityArg {
    DonorIntoP,
    AcceptorIntoN,
}

impl From<PolarityArg> for Polarity {
    fn from(p: PolarityArg) -> Self {
        match p {
            PolarityArg::DonorIntoP => Polarity::DonorIntoP,
            PolarityArg::AcceptorIntoN => Polarity::AcceptorIntoN,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Bare,
    Net,
}

#[derive(Debug, Args)]
pub struct MaterialArgs {
    /// Material name from the database (builtin plus $JUNCTIONLAB_MATERIALS).
    #[arg(long, default_value = "Si")]
    pub material: String,
    /// Custom relative permittivity; overrides the named material's value.
    #[arg(long)]
    pub eps_r: Option<f64>,
    /// Custom intrinsic concentration, cm^-3.
    #[arg(long)]
    pub ni: Option<f64>,
    /// Temperature, K.
    #[arg(long, default_value_t = 300.0)]
    pub temp: f64,
}

#[derive(Debug, Args)]
pub struct JunctionArgs {
    /// Surface concentration, cm^-3.
    #[arg(long)]
    pub n0: f64,
    /// Background concentration, cm^-3.
    #[arg(long)]
    pub nb: f64,
    /// Diffusion length, µm.
    #[arg(long, conflicts_with_all = ["di", "td"])]
    pub ld: Option<f64>,
    /// Diffusion constant, cm^2/s (with --td).
    #[arg(long, requires = "td")]
    pub di: Option<f64>,
    /// Diffusion time, s (with --di).
    #[arg(long, requires = "di")]
    pub td: Option<f64>,
    /// Junction depth override, µm.
    #[arg(long)]
    pub xj: Option<f64>,
    /// Built-in potential override, V.
    #[arg(long, allow_negative_numbers = true)]
    pub vbi: Option<f64>,
    #[arg(long, value_enum, default_value = "donor-into-p")]
    pub polarity: PolarityArg,
    #[command(flatten)]
    pub material: MaterialArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub junction: JunctionArgs,
    /// Bias, V: positive reverse, negative forward.
    #[arg(long, allow_negative_numbers = true)]
    pub bias: f64,
    #[arg(long, value_enum, default_value = "general")]
    pub regime: RegimeArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub junction: JunctionArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub vstart: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub vstop: f64,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub steps: usize,
    /// Output path, `-` for stdout.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value = "general")]
    pub regime: RegimeArg,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// C-V data file (CSV, or JSON by extension or --format).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Background concentration, cm^-3 (held fixed).
    #[arg(long)]
    pub nb: f64,
    #[arg(long, value_enum, default_value = "donor-into-p")]
    pub polarity: PolarityArg,
    /// Fit V_bi as a free parameter.
    #[arg(long)]
    pub fit_vbi: bool,
    /// Initial N0, cm^-3.
    #[arg(long, requires = "ld_guess")]
    pub n0_guess: Option<f64>,
    /// Initial L_d, µm.
    #[arg(long, requires = "n0_guess")]
    pub ld_guess: Option<f64>,
    /// Initial V_bi, V (held fixed without --fit-vbi).
    #[arg(long)]
    pub vbi_guess: Option<f64>,
    #[command(flatten)]
    pub material: MaterialArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub junction: JunctionArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub bias: f64,
    #[arg(long, value_enum, default_value = "bare")]
    pub model: ModelArg,
    /// Also solve the two-boundary net-charge problem.
    #[arg(long)]
    pub two_sided: bool,
    /// Write (x, E, u) samples to this CSV file.
    #[arg(long)]
    pub emit_profile: Option<PathBuf>,
    /// Number of profile samples.
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct MaterialsArgs {
    /// Additional material table `name,eps_r,n_i_cm3,temp_K`.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

pub fn read_material_file(path: &std::path::Path) -> Result<Vec<Material>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    parse_material_table(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Builtin materials merged with the file named by $JUNCTIONLAB_MATERIALS.
pub fn material_database() -> Result<Vec<Material>, CliError> {
    let base = builtin_materials();
    match std::env::var_os(MATERIALS_ENV) {
        Some(p) if !p.is_empty() => Ok(merge_materials(base, read_material_file(p.as_ref())?)),
        _ => Ok(base),
    }
}

impl MaterialArgs {
    pub fn resolve(&self) -> Result<Material, CliError> {
        let db = material_database()?;
        let named = find_material(&db, &self.material)
            .ok_or_else(|| CliError::usage(format!("unknown material `{}`", self.material)))?;
        if self.eps_r.is_none() && self.ni.is_none() {
            return Ok(named.clone());
        }
        let name = format!("{}*", named.name);
        let eps_r = self.eps_r.unwrap_or(named.eps_r);
        let n_i = self.ni.map_or(named.n_i, units::per_cm3_to_per_m3);
        Ok(Material::new(name, eps_r, n_i, named.temp_ref)?)
    }
}

impl JunctionArgs {
    pub fn profile(&self) -> Result<GaussianProfile, CliError> {
        let (n0, nb) = (
            units::per_cm3_to_per_m3(self.n0),
            units::per_cm3_to_per_m3(self.nb),
        );
        let polarity = self.polarity.into();
        Ok(match (self.ld, self.di, self.td) {
            (Some(ld), _, _) => GaussianProfile::new(n0, units::um_to_m(ld), nb, polarity)?,
            (None, Some(di), Some(td)) => GaussianProfile::from_recipe(
                n0,
                DiffusionRecipe {
                    d_i: units::cm2_per_s_to_m2_per_s(di),
                    t_d: td,
                },
                nb,
                polarity,
            )?,
            _ => {
                return Err(CliError::usage(
                    "one of --ld or both --di and --td is required",
                ))
            }
        })
    }

    pub fn spec(&self) -> Result<JunctionSpec, CliError> {
        let material = self.material.resolve()?;
        let profile = self.profile()?;
        let temp = self.material.temp;
        let x_j = match self.xj {
            Some(x) => units::um_to_m(x),
            None => profile.junction_depth()?,
        };
        let v_bi = match self.vbi {
            Some(v) => v,
            None => default_vbi(&profile, &material, temp)?,
        };
        Ok(JunctionSpec::with_values(
            material, profile, x_j, v_bi, temp,
        )?)
    }
}
