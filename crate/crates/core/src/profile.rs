// SPDX-License-Identifier: Apache-2.0

//! Gaussian diffused doping profile, diffusion length and space charge.

use serde::{Deserialize, Serialize};

use crate::error::{domain, JunctionError, Result};
use crate::physcore::Q;

/// Which dopant species is diffused into which substrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Donors diffused into a p-type background; net charge is positive near the surface.
    #[default]
    DonorIntoP,
    /// Acceptors diffused into an n-type background.
    AcceptorIntoN,
}

impl Polarity {
    /// Sign of the net space charge on the surface side of the junction.
    pub fn surface_sign(self) -> f64 {
        match self {
            Polarity::DonorIntoP => 1.0,
            Polarity::AcceptorIntoN => -1.0,
        }
    }
}

/// Charge model used when evaluating rho(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChargeModel {
    /// The bare Gaussian q*N0*exp(-x^2/L_d^2), as integrated by the closed forms.
    Bare,
    /// q*(N(x) - N_B) with the polarity sign.
    Net,
}

/// N(x) = N0 exp(-x^2/L_d^2) on a uniform background N_B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianProfile {
    /// Surface concentration, m^-3.
    pub n0: f64,
    /// Diffusion length, m.
    pub ld: f64,
    /// Background concentration, m^-3.
    pub nb: f64,
    #[serde(default)]
    pub polarity: Polarity,
}

/// Diffusion constant (m^2/s) and time (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionRecipe {
    pub d_i: f64,
    pub t_d: f64,
}

/// L_d = 2 sqrt(D_i t_d).
pub fn diffusion_length(recipe: DiffusionRecipe) -> Result<f64> {
    let DiffusionRecipe { d_i, t_d } = recipe;
    if !(d_i > 0.0 && d_i.is_finite()) || !(t_d > 0.0 && t_d.is_finite()) {
        return Err(domain(format!(
            "diffusion constant ({d_i}) and time ({t_d}) must be positive"
        )));
    }
    Ok(2.0 * (d_i * t_d).sqrt())
}

impl GaussianProfile {
    pub fn new(n0: f64, ld: f64, nb: f64, polarity: Polarity) -> Result<Self> {
        if !(nb > 0.0 && nb.is_finite()) || !n0.is_finite() {
            return Err(domain(format!(
                "concentrations must be positive (N0 = {n0}, N_B = {nb})"
            )));
        }
        if !(n0 > nb) {
            return Err(JunctionError::NoJunction { n0, nb });
        }
        if !(ld > 0.0 && ld.is_finite()) {
            return Err(domain(format!("diffusion length {ld} m must be positive")));
        }
        Ok(GaussianProfile {
            n0,
            ld,
            nb,
            polarity,
        })
    }

    pub fn from_recipe(
        n0: f64,
        recipe: DiffusionRecipe,
        nb: f64,
        polarity: Polarity,
    ) -> Result<Self> {
        Self::new(n0, diffusion_length(recipe)?, nb, polarity)
    }

    /// Diffused concentration at depth `x` (m) below the surface, m^-3.
    pub fn doping_at(&self, x: f64) -> Result<f64> {
        check_depth(x)?;
        Ok(self.gaussian(x))
    }

    #[inline]
    pub(crate) fn gaussian(&self, x: f64) -> f64 {
        let r = x / self.ld;
        self.n0 * (-r * r).exp()
    }

    /// Metallurgical junction depth x_j = L_d sqrt(ln(N0/N_B)).
    pub fn junction_depth(&self) -> Result<f64> {
        if !(self.n0 > self.nb) {
            return Err(JunctionError::NoJunction {
                n0: self.n0,
                nb: self.nb,
            });
        }
        Ok(self.ld * (self.n0 / self.nb).ln().sqrt())
    }

    /// Space charge density at `x`, C/m^3.
    pub fn charge_density(&self, x: f64, model: ChargeModel) -> Result<f64> {
        check_depth(x)?;
        Ok(match model {
            ChargeModel::Bare => Q * self.gaussian(x),
            ChargeModel::Net => self.net_charge(x),
        })
    }

    #[inline]
    pub(crate) fn net_charge(&self, x: f64) -> f64 {
        self.polarity.surface_sign() * Q * (self.gaussian(x) - self.nb)
    }
}

fn check_depth(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("depth {x} m must be non-negative")));
    }
    Ok(())
}
