// SPDX-License-Identifier: Apache-2.0

//! Physical constants, the material database and unit conventions.
//!
//! Everything here is SI: lengths in meters, concentrations in m^-3,
//! potentials in volts, capacitance per area in F/m^2 and charge density
//! in C/m^3. Device units (cm^-3, µm) are converted at the CLI and file
//! boundaries only, through the helpers in [`units`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, JunctionError, Result};

/// Elementary charge, C.
pub const Q: f64 = 1.602176634e-19;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380649e-23;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.8541878128e-12;

/// The constants as a value, for callers that want to pass them around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub q: f64,
    pub k_b: f64,
    pub eps0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    q: Q,
    k_b: K_B,
    eps0: EPS0,
};

/// A homogeneous semiconductor.
///
/// `n_i` is a fixed value valid at `temp_ref`; no temperature scaling is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Relative permittivity.
    pub eps_r: f64,
    /// Intrinsic carrier concentration, m^-3.
    pub n_i: f64,
    /// Temperature at which `n_i` holds, K.
    pub temp_ref: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, eps_r: f64, n_i: f64, temp_ref: f64) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(domain("material name must not be empty"));
        }
        if !(eps_r > 1.0) || !eps_r.is_finite() {
            return Err(domain(format!("{name}: eps_r = {eps_r} must exceed 1")));
        }
        if !(n_i > 0.0) || !n_i.is_finite() {
            return Err(domain(format!("{name}: n_i = {n_i} must be positive")));
        }
        if !(temp_ref > 0.0) || !temp_ref.is_finite() {
            return Err(domain(format!(
                "{name}: temp_ref = {temp_ref} must be positive"
            )));
        }
        Ok(Material {
            name,
            eps_r,
            n_i,
            temp_ref,
        })
    }

    /// Absolute permittivity eps0 * eps_r, F/m.
    pub fn permittivity(&self) -> f64 {
        EPS0 * self.eps_r
    }
}

/// Builtin materials, sorted by name.
pub fn builtin_materials() -> Vec<Material> {
    let mut list = vec![
        Material {
            name: "GaAs".into(),
            eps_r: 12.9,
            n_i: 2.1e12,
            temp_ref: 300.0,
        },
        Material {
            name: "Ge".into(),
            eps_r: 16.0,
            n_i: 2.4e19,
            temp_ref: 300.0,
        },
        Material {
            name: "Si".into(),
            eps_r: 11.7,
            n_i: 1.0e16,
            temp_ref: 300.0,
        },
    ];
    list.sort_by(|a, b| a.name.cmp(&b.name));
    list
}

/// Finds the named material in `list` (exact, then case-insensitive match).
pub fn find_material<'a>(list: &'a [Material], name: &str) -> Option<&'a Material> {
    list.iter()
        .find(|m| m.name == name)
        .or_else(|| list.iter().find(|m| m.name.eq_ignore_ascii_case(name)))
}

/// Merges `extra` into `base`: same-named entries are replaced, new ones
/// appended, and the result re-sorted by name.
pub fn merge_materials(base: Vec<Material>, extra: Vec<Material>) -> Vec<Material> {
    let mut out = base;
    for m in extra {
        match out.iter_mut().find(|b| b.name == m.name) {
            Some(slot) => *slot = m,
            None => out.push(m),
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

pub const MATERIAL_HEADER: [&str; 4] = ["name", "eps_r", "n_i_cm3", "temp_K"];

/// Parses a material table `name,eps_r,n_i_cm3,temp_K` (header required,
/// n_i in cm^-3). Every row is validated against the [`Material`] invariants.
pub fn parse_material_table(text: &str) -> Result<Vec<Material>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        None => {
            return Err(JunctionError::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
        Some(r) => r.map_err(csv_error)?,
    };
    if header.iter().ne(MATERIAL_HEADER.iter().copied()) {
        return Err(JunctionError::Parse {
            line: 1,
            message: format!("header must be `{}`", MATERIAL_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(JunctionError::Parse {
                line,
                message: format!("expected 4 columns, found {}", rec.len()),
            });
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| JunctionError::Parse {
                    line,
                    message: format!("`{}` is not a number", &rec[i]),
                })
        };
        let (eps_r, n_i_cm3, temp) = (num(1)?, num(2)?, num(3)?);
        let material = Material::new(
            rec[0].trim(),
            eps_r,
            units::per_cm3_to_per_m3(n_i_cm3),
            temp,
        )
        .map_err(|e| JunctionError::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push(material);
    }
    Ok(out)
}

pub(crate) fn csv_error(e: csv::Error) -> JunctionError {
    let line = e.position().map_or(0, |p| p.line());
    JunctionError::Parse {
        line,
        message: e.to_string(),
    }
}

/// Thermal voltage k_B T / q, V.
pub fn thermal_voltage(temp: f64) -> Result<f64> {
    if !(temp > 0.0) || !temp.is_finite() {
        return Err(domain(format!("temperature {temp} K must be positive")));
    }
    Ok(K_B * temp / Q)
}

/// Conversions between device units and SI.
pub mod units {
    pub fn per_cm3_to_per_m3(v: f64) -> f64 {
        v * 1e6
    }
    pub fn per_m3_to_per_cm3(v: f64) -> f64 {
        v * 1e-6
    }
    pub fn um_to_m(v: f64) -> f64 {
        v * 1e-6
    }
    pub fn m_to_um(v: f64) -> f64 {
        v * 1e6
    }
    pub fn cm2_per_s_to_m2_per_s(v: f64) -> f64 {
        v * 1e-4
    }
    /// F/m^2 to nF/cm^2.
    pub fn f_per_m2_to_nf_per_cm2(v: f64) -> f64 {
        v * 1e5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_database_content() {
        let db = builtin_materials();
        let si = find_material(&db, "Si").unwrap();
        assert_eq!(*si, Material::new("Si", 11.7, 1.0e16, 300.0).unwrap());
        assert!(db.iter().all(|m| m.eps_r > 1.0));
        let names: Vec<_> = db.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(names, ["GaAs", "Ge", "Si"]);
        assert_eq!(db, builtin_materials());
        assert!((si.permittivity() - 1.03594e-10).abs() < 1e-15);
    }

    #[test]
    fn thermal_voltage_values() {
        let vt = thermal_voltage(300.0).unwrap();
        assert!((vt - 0.0258520).abs() < 1e-6);
        assert_eq!(thermal_voltage(600.0).unwrap(), 2.0 * vt);
        assert!(thermal_voltage(0.0).is_err());
        assert!(thermal_voltage(-5.0).is_err());
    }

    #[test]
    fn material_table() {
        let text = "name,eps_r,n_i_cm3,temp_K\nInP,12.5,1.3e7,300\n";
        let t = parse_material_table(text).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].name, "InP");
        assert_eq!(t[0].n_i, 1.3e13);

        let bad = "name,eps_r,n_i_cm3,temp_K\nX,0.9,1e10,300\n";
        match parse_material_table(bad) {
            Err(JunctionError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_material_table("a,b\n").is_err());
        assert!(parse_material_table("name,eps_r,n_i_cm3,temp_K\nX,12,abc,300\n").is_err());

        let merged = merge_materials(builtin_materials(), t);
        assert_eq!(merged.len(), 4);
        assert_eq!(merged[2].name, "InP");
    }

    #[test]
    fn material_invariants() {
        assert!(Material::new("x", 1.0, 1.0, 300.0).is_err());
        assert!(Material::new("x", 2.0, 0.0, 300.0).is_err());
        assert!(Material::new("x", 2.0, 1.0, 0.0).is_err());
        assert!(Material::new("", 2.0, 1.0, 1.0).is_err());
    }
}
