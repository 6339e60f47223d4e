// SPDX-License-Identifier: Apache-2.0

use std::str::FromStr;

use super::{CvCurve, CvPoint};
use crate::error::{domain, JunctionError, Result};
use crate::physcore::csv_error;

pub const CSV_HEADER: &str = "v_bias_V,c_b_F_per_m2,w_sc_m";
/// Header accepted for measured data without widths.
pub const CSV_HEADER_MEASURED: &str = "v_bias_V,c_b_F_per_m2";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = JunctionError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(domain(format!("unknown format `{s}`"))),
        }
    }
}

/// 17 significant digits in scientific notation.
pub(crate) fn fmt_sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the curve. CSV omits the width column only when no point has one.
pub fn serialize(curve: &CvCurve, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec(curve).expect("curve is always serializable");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let with_width = curve.is_empty() || curve.points.iter().any(|p| p.w_sc.is_some());
            let mut s = String::new();
            s.push_str(if with_width {
                CSV_HEADER
            } else {
                CSV_HEADER_MEASURED
            });
            s.push('\n');
            for p in &curve.points {
                s.push_str(&fmt_sci(p.v_bias));
                s.push(',');
                s.push_str(&fmt_sci(p.c_b));
                if with_width {
                    s.push(',');
                    if let Some(w) = p.w_sc {
                        s.push_str(&fmt_sci(w));
                    }
                }
                s.push('\n');
            }
            s.into_bytes()
        }
    }
}

pub fn deserialize(bytes: &[u8], format: Format) -> Result<CvCurve> {
    match format {
        Format::Json => {
            let curve: CvCurve =
                serde_json::from_slice(bytes).map_err(|e| JunctionError::Parse {
                    line: e.line() as u64,
                    message: e.to_string(),
                })?;
            CvCurve::new(curve.points, curve.spec_echo)
        }
        Format::Csv => deserialize_csv(bytes),
    }
}

fn deserialize_csv(bytes: &[u8]) -> Result<CvCurve> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
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
    let joined = header.iter().collect::<Vec<_>>().join(",");
    let columns = match joined.as_str() {
        CSV_HEADER => 3,
        CSV_HEADER_MEASURED => 2,
        _ => {
            return Err(JunctionError::Parse {
                line: 1,
                message: format!("header must be `{CSV_HEADER}` or `{CSV_HEADER_MEASURED}`"),
            })
        }
    };
    let mut points = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != columns {
            return Err(JunctionError::Parse {
                line,
                message: format!("expected {columns} columns, found {}", rec.len()),
            });
        }
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|_| JunctionError::Parse {
                line,
                message: format!("`{}` is not a number", &rec[i]),
            })
        };
        let w_sc = if columns == 3 && !rec[2].is_empty() {
            Some(num(2)?)
        } else {
            None
        };
        points.push(CvPoint {
            v_bias: num(0)?,
            c_b: num(1)?,
            w_sc,
        });
    }
    CvCurve::new(points, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{JunctionSpec, Regime};
    use crate::cvtools::sweep;
    use crate::physcore::{builtin_materials, find_material};
    use crate::profile::{GaussianProfile, Polarity};
    use proptest::prelude::*;

    fn worked_sweep() -> CvCurve {
        let si = find_material(&builtin_materials(), "Si").unwrap().clone();
        let p = GaussianProfile::new(1e24, 1e-5, 1e21, Polarity::DonorIntoP).unwrap();
        let s = JunctionSpec::new(si, p, 300.0).unwrap();
        sweep(&s, 0.0, 10.0, 11, Regime::General).unwrap()
    }

    #[test]
    fn empty_curve_is_header_only() {
        let bytes = serialize(&CvCurve::empty(), Format::Csv);
        assert_eq!(bytes, format!("{CSV_HEADER}\n").into_bytes());
        assert!(deserialize(&bytes, Format::Csv).unwrap().is_empty());
    }

    #[test]
    fn sweep_round_trips() {
        let c = worked_sweep();
        let csv = serialize(&c, Format::Csv);
        let back = deserialize(&csv, Format::Csv).unwrap();
        assert_eq!(back.points(), c.points());
        assert!(back.spec_echo().is_none());
        let json = serialize(&c, Format::Json);
        let back = deserialize(&json, Format::Json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn csv_layout() {
        let c = worked_sweep();
        let text = String::from_utf8(serialize(&c, Format::Csv)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next().unwrap().split(',').next(),
            Some("0.0000000000000000e0")
        );
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn measured_json_has_null_spec() {
        let c = CvCurve::new(
            vec![CvPoint {
                v_bias: 0.0,
                c_b: 1e-4,
                w_sc: None,
            }],
            None,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&serialize(&c, Format::Json)).unwrap();
        assert!(v["spec"].is_null());
        assert!(v["points"][0]["w_sc"].is_null());
        let csv = String::from_utf8(serialize(&c, Format::Csv)).unwrap();
        assert!(csv.starts_with(CSV_HEADER_MEASURED));
    }

    #[test]
    fn malformed_rows() {
        let text = format!("{CSV_HEADER}\n1,2,3\nabc,1,2\n");
        match deserialize(text.as_bytes(), Format::Csv) {
            Err(JunctionError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let text = format!("{CSV_HEADER}\n1,2\n");
        assert!(matches!(
            deserialize(text.as_bytes(), Format::Csv),
            Err(JunctionError::Parse { line: 2, .. })
        ));
        let text = format!("{CSV_HEADER}\n1,2,3\n0,2,3\n");
        assert!(matches!(
            deserialize(text.as_bytes(), Format::Csv),
            Err(JunctionError::Validation(_))
        ));
        assert!(deserialize(b"v,c\n", Format::Csv).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_lossless(
            start in -1e3f64..1e3,
            steps in prop::collection::vec((1e-9f64..1e3, 1e-12f64..1e6, 0.0f64..1e-2), 0..40)
        ) {
            let mut v = start;
            let points: Vec<_> = steps
                .iter()
                .map(|&(dv, c, w)| { v += dv; CvPoint { v_bias: v, c_b: c, w_sc: Some(w) } })
                .collect();
            let curve = CvCurve::new(points, None).unwrap();
            let back = deserialize(&serialize(&curve, Format::Csv), Format::Csv).unwrap();
            prop_assert_eq!(back.points(), curve.points());
            let back = deserialize(&serialize(&curve, Format::Json), Format::Json).unwrap();
            prop_assert_eq!(back.points(), curve.points());
        }
    }
}
