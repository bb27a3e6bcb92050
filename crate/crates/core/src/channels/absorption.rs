//! Molecular absorption coefficient for THz links.
//!
//! A table is a list of polynomial rows in the frequency offset from a
//! centre frequency; the total coefficient is the sum of all rows:
//!
//! ```text
//! k_abs(f) = Σ_rows Σ_j c_j (f_GHz - f_center)^j      [1/m]
//! ```
//!
//! Text format, UTF-8, one row per line, `#` starts a comment:
//!
//! ```text
//! # f_center_ghz, degree, c0, c1, ..., c_degree
//! 118.75, 2, 4.1e-4, 0.0, -2.0e-5
//! ```
//!
//! The table covers [min f_center, max f_center]; outside that range the
//! evaluation fails rather than extrapolating.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionRow {
    pub center_ghz: f64,
    /// c₀..c_d, so `coeffs.len() == degree + 1`
    pub coeffs: Vec<f64>,
}

/// Atmospheric state the coefficient rows were fitted for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub pressure_pa: f64,
    pub temperature_k: f64,
    pub relative_humidity: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            pressure_pa: 101_325.0,
            temperature_k: 298.0,
            relative_humidity: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionTable {
    pub rows: Vec<AbsorptionRow>,
    pub environment: Environment,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbsorptionModel {
    /// measured total coefficient in 1/m
    Direct {
        k_abs: f64,
    },
    Polynomial(AbsorptionTable),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TableParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_absorption_table(text: &str) -> std::result::Result<Vec<AbsorptionRow>, TableParseError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| TableParseError { line, message };
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(err(format!(
                "expected `f_center_ghz, degree, c0..cd`, found {} field(s)",
                fields.len()
            )));
        }
        let num = |s: &str, what: &str| -> std::result::Result<f64, TableParseError> {
            let v: f64 = s.parse().map_err(|_| err(format!("{what}: `{s}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("{what}: `{s}` is not finite")))
            }
        };
        let center_ghz = num(fields[0], "f_center_ghz")?;
        if center_ghz <= 0.0 {
            return Err(err(format!("f_center_ghz must be positive, got {center_ghz}")));
        }
        let degree: usize = fields[1]
            .parse()
            .map_err(|_| err(format!("degree: `{}` is not a non-negative integer", fields[1])))?;
        if fields.len() != degree + 3 {
            return Err(err(format!(
                "degree {degree} needs {} coefficient(s), found {}",
                degree + 1,
                fields.len() - 2
            )));
        }
        let coeffs = fields[2..]
            .iter()
            .enumerate()
            .map(|(j, s)| num(s, &format!("c{j}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        rows.push(AbsorptionRow { center_ghz, coeffs });
    }
    if rows.is_empty() {
        return Err(TableParseError {
            line: text.lines().count().max(1),
            message: "table has no coefficient rows".into(),
        });
    }
    Ok(rows)
}

impl AbsorptionTable {
    pub fn parse(text: &str, environment: Environment) -> std::result::Result<Self, TableParseError> {
        Ok(AbsorptionTable {
            rows: parse_absorption_table(text)?,
            environment,
        })
    }

    pub fn coverage_ghz(&self) -> (f64, f64) {
        self.rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.center_ghz), hi.max(r.center_ghz))
            })
    }

    pub fn k_abs(&self, frequency_hz: f64) -> Result<f64> {
        let f = frequency_hz * 1e-9;
        let (lo, hi) = self.coverage_ghz();
        if !(f >= lo && f <= hi) {
            return Err(Error::UnresolvedAbsorption {
                freq_ghz: f,
                lo_ghz: lo,
                hi_ghz: hi,
            });
        }
        let total: f64 = self
            .rows
            .iter()
            .map(|r| {
                let d = f - r.center_ghz;
                r.coeffs.iter().rev().fold(0.0, |acc, c| acc * d + c)
            })
            .sum();
        if total < 0.0 {
            return Err(Error::NegativeAbsorption {
                freq_ghz: f,
                value: total,
            });
        }
        Ok(total)
    }
}

impl AbsorptionModel {
    pub fn k_abs(&self, frequency_hz: f64) -> Result<f64> {
        match self {
            AbsorptionModel::Direct { k_abs } => {
                if *k_abs >= 0.0 && k_abs.is_finite() {
                    Ok(*k_abs)
                } else {
                    Err(Error::InvalidParameter {
                        field: "k_abs",
                        detail: format!("must be non-negative, got {k_abs}"),
                    })
                }
            }
            AbsorptionModel::Polynomial(t) => t.k_abs(frequency_hz),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# two rows\n100, 1, 1e-4, 2e-6\n\n200, 0, 3e-4  # flat\n";

    #[test]
    fn parses_and_sums_rows() {
        let t = AbsorptionTable::parse(SAMPLE, Environment::default()).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.coverage_ghz(), (100.0, 200.0));
        let k = t.k_abs(150e9).unwrap();
        assert!((k - (1e-4 + 2e-6 * 50.0 + 3e-4)).abs() < 1e-18);
    }

    #[test]
    fn outside_coverage_is_an_error() {
        let t = AbsorptionTable::parse(SAMPLE, Environment::default()).unwrap();
        assert!(matches!(t.k_abs(300e9), Err(Error::UnresolvedAbsorption { .. })));
    }

    #[test]
    fn negative_total_is_an_error() {
        let t = AbsorptionTable::parse("100, 1, 0, -1\n200, 0, 0", Environment::default()).unwrap();
        assert!(matches!(t.k_abs(150e9), Err(Error::NegativeAbsorption { .. })));
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let e = parse_absorption_table("# c\n100, 2, 1, 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_absorption_table("100, x, 1\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_absorption_table("100, 0, inf\n").unwrap_err();
        assert!(e.message.contains("finite"));
        assert!(parse_absorption_table("# only comments\n").is_err());
    }

    #[test]
    fn shipped_example_parses() {
        let text = include_str!("../../data/absorption_example.csv");
        let t = AbsorptionTable::parse(text, Environment::default()).unwrap();
        let k = t.k_abs(119e9).unwrap();
        assert!(k > 0.0 && k < 1e-2);
    }
}
