//! Command-line value syntax: complex numbers, coefficient lists and
//! rational literals.

use std::path::Path;

use serde::Deserialize;

use universal_pade::num::{float_from_decimal, ComplexRepr};
use universal_pade::universal::TargetPoly;
use universal_pade::{Complex, ExtendedComplex, Polynomial, PowerSeries, RationalFunction};

use crate::CliError;

/// A real number as a complex value.
fn real(prec: u32, s: &str) -> Result<Complex, CliError> {
    float_from_decimal(prec, s)
        .map(Complex::from_float)
        .ok_or_else(|| CliError::Usage(format!("not a number: '{s}'")))
}

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`; exponents like `1e-3` are allowed.
pub fn complex(prec: u32, s: &str) -> Result<Complex, CliError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(CliError::Usage("empty complex value".into()));
    }
    let Some(body) = s.strip_suffix('i') else {
        return real(prec, &s);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    // Multiplying by i is exact.
    Ok(&real(prec, re)? + &(&Complex::i(prec) * &real(prec, im)?))
}

/// A complex value or `inf`.
pub fn extended(prec: u32, s: &str) -> Result<ExtendedComplex, CliError> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(ExtendedComplex::Infinity),
        other => complex(prec, other).map(ExtendedComplex::Finite),
    }
}

/// Comma-separated complex values.
pub fn complex_list(prec: u32, s: &str) -> Result<Vec<Complex>, CliError> {
    s.split(',').map(|v| complex(prec, v)).collect()
}

pub fn target(s: &str) -> Result<TargetPoly, CliError> {
    s.parse().map_err(CliError::Usage)
}

/// `rational:NUM;DEN` with `NUM`, `DEN` coefficient lists in the `poly:`
/// syntax, lowest degree first, about 0.
pub fn rational(prec: u32, s: &str) -> Result<RationalFunction, CliError> {
    let body = s
        .strip_prefix("rational:")
        .ok_or_else(|| CliError::Usage(format!("expected rational:NUM;DEN, got '{s}'")))?;
    let (num, den) = body
        .split_once(';')
        .ok_or_else(|| CliError::Usage(format!("rational literal needs NUM;DEN, got '{s}'")))?;
    let poly = |c: &str| -> Result<Polynomial, CliError> { Ok(target(&format!("poly:{c}"))?.to_polynomial(prec)) };
    RationalFunction::new(poly(num)?, poly(den)?).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffFile {
    Series(PowerSeries),
    List(Vec<CoeffEntry>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffEntry {
    Real(f64),
    Text(String),
    Pair(ComplexRepr),
}

/// A power-series document, or a JSON array of numbers, decimal strings
/// and `[re, im]` pairs (center 0).
pub fn coefficient_file(prec: u32, path: &Path) -> Result<PowerSeries, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let doc: CoeffFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match doc {
        CoeffFile::Series(s) => Ok(s),
        CoeffFile::List(entries) => {
            let coeffs = entries
                .iter()
                .map(|e| match e {
                    CoeffEntry::Real(x) => Ok(Complex::real(prec, *x)),
                    CoeffEntry::Text(t) => complex(prec, t),
                    CoeffEntry::Pair(p) => p.to_complex(prec).map_err(CliError::Config),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.is_empty() {
                return Err(CliError::Config(format!("{}: no coefficients", path.display())));
            }
            PowerSeries::new(Complex::zero(prec), coeffs).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(s: &str) -> (f64, f64) {
        complex(53, s).unwrap().to_f64()
    }

    #[test]
    fn complex_syntax() {
        assert_eq!(parts("2"), (2.0, 0.0));
        assert_eq!(parts("-0.5+2i"), (-0.5, 2.0));
        assert_eq!(parts("1e-3-2E+1i"), (1e-3, -20.0));
        assert_eq!(parts("i"), (0.0, 1.0));
        assert_eq!(parts("-i"), (0.0, -1.0));
        assert_eq!(parts(" 3 - i "), (3.0, -1.0));
        assert!(complex(53, "1+2j").is_err());
        assert!(matches!(extended(53, "inf"), Ok(ExtendedComplex::Infinity)));
    }

    #[test]
    fn rational_literal() {
        let r = rational(53, "rational:1;1,-1").unwrap();
        assert_eq!(r.denominator().coeff(1).to_f64(), (-1.0, 0.0));
        assert!(rational(53, "rational:1").is_err());
        assert!(rational(53, "rational:1;0").is_err());
    }
}
