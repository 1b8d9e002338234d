//! Coefficient strings and differential construction.

use clap::ValueEnum;
use qd_core::{Complex64 as C, QuadDiff};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SurfaceArg {
    Plane,
    Punctured,
}

/// One complex number: `1`, `-i`, `2.5e-1`, `0.3-0.8i`, `i`, `-2i`, `1+i`.
pub fn parse_complex(text: &str) -> Result<C, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Input(format!("cannot read '{text}' as a complex number"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        let re = s.parse::<f64>().map_err(|_| bad())?;
        return if re.is_finite() { Ok(C::new(re, 0.0)) } else { Err(bad()) };
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let mut cut = 0;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            cut = k;
            break;
        }
    }
    let (re, im) = body.split_at(cut);
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    let z = C::new(re, im);
    if z.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// Comma separated, highest degree first.
pub fn parse_coeffs(text: &str) -> Result<Vec<C>, CliError> {
    text.split(',').map(parse_complex).collect()
}

/// Build the differential; a leading coefficient other than 1 is rejected.
pub fn differential(surface: SurfaceArg, n: Option<usize>, m: Option<usize>, coeffs: &[C]) -> Result<QuadDiff, CliError> {
    let q = match surface {
        SurfaceArg::Plane => {
            let q = QuadDiff::plane(coeffs.to_vec())?;
            if let Some(n) = n.filter(|&n| n != q.n) {
                return Err(CliError::Input(format!("--n {n} but the polynomial gives a pole of order {}", q.n)));
            }
            if m.is_some_and(|m| m != 0) {
                return Err(CliError::Input("--m is meaningless on the plane".into()));
            }
            q
        }
        SurfaceArg::Punctured => {
            let (Some(n), Some(m)) = (n, m) else {
                return Err(CliError::Input("the punctured plane needs --n and --m".into()));
            };
            QuadDiff::punctured(n, m, coeffs.to_vec())?
        }
    };
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let cases = [
            ("1", C::new(1.0, 0.0)),
            ("-i", C::new(0.0, -1.0)),
            ("i", C::new(0.0, 1.0)),
            ("0.3-0.8i", C::new(0.3, -0.8)),
            ("-2i", C::new(0.0, -2.0)),
            ("1+i", C::new(1.0, 1.0)),
            ("1e-1+2E+0j", C::new(0.1, 2.0)),
            (" -1.5 ", C::new(-1.5, 0.0)),
        ];
        for (s, z) in cases {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        for s in ["", "x", "1+", "ii", "nan", "inf"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn two_zero_example_input() {
        let c = parse_coeffs("1,-i,i").unwrap();
        let q = differential(SurfaceArg::Punctured, Some(3), Some(3), &c).unwrap();
        assert_eq!(q.coeffs, c);
        assert!(differential(SurfaceArg::Punctured, Some(3), Some(3), &parse_coeffs("1,1,0").unwrap()).is_err());
        assert!(differential(SurfaceArg::Punctured, None, Some(3), &c).is_err());
    }
}
