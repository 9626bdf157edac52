//! Complex literals of the form `a`, `bi`, `a+bi`, `a-bi` (no whitespace).

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid complex literal {0:?}: expected a, bi, a+bi or a-bi")]
pub struct ParseComplexError(String);

fn number(s: &str, whole: &str) -> Result<f64, ParseComplexError> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ParseComplexError(whole.to_string())),
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, ParseComplexError> {
    let bad = || ParseComplexError(s.to_string());
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        return if re.is_finite() {
            Ok(Complex64::new(re, 0.0))
        } else {
            Err(bad())
        };
    };
    // the sign separating the parts is the last one not opening an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            let im = number(&body[k..], s)?;
            if !re.is_finite() {
                return Err(bad());
            }
            Ok(Complex64::new(re, im))
        }
        None => Ok(Complex64::new(0.0, number(body, s)?)),
    }
}

/// Comma-separated coordinates of a point in `ℂ^p`.
pub fn parse_point(s: &str) -> Result<Vec<Complex64>, ParseComplexError> {
    s.split(',').map(parse_complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("0").unwrap(), c(0.0, 0.0));
        assert_eq!(parse_complex("-1.5").unwrap(), c(-1.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.3+0.4i").unwrap(), c(0.3, 0.4));
        assert_eq!(parse_complex("0.3-i").unwrap(), c(0.3, -1.0));
        assert_eq!(parse_complex("-1e-3-2.5E+2i").unwrap(), c(-1e-3, -250.0));
        assert_eq!(parse_complex("1e5i").unwrap(), c(0.0, 1e5));
    }

    #[test]
    fn rejected_forms() {
        for s in [
            "", "1 + 2i", "abc", "1+2j", "1+i+i", "nan", "inf", "+", "1++2i",
        ] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn points() {
        let p = parse_point("0.1,0.2-0.3i").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1], Complex64::new(0.2, -0.3));
    }
}
