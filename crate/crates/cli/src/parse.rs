//! Parsers for command-line values: complex numbers, integer vectors and
//! grid axes.

use num_complex::Complex64;

fn real(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Accepts `3`, `-1.2`, `2.5i`, `-i`, `1+0i`, `-0.7+1.9i`, `1e-3-2e-1i`.
pub fn complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other)?,
    };
    Ok(Complex64::new(re, im))
}

/// Two comma-separated integers, e.g. `3,1` or `2,-2`.
pub fn ivec(text: &str) -> Result<[i64; 2], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let a = a.parse().map_err(|_| format!("`{a}` is not an integer"))?;
            let b = b.parse().map_err(|_| format!("`{b}` is not an integer"))?;
            Ok([a, b])
        }
        _ => Err(format!(
            "expected two comma-separated integers, got `{text}`"
        )),
    }
}

/// Closed interval `a,b`.
pub fn interval(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let (a, b) = (real(a)?, real(b)?);
            if a < b {
                Ok((a, b))
            } else {
                Err(format!("interval `{text}` is empty"))
            }
        }
        _ => Err(format!("expected `a,b`, got `{text}`")),
    }
}

/// Uniform grid axis: a single value `x`, or `a:b:n` for `n >= 2` points
/// from `a` to `b` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis(pub Vec<f64>);

pub fn axis(text: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [x] => Ok(Axis(vec![real(x)?])),
        [a, b, n] => {
            let (a, b) = (real(a)?, real(b)?);
            let n: usize = n
                .parse()
                .map_err(|_| format!("`{n}` is not a point count"))?;
            if n < 2 {
                return Err("a range axis needs at least 2 points".into());
            }
            Ok(Axis(
                (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect(),
            ))
        }
        _ => Err(format!("expected `x` or `a:b:n`, got `{text}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(complex("-1.2").unwrap(), c(-1.2, 0.0));
        assert_eq!(complex("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(complex("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(complex("0+1i").unwrap(), c(0.0, 1.0));
        assert_eq!(complex("-0.7+1.9i").unwrap(), c(-0.7, 1.9));
        assert_eq!(complex("1e-3-2e-1i").unwrap(), c(1e-3, -0.2));
        assert_eq!(complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(complex(" 0.8 + 0.3i ").unwrap(), c(0.8, 0.3));
        for bad in ["", "x", "1+", "1+2", "nan", "1++2i", "inf"] {
            assert!(complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn vectors_and_axes() {
        assert_eq!(ivec("2,-2").unwrap(), [2, -2]);
        assert!(ivec("1").is_err());
        assert!(ivec("1,2,3").is_err());
        assert_eq!(interval("0.05, 2").unwrap(), (0.05, 2.0));
        assert!(interval("2,1").is_err());
        assert_eq!(axis("0").unwrap(), Axis(vec![0.0]));
        assert_eq!(axis("0:1:3").unwrap(), Axis(vec![0.0, 0.5, 1.0]));
        assert!(axis("0:1:1").is_err());
    }
}
