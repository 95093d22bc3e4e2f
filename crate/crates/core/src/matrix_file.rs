//! Plain-text matrix format.
//!
//! ```text
//! 2 3 complex
//! 1 0 2-1.5i
//! 0 1+i -i
//! ```
//!
//! The header gives rows, columns and the scalar field (`real` or
//! `complex`). Each of the following lines is one row of whitespace-separated
//! entries. Complex entries are written `a+bi`, `a-bi`, `bi` or a plain real.
//! Blank lines and lines starting with `#` are skipped.

use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix};

/// Formats a real with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))
}

/// Parses one entry: `3`, `-2.5e-3`, `1+2i`, `1-i`, `-4.5i`.
pub fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    let Some(body) = tok.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(tok, line)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k], line)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => parse_real(s, line)?,
    };
    Ok(Complex64::new(re, im))
}

/// Parses the text format into a matrix.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [m, n, field] = fields[..] else {
        return Err(parse_err(hline, "header must be `m n complex|real`"));
    };
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(hline, format!("invalid dimension `{s}`")))
    };
    let (m, n) = (dim(m)?, dim(n)?);
    let complex = match field {
        "complex" => true,
        "real" => false,
        other => return Err(parse_err(hline, format!("unknown field `{other}`"))),
    };
    let mut data = Vec::with_capacity(m * n);
    let mut rows = 0;
    for (line, row) in lines {
        rows += 1;
        if rows > m {
            return Err(parse_err(line, format!("more than {m} rows")));
        }
        let before = data.len();
        for tok in row.split_whitespace() {
            let z = if complex {
                parse_entry(tok, line)?
            } else {
                Complex64::new(parse_real(tok, line)?, 0.0)
            };
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(parse_err(line, format!("non-finite entry `{tok}`")));
            }
            data.push(z);
        }
        if data.len() - before != n {
            return Err(parse_err(
                line,
                format!("expected {n} entries, found {}", data.len() - before),
            ));
        }
    }
    if rows != m {
        return Err(parse_err(hline, format!("expected {m} rows, found {rows}")));
    }
    ComplexMatrix::new(m, n, data)
}

/// Writes a matrix in the text format. Real matrices get a `real` header.
pub fn format_matrix(a: &ComplexMatrix) -> String {
    let (m, n) = a.shape();
    let complex = a.as_slice().iter().any(|z| z.im != 0.0);
    let mut out = format!("{m} {n} {}\n", if complex { "complex" } else { "real" });
    for i in 0..m {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let z = a[(i, j)];
                if complex {
                    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                    format!("{}{sign}{}i", format_number(z.re), format_number(z.im.abs()))
                } else {
                    format_number(z.re)
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_entry("3", 1).unwrap(), c(3.0, 0.0));
        assert_eq!(parse_entry("1+2i", 1).unwrap(), c(1.0, 2.0));
        assert_eq!(parse_entry("1-i", 1).unwrap(), c(1.0, -1.0));
        assert_eq!(parse_entry("-4.5i", 1).unwrap(), c(0.0, -4.5));
        assert_eq!(parse_entry("i", 1).unwrap(), c(0.0, 1.0));
        assert_eq!(parse_entry("1e-3-2E+2i", 1).unwrap(), c(1e-3, -200.0));
        assert!(parse_entry("1+xi", 1).is_err());
    }

    #[test]
    fn parse_complex_matrix() {
        let m = parse_matrix("# comment\n2 2 complex\n1 0\n\n0 1+i\n").unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m[(1, 1)], Complex64::new(1.0, 1.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse_matrix(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_matrix("2 2 real\n1 2\n3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_matrix("2 2 quaternion\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_matrix("1 1 real\n1\n2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_matrix("2 1 real\n1\n").is_err());
        assert!(parse_matrix("1 1 real\nNaN\n").is_err());
        assert!(parse_matrix("1 1 real\n1+i\n").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(1.0 / 3.0, -0.1),
                Complex64::new(0.0, 0.0),
                Complex64::new(-2.5e-17, 1e300),
                Complex64::new(7.0, -0.0),
            ],
        )
        .unwrap();
        assert_eq!(parse_matrix(&format_matrix(&a)).unwrap(), a);
        let r = ComplexMatrix::from_rows(&[&[0.1, 0.2, 0.3]]).unwrap();
        let text = format_matrix(&r);
        assert!(text.starts_with("1 3 real\n"));
        assert_eq!(parse_matrix(&text).unwrap(), r);
    }
}
