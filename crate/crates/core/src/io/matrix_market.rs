//! Matrix Market "array complex general" reader/writer for square matrices.
//!
//! The array format stores entries in column-major order, one "re im" pair
//! per line. Floats are written in Rust's shortest round-trip form, so
//! write -> read reproduces the matrix bit for bit.

use crate::error::{Error, Result};
use crate::mat::{C64, OperatorMatrix};

pub fn write_matrix_market(m: &OperatorMatrix) -> String {
    let n = m.dim();
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array complex general\n");
    out.push_str(&format!("{n} {n}\n"));
    for j in 0..n {
        for i in 0..n {
            let z = m[(i, j)];
            out.push_str(&format!("{} {}\n", z.re, z.im));
        }
    }
    out
}

pub fn read_matrix_market(text: &str) -> Result<OperatorMatrix> {
    let mut lines = text.lines().enumerate();

    let (header_line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"%%MatrixMarket") {
        return Err(parse_err(
            header_line_no + 1,
            1,
            "first line must start with %%MatrixMarket",
        ));
    }
    let expect = ["matrix", "array", "complex", "general"];
    for (idx, want) in expect.iter().enumerate() {
        match tokens.get(idx + 1) {
            Some(got) if got.eq_ignore_ascii_case(want) => {}
            got => {
                return Err(parse_err(
                    header_line_no + 1,
                    1,
                    &format!(
                        "unsupported header: expected '{want}' at position {}, got {:?}",
                        idx + 2,
                        got
                    ),
                ))
            }
        }
    }

    let mut dims: Option<(usize, usize)> = None;
    let mut entries: Vec<C64> = Vec::new();
    for (line_no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if dims.is_none() {
            let mut parts = line.split_whitespace();
            let rows: usize = parse_token(&mut parts, line_no + 1, "row count")?;
            let cols: usize = parse_token(&mut parts, line_no + 1, "column count")?;
            if rows != cols {
                return Err(parse_err(
                    line_no + 1,
                    1,
                    &format!("only square matrices are supported, got {rows}x{cols}"),
                ));
            }
            if rows == 0 {
                return Err(parse_err(line_no + 1, 1, "dimension must be at least 1"));
            }
            dims = Some((rows, cols));
            entries.reserve(rows * cols);
            continue;
        }
        let mut parts = line.split_whitespace();
        let re: f64 = parse_token(&mut parts, line_no + 1, "real part")?;
        let im: f64 = parse_token(&mut parts, line_no + 1, "imaginary part")?;
        if !(re.is_finite() && im.is_finite()) {
            return Err(parse_err(line_no + 1, 1, "non-finite entry"));
        }
        if parts.next().is_some() {
            return Err(parse_err(line_no + 1, 1, "trailing tokens on entry line"));
        }
        entries.push(C64::new(re, im));
    }

    let (n, _) = dims.ok_or_else(|| parse_err(2, 1, "missing dimension line"))?;
    if entries.len() != n * n {
        return Err(parse_err(
            text.lines().count(),
            1,
            &format!("expected {} entries, found {}", n * n, entries.len()),
        ));
    }
    // Column-major storage order.
    Ok(OperatorMatrix::from_fn(n, |i, j| entries[j * n + i]))
}

fn parse_token<'a, T: std::str::FromStr>(
    parts: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<T> {
    let token = parts
        .next()
        .ok_or_else(|| parse_err(line, 1, &format!("missing {what}")))?;
    token
        .parse::<T>()
        .map_err(|_| parse_err(line, 1, &format!("cannot parse {what} from '{token}'")))
}

fn parse_err(line: usize, col: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = OperatorMatrix::from_rows(vec![
            vec![C64::new(1.0 / 3.0, -0.125), C64::new(2e-308, 1.0)],
            vec![C64::new(-7.25, 3.5e19), C64::new(0.0, -0.0)],
        ])
        .unwrap();
        let text = write_matrix_market(&m);
        let back = read_matrix_market(&text).unwrap();
        assert_eq!(m.data(), back.data());
    }

    #[test]
    fn column_major_order_respected() {
        let text = "%%MatrixMarket matrix array complex general\n2 2\n1 0\n2 0\n3 0\n4 0\n";
        let m = read_matrix_market(text).unwrap();
        // Entries listed down the first column, then the second.
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(1, 0)].re, 2.0);
        assert_eq!(m[(0, 1)].re, 3.0);
        assert_eq!(m[(1, 1)].re, 4.0);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "%%MatrixMarket matrix array complex general\n% a comment\n\n1 1\n2.5 -1\n";
        let m = read_matrix_market(text).unwrap();
        assert_eq!(m[(0, 0)], C64::new(2.5, -1.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "%%MatrixMarket matrix array complex general\n2 2\n1 0\nnot_a_number 0\n3 0\n4 0\n";
        match read_matrix_market(bad).unwrap_err() {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 4);
                assert!(msg.contains("real part"));
            }
            other => panic!("unexpected {other}"),
        }

        let coordinate = "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n";
        assert!(read_matrix_market(coordinate).is_err());

        let wrong_count = "%%MatrixMarket matrix array complex general\n2 2\n1 0\n";
        assert!(read_matrix_market(wrong_count).is_err());
    }
}
