//! CSV interchange: a `rows,cols` header line, then one `re,im` pair per
//! entry in row-major order.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn parse_pair(line: &str, lineno: usize) -> Result<(f64, f64)> {
    let mut it = line.split(',').map(str::trim);
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(Error::Parse { line: lineno, msg: format!("expected two comma-separated fields, got `{line}`") });
    };
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Parse { line: lineno, msg: format!("`{s}`: {e}") })
    };
    Ok((parse(a)?, parse(b)?))
}

pub fn parse_matrix_csv<T: Real>(text: &str) -> Result<ComplexMatrix<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let mut data_lines = lines.peekable();
    // Optional literal header `rows,cols` followed by the dimensions.
    let (rows, cols) = if header.eq_ignore_ascii_case("rows,cols") {
        let (dl, dims) = data_lines.next().ok_or(Error::Parse { line: hl + 1, msg: "missing dimensions".into() })?;
        parse_dims(dims, dl)?
    } else {
        parse_dims(header, hl)?
    };
    let mut data = Vec::with_capacity(rows * cols);
    for (lineno, line) in data_lines {
        let (re, im) = parse_pair(line, lineno)?;
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::Parse { line: lineno, msg: "non-finite entry".into() });
        }
        data.push(Complex::new(T::lit(re), T::lit(im)));
    }
    if data.len() != rows * cols {
        return Err(Error::Parse {
            line: hl,
            msg: format!("header declares {rows}x{cols} = {} entries, found {}", rows * cols, data.len()),
        });
    }
    ComplexMatrix::new(rows, cols, data)
}

fn parse_dims(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split(',').map(str::trim);
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(Error::Parse { line: lineno, msg: format!("expected `rows,cols`, got `{line}`") });
    };
    let p = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| Error::Parse { line: lineno, msg: format!("dimension `{s}`: {e}") })
    };
    Ok((p(a)?, p(b)?))
}

/// Serializes with a `rows,cols` header line, the dimensions, then entries.
pub fn format_matrix_csv<T: Real>(m: &ComplexMatrix<T>) -> String {
    let mut out = String::from("rows,cols\n");
    let _ = writeln!(out, "{},{}", m.rows(), m.cols());
    for z in m.as_slice() {
        let _ = writeln!(out, "{:e},{:e}", z.re.to_f64_lossy(), z.im.to_f64_lossy());
    }
    out
}

pub fn read_matrix_csv<T: Real>(path: impl AsRef<Path>) -> Result<ComplexMatrix<T>> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

pub fn write_matrix_csv<T: Real>(m: &ComplexMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_matrix_csv(m))?;
    Ok(())
}
