//! Plain-text matrix exchange format.
//!
//! A matrix document is a header line
//!
//! ```text
//! matrix n=<qubits> rows=<r> cols=<c>
//! ```
//!
//! followed by `r` lines of `c` whitespace-separated `(re,im)` pairs in
//! row-major order. Entries are written with 17 significant digits so values
//! survive a round trip bit-exactly. The same block format is embedded inline
//! in harness configuration files.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::CMatrix;

/// Serializes a matrix with its qubit count.
pub fn write_matrix(mat: &CMatrix, n_qubits: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "matrix n={} rows={} cols={}\n",
        n_qubits,
        mat.nrows(),
        mat.ncols()
    ));
    for i in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols())
            .map(|j| format!("({:.16e},{:.16e})", mat[(i, j)].re, mat[(i, j)].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a full matrix document. Returns the matrix and the declared qubit
/// count.
pub fn parse_matrix(text: &str) -> Result<(CMatrix, usize)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix document".into()))?;
    let (n, rows, cols) = parse_header(header)?;
    let body: Vec<&str> = lines.collect();
    let mat = parse_body(&body, rows, cols)?;
    Ok((mat, n))
}

pub(crate) fn parse_header(line: &str) -> Result<(usize, usize, usize)> {
    let line = line.trim();
    let rest = line
        .strip_prefix("matrix")
        .ok_or_else(|| Error::Parse(format!("expected 'matrix' header, got '{line}'")))?;
    let mut n = None;
    let mut rows = None;
    let mut cols = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field '{field}'")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::Parse(format!("bad header value '{value}'")))?;
        match key {
            "n" => n = Some(value),
            "rows" => rows = Some(value),
            "cols" => cols = Some(value),
            _ => return Err(Error::Parse(format!("unknown header key '{key}'"))),
        }
    }
    match (n, rows, cols) {
        (Some(n), Some(r), Some(c)) => Ok((n, r, c)),
        _ => Err(Error::Parse("matrix header must declare n, rows, cols".into())),
    }
}

pub(crate) fn parse_body(lines: &[&str], rows: usize, cols: usize) -> Result<CMatrix> {
    if lines.len() != rows {
        return Err(Error::Parse(format!(
            "expected {rows} matrix rows, found {}",
            lines.len()
        )));
    }
    let mut mat = CMatrix::zeros(rows, cols);
    for (i, line) in lines.iter().enumerate() {
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != cols {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {cols}",
                entries.len()
            )));
        }
        for (j, token) in entries.iter().enumerate() {
            mat[(i, j)] = parse_entry(token)?;
        }
    }
    Ok(mat)
}

fn parse_entry(token: &str) -> Result<Complex64> {
    let inner = token
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("entry '{token}' is not of the form (re,im)")))?;
    let (re, im) = inner
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("entry '{token}' is missing a comma")))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad real part '{re}'")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad imaginary part '{im}'")))?;
    Ok(Complex64::new(re, im))
}
