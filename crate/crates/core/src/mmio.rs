//! Matrix Market files for square real matrices and plain-text vectors.
//!
//! Supported headers: `%%MatrixMarket matrix {coordinate|array}
//! {real|integer|double} {general|symmetric}`. Vectors are whitespace
//! separated reals, conventionally one per line; `#` starts a comment.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linops::DenseMatrix;

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

pub fn parse_matrix_market(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(perr(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(perr(1, format!("unsupported format '{other}'"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(perr(1, format!("unsupported field '{other}'"))),
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(perr(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body.next().ok_or_else(|| perr(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(size_line, format!("bad size entry '{t}'"))))
        .collect::<Result<_>>()?;
    let (rows, cols) = match (layout, dims.as_slice()) {
        (Layout::Coordinate, [r, c, _]) | (Layout::Array, [r, c]) => (*r, *c),
        _ => return Err(perr(size_line, "malformed size line")),
    };
    if rows != cols || rows == 0 {
        return Err(perr(size_line, format!("matrix must be square and nonempty, got {rows}x{cols}")));
    }
    let n = rows;
    let mut m = DenseMatrix::zeros(n);

    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut seen = 0;
            for (ln, l) in body {
                let t: Vec<&str> = l.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(perr(ln, "expected 'row col value'"));
                }
                let i: usize = t[0].parse().map_err(|_| perr(ln, "bad row index"))?;
                let j: usize = t[1].parse().map_err(|_| perr(ln, "bad column index"))?;
                let v: f64 = t[2].parse().map_err(|_| perr(ln, "bad value"))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(perr(ln, format!("index ({i},{j}) out of range")));
                }
                m.set(i - 1, j - 1, m.get(i - 1, j - 1) + v);
                if symmetric && i != j {
                    m.set(j - 1, i - 1, m.get(j - 1, i - 1) + v);
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(perr(size_line, format!("declared {nnz} entries, found {seen}")));
            }
        }
        Layout::Array => {
            // column-major; symmetric files hold the lower triangle only
            let mut values = Vec::new();
            for (ln, l) in body {
                for t in l.split_whitespace() {
                    values.push(t.parse::<f64>().map_err(|_| perr(ln, format!("bad value '{t}'")))?);
                }
            }
            let expected = if symmetric { n * (n + 1) / 2 } else { n * n };
            if values.len() != expected {
                return Err(perr(size_line, format!("expected {expected} values, found {}", values.len())));
            }
            let mut it = values.into_iter();
            for j in 0..n {
                let start = if symmetric { j } else { 0 };
                for i in start..n {
                    let v = it.next().unwrap_or_default();
                    m.set(i, j, v);
                    if symmetric {
                        m.set(j, i, v);
                    }
                }
            }
        }
    }
    Ok(m)
}

pub fn read_matrix_market(path: &Path) -> Result<DenseMatrix> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

/// Writes the lower triangle in coordinate symmetric form, entries in
/// shortest round-trip decimal.
pub fn write_matrix_market<W: Write>(m: &DenseMatrix, mut sink: W) -> Result<()> {
    let n = m.n();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            let v = m.get(i, j);
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    writeln!(sink, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(sink, "{n} {n} {}", entries.len())?;
    let mut buf = ryu::Buffer::new();
    for (i, j, v) in entries {
        writeln!(sink, "{} {} {}", i + 1, j + 1, buf.format(v))?;
    }
    Ok(())
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for t in content.split_whitespace() {
            out.push(t.parse().map_err(|_| perr(i + 1, format!("bad number '{t}'")))?);
        }
    }
    Ok(out)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

pub fn write_vector<W: Write>(v: &[f64], mut sink: W) -> Result<()> {
    let mut buf = ryu::Buffer::new();
    for x in v {
        writeln!(sink, "{}", buf.format(*x))?;
    }
    Ok(())
}
