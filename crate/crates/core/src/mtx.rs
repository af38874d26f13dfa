//! Matrix Market reader and writer for dense complex matrices.
//!
//! Reads coordinate and array files with real or complex fields and general,
//! symmetric, skew-symmetric or Hermitian symmetry. Writes 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str) -> Result<(MtxFormat, Field, Symmetry)> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "expected `%%MatrixMarket matrix <format> <field> <symmetry>`"));
    }
    let format = match words[2].as_str() {
        "coordinate" => MtxFormat::Coordinate,
        "array" => MtxFormat::Array,
        other => return Err(parse_err(1, format!("unknown format `{other}`"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        "integer" | "pattern" => return Err(Error::UnsupportedField(words[3].clone())),
        other => return Err(parse_err(1, format!("unknown field `{other}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unknown symmetry `{other}`"))),
    };
    if symmetry == Symmetry::Hermitian && field == Field::Real {
        return Err(parse_err(1, "hermitian symmetry needs a complex field"));
    }
    Ok((format, field, symmetry))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a non-negative integer, found `{tok}`")))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a number, found `{tok}`")))
}

fn parse_value(toks: &[&str], field: Field, line: usize) -> Result<Complex64> {
    match (field, toks) {
        (Field::Real, [re]) => Ok(Complex64::new(parse_f64(re, line)?, 0.0)),
        (Field::Complex, [re, im]) => Ok(Complex64::new(parse_f64(re, line)?, parse_f64(im, line)?)),
        _ => Err(parse_err(line, "wrong number of values for the field")),
    }
}

/// Stores `v` at `(i, j)` and its mirror implied by the symmetry.
fn place(m: &mut ComplexMatrix, i: usize, j: usize, v: Complex64, sym: Symmetry) {
    m[(i, j)] = v;
    if i != j {
        match sym {
            Symmetry::General => {}
            Symmetry::Symmetric => m[(j, i)] = v,
            Symmetry::SkewSymmetric => m[(j, i)] = -v,
            Symmetry::Hermitian => m[(j, i)] = v.conj(),
        }
    }
}

pub fn parse_mtx(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let (format, field, sym) = parse_header(header)?;
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| parse_usize(t, size_line))
        .collect::<Result<_>>()?;
    let (rows, cols, nnz) = match (format, dims.as_slice()) {
        (MtxFormat::Coordinate, &[r, c, z]) => (r, c, z),
        (MtxFormat::Array, &[r, c]) => (r, c, 0),
        _ => return Err(parse_err(size_line, "malformed size line")),
    };
    if sym != Symmetry::General && rows != cols {
        return Err(parse_err(size_line, "symmetric storage needs a square matrix"));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut last_line = size_line;
    match format {
        MtxFormat::Coordinate => {
            let mut count = 0;
            for (ln, l) in body {
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() < 2 {
                    return Err(parse_err(ln, "expected `row col value`"));
                }
                let (i, j) = (parse_usize(toks[0], ln)?, parse_usize(toks[1], ln)?);
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(ln, format!("index ({i}, {j}) out of range")));
                }
                let v = parse_value(&toks[2..], field, ln)?;
                if count == nnz {
                    return Err(parse_err(ln, "more entries than declared"));
                }
                place(&mut m, i - 1, j - 1, v, sym);
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(last_line, format!("expected {nnz} entries, found {count}")));
            }
        }
        MtxFormat::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let slots: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| {
                    let start = match sym {
                        Symmetry::General => 0,
                        Symmetry::SkewSymmetric => j + 1,
                        _ => j,
                    };
                    (start..rows).map(move |i| (i, j))
                })
                .collect();
            let mut it = slots.iter();
            for (ln, l) in body {
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                let v = parse_value(&toks, field, ln)?;
                let &(i, j) = it.next().ok_or_else(|| parse_err(ln, "more entries than the matrix holds"))?;
                place(&mut m, i, j, v, sym);
            }
            if it.next().is_some() {
                return Err(parse_err(last_line, "too few entries for the declared size"));
            }
        }
    }
    Ok(m)
}

pub fn read_mtx(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_mtx(&fs::read_to_string(path)?)
}

fn push_value(out: &mut String, v: Complex64, complex: bool) {
    if complex {
        let _ = writeln!(out, "{:.16e} {:.16e}", v.re, v.im);
    } else {
        let _ = writeln!(out, "{:.16e}", v.re);
    }
}

/// General-symmetry Matrix Market text; the field is real when every entry is.
pub fn to_mtx_string(m: &ComplexMatrix, format: MtxFormat) -> String {
    let complex = !m.is_real();
    let field = if complex { "complex" } else { "real" };
    let mut out = String::new();
    match format {
        MtxFormat::Array => {
            let _ = writeln!(out, "%%MatrixMarket matrix array {field} general");
            let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
            for &v in m.as_slice() {
                push_value(&mut out, v, complex);
            }
        }
        MtxFormat::Coordinate => {
            let _ = writeln!(out, "%%MatrixMarket matrix coordinate {field} general");
            let nnz = m.as_slice().iter().filter(|v| **v != Complex64::new(0.0, 0.0)).count();
            let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), nnz);
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    let v = m[(i, j)];
                    if v != Complex64::new(0.0, 0.0) {
                        let _ = write!(out, "{} {} ", i + 1, j + 1);
                        push_value(&mut out, v, complex);
                    }
                }
            }
        }
    }
    out
}

pub fn write_mtx(path: impl AsRef<Path>, m: &ComplexMatrix, format: MtxFormat) -> Result<()> {
    fs::write(path, to_mtx_string(m, format))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let i3 = ComplexMatrix::identity(3);
        for (name, fmt) in [("a.mtx", MtxFormat::Array), ("c.mtx", MtxFormat::Coordinate)] {
            let p = dir.path().join(name);
            write_mtx(&p, &i3, fmt).unwrap();
            assert_eq!(read_mtx(&p).unwrap(), i3);
        }
    }

    #[test]
    fn complex_coordinate_assembly() {
        let text = "%%MatrixMarket matrix coordinate complex general\n% comment\n2 3 3\n1 1 1.5 -2\n2 3 0 1\n1 2 3e-1 0\n";
        let m = parse_mtx(text).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 3));
        assert_eq!(m[(0, 0)], c(1.5, -2.0));
        assert_eq!(m[(1, 2)], c(0.0, 1.0));
        assert_eq!(m[(0, 1)], c(0.3, 0.0));
        assert_eq!(m[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn symmetric_storage_is_expanded() {
        let m = parse_mtx("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 -1\n").unwrap();
        assert_eq!(m[(0, 1)], c(-1.0, 0.0));
        let h = parse_mtx("%%MatrixMarket matrix array complex hermitian\n2 2\n1 0\n2 3\n5 0\n").unwrap();
        assert_eq!(h[(1, 0)], c(2.0, 3.0));
        assert_eq!(h[(0, 1)], c(2.0, -3.0));
        let s = parse_mtx("%%MatrixMarket matrix array real skew-symmetric\n2 2\n7\n").unwrap();
        assert_eq!(s[(0, 1)], c(-7.0, 0.0));
    }

    #[test]
    fn malformed_header_names_line_one() {
        let e = parse_mtx("%%MatrixMarkt matrix array real general\n1 1\n1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e:?}");
    }

    #[test]
    fn unsupported_fields() {
        for field in ["pattern", "integer"] {
            let text = format!("%%MatrixMarket matrix coordinate {field} general\n1 1 1\n1 1\n");
            assert!(matches!(parse_mtx(&text), Err(Error::UnsupportedField(_))));
        }
    }

    #[test]
    fn body_errors_carry_line_numbers() {
        let e = parse_mtx("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = parse_mtx("%%MatrixMarket matrix array real general\n2 1\n1.0\nx\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
        let e = parse_mtx("%%MatrixMarket matrix array real general\n2 1\n1.0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            vals in proptest::collection::vec((-1e300f64..1e300, -1e-300f64..1e-300), 12),
            coord in any::<bool>(),
        ) {
            let data: Vec<Complex64> = vals.iter().map(|&(a, b)| c(a, b)).collect();
            let m = ComplexMatrix::from_col_major(3, 4, data).unwrap();
            let fmt = if coord { MtxFormat::Coordinate } else { MtxFormat::Array };
            prop_assert_eq!(parse_mtx(&to_mtx_string(&m, fmt)).unwrap(), m);
        }
    }
}
