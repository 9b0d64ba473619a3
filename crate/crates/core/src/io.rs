//! Line-oriented tensor text format.
//!
//! ```text
//! TRIADA-TENSOR v1
//! <n1> <n2> <n3> <kind>
//! <one scalar per line, canonical order; complex as "<re> <im>">
//! ```
//!
//! Matrices travel in the same format as degenerate tensors with n2 = 1:
//! rows map to n1 and columns to n3.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, ScalarKind};
use crate::tensor::{Shape3, Tensor3};

const MAGIC: &str = "TRIADA-TENSOR v1";

pub fn write_tensor_to(w: &mut impl Write, t: &Tensor3) -> Result<()> {
    let s = t.shape();
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{} {} {} {}", s.n1, s.n2, s.n3, t.kind().tag())?;
    for v in t.data() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn read_tensor_from(r: impl Read) -> Result<Tensor3> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();

    let magic = next_line(&mut lines)?;
    if magic.trim() != MAGIC {
        return Err(Error::Malformed(format!("bad magic line '{}'", magic.trim())));
    }

    let header = next_line(&mut lines)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::Malformed(format!("header needs 'n1 n2 n3 kind', got '{header}'")));
    }
    let n1 = parse_extent(fields[0])?;
    let n2 = parse_extent(fields[1])?;
    let n3 = parse_extent(fields[2])?;
    let kind = ScalarKind::parse(fields[3])?;
    let shape = Shape3::new(n1, n2, n3)?;

    let mut data = Vec::with_capacity(shape.len());
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if data.len() == shape.len() {
            return Err(Error::ElementCount { expected: shape.len(), got: data.len() + 1 });
        }
        data.push(parse_scalar(trimmed, kind)?);
    }
    if data.len() != shape.len() {
        return Err(Error::ElementCount { expected: shape.len(), got: data.len() });
    }
    Tensor3::from_data(shape, kind, data)
}

pub fn tensor_write(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_tensor_to(&mut file, t)?;
    file.flush()?;
    Ok(())
}

pub fn tensor_read(path: impl AsRef<Path>) -> Result<Tensor3> {
    read_tensor_from(std::fs::File::open(path)?)
}

/// Read a matrix stored as an (N x 1 x K) tensor.
pub fn matrix_read(path: impl AsRef<Path>) -> Result<Matrix> {
    let t = tensor_read(path)?;
    let s = t.shape();
    if s.n2 != 1 {
        return Err(Error::Malformed(format!(
            "matrix files must have n2 = 1, got shape {s}"
        )));
    }
    Matrix::from_data(s.n1, s.n3, t.kind(), t.data().to_vec())
}

/// Write a matrix as an (N x 1 x K) tensor.
pub fn matrix_write(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let shape = Shape3::new(m.rows(), 1, m.cols())?;
    let t = Tensor3::from_data(shape, m.kind(), m.data().to_vec())?;
    tensor_write(path, &t)
}

fn next_line(lines: &mut impl Iterator<Item = std::io::Result<String>>) -> Result<String> {
    lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Malformed("unexpected end of file".to_string()))
}

fn parse_extent(field: &str) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| Error::Malformed(format!("bad extent '{field}'")))
}

fn parse_scalar(line: &str, kind: ScalarKind) -> Result<Scalar> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match kind {
        ScalarKind::Real64 => {
            if fields.len() != 1 {
                return Err(Error::Malformed(format!("expected one real value, got '{line}'")));
            }
            Ok(Scalar::Real(parse_f64(fields[0])?))
        }
        ScalarKind::Complex128 => {
            if fields.len() != 2 {
                return Err(Error::Malformed(format!("expected '<re> <im>', got '{line}'")));
            }
            Ok(Scalar::complex(parse_f64(fields[0])?, parse_f64(fields[1])?))
        }
        ScalarKind::Int64 => {
            if fields.len() != 1 {
                return Err(Error::Malformed(format!("expected one integer, got '{line}'")));
            }
            fields[0]
                .parse::<i64>()
                .map(Scalar::Int)
                .map_err(|_| Error::Malformed(format!("bad int64 '{line}'")))
        }
    }
}

fn parse_f64(field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::Malformed(format!("bad real value '{field}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_tensor;

    #[test]
    fn round_trip_is_bit_exact_for_complex() {
        let t = random_tensor(Shape3::new(3, 2, 5).unwrap(), ScalarKind::Complex128, 11, 0.0);
        let mut buf = Vec::new();
        write_tensor_to(&mut buf, &t).unwrap();
        let back = read_tensor_from(buf.as_slice()).unwrap();
        assert!(t.bitwise_eq(&back));
    }

    #[test]
    fn element_count_mismatch_is_reported() {
        let text = "TRIADA-TENSOR v1\n2 2 2 real64\n1\n2\n3\n4\n5\n6\n7\n";
        match read_tensor_from(text.as_bytes()) {
            Err(Error::ElementCount { expected: 8, got: 7 }) => {}
            other => panic!("expected element-count error, got {other:?}"),
        }
        let extra = "TRIADA-TENSOR v1\n1 1 1 real64\n1\n2\n";
        assert!(matches!(read_tensor_from(extra.as_bytes()), Err(Error::ElementCount { .. })));
    }

    #[test]
    fn real64_kind_tag_parses() {
        let text = "TRIADA-TENSOR v1\n2 2 2 real64\n1\n2\n3\n4\n5\n6\n7\n8\n";
        let t = read_tensor_from(text.as_bytes()).unwrap();
        assert_eq!(t.shape(), Shape3::new(2, 2, 2).unwrap());
        assert_eq!(t.kind(), ScalarKind::Real64);
        assert_eq!(t.get(1, 1, 1), Scalar::Real(8.0));
    }

    #[test]
    fn unknown_kind_rejected() {
        let text = "TRIADA-TENSOR v1\n1 1 1 float32\n0\n";
        assert!(matches!(read_tensor_from(text.as_bytes()), Err(Error::UnknownKind(_))));
    }

    #[test]
    fn bad_magic_rejected() {
        let text = "TENSOR v0\n1 1 1 real64\n0\n";
        assert!(matches!(read_tensor_from(text.as_bytes()), Err(Error::Malformed(_))));
    }
}
