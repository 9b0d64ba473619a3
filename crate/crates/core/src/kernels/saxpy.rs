//! Row-wise scalar-times-vector GEMM: the vector-notation reference kernel.
//! Zero scalars skip their whole vector update and are counted.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone)]
pub struct SaxpyGemm {
    pub out: Matrix,
    /// Vector updates elided because the driving scalar was exactly zero.
    pub skips: u64,
}

/// out = A * B + C_init, computed row by row as scalar-by-vector updates.
pub fn saxpy_gemm(a: &Matrix, b: &Matrix, c_init: &Matrix) -> Result<SaxpyGemm> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "inner dimensions disagree: {}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if c_init.rows() != a.rows() || c_init.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "initial matrix is {}x{}, expected {}x{}",
            c_init.rows(),
            c_init.cols(),
            a.rows(),
            b.cols()
        )));
    }

    let kind = a.kind().promote(b.kind()).promote(c_init.kind());
    let mut out = c_init.cast(kind)?;
    let mut skips = 0u64;

    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let s = a.get(i, k);
            if s.is_exact_zero() {
                skips += 1;
                continue;
            }
            for j in 0..b.cols() {
                out.set(i, j, out.get(i, j) + s * b.get(k, j));
            }
        }
    }
    Ok(SaxpyGemm { out, skips })
}
