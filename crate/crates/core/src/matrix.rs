//! Dense row-major matrix of scalars. Backing store for coefficient matrices
//! and the reference GEMM kernels.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    kind: ScalarKind,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, kind: ScalarKind) -> Self {
        Matrix { rows, cols, kind, data: vec![kind.zero(); rows * cols] }
    }

    pub fn identity(n: usize, kind: ScalarKind) -> Self {
        let mut m = Matrix::zeros(n, n, kind);
        for i in 0..n {
            m.set(i, i, kind.one());
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, kind: ScalarKind, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ElementCount { expected: rows * cols, got: data.len() });
        }
        for s in &data {
            if s.kind() != kind {
                return Err(Error::KindMismatch { expected: kind.tag(), got: s.kind().tag() });
            }
        }
        Ok(Matrix { rows, cols, kind, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        kind: ScalarKind,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c).cast(kind)?);
            }
        }
        Ok(Matrix { rows, cols, kind, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Scalar) {
        assert_eq!(value.kind(), self.kind, "scalar kind mismatch on set");
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn cast(&self, kind: ScalarKind) -> Result<Matrix> {
        if kind == self.kind {
            return Ok(self.clone());
        }
        let data = self.data.iter().map(|s| s.cast(kind)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, kind, data })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.kind, |r, c| self.get(c, r))
            .expect("transpose preserves kind")
    }

    pub fn conj_transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.kind, |r, c| self.get(c, r).conj())
            .expect("conjugate transpose preserves kind")
    }

    /// Plain triple-loop product; kinds are promoted as needed.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let kind = self.kind.promote(other.kind);
        let mut out = Matrix::zeros(self.rows, other.cols, kind);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = kind.zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        let kind = self.kind.promote(ScalarKind::Real64);
        Matrix::from_fn(self.rows, self.cols, kind, |r, c| self.get(r, c).scale(factor))
            .expect("scaling widens to at least real64")
    }

    /// Largest |entry| over the whole matrix.
    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|s| s.magnitude()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.abs_diff(*b))
            .fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse with partial pivoting. Integer matrices widen to
    /// real64 first. Fails if a pivot falls below threshold relative to the
    /// largest entry.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NonSquareMatrix { rows: self.rows, cols: self.cols });
        }
        let kind = self.kind.promote(ScalarKind::Real64);
        let n = self.rows;
        let mut a = self.cast(kind)?;
        let mut inv = Matrix::identity(n, kind);
        let threshold = 1e-12 * self.max_magnitude().max(1.0);

        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    a.get(r1, col)
                        .magnitude()
                        .partial_cmp(&a.get(r2, col).magnitude())
                        .expect("magnitudes are finite")
                })
                .expect("rows remain");
            if a.get(pivot_row, col).magnitude() < threshold {
                return Err(Error::SingularMatrix);
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let pivot = a.get(col, col);
            let pivot_inv = invert_scalar(pivot);
            for c in 0..n {
                a.set(col, c, a.get(col, c) * pivot_inv);
                inv.set(col, c, inv.get(col, c) * pivot_inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor.is_exact_zero() {
                    continue;
                }
                for c in 0..n {
                    a.set(r, c, a.get(r, c) - factor * a.get(col, c));
                    inv.set(r, c, inv.get(r, c) - factor * inv.get(col, c));
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for c in 0..self.cols {
            let tmp = self.get(r1, c);
            let v2 = self.get(r2, c);
            self.set(r1, c, v2);
            self.set(r2, c, tmp);
        }
    }
}

fn invert_scalar(s: Scalar) -> Scalar {
    match s {
        Scalar::Real(v) => Scalar::Real(1.0 / v),
        Scalar::Complex(v) => Scalar::Complex(v.inv()),
        Scalar::Int(_) => unreachable!("integer matrices widen before inversion"),
    }
}
