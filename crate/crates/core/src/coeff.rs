//! Coefficient-matrix bank: generation, tagging, orthogonality checks, and
//! inversion for the supported transform families plus user-supplied
//! matrices.
//!
//! Entries at quarter-turn angles (multiples of pi/2) are snapped to exact
//! 0/±1 so small Fourier and Hartley matrices come out bit-clean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, ScalarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Dft,
    Dht,
    Dct2,
    Dwht,
    Custom,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Dft => "dft",
            TransformKind::Dht => "dht",
            TransformKind::Dct2 => "dct2",
            TransformKind::Dwht => "dwht",
            TransformKind::Custom => "custom",
        }
    }

    /// Natural scalar kind of generated matrices.
    pub fn natural_kind(self, normalization: Normalization) -> ScalarKind {
        match self {
            TransformKind::Dft => ScalarKind::Complex128,
            TransformKind::Dht | TransformKind::Dct2 | TransformKind::Custom => ScalarKind::Real64,
            TransformKind::Dwht => match normalization {
                Normalization::Unnormalized => ScalarKind::Int64,
                Normalization::Orthonormal => ScalarKind::Real64,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Unnormalized,
    Orthonormal,
}

/// Square or rectangular coefficient matrix with a pivot-tag schedule.
///
/// `tags` is the stream schedule: summation step `t` consumes row `tags[t]`,
/// whose pivot tag sits at position `tags[t]` of the streamed vector. The
/// default diagonal tagging is the identity schedule; any permutation is
/// admissible because rank-1 updates commute.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    matrix: Matrix,
    kind: TransformKind,
    normalization: Normalization,
    tags: Vec<usize>,
}

impl CoeffMatrix {
    /// Wrap a user-supplied matrix; tags default to the diagonal schedule.
    pub fn custom(matrix: Matrix) -> CoeffMatrix {
        let tags = (0..matrix.rows()).collect();
        CoeffMatrix { matrix, kind: TransformKind::Custom, normalization: Normalization::Unnormalized, tags }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Summation length (number of rows streamed).
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    /// Output length (streamed vector width).
    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_square(&self) -> bool {
        self.matrix.is_square()
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        self.matrix.kind()
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.matrix.get(r, c)
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        self.matrix.row(r)
    }

    /// Stream schedule; entry t names the row consumed at summation step t.
    pub fn tags(&self) -> &[usize] {
        &self.tags
    }

    /// True when every entry of row `r` is exactly zero (the actuator skips
    /// streaming such a row).
    pub fn is_zero_row(&self, r: usize) -> bool {
        self.matrix.row(r).iter().all(|s| s.is_exact_zero())
    }

    /// Replace the tag schedule with another bijection of rows.
    pub fn retag(&self, pivot_map: &[usize]) -> Result<CoeffMatrix> {
        let n = self.rows();
        if pivot_map.len() != n {
            return Err(Error::NonBijectiveTags(n));
        }
        let mut seen = vec![false; n];
        for &p in pivot_map {
            if p >= n || seen[p] {
                return Err(Error::NonBijectiveTags(n));
            }
            seen[p] = true;
        }
        let mut out = self.clone();
        out.tags = pivot_map.to_vec();
        Ok(out)
    }

    /// Conjugate transpose with the schedule reset to diagonal.
    pub fn conj_transpose(&self) -> CoeffMatrix {
        let mut out = CoeffMatrix::custom(self.matrix.conj_transpose());
        out.kind = self.kind;
        out.normalization = self.normalization;
        out
    }

    pub fn cast(&self, kind: ScalarKind) -> Result<CoeffMatrix> {
        Ok(CoeffMatrix {
            matrix: self.matrix.cast(kind)?,
            kind: self.kind,
            normalization: self.normalization,
            tags: self.tags.clone(),
        })
    }

    /// Known Gram scale s with C^H C = s I, when the family guarantees one.
    pub fn gram_scale(&self) -> Option<f64> {
        match (self.kind, self.normalization) {
            (_, Normalization::Orthonormal) => Some(1.0),
            (TransformKind::Dft | TransformKind::Dht | TransformKind::Dwht, Normalization::Unnormalized) => {
                Some(self.rows() as f64)
            }
            _ => None,
        }
    }
}

/// Generate an N x N coefficient matrix for the given family.
pub fn make_coeff(kind: TransformKind, normalization: Normalization, n: usize) -> Result<CoeffMatrix> {
    if n == 0 {
        return Err(Error::ZeroExtent(n, 1, 1));
    }
    let matrix = match kind {
        TransformKind::Dft => dft_matrix(n, normalization),
        TransformKind::Dht => dht_matrix(n, normalization),
        TransformKind::Dct2 => dct2_matrix(n, normalization),
        TransformKind::Dwht => dwht_matrix(n, normalization)?,
        TransformKind::Custom => {
            return Err(Error::Malformed("custom matrices are loaded, not generated".into()))
        }
    };
    Ok(CoeffMatrix { matrix, kind, normalization, tags: (0..n).collect() })
}

/// Max-abs-entry residual of C^H C - s I, with s the family's Gram scale
/// (1.0 when no scale is known). Rectangular input is rejected.
pub fn check_orthogonality(c: &CoeffMatrix) -> Result<f64> {
    if !c.is_square() {
        return Err(Error::NonSquareMatrix { rows: c.rows(), cols: c.cols() });
    }
    let scale = c.gram_scale().unwrap_or(1.0);
    let gram = c.matrix.conj_transpose().mul(&c.matrix)?;
    let n = c.rows();
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Scalar::Real(scale) } else { Scalar::Real(0.0) };
            residual = residual.max(gram.get(i, j).abs_diff(target));
        }
    }
    Ok(residual)
}

/// Matrix M with M · C = I. Orthonormal families use the conjugate
/// transpose; families with Gram scale N use the scaled conjugate transpose;
/// anything else is inverted explicitly.
pub fn inverse_coeff(c: &CoeffMatrix) -> Result<CoeffMatrix> {
    if !c.is_square() {
        return Err(Error::NonSquareMatrix { rows: c.rows(), cols: c.cols() });
    }
    let matrix = match c.gram_scale() {
        Some(s) if s == 1.0 => c.matrix.conj_transpose(),
        Some(s) => c.matrix.conj_transpose().scale(1.0 / s),
        None => c.matrix.inverse()?,
    };
    let mut out = CoeffMatrix::custom(matrix);
    out.kind = c.kind;
    Ok(out)
}

/// cos/sin of 2*pi*m/n with exact values at quarter turns.
fn cos_sin_turn(m: usize, n: usize) -> (f64, f64) {
    let m = m % n;
    if (4 * m) % n == 0 {
        return match 4 * m / n {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            3 => (0.0, -1.0),
            _ => unreachable!(),
        };
    }
    let theta = 2.0 * std::f64::consts::PI * (m as f64) / (n as f64);
    (theta.cos(), theta.sin())
}

fn dft_matrix(n: usize, normalization: Normalization) -> Matrix {
    let factor = norm_factor(n, normalization);
    Matrix::from_fn(n, n, ScalarKind::Complex128, |row, col| {
        let (c, s) = cos_sin_turn(row * col, n);
        Scalar::complex(c * factor, -s * factor)
    })
    .expect("generated entries match kind")
}

fn dht_matrix(n: usize, normalization: Normalization) -> Matrix {
    let factor = norm_factor(n, normalization);
    Matrix::from_fn(n, n, ScalarKind::Real64, |row, col| {
        let (c, s) = cos_sin_turn(row * col, n);
        Scalar::Real((c + s) * factor)
    })
    .expect("generated entries match kind")
}

fn dct2_matrix(n: usize, normalization: Normalization) -> Matrix {
    Matrix::from_fn(n, n, ScalarKind::Real64, |row, col| {
        let angle = std::f64::consts::PI / (2.0 * n as f64) * ((2 * row + 1) * col) as f64;
        let v = angle.cos();
        let v = match normalization {
            Normalization::Unnormalized => v,
            Normalization::Orthonormal => {
                let s = if col == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
                v * s
            }
        };
        Scalar::Real(v)
    })
    .expect("generated entries match kind")
}

fn dwht_matrix(n: usize, normalization: Normalization) -> Result<Matrix> {
    if !n.is_power_of_two() {
        return Err(Error::NonPowerOfTwo(n));
    }
    // Sylvester construction: entry is the parity of popcount(row & col)
    let sign = |row: usize, col: usize| -> i64 {
        if (row & col).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    };
    match normalization {
        Normalization::Unnormalized => {
            Matrix::from_fn(n, n, ScalarKind::Int64, |r, c| Scalar::Int(sign(r, c)))
        }
        Normalization::Orthonormal => {
            let factor = 1.0 / (n as f64).sqrt();
            Matrix::from_fn(n, n, ScalarKind::Real64, |r, c| Scalar::Real(sign(r, c) as f64 * factor))
        }
    }
}

fn norm_factor(n: usize, normalization: Normalization) -> f64 {
    match normalization {
        Normalization::Unnormalized => 1.0,
        Normalization::Orthonormal => 1.0 / (n as f64).sqrt(),
    }
}
