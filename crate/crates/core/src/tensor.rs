//! Dense 3-mode tensors with the slicing views used by the staged engines.
//!
//! Element (i1, i2, i3) lives at offset `i1*n2*n3 + i2*n3 + i3` (i3 fastest).
//! Slices are index remaps over that one storage, so the horizontal/lateral
//! repartition identity holds by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape3 {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Shape3 {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::ZeroExtent(n1, n2, n3));
        }
        Ok(Shape3 { n1, n2, n3 })
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub fn is_empty(&self) -> bool {
        false // extents are at least 1 by construction
    }

    /// Canonical storage offset of (i1, i2, i3).
    pub fn offset(&self, i1: usize, i2: usize, i3: usize) -> usize {
        debug_assert!(i1 < self.n1 && i2 < self.n2 && i3 < self.n3);
        i1 * self.n2 * self.n3 + i2 * self.n3 + i3
    }

    /// Extent along a mode (1, 2, or 3).
    pub fn extent(&self, mode: u8) -> usize {
        match mode {
            1 => self.n1,
            2 => self.n2,
            3 => self.n3,
            _ => panic!("mode must be 1, 2, or 3"),
        }
    }

    pub fn with_extent(mut self, mode: u8, value: usize) -> Shape3 {
        match mode {
            1 => self.n1 = value,
            2 => self.n2 = value,
            3 => self.n3 = value,
            _ => panic!("mode must be 1, 2, or 3"),
        }
        self
    }
}

impl std::fmt::Display for Shape3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.n3)
    }
}

/// Slice families of a 3-mode tensor: the fixed mode selects the family and
/// the free coordinates follow the usual partition conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceMode {
    /// n2 fixed; free coordinates (n1, n3).
    Horizontal,
    /// n3 fixed; free coordinates (n1, n2).
    Lateral,
    /// n1 fixed; free coordinates (n2, n3).
    Frontal,
}

/// Dense 3-mode tensor over a single scalar kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    shape: Shape3,
    kind: ScalarKind,
    data: Vec<Scalar>,
}

impl Tensor3 {
    /// Tensor of the given shape with every element set to `fill`.
    pub fn filled(shape: Shape3, kind: ScalarKind, fill: Scalar) -> Result<Self> {
        let fill = fill.cast(kind)?;
        Ok(Tensor3 { shape, kind, data: vec![fill; shape.len()] })
    }

    pub fn zeros(shape: Shape3, kind: ScalarKind) -> Self {
        Tensor3 { shape, kind, data: vec![kind.zero(); shape.len()] }
    }

    /// Build from canonical-order data; every element must match `kind`.
    pub fn from_data(shape: Shape3, kind: ScalarKind, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::ElementCount { expected: shape.len(), got: data.len() });
        }
        for s in &data {
            if s.kind() != kind {
                return Err(Error::KindMismatch { expected: kind.tag(), got: s.kind().tag() });
            }
        }
        Ok(Tensor3 { shape, kind, data })
    }

    /// Build by evaluating `f` at every index, in canonical order.
    pub fn from_fn(
        shape: Shape3,
        kind: ScalarKind,
        mut f: impl FnMut(usize, usize, usize) -> Scalar,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(shape.len());
        for i1 in 0..shape.n1 {
            for i2 in 0..shape.n2 {
                for i3 in 0..shape.n3 {
                    data.push(f(i1, i2, i3).cast(kind)?);
                }
            }
        }
        Ok(Tensor3 { shape, kind, data })
    }

    pub fn shape(&self) -> Shape3 {
        self.shape
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> Scalar {
        self.data[self.shape.offset(i1, i2, i3)]
    }

    /// Exclusive mutation handle; shared references stay read-only.
    pub fn set(&mut self, i1: usize, i2: usize, i3: usize, value: Scalar) {
        assert_eq!(value.kind(), self.kind, "scalar kind mismatch on set");
        let off = self.shape.offset(i1, i2, i3);
        self.data[off] = value;
    }

    /// Widening cast of every element.
    pub fn cast(&self, kind: ScalarKind) -> Result<Tensor3> {
        if kind == self.kind {
            return Ok(self.clone());
        }
        let data = self.data.iter().map(|s| s.cast(kind)).collect::<Result<Vec<_>>>()?;
        Ok(Tensor3 { shape: self.shape, kind, data })
    }

    /// Largest absolute difference between two tensors of the same shape.
    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.shape, other.shape, "shape mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.abs_diff(*b))
            .fold(0.0, f64::max)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|s| s.magnitude()).fold(0.0, f64::max)
    }

    /// Elementwise identity of stored bit patterns (distinguishes -0.0 from 0.0).
    pub fn bitwise_eq(&self, other: &Tensor3) -> bool {
        self.shape == other.shape
            && self.kind == other.kind
            && self.data.iter().zip(&other.data).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Matrix view over one slice of a tensor. Reads remap into the parent
/// storage; no element is copied.
#[derive(Debug, Clone, Copy)]
pub struct SliceView<'a> {
    tensor: &'a Tensor3,
    mode: SliceMode,
    index: usize,
}

impl<'a> SliceView<'a> {
    pub fn mode(&self) -> SliceMode {
        self.mode
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// (rows, cols) of the slice matrix.
    pub fn dims(&self) -> (usize, usize) {
        let s = self.tensor.shape();
        match self.mode {
            SliceMode::Horizontal => (s.n1, s.n3),
            SliceMode::Lateral => (s.n1, s.n2),
            SliceMode::Frontal => (s.n2, s.n3),
        }
    }

    /// Storage offset addressed by matrix entry (r, c).
    pub fn offset(&self, r: usize, c: usize) -> usize {
        let s = self.tensor.shape();
        match self.mode {
            SliceMode::Horizontal => s.offset(r, self.index, c),
            SliceMode::Lateral => s.offset(r, c, self.index),
            SliceMode::Frontal => s.offset(self.index, r, c),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.tensor.data()[self.offset(r, c)]
    }
}

/// Slice a tensor along one mode. The index must lie within the fixed
/// mode's extent.
pub fn slice(t: &Tensor3, mode: SliceMode, index: usize) -> Result<SliceView<'_>> {
    let s = t.shape();
    let extent = match mode {
        SliceMode::Horizontal => s.n2,
        SliceMode::Lateral => s.n3,
        SliceMode::Frontal => s.n1,
    };
    if index >= extent {
        return Err(Error::IndexOutOfRange { index, extent });
    }
    Ok(SliceView { tensor: t, mode, index })
}

/// Verify the horizontal/lateral repartition identity: for every
/// (k1, n2, k3), entry (k1, k3) of horizontal slice n2 and entry (k1, n2) of
/// lateral slice k3 address the same storage cell.
pub fn repartition_check(t: &Tensor3) -> bool {
    let s = t.shape();
    for n2 in 0..s.n2 {
        let horizontal = slice(t, SliceMode::Horizontal, n2).expect("index in range");
        for k3 in 0..s.n3 {
            let lateral = slice(t, SliceMode::Lateral, k3).expect("index in range");
            for k1 in 0..s.n1 {
                if horizontal.offset(k1, k3) != lateral.offset(k1, n2) {
                    return false;
                }
            }
        }
    }
    true
}
