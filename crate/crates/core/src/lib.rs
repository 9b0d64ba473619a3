//! Trilinear transform engines over 3-mode tensors.
//!
//! The crate has four layers:
//!
//! - [`tensor`] / [`scalar`] / [`io`]: dense 3-mode tensors over a runtime
//!   scalar field, slicing views, and the line-oriented tensor file format.
//! - [`coeff`]: coefficient matrices for the Fourier, Hartley, cosine, and
//!   Walsh-Hadamard families plus user-supplied matrices, with pivot-tag
//!   schedules.
//! - [`kernels`]: reference engines (elementwise, staged inner-product in six
//!   orders, staged outer-product with step traces, and a row-wise GEMM).
//! - [`sim`]: a time-step simulator of a 3D cell grid that computes the same
//!   transforms as streamed rank-1 updates with tag-driven activation and
//!   zero-skipping, with exact operation and communication accounting.

pub mod coeff;
pub mod error;
pub mod gen;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod scalar;
pub mod sim;
pub mod tensor;

pub use coeff::{check_orthogonality, inverse_coeff, make_coeff, CoeffMatrix, Normalization, TransformKind};
pub use error::{Error, Result};
pub use kernels::{
    gemt_elementwise, gemt_elementwise_counted, gemt_staged_inner, gemt_staged_outer, saxpy_gemm,
    Direction, GemtProblem, ParenOrder,
};
pub use matrix::Matrix;
pub use scalar::{Scalar, ScalarKind};
pub use sim::{esop_stats, load, CoreConfig, CostWeights, Machine, SimReport};
pub use tensor::{repartition_check, slice, Shape3, SliceMode, SliceView, Tensor3};
