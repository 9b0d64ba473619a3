//! Seeded random tensors and matrices. All draws come from ChaCha8 keyed by
//! the seed, so the same seed and parameters always reproduce the same bytes.
//!
//! Values: real64 uniform in [-1, 1]; complex128 uniform over the unit disk
//! (rejection from the square); int64 uniform over {-3..=3}. Each element
//! takes one extra uniform draw for the sparsity mask, so masks at different
//! probabilities nest for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::scalar::{Scalar, ScalarKind};
use crate::tensor::{Shape3, Tensor3};

fn draw(rng: &mut ChaCha8Rng, kind: ScalarKind) -> Scalar {
    match kind {
        ScalarKind::Real64 => Scalar::Real(rng.random_range(-1.0..=1.0)),
        ScalarKind::Complex128 => loop {
            let re: f64 = rng.random_range(-1.0..=1.0);
            let im: f64 = rng.random_range(-1.0..=1.0);
            if re * re + im * im <= 1.0 {
                break Scalar::complex(re, im);
            }
        },
        ScalarKind::Int64 => Scalar::Int(rng.random_range(-3..=3)),
    }
}

fn masked(rng: &mut ChaCha8Rng, value: Scalar, sparsity: f64) -> Scalar {
    let u: f64 = rng.random_range(0.0..1.0);
    if u < sparsity {
        value.kind().zero()
    } else {
        value
    }
}

/// Random tensor with elements zeroed independently with probability
/// `sparsity`.
pub fn random_tensor(shape: Shape3, kind: ScalarKind, seed: u64, sparsity: f64) -> Tensor3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(shape.len());
    for _ in 0..shape.len() {
        let v = draw(&mut rng, kind);
        data.push(masked(&mut rng, v, sparsity));
    }
    Tensor3::from_data(shape, kind, data).expect("generated data matches shape and kind")
}

pub fn random_matrix(rows: usize, cols: usize, kind: ScalarKind, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    Matrix::from_fn(rows, cols, kind, |_, _| draw(&mut rng, kind))
        .expect("generated data matches kind")
}

/// Random square matrix kept comfortably invertible: identity plus a small
/// random perturbation.
pub fn random_invertible_matrix(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d);
    Matrix::from_fn(n, n, ScalarKind::Real64, |r, c| {
        let base = if r == c { 1.0 } else { 0.0 };
        Scalar::Real(base + 0.3 * rng.random_range(-1.0..=1.0))
    })
    .expect("generated data matches kind")
}
