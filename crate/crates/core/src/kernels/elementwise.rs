//! Six-loop elementwise engine: the independent oracle every other engine is
//! measured against. One multiply-add per point of the 6D index space.

use crate::error::Result;
use crate::tensor::Tensor3;

use super::GemtProblem;

pub fn gemt_elementwise(p: &GemtProblem) -> Result<Tensor3> {
    Ok(gemt_elementwise_counted(p)?.0)
}

/// Returns the output tensor and the exact number of multiply-add operations
/// executed, which is always (input volume) x (output volume).
pub fn gemt_elementwise_counted(p: &GemtProblem) -> Result<(Tensor3, u64)> {
    let r = p.resolve()?;
    let in_shape = r.x.shape();
    let out_shape = r.y_init.shape();
    let mut out = Tensor3::zeros(out_shape, r.kind);
    let mut macs: u64 = 0;

    for k1 in 0..out_shape.n1 {
        for k2 in 0..out_shape.n2 {
            for k3 in 0..out_shape.n3 {
                let mut acc = r.y_init.get(k1, k2, k3);
                for n3 in 0..in_shape.n3 {
                    for n2 in 0..in_shape.n2 {
                        for n1 in 0..in_shape.n1 {
                            acc = acc
                                + r.x.get(n1, n2, n3)
                                    * r.m1.get(n1, k1)
                                    * r.m2.get(n2, k2)
                                    * r.m3.get(n3, k3);
                            macs += 1;
                        }
                    }
                }
                out.set(k1, k2, k3, acc);
            }
        }
    }
    Ok((out, macs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffMatrix;
    use crate::gen::random_tensor;
    use crate::matrix::Matrix;
    use crate::scalar::{Scalar, ScalarKind};
    use crate::tensor::{Shape3, Tensor3};

    fn single(value: f64) -> CoeffMatrix {
        CoeffMatrix::custom(
            Matrix::from_data(1, 1, ScalarKind::Real64, vec![Scalar::Real(value)]).unwrap(),
        )
    }

    #[test]
    fn single_mac_multiplies_everything() {
        let shape = Shape3::new(1, 1, 1).unwrap();
        let x = Tensor3::filled(shape, ScalarKind::Real64, Scalar::Real(2.0)).unwrap();
        let p = GemtProblem::forward(x, single(3.0), single(5.0), single(7.0)).unwrap();
        let (out, macs) = gemt_elementwise_counted(&p).unwrap();
        assert_eq!(out.get(0, 0, 0), Scalar::Real(210.0));
        assert_eq!(macs, 1);
    }

    #[test]
    fn identity_matrices_pass_input_through() {
        let shape = Shape3::new(2, 3, 4).unwrap();
        let x = random_tensor(shape, ScalarKind::Real64, 5, 0.0);
        let id = |n| CoeffMatrix::custom(Matrix::identity(n, ScalarKind::Real64));
        let p = GemtProblem::forward(x.clone(), id(2), id(3), id(4)).unwrap();
        let out = gemt_elementwise(&p).unwrap();
        assert!(out.max_abs_diff(&x) == 0.0);
    }

    #[test]
    fn zero_input_leaves_translation() {
        let shape = Shape3::new(2, 2, 2).unwrap();
        let x = Tensor3::zeros(shape, ScalarKind::Real64);
        let r = random_tensor(shape, ScalarKind::Real64, 9, 0.0);
        let id = |n| CoeffMatrix::custom(Matrix::identity(n, ScalarKind::Real64));
        let p = GemtProblem::with_init(x, id(2), id(2), id(2), r.clone(), super::super::Direction::Forward)
            .unwrap();
        let out = gemt_elementwise(&p).unwrap();
        assert!(out.bitwise_eq(&r));
    }

    #[test]
    fn mac_count_is_input_volume_times_output_volume() {
        let x = random_tensor(Shape3::new(2, 3, 4).unwrap(), ScalarKind::Real64, 1, 0.0);
        let rect = |n, k, seed| {
            CoeffMatrix::custom(crate::gen::random_matrix(n, k, ScalarKind::Real64, seed))
        };
        let p = GemtProblem::forward(x, rect(2, 3, 2), rect(3, 2, 3), rect(4, 5, 4)).unwrap();
        let (out, macs) = gemt_elementwise_counted(&p).unwrap();
        assert_eq!(out.shape(), Shape3::new(3, 2, 5).unwrap());
        assert_eq!(macs, (2 * 3 * 4) as u64 * (3 * 2 * 5) as u64);
    }
}
