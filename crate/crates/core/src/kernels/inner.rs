//! Staged inner-product engine: three mode contractions run one after
//! another in any of the six summation orders, each output element computed
//! as a dot product. Intermediates are kept for inspection.

use crate::error::Result;
use crate::tensor::Tensor3;

use super::{contract_mode, GemtProblem, ParenOrder};

#[derive(Debug, Clone)]
pub struct InnerStages {
    pub output: Tensor3,
    /// Tensor after the first contraction.
    pub first: Tensor3,
    /// Tensor after the second contraction.
    pub second: Tensor3,
    pub macs: u64,
}

pub fn gemt_staged_inner(p: &GemtProblem, order: ParenOrder) -> Result<InnerStages> {
    let r = p.resolve()?;
    let mut macs: u64 = 0;
    let mut current = r.x.clone();
    let mut intermediates = Vec::with_capacity(2);

    for mode in order.modes() {
        let m = r.matrix(mode).matrix();
        macs += (current.shape().len() / current.shape().extent(mode)) as u64
            * m.rows() as u64
            * m.cols() as u64;
        current = contract_mode(&current, m, mode, r.kind);
        intermediates.push(current.clone());
    }

    // fold in the affine translation
    let out_shape = current.shape();
    let mut output = Tensor3::zeros(out_shape, r.kind);
    for i1 in 0..out_shape.n1 {
        for i2 in 0..out_shape.n2 {
            for i3 in 0..out_shape.n3 {
                output.set(i1, i2, i3, current.get(i1, i2, i3) + r.y_init.get(i1, i2, i3));
            }
        }
    }

    Ok(InnerStages {
        output,
        first: intermediates[0].clone(),
        second: intermediates[1].clone(),
        macs,
    })
}
