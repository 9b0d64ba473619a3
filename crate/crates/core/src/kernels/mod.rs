//! Reference three-mode multiply engines. These are the ground truth the
//! machine is checked against: an elementwise six-loop form, a staged
//! inner-product form in all six summation orders, and a staged outer-product
//! form whose step traces double as the machine's golden schedule.

mod elementwise;
mod inner;
mod outer;
mod saxpy;

pub use elementwise::{gemt_elementwise, gemt_elementwise_counted};
pub use inner::{gemt_staged_inner, InnerStages};
pub use outer::{gemt_staged_outer, OuterRun, OuterStep, StageTrace};
pub use saxpy::{saxpy_gemm, SaxpyGemm};

use serde::{Deserialize, Serialize};

use crate::coeff::CoeffMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::ScalarKind;
use crate::tensor::{Shape3, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Order in which the three mode summations run; each mode appears once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParenOrder([u8; 3]);

impl ParenOrder {
    /// The worked chain: contract mode 3, then mode 1, then mode 2.
    pub const DEFAULT: ParenOrder = ParenOrder([3, 1, 2]);

    pub fn new(modes: [u8; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &m in &modes {
            if !(1..=3).contains(&m) || seen[(m - 1) as usize] {
                return Err(Error::Malformed(format!(
                    "summation order must be a permutation of 1,2,3, got {modes:?}"
                )));
            }
            seen[(m - 1) as usize] = true;
        }
        Ok(ParenOrder(modes))
    }

    pub fn modes(&self) -> [u8; 3] {
        self.0
    }

    pub fn all() -> [ParenOrder; 6] {
        [
            ParenOrder([1, 2, 3]),
            ParenOrder([1, 3, 2]),
            ParenOrder([2, 1, 3]),
            ParenOrder([2, 3, 1]),
            ParenOrder([3, 1, 2]),
            ParenOrder([3, 2, 1]),
        ]
    }
}

impl std::str::FromStr for ParenOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Malformed(format!("bad summation order '{s}'")))
            })
            .collect::<Result<_>>()?;
        if digits.len() != 3 {
            return Err(Error::Malformed(format!("bad summation order '{s}'")));
        }
        ParenOrder::new([digits[0], digits[1], digits[2]])
    }
}

impl std::fmt::Display for ParenOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

/// One three-mode multiply-add: an input tensor, one coefficient matrix per
/// mode, an initial output tensor, and a direction. The inverse direction
/// contracts against the conjugate transposes.
#[derive(Debug, Clone)]
pub struct GemtProblem {
    pub x: Tensor3,
    pub c1: CoeffMatrix,
    pub c2: CoeffMatrix,
    pub c3: CoeffMatrix,
    pub y_init: Tensor3,
    pub direction: Direction,
}

impl GemtProblem {
    /// Forward problem with a zero initial output in the promoted kind.
    pub fn forward(x: Tensor3, c1: CoeffMatrix, c2: CoeffMatrix, c3: CoeffMatrix) -> Result<Self> {
        let kind = promoted_kind(&x, &c1, &c2, &c3);
        let out_shape = Shape3::new(c1.cols(), c2.cols(), c3.cols())?;
        let y_init = Tensor3::zeros(out_shape, kind);
        let p = GemtProblem { x, c1, c2, c3, y_init, direction: Direction::Forward };
        p.validate()?;
        Ok(p)
    }

    pub fn with_init(
        x: Tensor3,
        c1: CoeffMatrix,
        c2: CoeffMatrix,
        c3: CoeffMatrix,
        y_init: Tensor3,
        direction: Direction,
    ) -> Result<Self> {
        let p = GemtProblem { x, c1, c2, c3, y_init, direction };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let x = self.x.shape();
        let y = self.y_init.shape();
        for (mode, c) in [(1u8, &self.c1), (2, &self.c2), (3, &self.c3)] {
            let (in_extent, out_extent) = match self.direction {
                Direction::Forward => (c.rows(), c.cols()),
                Direction::Inverse => (c.cols(), c.rows()),
            };
            if x.extent(mode) != in_extent {
                return Err(Error::ShapeMismatch(format!(
                    "mode-{mode} extent {} does not match matrix summation length {in_extent}",
                    x.extent(mode)
                )));
            }
            if y.extent(mode) != out_extent {
                return Err(Error::ShapeMismatch(format!(
                    "mode-{mode} output extent {} does not match matrix output length {out_extent}",
                    y.extent(mode)
                )));
            }
        }
        Ok(())
    }

    /// Promoted scalar kind everything is computed in.
    pub fn kind(&self) -> ScalarKind {
        promoted_kind(&self.x, &self.c1, &self.c2, &self.c3).promote(self.y_init.kind())
    }

    pub fn output_shape(&self) -> Shape3 {
        self.y_init.shape()
    }

    /// Direction-resolved operands, cast to the common kind.
    pub(crate) fn resolve(&self) -> Result<ResolvedProblem> {
        let kind = self.kind();
        let resolve_matrix = |c: &CoeffMatrix| -> Result<CoeffMatrix> {
            let eff = match self.direction {
                Direction::Forward => c.clone(),
                Direction::Inverse => c.conj_transpose(),
            };
            eff.cast(kind)
        };
        Ok(ResolvedProblem {
            x: self.x.cast(kind)?,
            m1: resolve_matrix(&self.c1)?,
            m2: resolve_matrix(&self.c2)?,
            m3: resolve_matrix(&self.c3)?,
            y_init: self.y_init.cast(kind)?,
            kind,
        })
    }
}

/// Operands after direction resolution: contract mode s of `x` over the
/// first index of `m_s`.
pub(crate) struct ResolvedProblem {
    pub x: Tensor3,
    pub m1: CoeffMatrix,
    pub m2: CoeffMatrix,
    pub m3: CoeffMatrix,
    pub y_init: Tensor3,
    pub kind: ScalarKind,
}

impl ResolvedProblem {
    pub fn matrix(&self, mode: u8) -> &CoeffMatrix {
        match mode {
            1 => &self.m1,
            2 => &self.m2,
            3 => &self.m3,
            _ => panic!("mode must be 1, 2, or 3"),
        }
    }
}

fn promoted_kind(x: &Tensor3, c1: &CoeffMatrix, c2: &CoeffMatrix, c3: &CoeffMatrix) -> ScalarKind {
    x.kind()
        .promote(c1.scalar_kind())
        .promote(c2.scalar_kind())
        .promote(c3.scalar_kind())
}

/// Contract one mode of a tensor over the first index of a matrix, in
/// inner-product form. Used by the staged inner engine and tests.
pub(crate) fn contract_mode(t: &Tensor3, m: &Matrix, mode: u8, kind: ScalarKind) -> Tensor3 {
    let in_shape = t.shape();
    debug_assert_eq!(in_shape.extent(mode), m.rows());
    let out_shape = in_shape.with_extent(mode, m.cols());
    let mut out = Tensor3::zeros(out_shape, kind);
    for o1 in 0..out_shape.n1 {
        for o2 in 0..out_shape.n2 {
            for o3 in 0..out_shape.n3 {
                let mut acc = kind.zero();
                for n in 0..m.rows() {
                    let x = match mode {
                        1 => t.get(n, o2, o3),
                        2 => t.get(o1, n, o3),
                        3 => t.get(o1, o2, n),
                        _ => unreachable!(),
                    };
                    let k = match mode {
                        1 => o1,
                        2 => o2,
                        3 => o3,
                        _ => unreachable!(),
                    };
                    acc = acc + x * m.get(n, k);
                }
                out.set(o1, o2, o3, acc);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paren_order_parsing() {
        let order: ParenOrder = "312".parse().unwrap();
        assert_eq!(order, ParenOrder::DEFAULT);
        assert!("311".parse::<ParenOrder>().is_err());
        assert!("12".parse::<ParenOrder>().is_err());
        assert!("124".parse::<ParenOrder>().is_err());
        assert_eq!(ParenOrder::all().len(), 6);
    }
}
