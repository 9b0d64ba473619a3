//! Scalar field shared by tensors, coefficient matrices, and the machine.
//!
//! Three kinds are supported: `real64`, `complex128`, and `int64`. A container
//! always holds one kind; mixed-kind arithmetic promotes along
//! int64 -> real64 -> complex128. Integer arithmetic is checked and panics on
//! overflow rather than wrapping silently.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    #[serde(rename = "real64")]
    Real64,
    #[serde(rename = "complex128")]
    Complex128,
    #[serde(rename = "int64")]
    Int64,
}

impl ScalarKind {
    pub fn tag(self) -> &'static str {
        match self {
            ScalarKind::Real64 => "real64",
            ScalarKind::Complex128 => "complex128",
            ScalarKind::Int64 => "int64",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "real64" => Ok(ScalarKind::Real64),
            "complex128" => Ok(ScalarKind::Complex128),
            "int64" => Ok(ScalarKind::Int64),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }

    /// Widest common kind, with int64 narrower than real64 narrower than complex128.
    pub fn promote(self, other: ScalarKind) -> ScalarKind {
        use ScalarKind::*;
        match (self, other) {
            (Complex128, _) | (_, Complex128) => Complex128,
            (Real64, _) | (_, Real64) => Real64,
            (Int64, Int64) => Int64,
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            ScalarKind::Real64 => Scalar::Real(0.0),
            ScalarKind::Complex128 => Scalar::Complex(Complex64::new(0.0, 0.0)),
            ScalarKind::Int64 => Scalar::Int(0),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            ScalarKind::Real64 => Scalar::Real(1.0),
            ScalarKind::Complex128 => Scalar::Complex(Complex64::new(1.0, 0.0)),
            ScalarKind::Int64 => Scalar::Int(1),
        }
    }
}

impl std::fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// One element of a tensor or coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Real(f64),
    Complex(Complex64),
    Int(i64),
}

impl Scalar {
    pub fn kind(self) -> ScalarKind {
        match self {
            Scalar::Real(_) => ScalarKind::Real64,
            Scalar::Complex(_) => ScalarKind::Complex128,
            Scalar::Int(_) => ScalarKind::Int64,
        }
    }

    pub fn complex(re: f64, im: f64) -> Scalar {
        Scalar::Complex(Complex64::new(re, im))
    }

    /// Widening cast; narrowing requests are rejected.
    pub fn cast(self, kind: ScalarKind) -> Result<Scalar> {
        use Scalar::*;
        Ok(match (self, kind) {
            (Int(v), ScalarKind::Int64) => Int(v),
            (Int(v), ScalarKind::Real64) => Real(v as f64),
            (Int(v), ScalarKind::Complex128) => Complex(Complex64::new(v as f64, 0.0)),
            (Real(v), ScalarKind::Real64) => Real(v),
            (Real(v), ScalarKind::Complex128) => Complex(Complex64::new(v, 0.0)),
            (Complex(v), ScalarKind::Complex128) => Complex(v),
            (from, to) => {
                return Err(Error::NarrowingCast { from: from.kind().tag(), to: to.tag() })
            }
        })
    }

    /// Complex conjugate; identity for real64 and int64.
    pub fn conj(self) -> Scalar {
        match self {
            Scalar::Complex(v) => Scalar::Complex(v.conj()),
            other => other,
        }
    }

    /// True exactly when the value is zero (either signed zero for floats).
    pub fn is_exact_zero(self) -> bool {
        match self {
            Scalar::Real(v) => v == 0.0,
            Scalar::Complex(v) => v.re == 0.0 && v.im == 0.0,
            Scalar::Int(v) => v == 0,
        }
    }

    pub fn magnitude(self) -> f64 {
        match self {
            Scalar::Real(v) => v.abs(),
            Scalar::Complex(v) => v.norm(),
            Scalar::Int(v) => (v as f64).abs(),
        }
    }

    /// Absolute difference used by tolerance checks; kinds are promoted first.
    pub fn abs_diff(self, other: Scalar) -> f64 {
        (self - other).magnitude()
    }

    /// Scale by a real factor; int64 values widen to real64.
    pub fn scale(self, factor: f64) -> Scalar {
        match self {
            Scalar::Real(v) => Scalar::Real(v * factor),
            Scalar::Complex(v) => Scalar::Complex(v * factor),
            Scalar::Int(v) => Scalar::Real(v as f64 * factor),
        }
    }

    /// Exact integer division; panics if the value is not int64 or not divisible.
    pub fn div_exact(self, divisor: i64) -> Scalar {
        match self {
            Scalar::Int(v) => {
                assert!(divisor != 0 && v % divisor == 0, "inexact int64 division {v}/{divisor}");
                Scalar::Int(v / divisor)
            }
            other => panic!("div_exact on non-integer scalar {other:?}"),
        }
    }

    fn promote_pair(a: Scalar, b: Scalar) -> (Scalar, Scalar) {
        let kind = a.kind().promote(b.kind());
        // promote() never narrows, so these casts cannot fail
        (a.cast(kind).unwrap(), b.cast(kind).unwrap())
    }

    /// Bit pattern used by bitwise-equality assertions in tests.
    pub fn to_bits(self) -> (u64, u64, u8) {
        match self {
            Scalar::Real(v) => (v.to_bits(), 0, 0),
            Scalar::Complex(v) => (v.re.to_bits(), v.im.to_bits(), 1),
            Scalar::Int(v) => (v as u64, 0, 2),
        }
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        match Scalar::promote_pair(self, rhs) {
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a + b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a + b),
            (Scalar::Int(a), Scalar::Int(b)) => {
                Scalar::Int(a.checked_add(b).expect("int64 overflow in add"))
            }
            _ => unreachable!(),
        }
    }
}

impl std::ops::Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        match Scalar::promote_pair(self, rhs) {
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a - b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a - b),
            (Scalar::Int(a), Scalar::Int(b)) => {
                Scalar::Int(a.checked_sub(b).expect("int64 overflow in sub"))
            }
            _ => unreachable!(),
        }
    }
}

impl std::ops::Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        match Scalar::promote_pair(self, rhs) {
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a * b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a * b),
            (Scalar::Int(a), Scalar::Int(b)) => {
                Scalar::Int(a.checked_mul(b).expect("int64 overflow in mul"))
            }
            _ => unreachable!(),
        }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Real(v) => Scalar::Real(-v),
            Scalar::Complex(v) => Scalar::Complex(-v),
            Scalar::Int(v) => Scalar::Int(v.checked_neg().expect("int64 overflow in neg")),
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scalar::Real(v) => write!(f, "{v}"),
            Scalar::Complex(v) => write!(f, "{} {}", v.re, v.im),
            Scalar::Int(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_is_involution() {
        let c = Scalar::complex(1.5, -2.5);
        assert_eq!(c.conj().conj(), c);
        let r = Scalar::Real(3.0);
        assert_eq!(r.conj(), r);
        let i = Scalar::Int(-7);
        assert_eq!(i.conj(), i);
    }

    #[test]
    fn promotion_order() {
        use ScalarKind::*;
        assert_eq!(Int64.promote(Real64), Real64);
        assert_eq!(Real64.promote(Complex128), Complex128);
        assert_eq!(Int64.promote(Int64), Int64);
        assert_eq!(
            Scalar::Int(2) * Scalar::Real(1.5),
            Scalar::Real(3.0)
        );
    }

    #[test]
    #[should_panic(expected = "int64 overflow")]
    fn int_multiply_does_not_wrap() {
        let _ = Scalar::Int(i64::MAX) * Scalar::Int(2);
    }

    #[test]
    fn narrowing_cast_rejected() {
        assert!(Scalar::Real(1.0).cast(ScalarKind::Int64).is_err());
        assert!(Scalar::complex(1.0, 0.0).cast(ScalarKind::Real64).is_err());
    }

    #[test]
    fn display_round_trips_shortest_floats() {
        let v = 0.1f64 + 0.2f64;
        let s = format!("{}", Scalar::Real(v));
        assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn zero_detects_both_signed_zeros() {
        assert!(Scalar::Real(-0.0).is_exact_zero());
        assert!(Scalar::complex(0.0, -0.0).is_exact_zero());
        assert!(!Scalar::Real(1e-300).is_exact_zero());
    }
}
