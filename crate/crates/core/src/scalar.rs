//! Coefficient types.
//!
//! Polynomial arithmetic is written once over [`Scalar`]. Exact algorithms
//! (Sturm sequences, gcd, square-free parts) additionally need [`ExactField`],
//! which only `BigRational` implements. Sampling code works over [`Real`].

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Num + Clone + PartialEq + Debug + Display + std::ops::Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// `true` when arithmetic never rounds.
    fn is_exact() -> bool;
    /// Quotient for a division known to be exact (Bareiss steps). Floats just divide.
    fn exact_div(&self, d: &Self) -> Self {
        self.clone() / d.clone()
    }
    /// Magnitude used by pivoting and zero tests.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
    /// `*acc += c` without cloning the accumulator.
    fn add_to(acc: &mut Self, c: Self) {
        let a = std::mem::replace(acc, Self::zero());
        *acc = a + c;
    }
}

/// Exact fields: zero tests are decisive and sign is meaningful.
pub trait ExactField: Scalar + Signed + PartialOrd {
    fn from_f64_exact(v: f64) -> Option<Self>;
}

/// Floating-point coefficients for sampling and Monte Carlo work.
pub trait Real: Scalar + Float + FromPrimitive + Copy {}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_exact() -> bool {
        true
    }
    // integer coefficients skip the gcd reduction, which costs O(bits²) against a denominator of 1
    fn mul_ref(&self, o: &Self) -> Self {
        if self.denom().is_one() && o.denom().is_one() {
            return BigRational::new_raw(self.numer() * o.numer(), BigInt::one());
        }
        self * o
    }
    fn add_to(acc: &mut Self, c: Self) {
        if acc.denom().is_one() && c.denom().is_one() {
            let (n, _) = std::mem::replace(acc, BigRational::zero()).into_raw();
            *acc = BigRational::new_raw(n + c.numer(), BigInt::one());
        } else {
            *acc = &*acc + c;
        }
    }
}

impl ExactField for BigRational {
    fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_rational(q: &BigRational) -> Self {
                rational_to_f64(q) as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn is_exact() -> bool {
                false
            }
        }
        impl Real for $t {}
    };
}

float_scalar!(f32);
float_scalar!(f64);

/// Nearest f64 to a rational, robust to numerators and denominators beyond f64 range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::from(1) << (shift as usize))
    } else {
        q * BigRational::from_integer(BigInt::from(1) << ((-shift) as usize))
    };
    let v = scaled.to_integer().to_f64().unwrap_or(0.0);
    v * 2f64.powi(shift as i32)
}

/// Exact rational from an f64 (dyadic); non-finite input maps to zero.
pub fn snap(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
}

/// Rational approximation with denominator `2^bits`, used to keep snapped
/// path functionals from carrying 1000-bit denominators into eliminations.
pub fn snap_dyadic(v: f64, bits: u32) -> BigRational {
    let scale = 2f64.powi(bits as i32);
    let n = (v * scale).round();
    if !n.is_finite() {
        return snap(v);
    }
    BigRational::new(
        BigInt::from_f64(n).unwrap_or_default(),
        BigInt::from(1) << (bits as usize),
    )
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// |a − b| ≤ tol · max(1, |a|, |b|).
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}
