pub mod action;
pub mod error;
pub mod geometry;
pub mod pde;
pub mod poly;
pub mod scalar;
pub mod scenario;
pub mod turbulence;

pub use error::{Error, Result};
pub use num_rational::BigRational as Rational;
pub use poly::{Polynomial, UniPoly};
pub use scalar::{ExactField, Real, Scalar};

/// Exact rational polynomial.
pub type QPoly = Polynomial<Rational>;
/// Double-precision polynomial.
pub type FPoly = Polynomial<f64>;

/// Double-precision Wiener path.
pub type WienerPath64 = turbulence::WienerPath<f64>;
