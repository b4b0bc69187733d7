//! Exact polynomial engine: arithmetic, resultants, discriminants,
//! square-free decomposition and root isolation.

pub mod gcd;
pub mod parse;
mod polynomial;
pub mod rational_function;
pub mod resultant;
pub mod roots;
mod univariate;

pub use gcd::{factor_multiplicity, gcd, squarefree_decomposition, FactorMultiplicity};
pub use parse::{parse, parse_with_vars};
pub use polynomial::{var_names, Polynomial};
pub use rational_function::{substitute_all, substitute_rational, RationalFunction};
pub use resultant::{discriminant, double_discriminant, resultant, resultant_uni};
pub use roots::{complex_roots, isolate_real_roots, real_roots, real_roots_f64, RootIsolation};
pub use univariate::UniPoly;
