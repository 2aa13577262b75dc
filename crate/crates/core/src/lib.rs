//! Dynamical degrees, arithmetic degrees and canonical heights for explicit
//! dynamical systems over ℚ.
//!
//! Linear algebra, polynomials and the Chow-ring calculus are generic over
//! [`scalar::Scalar`]; the aliases below fix the exact instances used by the
//! rest of the crate.

pub mod bbform;
pub mod candyn;
pub mod config;
pub mod dynsys;
pub mod error;
pub mod exactreal;
pub mod heights;
pub mod linalg;
pub mod nslattice;
pub mod projbundle;
pub mod scalar;
pub mod serde_util;

pub use error::{Error, Result};

pub use linalg::{IntMatrix, RatMatrix};
pub use exactreal::{IntPolynomial, RatPolynomial, RationalInterval, RealAlgebraicNumber};

/// Chow classes with integer coefficients.
pub type IntChowElement = projbundle::ChowElement<num_bigint::BigInt>;
/// Chow classes with rational coefficients, e.g. nef generators.
pub type RatChowElement = projbundle::ChowElement<num_rational::BigRational>;
/// Chow classes over `ℚ(d)`, `d` the fibrewise degree of an endomorphism.
pub type RootChowElement = projbundle::ChowElement<RatPolynomial>;
