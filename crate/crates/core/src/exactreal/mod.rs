//! Exact real arithmetic: polynomials, rational intervals, real algebraic
//! numbers and logarithm enclosures.

pub mod algebraic;
pub mod interval;
pub mod log;
pub mod poly;

pub use algebraic::{
    count_real_roots, isolate_real_roots, largest_abs_real_root, largest_real_root, rational_kth_root, width_f64,
    RealAlgebraicNumber,
};
pub use interval::RationalInterval;
pub use poly::{IntPolynomial, Polynomial, RatPolynomial};
