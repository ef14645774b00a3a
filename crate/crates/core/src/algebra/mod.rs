//! Exact rational and polynomial arithmetic, fraction-free determinants and
//! real-root isolation.

mod float;
mod matrix;
mod poly;
mod roots;
mod zpoly;

pub use dashu_int::{IBig, UBig};
pub use dashu_ratio::RBig as BigRational;

pub use float::{bits_for_digits, BigFloat, MIN_DIGITS};
pub use matrix::{bareiss_det, PolyMatrix};
pub use poly::{poly_add, poly_mul, UniPoly};
pub use roots::{real_roots, RealRoot};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("root interval is empty (lo must be < hi)")]
    EmptyInterval,
    #[error("cannot parse `{0}` as a decimal number")]
    Parse(String),
}

/// Exact rational `n/d`.
pub fn ratio(n: i64, d: u64) -> BigRational {
    BigRational::from_parts(IBig::from(n), UBig::from(d))
}
