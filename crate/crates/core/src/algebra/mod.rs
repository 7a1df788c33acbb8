//! Exact arithmetic substrate: prime fields, dense univariate and sparse
//! multivariate polynomials, dense homogeneous polynomials.

pub mod field;
pub mod intpoly;
pub mod ntt;
pub mod unipoly;

pub use field::{PrimeField, RootOfUnity};
pub use unipoly::UniPoly;
pub mod linalg;
pub mod multipoly;
pub mod ring;

pub use linalg::FpMatrix;
pub use multipoly::MultiPoly;
pub use ring::{BigInt, BigRational, Rationals, Ring};
