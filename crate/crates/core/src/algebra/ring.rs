//! Coefficient rings for sparse polynomials: prime fields and big rationals.

use std::fmt::Debug;

use super::field::PrimeField;

/// Exact rational numbers (numerator and denominator coprime, denominator positive).
pub type BigRational = rug::Rational;
pub type BigInt = rug::Integer;

/// A commutative ring with the operations polynomials need. Elements carry no
/// context; the ring value supplies it (e.g. the modulus).
pub trait Ring: Clone + Debug + PartialEq {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Multiplicative inverse, `None` for non-units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, a: i64) -> Self::Elem;
    fn render(&self, a: &Self::Elem) -> String;
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::add(self, *a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::sub(self, *a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        PrimeField::neg(self, *a)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        PrimeField::inv(self, *a).ok()
    }
    fn from_i64(&self, a: i64) -> u64 {
        PrimeField::from_i64(self, a)
    }
    fn render(&self, a: &u64) -> String {
        self.to_signed(*a).to_string()
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::new()
    }
    fn one(&self) -> BigRational {
        BigRational::from(1)
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        BigRational::from(a + b)
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        BigRational::from(a - b)
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        BigRational::from(-a)
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        BigRational::from(a * b)
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.cmp0() == std::cmp::Ordering::Equal
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!self.is_zero(a)).then(|| a.clone().recip())
    }
    fn from_i64(&self, a: i64) -> BigRational {
        BigRational::from(a)
    }
    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }
}
