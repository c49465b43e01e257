//! Truncated Laurent series in `q` and in `(r, q)` over exact coefficient rings.

mod biseries;
mod padic;
mod qseries;

use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use biseries::{product_from_exponents, BiSeries, Factor};
pub use padic::{pow3, NotDivisible, PadicApprox, DEFAULT_CAP, MAX_CAP};
pub use qseries::QSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    /// Leading coefficient is not 1 where log/exp/inverse need it.
    NotUnitConstant,
    /// A product or argument produced a monomial outside the supported region.
    Support { m: i32, n: i32 },
    NonIntegralExponent { m: i32, n: i32 },
    NotDivisible { index: i32 },
    Truncation,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::NotUnitConstant => f.write_str("series does not start with constant term 1"),
            SeriesError::Support { m, n } => write!(f, "monomial r^{m} q^{n} outside supported region"),
            SeriesError::NonIntegralExponent { m, n } => {
                write!(f, "non-integral exponent for factor at ({m},{n})")
            }
            SeriesError::NotDivisible { index } => {
                write!(f, "coefficient at index {index} is not divisible as required")
            }
            SeriesError::Truncation => f.write_str("truncation orders incompatible"),
        }
    }
}

/// Coefficient rings the series code is generic over.
pub trait Coeff: Clone + fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_int(&self, d: i64) -> Result<Self, NotDivisible>;
    /// True only for a value that is exactly zero (multiplying by it loses nothing).
    fn is_exact_zero(&self) -> bool;
    /// True when the value is exactly one.
    fn is_exact_one(&self) -> bool;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_int(&self, d: i64) -> Result<Self, NotDivisible> {
        Ok(self / BigRational::from_integer(BigInt::from(d)))
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_exact_one(&self) -> bool {
        One::is_one(self)
    }
    fn pow(&self, e: u32) -> Self {
        num_traits::Pow::pow(self, e)
    }
}

impl Coeff for PadicApprox {
    fn zero() -> Self {
        PadicApprox::exact(0)
    }
    fn one() -> Self {
        PadicApprox::exact(1)
    }
    fn from_bigint(n: &BigInt) -> Self {
        padic::bigint_to_padic(n)
    }
    fn add(&self, o: &Self) -> Self {
        PadicApprox::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PadicApprox::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicApprox::mul(self, o)
    }
    fn neg(&self) -> Self {
        PadicApprox::neg(self)
    }
    fn div_int(&self, d: i64) -> Result<Self, NotDivisible> {
        PadicApprox::div_int(self, d)
    }
    fn is_exact_zero(&self) -> bool {
        self.residue() == 0 && self.is_exact()
    }
    fn is_exact_one(&self) -> bool {
        self.residue() == 1 && self.is_exact()
    }
    fn pow(&self, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            self.pow_sharp(e)
        }
    }
}

/// Generalized binomial coefficient `C(e, k)` for any integer `e`.
pub fn binomial(e: &BigInt, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= e - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

pub(crate) fn rational_to_int(x: &BigRational) -> Option<BigInt> {
    if x.is_integer() {
        Some(x.to_integer())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_negative_upper() {
        assert_eq!(binomial(&BigInt::from(-2), 3), BigInt::from(-4));
        assert_eq!(binomial(&BigInt::from(5), 2), BigInt::from(10));
        assert_eq!(binomial(&BigInt::from(2), 3), BigInt::zero());
    }
}
