//! Coefficient types.
//!
//! Everything in this crate is generic over a [`Scalar`]. The mathematics
//! needs an exact field of characteristic zero, so [`BigRational`] is the
//! type the rest of the crate (and the CLI) is instantiated with; fixed-width
//! rationals work for small inputs and `f64` is accepted for plain
//! arithmetic, but nothing that tests for zero (kernel membership, the linear
//! algebra) is meaningful over floats.

use std::fmt::Debug;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed};

/// A coefficient type: a commutative ring with division and small-integer
/// embedding.
pub trait Scalar:
    Num + Clone + Neg<Output = Self> + FromPrimitive + Debug + Send + Sync + 'static
{
    fn from_u64_exact(v: u64) -> Self {
        Self::from_u64(v).expect("integer does not fit the scalar type")
    }
}

impl<T> Scalar for T where
    T: Num + Clone + Neg<Output = T> + FromPrimitive + Debug + Send + Sync + 'static
{
}

/// Scalars with an exact `"num/den"` text form, used by the JSON formats.
pub trait ExactScalar: Scalar {
    fn to_fraction(&self) -> String;
    fn parse_fraction(s: &str) -> Option<Self>;
}

fn parse_ratio<T>(s: &str) -> Option<Ratio<T>>
where
    T: Clone + Integer + Signed + FromStr,
{
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<T>().ok()?, d.trim().parse::<T>().ok()?),
        None => (s.parse::<T>().ok()?, T::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Ratio::new(num, den))
}

impl ExactScalar for BigRational {
    fn to_fraction(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_fraction(s: &str) -> Option<Self> {
        parse_ratio::<BigInt>(s)
    }
}

impl ExactScalar for Ratio<i64> {
    fn to_fraction(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_fraction(s: &str) -> Option<Self> {
        parse_ratio::<i64>(s)
    }
}

/// Binomial coefficient as a scalar.
pub fn binomial<C: Scalar>(n: u64, k: u64) -> C {
    if k > n {
        return C::zero();
    }
    let k = k.min(n - k);
    let mut acc = C::one();
    for i in 0..k {
        acc = acc * C::from_u64_exact(n - i) / C::from_u64_exact(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn fraction_strings() {
        let q = BigRational::new(BigInt::from(-4), BigInt::from(2));
        assert_eq!(q.to_fraction(), "-2/1");
        assert_eq!(BigRational::parse_fraction("-2/1"), Some(q));
        assert_eq!(BigRational::parse_fraction(" 3 "), Some(BigRational::from_u64_exact(3)));
        assert_eq!(BigRational::parse_fraction("1/0"), None);
        assert_eq!(BigRational::parse_fraction("a/b"), None);
        assert_eq!(Rational64::parse_fraction("6/4").unwrap().to_fraction(), "3/2");
    }

    #[test]
    fn binomials() {
        let row: Vec<BigRational> = (0..=5).map(|k| binomial(5, k)).collect();
        let want: Vec<BigRational> = [1u64, 5, 10, 10, 5, 1]
            .iter()
            .map(|&v| BigRational::from_u64_exact(v))
            .collect();
        assert_eq!(row, want);
        assert_eq!(binomial::<f64>(6, 3), 20.0);
        assert_eq!(binomial::<Rational64>(3, 4), Rational64::from_integer(0));
    }
}
