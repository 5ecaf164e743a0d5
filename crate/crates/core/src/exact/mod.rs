//! Exact scalars, dense matrices, polynomials and subspaces.
//!
//! Everything here is a pure function of immutable values. Integers and
//! rationals are arbitrary precision; prime-field arithmetic uses machine
//! words with the modulus carried alongside the data.

pub mod bivariate;
pub mod cyclotomic;
pub mod fp;
pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod subspace;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

pub use bivariate::{bivar_common_factor, CommonFactor, WitnessVariable};
pub use cyclotomic::{cyclotomic, cyclotomic_orders, euler_phi, m_star};
pub use fp::FpPoly;
pub use laurent::{laurent_divides, laurent_gcd_1d, LaurentPoly};
pub use matrix::{char_poly, kernel, IntMatrix, Matrix, RatMatrix};
pub use poly::{poly_gcd, IntPoly, Poly, RatPoly};
pub use subspace::RationalSubspace;

/// Ring elements the dense containers can hold.
pub trait Scalar: Clone + Num + Signed + fmt::Debug + fmt::Display {
    fn parse_text(text: &str) -> Option<Self>;
}

impl Scalar for BigInt {
    fn parse_text(text: &str) -> Option<Self> {
        text.trim().parse().ok()
    }
}

impl Scalar for BigRational {
    fn parse_text(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(BigRational::new(n, d))
            }
            None => Some(BigRational::from_integer(text.parse().ok()?)),
        }
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Least common multiple of the denominators of `values` (1 for an empty list).
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales a rational vector to a primitive integer vector with the same
/// direction (first nonzero entry keeps its sign).
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let l = denominator_lcm(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Serde adapter writing rational vectors as lists of decimal strings.
pub mod ratvec {
    use num_rational::BigRational;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::matrix::ScalarRepr;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<ScalarRepr>::deserialize(d)?
            .into_iter()
            .map(|x| x.parse().ok_or_else(|| D::Error::custom("bad rational entry")))
            .collect()
    }
}

/// Serde adapter for lists of rational vectors.
pub mod ratvecs {
    use num_rational::BigRational;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::matrix::ScalarRepr;

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        Vec::<Vec<ScalarRepr>>::deserialize(d)?
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| x.parse().ok_or_else(|| D::Error::custom("bad rational entry")))
                    .collect()
            })
            .collect()
    }
}

/// Serde adapter writing integer vectors as lists of decimal strings.
pub mod intvec {
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::matrix::ScalarRepr;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<ScalarRepr>::deserialize(d)?
            .into_iter()
            .map(|x| x.parse().ok_or_else(|| D::Error::custom("bad integer entry")))
            .collect()
    }
}
