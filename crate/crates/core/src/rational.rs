//! Arbitrary-precision exact rationals and the combinatorial scalar functions
//! built on them.
//!
//! [`Rational`] is the universal coefficient type of the crate. Values are
//! always stored reduced with a positive denominator, so equality is plain
//! structural equality. The text form is `p/q` with the sign on the numerator
//! and `/q` omitted when the denominator is one; decimals are rejected.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, stored reduced with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `p/q`. Panics when `q == 0`.
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_bigints(p: BigInt, q: BigInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::BadRational("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(p, q)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Integer power with negative exponents allowed for nonzero values.
    pub fn pow(&self, exp: i64) -> Self {
        if exp == 0 {
            return Rational::one();
        }
        assert!(
            !self.is_zero() || exp > 0,
            "zero cannot be raised to a negative power"
        );
        let e = u32::try_from(exp.unsigned_abs()).expect("exponent out of range");
        let p = num_traits::pow::Pow::pow(self.numer(), e);
        let q = num_traits::pow::Pow::pow(self.denom(), e);
        if exp > 0 {
            Rational(BigRational::new(p, q))
        } else {
            Rational(BigRational::new(q, p))
        }
    }

    /// Exact rational k-th root, if one exists.
    ///
    /// For even `k` the positive root is returned and negative inputs yield
    /// `None`; for odd `k` the unique real root is returned. `None` also
    /// covers inputs whose root is irrational.
    pub fn kth_root(&self, k: u32) -> Option<Self> {
        assert!(k >= 1, "root order must be positive");
        if k == 1 {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_negative() && k.is_multiple_of(2) {
            return None;
        }
        let num_mag = self.numer().abs();
        let p = exact_int_root(&num_mag, k)?;
        let q = exact_int_root(self.denom(), k)?;
        let signed_p = if self.is_negative() { -p } else { p };
        Some(Rational(BigRational::new(signed_p, q)))
    }

    /// Decimal rendering with `places` digits, rounding half-up (ties toward +inf).
    pub fn to_decimal_string(&self, places: u32) -> String {
        let scale = num_traits::pow::pow(BigInt::from(10), places as usize);
        let scaled: BigInt = self.numer() * &scale;
        // floor(scaled/denom + 1/2) = floor((2*scaled + denom) / (2*denom))
        let doubled: BigInt = 2 * scaled + self.denom();
        let divisor: BigInt = 2 * self.denom();
        let rounded: BigInt = num_integer::Integer::div_floor(&doubled, &divisor);
        let negative = rounded.is_negative();
        let digits = rounded.abs().to_string();
        let digits = if digits.len() <= places as usize {
            format!("{:0>width$}", digits, width = places as usize + 1)
        } else {
            digits
        };
        let split = digits.len() - places as usize;
        let (int_part, frac_part) = digits.split_at(split);
        let sign = if negative { "-" } else { "" };
        if places == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

/// Exact integer k-th root of a non-negative integer, or `None`.
fn exact_int_root(value: &BigInt, k: u32) -> Option<BigInt> {
    let candidate = value.nth_root(k);
    if num_traits::pow::Pow::pow(&candidate, k) == *value {
        Some(candidate)
    } else {
        None
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadRational(format!("not a rational literal: {s:?}"));
        let mut parts = s.split('/');
        let num_part = parts.next().ok_or_else(bad)?;
        let p = BigInt::from_str(num_part).map_err(|_| bad())?;
        match parts.next() {
            None => Ok(Rational(BigRational::from_integer(p))),
            Some(den_part) => {
                if parts.next().is_some() {
                    return Err(bad());
                }
                let q = BigInt::from_str(den_part).map_err(|_| bad())?;
                Rational::from_bigints(p, q)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }
}

impl From<&BigInt> for Rational {
    fn from(v: &BigInt) -> Self {
        Rational(BigRational::from_integer(v.clone()))
    }
}

impl num_traits::Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl num_traits::One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

macro_rules! forward_binop {
    ($Op:ident, $op:ident, $OpAssign:ident, $op_assign:ident) => {
        impl $Op for Rational {
            type Output = Rational;
            fn $op(self, rhs: Rational) -> Rational {
                Rational((&self.0).$op(&rhs.0))
            }
        }
        impl $Op<&Rational> for Rational {
            type Output = Rational;
            fn $op(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$op(&rhs.0))
            }
        }
        impl $Op<Rational> for &Rational {
            type Output = Rational;
            fn $op(self, rhs: Rational) -> Rational {
                Rational((&self.0).$op(&rhs.0))
            }
        }
        impl $Op<&Rational> for &Rational {
            type Output = Rational;
            fn $op(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$op(&rhs.0))
            }
        }
        impl $OpAssign for Rational {
            fn $op_assign(&mut self, rhs: Rational) {
                self.0 = (&self.0).$op(&rhs.0);
            }
        }
        impl $OpAssign<&Rational> for Rational {
            fn $op_assign(&mut self, rhs: &Rational) {
                self.0 = (&self.0).$op(&rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);
forward_binop!(Div, div, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Falling factorial `(n)_k = n (n-1) ... (n-k+1)`, the number of
/// k-permutations of n. Errors when `k > n`.
pub fn falling_factorial(n: u64, k: u64) -> Result<BigInt> {
    if k > n {
        return Err(Error::Domain(format!(
            "falling factorial needs k <= n, got n={n}, k={k}"
        )));
    }
    let mut acc = BigInt::one();
    for i in (n - k + 1)..=n {
        acc *= i;
    }
    Ok(acc)
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// Generalized binomial coefficient `C(alpha, k)` for rational `alpha`,
/// computed by the finite product `alpha (alpha-1) ... (alpha-k+1) / k!`.
pub fn binomial_rational(alpha: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= alpha - &Rational::from(i as i64);
    }
    acc / Rational::from(factorial(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(10), BigInt::from(3628800));
    }

    #[test]
    fn falling_factorial_values() {
        assert_eq!(falling_factorial(7, 0).unwrap(), BigInt::from(1));
        assert_eq!(falling_factorial(5, 2).unwrap(), BigInt::from(20));
        assert_eq!(falling_factorial(6, 6).unwrap(), BigInt::from(720));
        assert!(falling_factorial(3, 4).is_err());
    }

    #[test]
    fn falling_factorial_completes_to_factorial() {
        for n in 0..=30u64 {
            for k in 0..=n {
                let lhs = falling_factorial(n, k).unwrap() * factorial(n - k);
                assert_eq!(lhs, factorial(n), "n={n}, k={k}");
            }
        }
    }

    #[test]
    fn binomial_int_values() {
        assert_eq!(binomial_int(4, 2), BigInt::from(6));
        assert_eq!(binomial_int(9, 0), BigInt::from(1));
        assert_eq!(binomial_int(3, 5), BigInt::from(0));
    }

    #[test]
    fn binomial_rational_values() {
        assert_eq!(binomial_rational(&rat("1/2"), 2), rat("-1/8"));
        assert_eq!(binomial_rational(&rat("22/7"), 0), Rational::one());
        assert_eq!(binomial_rational(&rat("1/3"), 1), rat("1/3"));
    }

    #[test]
    fn binomial_rational_matches_integer_binomial() {
        for m in 0..=20u64 {
            for k in 0..=20u64 {
                let via_rational = binomial_rational(&Rational::from(m as i64), k);
                assert_eq!(via_rational, Rational::from(binomial_int(m, k)));
            }
        }
    }

    #[test]
    fn stored_reduced_with_positive_denominator() {
        let half = Rational::new(2, 4);
        assert_eq!(half.numer(), &BigInt::from(1));
        assert_eq!(half.denom(), &BigInt::from(2));
        let neg = Rational::new(1, -2);
        assert_eq!(neg.numer(), &BigInt::from(-1));
        assert_eq!(neg.denom(), &BigInt::from(2));
    }

    #[test]
    fn text_form_round_trips() {
        for s in ["0", "5", "-3", "1/2", "-7/3", "22/7"] {
            assert_eq!(rat(s).to_string(), s);
        }
        assert_eq!(rat("2/4").to_string(), "1/2");
        assert_eq!(rat("3/1").to_string(), "3");
        assert_eq!(rat("+4").to_string(), "4");
    }

    #[test]
    fn rejects_non_rational_literals() {
        for s in ["1.5", "", "1/0", "1/2/3", "a", "1e3", " 1", "1 /2"] {
            assert!(s.parse::<Rational>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn pow_handles_negative_exponents() {
        assert_eq!(rat("2/3").pow(3), rat("8/27"));
        assert_eq!(rat("2/3").pow(-2), rat("9/4"));
        assert_eq!(rat("-5").pow(0), Rational::one());
        assert_eq!(rat("-1/2").pow(3), rat("-1/8"));
    }

    #[test]
    fn kth_root_cases() {
        assert_eq!(rat("8/27").kth_root(3), Some(rat("2/3")));
        assert_eq!(rat("4/9").kth_root(2), Some(rat("2/3")));
        assert_eq!(rat("-8").kth_root(3), Some(rat("-2")));
        assert_eq!(rat("2").kth_root(2), None);
        assert_eq!(rat("-4").kth_root(2), None);
        assert_eq!(rat("0").kth_root(4), Some(Rational::zero()));
        assert_eq!(rat("1").kth_root(7), Some(Rational::one()));
    }

    #[test]
    fn decimal_rendering_rounds_half_up() {
        assert_eq!(rat("22499/1000").to_decimal_string(1), "22.5");
        assert_eq!(rat("2250/100").to_decimal_string(1), "22.5");
        assert_eq!(rat("29933/1000").to_decimal_string(1), "29.9");
        assert_eq!(rat("1/4").to_decimal_string(1), "0.3");
        assert_eq!(rat("-1/4").to_decimal_string(1), "-0.2");
        assert_eq!(rat("30").to_decimal_string(1), "30.0");
        assert_eq!(rat("99/100").to_decimal_string(0), "1");
    }

    #[test]
    fn ordering_is_numeric() {
        assert!(rat("1/3") < rat("1/2"));
        assert!(rat("-1/2") < rat("-1/3"));
    }
}
