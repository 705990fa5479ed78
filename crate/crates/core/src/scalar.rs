//! Exact numbers.
//!
//! Every position, time and length in the crate is exact. Plain data (request
//! locations, arrival times, line endpoints) lives in [`Scalar`], an
//! arbitrary-precision rational. Anything produced by the round-trip
//! strategies lives in [`QuadraticScalar`], an element `p + q·√3` of the field
//! ℚ(√3), because the default trip-growth parameter is `√3/2`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational in canonical reduced form.
pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// `numer / denom` as a [`Scalar`]. Panics when `denom == 0`.
pub fn ratio(numer: i64, denom: i64) -> Scalar {
    Scalar::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(value))
}

pub fn checked_div(lhs: &Scalar, rhs: &Scalar) -> Result<Scalar, ScalarError> {
    if rhs.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(lhs / rhs)
}

/// Parses `-12`, `2.5`, `.75`, `+3` or `p/q`.
pub fn parse_scalar(text: &str) -> Result<Scalar, ScalarError> {
    let malformed = || ScalarError::Malformed(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(malformed());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num).ok_or_else(malformed)?;
        let den = parse_integer(den).ok_or_else(malformed)?;
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        return Ok(Scalar::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(malformed());
    }
    let all_digits = |part: &str| part.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(whole) || !all_digits(frac) {
        return Err(malformed());
    }
    let digits = format!("{whole}{frac}");
    let numer = BigInt::from_str(&digits).map_err(|_| malformed())?;
    let denom = num_traits::pow(BigInt::from(10u8), frac.len());
    let value = Scalar::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let t = text.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(t.strip_prefix('+').unwrap_or(t)).ok()
}

pub fn scalar_to_f64(value: &Scalar) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Element `rational + surd·√3` of ℚ(√3).
///
/// The field is ordered and closed under `+ − × ÷`, so comparisons and
/// divisions are exact. Rationals embed with `surd = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadraticScalar {
    rational: Scalar,
    surd: Scalar,
}

const SQRT3_F64: f64 = 1.732_050_807_568_877_2;

impl QuadraticScalar {
    pub fn new(rational: Scalar, surd: Scalar) -> Self {
        Self { rational, surd }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(Scalar::one())
    }

    pub fn from_int(value: i64) -> Self {
        Self::from(int(value))
    }

    /// `√3`.
    pub fn sqrt3() -> Self {
        Self::new(Scalar::zero(), Scalar::one())
    }

    /// Rational part `p` of `p + q√3`.
    pub fn rational_part(&self) -> &Scalar {
        &self.rational
    }

    /// Coefficient `q` of `√3` in `p + q√3`.
    pub fn surd_part(&self) -> &Scalar {
        &self.surd
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn to_rational(&self) -> Option<Scalar> {
        self.is_rational().then(|| self.rational.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// Exact sign of `p + q√3`.
    pub fn signum(&self) -> Ordering {
        let p = self.rational.cmp(&Scalar::zero());
        let q = self.surd.cmp(&Scalar::zero());
        match (p, q) {
            (Ordering::Equal, q) => q,
            (p, Ordering::Equal) => p,
            (p, q) if p == q => p,
            // Opposite signs: compare p² with 3q².
            (p, _) => {
                let lhs = &self.rational * &self.rational;
                let rhs = &self.surd * &self.surd * int(3);
                match lhs.cmp(&rhs) {
                    Ordering::Greater => p,
                    Ordering::Less => p.reverse(),
                    // p² = 3q² has no nonzero rational solution.
                    Ordering::Equal => unreachable!("√3 is irrational"),
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `p − q√3`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.rational.clone(), -&self.surd)
    }

    /// `p² − 3q²`, the field norm.
    pub fn norm(&self) -> Scalar {
        &self.rational * &self.rational - &self.surd * &self.surd * int(3)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if rhs.is_rational() {
            return Ok(Self::new(&self.rational / &rhs.rational, &self.surd / &rhs.rational));
        }
        let norm = rhs.norm();
        let num = self * &rhs.conjugate();
        Ok(Self::new(&num.rational / &norm, &num.surd / &norm))
    }

    pub fn div_scalar(&self, rhs: &Scalar) -> Result<Self, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::new(&self.rational / rhs, &self.surd / rhs))
    }

    pub fn mul_scalar(&self, rhs: &Scalar) -> Self {
        Self::new(&self.rational * rhs, &self.surd * rhs)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Approximation for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        scalar_to_f64(&self.rational) + scalar_to_f64(&self.surd) * SQRT3_F64
    }

    /// Smallest integer `k` with `k ≥ self`.
    pub fn ceil_int(&self) -> BigInt {
        let guess = BigInt::from(self.to_f64().ceil() as i64);
        let mut k = guess - 2;
        let as_q = |k: &BigInt| QuadraticScalar::from(Scalar::from_integer(k.clone()));
        while as_q(&k) < *self {
            k += 1;
        }
        while as_q(&(&k - 1)) >= *self {
            k -= 1;
        }
        k
    }
}

impl From<Scalar> for QuadraticScalar {
    fn from(rational: Scalar) -> Self {
        Self::new(rational, Scalar::zero())
    }
}

impl From<&Scalar> for QuadraticScalar {
    fn from(rational: &Scalar) -> Self {
        Self::from(rational.clone())
    }
}

impl Ord for QuadraticScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.surd == other.surd {
            return self.rational.cmp(&other.rational);
        }
        (self - other).signum()
    }
}

impl PartialOrd for QuadraticScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for &QuadraticScalar {
    type Output = QuadraticScalar;
    fn neg(self) -> QuadraticScalar {
        QuadraticScalar::new(-&self.rational, -&self.surd)
    }
}

impl Neg for QuadraticScalar {
    type Output = QuadraticScalar;
    fn neg(self) -> QuadraticScalar {
        QuadraticScalar::new(-self.rational, -self.surd)
    }
}

impl Add<&QuadraticScalar> for &QuadraticScalar {
    type Output = QuadraticScalar;
    fn add(self, rhs: &QuadraticScalar) -> QuadraticScalar {
        QuadraticScalar::new(&self.rational + &rhs.rational, &self.surd + &rhs.surd)
    }
}

impl Sub<&QuadraticScalar> for &QuadraticScalar {
    type Output = QuadraticScalar;
    fn sub(self, rhs: &QuadraticScalar) -> QuadraticScalar {
        QuadraticScalar::new(&self.rational - &rhs.rational, &self.surd - &rhs.surd)
    }
}

impl Mul<&QuadraticScalar> for &QuadraticScalar {
    type Output = QuadraticScalar;
    fn mul(self, rhs: &QuadraticScalar) -> QuadraticScalar {
        if self.is_rational() {
            return rhs.mul_scalar(&self.rational);
        }
        if rhs.is_rational() {
            return self.mul_scalar(&rhs.rational);
        }
        let rational = &self.rational * &rhs.rational + &self.surd * &rhs.surd * int(3);
        let surd = &self.rational * &rhs.surd + &self.surd * &rhs.rational;
        QuadraticScalar::new(rational, surd)
    }
}

/// Panics on division by zero; use [`QuadraticScalar::checked_div`] otherwise.
impl Div<&QuadraticScalar> for &QuadraticScalar {
    type Output = QuadraticScalar;
    fn div(self, rhs: &QuadraticScalar) -> QuadraticScalar {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_owned_binop {
    ($($imp:ident::$method:ident),*) => {$(
        impl $imp<QuadraticScalar> for QuadraticScalar {
            type Output = QuadraticScalar;
            fn $method(self, rhs: QuadraticScalar) -> QuadraticScalar {
                (&self).$method(&rhs)
            }
        }
        impl $imp<&QuadraticScalar> for QuadraticScalar {
            type Output = QuadraticScalar;
            fn $method(self, rhs: &QuadraticScalar) -> QuadraticScalar {
                (&self).$method(rhs)
            }
        }
        impl $imp<QuadraticScalar> for &QuadraticScalar {
            type Output = QuadraticScalar;
            fn $method(self, rhs: QuadraticScalar) -> QuadraticScalar {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned_binop!(Add::add, Sub::sub, Mul::mul, Div::div);

impl AddAssign<&QuadraticScalar> for QuadraticScalar {
    fn add_assign(&mut self, rhs: &QuadraticScalar) {
        self.rational += &rhs.rational;
        self.surd += &rhs.surd;
    }
}

impl SubAssign<&QuadraticScalar> for QuadraticScalar {
    fn sub_assign(&mut self, rhs: &QuadraticScalar) {
        self.rational -= &rhs.rational;
        self.surd -= &rhs.surd;
    }
}

/// Renders `p`, `q*sqrt3`, `p+q*sqrt3` or `p-q*sqrt3` with canonical rationals.
impl fmt::Display for QuadraticScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return write!(f, "{}", self.rational);
        }
        if self.rational.is_zero() {
            return write!(f, "{}*sqrt3", self.surd);
        }
        if self.surd.is_negative() {
            write!(f, "{}-{}*sqrt3", self.rational, -&self.surd)
        } else {
            write!(f, "{}+{}*sqrt3", self.rational, self.surd)
        }
    }
}

impl FromStr for QuadraticScalar {
    type Err = ScalarError;

    /// Accepts the [`Display`](fmt::Display) forms, plus `sqrt3` and `sqrt3/2`
    /// shorthands for a unit or halved surd.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let malformed = || ScalarError::Malformed(text.to_string());
        if !s.contains("sqrt3") {
            return parse_scalar(&s).map(Self::from);
        }
        // Split off the surd term at the last sign that is not in leading position.
        let split = s
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (rational, surd_term) = match split {
            Some(i) if s[i..].contains("sqrt3") && !s[..i].contains("sqrt3") => (&s[..i], &s[i..]),
            _ => ("", s.as_str()),
        };
        let rational = if rational.is_empty() { Scalar::zero() } else { parse_scalar(rational)? };
        let (sign, body) = match surd_term.as_bytes().first() {
            Some(b'-') => (-1, &surd_term[1..]),
            Some(b'+') => (1, &surd_term[1..]),
            _ => (1, surd_term),
        };
        let coefficient = if let Some(coef) = body.strip_suffix("*sqrt3") {
            parse_scalar(coef)?
        } else if body == "sqrt3" {
            Scalar::one()
        } else if let Some(den) = body.strip_prefix("sqrt3/") {
            let den = parse_scalar(den)?;
            checked_div(&Scalar::one(), &den)?
        } else {
            return Err(malformed());
        };
        Ok(Self::new(rational, coefficient * int(sign)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: (i64, i64), s: (i64, i64)) -> QuadraticScalar {
        QuadraticScalar::new(ratio(p.0, p.1), ratio(s.0, s.1))
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_scalar("2.5").unwrap(), ratio(5, 2));
        assert_eq!(parse_scalar("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_scalar("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_scalar("-3/9").unwrap(), ratio(-1, 3));
        assert_eq!(parse_scalar("+7").unwrap(), int(7));
        assert_eq!(parse_scalar(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("1/0"), Err(ScalarError::DivisionByZero));
        for bad in ["", "abc", "1.2.3", "--1", "1/", "/2", "1e3", "1/2/3"] {
            assert!(parse_scalar(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn checked_division_rejects_zero() {
        assert_eq!(checked_div(&int(1), &int(0)), Err(ScalarError::DivisionByZero));
        assert_eq!(
            QuadraticScalar::one().checked_div(&QuadraticScalar::zero()),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 2 - √3 > 0, 1 - √3 < 0, -2 + √3 < 0, -1 + √3 > 0
        assert!(q((2, 1), (-1, 1)).is_positive());
        assert!(q((1, 1), (-1, 1)).is_negative());
        assert!(q((-2, 1), (1, 1)).is_negative());
        assert!(q((-1, 1), (1, 1)).is_positive());
        // 7/4 vs √3 ≈ 1.732
        assert!(q((7, 4), (0, 1)) > QuadraticScalar::sqrt3());
        assert!(q((173, 100), (0, 1)) < QuadraticScalar::sqrt3());
    }

    #[test]
    fn field_identities() {
        let two_plus_sqrt3 = q((2, 1), (1, 1));
        let one_plus_sqrt3 = q((1, 1), (1, 1));
        // 5 + 3√3 = (2 + √3)(1 + √3)
        assert_eq!(&two_plus_sqrt3 * &one_plus_sqrt3, q((5, 1), (3, 1)));
        assert_eq!(&q((5, 1), (3, 1)) / &one_plus_sqrt3, two_plus_sqrt3);
        assert_eq!(&QuadraticScalar::sqrt3() * &QuadraticScalar::sqrt3(), QuadraticScalar::from_int(3));
    }

    #[test]
    fn display_round_trips() {
        for text in ["3/2", "1/2*sqrt3", "2+1*sqrt3", "2-1/4*sqrt3", "-1/3-5*sqrt3", "0"] {
            let value: QuadraticScalar = text.parse().unwrap();
            assert_eq!(value.to_string(), text);
        }
        assert_eq!("sqrt3/2".parse::<QuadraticScalar>().unwrap(), q((0, 1), (1, 2)));
        assert_eq!("1+sqrt3".parse::<QuadraticScalar>().unwrap(), q((1, 1), (1, 1)));
        assert!("1+sqrt2".parse::<QuadraticScalar>().is_err());
    }

    #[test]
    fn ceil_matches_float_for_simple_values() {
        assert_eq!(q((2, 1), (1, 1)).ceil_int(), BigInt::from(4));
        assert_eq!(QuadraticScalar::from_int(3).ceil_int(), BigInt::from(3));
        assert_eq!(q((-1, 2), (0, 1)).ceil_int(), BigInt::from(0));
    }

    fn small_q() -> impl Strategy<Value = QuadraticScalar> {
        (-50i64..50, 1i64..8, -50i64..50, 1i64..8).prop_map(|(a, b, c, d)| q((a, b), (c, d)))
    }

    proptest! {
        #[test]
        fn order_agrees_with_float(x in small_q(), y in small_q()) {
            let (fx, fy) = (x.to_f64(), y.to_f64());
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x < y, fx < fy);
            }
        }

        #[test]
        fn division_inverts_multiplication(x in small_q(), y in small_q()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!(&(&x * &y) / &y, x);
        }

        #[test]
        fn text_round_trip(x in small_q()) {
            prop_assert_eq!(x.to_string().parse::<QuadraticScalar>().unwrap(), x);
        }
    }
}
