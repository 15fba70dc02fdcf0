//! Exact binary rationals `mant · 2^exp`.
//!
//! Addition, subtraction, multiplication and comparison are exact; the
//! only rounding operations are the explicitly directed ones, which the
//! interval layer uses for outward rounding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::{BigInt, BigUint, Sign};
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Rounding direction for the directed operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseDyadicError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal {0:?}")]
    Invalid(String),
    #[error("literal {0:?} is not a dyadic rational (denominator must be a power of two)")]
    NotDyadic(String),
}

/// An exact dyadic rational. Canonical form: the mantissa is odd or zero
/// (zero is stored with exponent 0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// 2^k.
    pub fn two_pow(k: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: k,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &other.mant << (other.exp - exp) as u64;
        Dyadic::new(a + b, exp)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    /// Exact product with 2^k.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Exact nonnegative integer power.
    pub fn pow_u32(&self, n: u32) -> Self {
        if n == 0 {
            return Dyadic::one();
        }
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.pow(n),
            exp: self.exp * n as i64,
        }
    }

    /// Round to an integer multiple of 2^{-frac_bits} in the given direction.
    pub fn round_to(&self, frac_bits: u32, dir: Round) -> Self {
        let target = -(frac_bits as i64);
        if self.is_zero() || self.exp >= target {
            return self.clone();
        }
        let shift = (target - self.exp) as u64;
        let den = BigInt::one() << shift;
        let q = match dir {
            Round::Down => self.mant.div_floor(&den),
            Round::Up => -((-&self.mant).div_floor(&den)),
        };
        Dyadic::new(q, target)
    }

    /// Directed conversion of a rational to a dyadic with `frac_bits`
    /// fractional bits.
    pub fn from_rational(r: &BigRational, frac_bits: u32, dir: Round) -> Self {
        let scaled_num = r.numer() << frac_bits as u64;
        let q = match dir {
            Round::Down => scaled_num.div_floor(r.denom()),
            Round::Up => -((-scaled_num).div_floor(r.denom())),
        };
        Dyadic::new(q, -(frac_bits as i64))
    }

    /// Directed quotient with `frac_bits` fractional bits. `other` must be nonzero.
    pub fn div(&self, other: &Dyadic, frac_bits: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // self/other = (m_a/m_b)·2^{e_a-e_b}; shift the numerator so the
        // quotient carries frac_bits fractional bits, then divide once.
        let shift = self.exp - other.exp + frac_bits as i64;
        let (num, den) = if shift >= 0 {
            (&self.mant << shift as u64, other.mant.clone())
        } else {
            (self.mant.clone(), &other.mant << (-shift) as u64)
        };
        let q = match dir {
            Round::Down => num.div_floor(&den),
            Round::Up => -((-num).div_floor(&den)),
        };
        Dyadic::new(q, -(frac_bits as i64))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Number of significant bits in the mantissa.
    pub fn mant_bits(&self) -> u64 {
        self.mant.magnitude().bits()
    }

    /// floor(log2 |x|) for nonzero x: the unique e with 2^e ≤ |x| < 2^{e+1}.
    pub fn log2_floor(&self) -> i64 {
        assert!(!self.is_zero());
        self.exp + self.mant_bits() as i64 - 1
    }

    /// Exact decimal rendering (every dyadic has a finite decimal expansion).
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let mag = self.mant.magnitude().clone();
        let body = if self.exp >= 0 {
            (mag << self.exp as u64).to_string()
        } else {
            let frac = (-self.exp) as u64;
            // mant / 2^f = mant * 5^f / 10^f
            let digits = (mag * BigUint::from(5u32).pow(frac as u32)).to_string();
            let f = frac as usize;
            if digits.len() <= f {
                format!("0.{}{}", "0".repeat(f - digits.len()), digits)
            } else {
                let (int, frac) = digits.split_at(digits.len() - f);
                format!("{int}.{frac}")
            }
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Decimal rendering rounded in the given direction to `digits`
    /// fractional digits (used for outward-rounded report fields).
    pub fn to_decimal_rounded(&self, digits: u32, dir: Round) -> String {
        let pow = BigInt::from(10u32).pow(digits);
        let scaled = self.to_rational() * BigRational::from_integer(pow.clone());
        let int = match dir {
            Round::Down => scaled.floor().to_integer(),
            Round::Up => scaled.ceil().to_integer(),
        };
        let neg = int.is_negative();
        let s = int.magnitude().to_string();
        let d = digits as usize;
        let body = if s.len() <= d {
            format!("0.{}{}", "0".repeat(d - s.len()), s)
        } else {
            let (i, f) = s.split_at(s.len() - d);
            if d == 0 {
                i.to_string()
            } else {
                format!("{i}.{f}")
            }
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Approximate value as f64 (diagnostics only; all reported numbers
    /// go through the exact decimal renderers).
    pub fn to_f64_lossy(&self) -> f64 {
        let (sign, digits) = self.mant.to_u64_digits();
        let mut m = 0f64;
        for d in digits.iter().rev() {
            m = m * 1.8446744073709552e19 + *d as f64;
        }
        if sign == Sign::Minus {
            m = -m;
        }
        m * 2f64.powi(self.exp.clamp(-1022, 1023) as i32)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mant.sign(), other.mant.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) | (Sign::NoSign, Sign::Plus) => {
                return Ordering::Less
            }
            (Sign::Plus, Sign::NoSign) | (Sign::Plus, Sign::Minus) | (Sign::NoSign, Sign::Minus) => {
                return Ordering::Greater
            }
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let diff = self.sub(other);
        if diff.is_zero() {
            Ordering::Equal
        } else if diff.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Cap unbounded expansions in human-facing output.
        if self.exp >= -96 && self.exp <= 64 && self.mant_bits() <= 160 {
            f.write_str(&self.to_decimal_string())
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

/// Parse an exact rational literal: integer (`3`), fraction (`1/8`),
/// or finite decimal (`0.25`). No binary floating point involved.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseDyadicError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ParseDyadicError::Empty);
    }
    let invalid = || ParseDyadicError::Invalid(text.to_string());
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| invalid())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| invalid())?;
        if d.is_zero() {
            return Err(invalid());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid());
        }
        let neg = int.starts_with('-');
        let int_part = BigInt::from_str(if int.is_empty() || int == "-" { "0" } else { int })
            .map_err(|_| invalid())?;
        let frac_num = BigInt::from_str(frac).map_err(|_| invalid())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = int_part.abs() * &den + frac_num;
        let signed = if neg { -mag } else { mag };
        return Ok(BigRational::new(signed, den));
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|_| invalid())
}

/// Parse a literal that must be exactly dyadic.
pub fn parse_dyadic(text: &str) -> Result<Dyadic, ParseDyadicError> {
    let r = parse_rational(text)?;
    rational_to_dyadic(&r).ok_or_else(|| ParseDyadicError::NotDyadic(text.to_string()))
}

/// Exact conversion when the denominator is a power of two.
pub fn rational_to_dyadic(r: &BigRational) -> Option<Dyadic> {
    let den = r.denom();
    if den.is_zero() {
        return None;
    }
    let bits = den.magnitude().trailing_zeros().unwrap_or(0);
    if den.magnitude().count_ones() != 1 {
        return None;
    }
    Some(Dyadic::new(r.numer().clone(), -(bits as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(text: &str) -> Dyadic {
        parse_dyadic(text).unwrap()
    }

    #[test]
    fn canonical_form() {
        let x = Dyadic::new(BigInt::from(12), -2);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 0);
        assert!(Dyadic::new(BigInt::zero(), 55).is_zero());
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(d("1/2").add(&d("1/4")), d("3/4"));
        assert_eq!(d("1/2").mul(&d("1/2")), d("1/4"));
        assert_eq!(d("3").sub(&d("5/2")), d("1/2"));
        assert_eq!(d("1/2").pow_u32(3), d("1/8"));
    }

    #[test]
    fn rounding_directed() {
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        let lo = Dyadic::from_rational(&third, 8, Round::Down);
        let hi = Dyadic::from_rational(&third, 8, Round::Up);
        assert!(lo < hi);
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert_eq!(hi.sub(&lo), Dyadic::two_pow(-8));
        // Exact values round to themselves.
        assert_eq!(d("0.25").round_to(8, Round::Up), d("0.25"));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(d("1/16").to_decimal_string(), "0.0625");
        assert_eq!(d("-3/8").to_decimal_string(), "-0.375");
        assert_eq!(d("5").to_decimal_string(), "5");
        assert_eq!(d("1/16").to_decimal_rounded(3, Round::Down), "0.062");
        assert_eq!(d("1/16").to_decimal_rounded(3, Round::Up), "0.063");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(d("0.25"), d("1/4"));
        assert_eq!(d("-0.5"), d("-1/2"));
        assert!(parse_dyadic("1/3").is_err());
        assert!(parse_rational("1/3").is_ok());
        assert!(parse_dyadic("abc").is_err());
    }

    #[test]
    fn log2_floor_values() {
        assert_eq!(d("1").log2_floor(), 0);
        assert_eq!(d("3/4").log2_floor(), -1);
        assert_eq!(d("1/4").log2_floor(), -2);
        assert_eq!(d("5").log2_floor(), 2);
    }

    fn arb_dyadic() -> impl Strategy<Value = Dyadic> {
        (any::<i64>(), -60i64..60).prop_map(|(m, e)| Dyadic::new(BigInt::from(m), e))
    }

    proptest! {
        #[test]
        fn add_sub_exact(a in arb_dyadic(), b in arb_dyadic()) {
            prop_assert_eq!(a.add(&b).sub(&b), a);
        }

        #[test]
        fn mul_matches_rationals(a in arb_dyadic(), b in arb_dyadic()) {
            prop_assert_eq!(a.mul(&b).to_rational(), a.to_rational() * b.to_rational());
        }

        #[test]
        fn cmp_matches_rationals(a in arb_dyadic(), b in arb_dyadic()) {
            prop_assert_eq!(a.cmp(&b), a.to_rational().cmp(&b.to_rational()));
        }

        #[test]
        fn directed_rounding_brackets(a in arb_dyadic(), bits in 0u32..40) {
            let lo = a.round_to(bits, Round::Down);
            let hi = a.round_to(bits, Round::Up);
            prop_assert!(lo <= a && a <= hi);
            prop_assert!(hi.sub(&lo) <= Dyadic::two_pow(-(bits as i64)));
        }
    }
}
