//! Outward-rounded interval arithmetic over exact dyadic endpoints.
//!
//! Every operation returns an enclosure of the true value. Addition,
//! subtraction and multiplication of dyadics are exact, so the only
//! widening happens in the explicitly directed operations (division,
//! elementary functions) and in [`Interval::outward_round`], which the
//! long-running reductions use to cap mantissa growth.

use std::fmt;

use num::rational::BigRational;
use thiserror::Error;

use super::dyadic::{Dyadic, Round};

/// Target fractional bits for enclosure widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    pub const DEFAULT_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self, NumericError> {
        if bits < 4 {
            return Err(NumericError::PrecisionTooSmall { bits });
        }
        Ok(Precision { bits })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Working precision with guard bits for intermediate steps.
    pub(crate) fn working(self, guard: u32) -> u32 {
        self.bits + guard
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            bits: Self::DEFAULT_BITS,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericError {
    #[error("precision must be at least 4 bits (got {bits})")]
    PrecisionTooSmall { bits: u32 },
    #[error("empty interval: lo > hi")]
    EmptyInterval,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division error: {0}")]
    Division(String),
    #[error("bracket error: {0}")]
    Bracket(String),
    #[error("root finder did not converge: {0}")]
    NonConvergence(String),
}

/// A closed interval `[lo, hi]` with dyadic endpoints; `lo <= hi`.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self, NumericError> {
        if lo > hi {
            return Err(NumericError::EmptyInterval);
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(value: Dyadic) -> Self {
        Interval {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Interval::point(Dyadic::from_int(n))
    }

    /// Tight enclosure of an exact rational at `frac_bits` fractional bits.
    pub fn from_rational(r: &BigRational, frac_bits: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(r, frac_bits, Round::Down),
            hi: Dyadic::from_rational(r, frac_bits, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn midpoint_rounded(&self, frac_bits: u32) -> Dyadic {
        self.lo
            .add(&self.hi)
            .shift(-1)
            .round_to(frac_bits, Round::Down)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.add(&other.lo),
            hi: self.hi.add(&other.hi),
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let candidates = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Interval { lo, hi }
    }

    /// Exact scaling by a dyadic factor.
    pub fn scale(&self, c: &Dyadic) -> Interval {
        if c.is_negative() {
            Interval {
                lo: self.hi.mul(c),
                hi: self.lo.mul(c),
            }
        } else {
            Interval {
                lo: self.lo.mul(c),
                hi: self.hi.mul(c),
            }
        }
    }

    /// Directed division; the divisor must exclude zero.
    pub fn div(&self, other: &Interval, frac_bits: u32) -> Result<Interval, NumericError> {
        if other.contains(&Dyadic::zero()) {
            return Err(NumericError::Division(
                "divisor interval contains zero".to_string(),
            ));
        }
        if other.lo.is_negative() {
            return self.neg().div(&other.neg(), frac_bits);
        }
        // Positive divisor: x/d is increasing in x; for the divisor pick
        // the end that pushes each bound outward.
        let lo_den = if self.lo.is_negative() {
            &other.lo
        } else {
            &other.hi
        };
        let hi_den = if self.hi.is_negative() {
            &other.hi
        } else {
            &other.lo
        };
        Interval {
            lo: self.lo.div(lo_den, frac_bits, Round::Down),
            hi: self.hi.div(hi_den, frac_bits, Round::Up),
        }
        .validated()
    }

    /// Round endpoints outward to `frac_bits` fractional bits.
    pub fn outward_round(&self, frac_bits: u32) -> Interval {
        Interval {
            lo: self.lo.round_to(frac_bits, Round::Down),
            hi: self.hi.round_to(frac_bits, Round::Up),
        }
    }

    /// Widen the upper end by a nonnegative amount (tail attachment).
    pub fn widen_hi(&self, amount: &Dyadic) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.add(amount),
        }
    }

    fn validated(self) -> Result<Interval, NumericError> {
        if self.lo > self.hi {
            Err(NumericError::EmptyInterval)
        } else {
            Ok(self)
        }
    }

    /// Report rendering: decimal endpoints rounded outward, `lo..hi`.
    pub fn to_report_string(&self, digits: u32) -> String {
        format!(
            "{}..{}",
            self.lo.to_decimal_rounded(digits, Round::Down),
            self.hi.to_decimal_rounded(digits, Round::Up)
        )
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Interval sum of a sequence of intervals in the given (fixed) order,
/// with periodic outward rounding to keep mantissas bounded.
pub fn sum_intervals<'a, I>(terms: I, frac_bits: u32) -> Interval
where
    I: IntoIterator<Item = &'a Interval>,
{
    let mut acc = Interval::zero();
    for (i, t) in terms.into_iter().enumerate() {
        acc = acc.add(t);
        if i % 64 == 63 {
            acc = acc.outward_round(frac_bits + 16);
        }
    }
    acc
}
