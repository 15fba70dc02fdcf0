//! Certified elementary functions on intervals.
//!
//! Logarithms use the atanh series after range reduction to [1,2); exp
//! uses Taylor after halving the argument below 1/2 and squaring back;
//! powers with dyadic exponents go through exact integer powers and
//! integer-square-root refinement, everything else through exp(q·ln x).
//! Every path rounds outward and adds an explicit series tail, so the
//! returned interval always contains the true value.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num::bigint::BigInt;
use num::{One, Signed};

use super::dyadic::{Dyadic, Round};
use super::interval::{Interval, NumericError, Precision};

const GUARD: u32 = 32;

/// Certified square root: contains sqrt(v) exactly, width <= 2^{-frac_bits}.
pub fn sqrt_dyadic(v: &Dyadic, frac_bits: u32) -> Result<Interval, NumericError> {
    if v.is_negative() {
        return Err(NumericError::Domain(
            "square root of a negative value".to_string(),
        ));
    }
    if v.is_zero() {
        return Ok(Interval::zero());
    }
    let e = v.exponent();
    let mut k = frac_bits as i64;
    // Need e + 2k >= 0 so that v * 4^k is an integer.
    if e + 2 * k < 0 {
        k = (-e + 1) / 2 + 1;
    }
    let scaled: BigInt = v.mantissa() << (e + 2 * k) as u64;
    let root = scaled.sqrt();
    let exact = (&root * &root) == scaled;
    let lo = Dyadic::new(root.clone(), -k);
    if exact {
        return Ok(Interval::point(lo));
    }
    let hi = Dyadic::new(root + BigInt::one(), -k);
    Interval::new(lo, hi)
}

fn sqrt_interval(x: &Interval, frac_bits: u32) -> Result<Interval, NumericError> {
    let lo = sqrt_dyadic(x.lo(), frac_bits)?;
    let hi = sqrt_dyadic(x.hi(), frac_bits)?;
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// atanh series Σ u^{2i+1}/(2i+1) for an interval u ⊆ [0, 0.34].
fn atanh_series(u: &Interval, wp: u32) -> Interval {
    let stop = Dyadic::two_pow(-(wp as i64 + 6));
    let u2 = u.mul(u).outward_round(wp + 8);
    let mut acc = u.clone();
    let mut upow = u.clone();
    for i in 1..10_000u32 {
        upow = upow.mul(&u2).outward_round(wp + 8);
        let term = upow
            .div(&Interval::from_int(2 * i as i64 + 1), wp + 8)
            .expect("odd denominators are nonzero");
        acc = acc.add(&term);
        if term.hi() <= &stop {
            break;
        }
    }
    // Remaining terms are positive and bounded by term_next/(1-u^2) <= 2*stop.
    acc.widen_hi(&Dyadic::two_pow(-(wp as i64 + 5)))
}

/// Enclosure of ln 2, cached per working precision bucket.
pub fn ln2_interval(wp: u32) -> Interval {
    static CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    let bucket = wp.div_ceil(64) * 64;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&bucket) {
        return v.clone();
    }
    // ln 2 = 2 atanh(1/3).
    let third = Interval::from_int(1)
        .div(&Interval::from_int(3), bucket + 8)
        .expect("three is nonzero");
    let value = atanh_series(&third, bucket)
        .scale(&Dyadic::from_int(2))
        .outward_round(bucket);
    cache.lock().unwrap().insert(bucket, value.clone());
    value
}

fn ln_point(v: &Dyadic, wp: u32) -> Result<Interval, NumericError> {
    if !v.is_positive() {
        return Err(NumericError::Domain(format!(
            "logarithm of a non-positive value {v}"
        )));
    }
    let k = v.log2_floor();
    let m = v.shift(-k); // in [1, 2)
    let base = if m == Dyadic::one() {
        Interval::zero()
    } else {
        let num = Interval::point(m.sub(&Dyadic::one()));
        let den = Interval::point(m.add(&Dyadic::one()));
        let u = num.div(&den, wp + 8)?;
        atanh_series(&u, wp).scale(&Dyadic::from_int(2))
    };
    let ln2_part = ln2_interval(wp + 8).scale(&Dyadic::from_int(k));
    Ok(base.add(&ln2_part).outward_round(wp))
}

/// Enclosure of the natural logarithm; requires x.lo > 0.
pub fn ln_interval(x: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let wp = prec.working(GUARD);
    if !x.lo().is_positive() {
        return Err(NumericError::Domain(
            "ln requires a strictly positive interval".to_string(),
        ));
    }
    let lo = ln_point(x.lo(), wp)?;
    let hi = ln_point(x.hi(), wp)?;
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Enclosure of log2 x = ln x / ln 2.
pub fn log2_interval(x: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let wp = prec.working(GUARD);
    let ln_x = ln_interval(x, prec)?;
    ln_x.div(&ln2_interval(wp), wp)
}

fn exp_point(v: &Dyadic, wp: u32) -> Result<Interval, NumericError> {
    if v.is_zero() {
        return Ok(Interval::point(Dyadic::one()));
    }
    if v.log2_floor() > 32 {
        return Err(NumericError::Domain(format!(
            "exponent magnitude too large: {v}"
        )));
    }
    let halvings = (v.log2_floor() + 2).max(0) as u32;
    let inner_wp = wp + 2 * halvings + 8;
    let r = v.shift(-(halvings as i64)); // |r| <= 1/2, exact
    let stop = Dyadic::two_pow(-(inner_wp as i64 + 6));
    let r_iv = Interval::point(r);
    let mut acc = Interval::point(Dyadic::one());
    let mut term = Interval::point(Dyadic::one());
    for i in 1..10_000u32 {
        term = term
            .mul(&r_iv)
            .div(&Interval::from_int(i as i64), inner_wp + 8)?;
        acc = acc.add(&term);
        let mag = term.lo().abs().max(term.hi().abs());
        if mag <= stop {
            break;
        }
    }
    // |r| <= 1/2, so the remaining terms are geometrically dominated.
    let tail = Dyadic::two_pow(-(inner_wp as i64 + 5));
    acc = acc
        .add(&Interval::new(tail.neg(), tail).expect("tail ordered"))
        .outward_round(inner_wp);
    for _ in 0..halvings {
        acc = acc.mul(&acc).outward_round(inner_wp);
    }
    Ok(acc.outward_round(wp))
}

/// Enclosure of exp x.
pub fn exp_interval(x: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let wp = prec.working(GUARD);
    let lo = exp_point(x.lo(), wp)?;
    let hi = exp_point(x.hi(), wp)?;
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Exact integer power for a nonnegative interval base.
fn pow_nonneg_int(x: &Interval, n: u32) -> Interval {
    Interval::new(x.lo().pow_u32(n), x.hi().pow_u32(n)).expect("monotone power")
}

fn recip(x: &Interval, wp: u32) -> Result<Interval, NumericError> {
    Interval::point(Dyadic::one()).div(x, wp)
}

/// x^q for strictly positive x and a point dyadic exponent, via exact
/// integer powers and square-root refinement.
fn pow_dyadic_exp(x: &Interval, q: &Dyadic, wp: u32) -> Result<Interval, NumericError> {
    let frac_bits = (-q.exponent()).max(0) as u32;
    if frac_bits > 48 || q.mant_bits() > 40 {
        // Degenerate dyadic exponents go through the transcendental path.
        let ln_x = ln_interval(x, Precision::new(wp).unwrap_or_default())?;
        let e = ln_x.scale(q);
        return exp_point_pair(&e, wp);
    }
    // q = n / 2^frac_bits with n integer.
    let n = q.mantissa() << (q.exponent() + frac_bits as i64).max(0) as u64;
    let n_abs: u32 = n
        .magnitude()
        .try_into()
        .map_err(|_| NumericError::Domain(format!("integer exponent too large: {n}")))?;
    let mut y = pow_nonneg_int(x, n_abs);
    if n.is_negative() {
        y = recip(&y, wp + 2 * frac_bits + 8)?;
    }
    for _ in 0..frac_bits {
        y = sqrt_interval(&y, wp + 8)?;
    }
    Ok(y.outward_round(wp))
}

fn exp_point_pair(e: &Interval, wp: u32) -> Result<Interval, NumericError> {
    let lo = exp_point(e.lo(), wp)?;
    let hi = exp_point(e.hi(), wp)?;
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Enclosure of x^q.
///
/// Preconditions per the contract: x.lo >= 0, and if x reaches 0 then
/// q.lo > 0 (with 0^q = 0). Point dyadic exponents take the exact path.
pub fn pow_interval(x: &Interval, q: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let wp = prec.working(GUARD);
    if x.lo().is_negative() {
        return Err(NumericError::Domain(
            "power base must be nonnegative".to_string(),
        ));
    }
    if !x.lo().is_positive() {
        if !q.lo().is_positive() {
            return Err(NumericError::Domain(
                "0^q diverges for q <= 0".to_string(),
            ));
        }
        if !x.hi().is_positive() {
            return Ok(Interval::zero());
        }
        // x = [0, b]: 0^q = 0 and the supremum is at a corner of the box.
        let upper = Interval::point(x.hi().clone());
        let c1 = pow_interval(&upper, &Interval::point(q.lo().clone()), prec)?;
        let c2 = pow_interval(&upper, &Interval::point(q.hi().clone()), prec)?;
        let hi = c1.hi().clone().max(c2.hi().clone());
        return Interval::new(Dyadic::zero(), hi);
    }
    if q.is_point() {
        if q.lo().is_zero() {
            return Ok(Interval::point(Dyadic::one()));
        }
        if *q.lo() == Dyadic::one() {
            return Ok(x.clone());
        }
        let lo_pow = pow_dyadic_exp(&Interval::point(x.lo().clone()), q.lo(), wp)?;
        let hi_pow = pow_dyadic_exp(&Interval::point(x.hi().clone()), q.lo(), wp)?;
        // Monotone in x for fixed q: increasing if q > 0, decreasing if q < 0.
        let result = if q.lo().is_positive() {
            Interval::new(lo_pow.lo().clone(), hi_pow.hi().clone())
        } else {
            Interval::new(hi_pow.lo().clone(), lo_pow.hi().clone())
        }?;
        return Ok(result.outward_round(wp));
    }
    // General interval exponent: exp(q * ln x), inclusion-isotone throughout.
    let ln_x = ln_interval(x, Precision::new(wp).unwrap_or_default())?;
    let e = q.mul(&ln_x).outward_round(wp + 8);
    exp_point_pair(&e, wp).map(|r| r.outward_round(wp))
}

/// Enclosure of 2^e for an interval exponent.
pub fn pow2_interval(e: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let wp = prec.working(GUARD);
    if e.is_point() {
        let d = e.lo();
        let int_part = d.round_to(0, Round::Down);
        let frac = d.sub(&int_part); // in [0, 1)
        let shift: i64 = int_part
            .to_rational()
            .to_integer()
            .try_into()
            .map_err(|_| NumericError::Domain(format!("2^{d}: exponent too large")))?;
        if frac.is_zero() {
            return Ok(Interval::point(Dyadic::two_pow(shift)));
        }
        let frac_bits = (-frac.exponent()).max(0) as u32;
        if frac_bits <= 48 {
            // 2^{a/2^k} via integer power then k square roots.
            let a: u32 = (frac.mantissa() << (frac.exponent() + frac_bits as i64).max(0) as u64)
                .magnitude()
                .try_into()
                .map_err(|_| NumericError::Domain("fractional exponent too wide".to_string()))?;
            let mut y = Interval::point(Dyadic::two_pow(a as i64));
            for _ in 0..frac_bits {
                y = sqrt_interval(&y, wp + 8)?;
            }
            return Ok(y.scale(&Dyadic::two_pow(shift)).outward_round(wp));
        }
    }
    let e_ln2 = e.mul(&ln2_interval(wp + 8)).outward_round(wp + 8);
    exp_point_pair(&e_ln2, wp).map(|r| r.outward_round(wp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dyadic::{parse_dyadic, parse_rational};

    fn d(s: &str) -> Dyadic {
        parse_dyadic(s).unwrap()
    }

    fn prec(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    /// Frozen digits computed with an independent high-precision oracle
    /// before this module was written.
    fn assert_contains_decimal(iv: &Interval, decimal: &str) {
        let r = parse_rational(decimal).unwrap();
        assert!(
            iv.contains_rational(&r),
            "{iv} should contain {decimal}"
        );
    }

    #[test]
    fn sqrt_exact_and_enclosing() {
        let exact = sqrt_dyadic(&d("1/16"), 32).unwrap();
        assert!(exact.is_point());
        assert_eq!(exact.lo(), &d("1/4"));
        let two = sqrt_dyadic(&d("2"), 64).unwrap();
        assert_contains_decimal(&two, "1.4142135623730950488016887242096980786");
        assert!(two.width() <= Dyadic::two_pow(-60));
    }

    #[test]
    fn ln_examples() {
        let p = prec(64);
        let one = ln_interval(&Interval::point(d("1")), p).unwrap();
        assert!(one.contains(&Dyadic::zero()));
        assert!(one.width() <= Dyadic::two_pow(-60));

        let two = ln_interval(&Interval::point(d("2")), p).unwrap();
        assert_contains_decimal(&two, "0.69314718055994530941723212145817656808");
        assert!(two.width() <= Dyadic::two_pow(-60));

        // ln(1/4) = -2 ln 2, cross-checked against the previous value.
        let quarter = ln_interval(&Interval::point(d("1/4")), p).unwrap();
        let doubled = two.scale(&d("-2"));
        assert!(quarter.intersects(&doubled));
        assert_contains_decimal(&quarter, "-1.3862943611198906188344642429163531361");
    }

    #[test]
    fn ln_domain_error() {
        assert!(ln_interval(&Interval::point(Dyadic::zero()), prec(32)).is_err());
        assert!(ln_interval(&Interval::point(d("-1")), prec(32)).is_err());
    }

    #[test]
    fn pow_exact_dyadic_cases() {
        let p = prec(64);
        let sq = pow_interval(&Interval::point(d("1/2")), &Interval::point(d("2")), p).unwrap();
        assert!(sq.is_point());
        assert_eq!(sq.lo(), &d("1/4"));

        let root = pow_interval(&Interval::point(d("1/16")), &Interval::point(d("1/2")), p).unwrap();
        assert!(root.contains(&d("1/4")));
        assert!(root.width() <= Dyadic::two_pow(-60));

        let three_halves =
            pow_interval(&Interval::point(d("1/2")), &Interval::point(d("3/2")), p).unwrap();
        assert_contains_decimal(&three_halves, "0.35355339059327376220042218105242451964");
        assert!(three_halves.width() <= Dyadic::two_pow(-60));
    }

    #[test]
    fn pow_zero_base() {
        let p = prec(32);
        let z = pow_interval(&Interval::zero(), &Interval::point(d("2")), p).unwrap();
        assert!(z.is_point() && z.lo().is_zero());
        assert!(pow_interval(&Interval::zero(), &Interval::point(d("0")), p).is_err());
        assert!(pow_interval(&Interval::point(d("-1")), &Interval::point(d("2")), p).is_err());
    }

    #[test]
    fn pow_general_exponent() {
        let p = prec(64);
        // 3^{-1/2} through the dyadic-exponent path.
        let x = pow_interval(&Interval::point(d("3")), &Interval::point(d("-1/2")), p).unwrap();
        assert_contains_decimal(&x, "0.57735026918962576450914878050195745565");
        // Non-dyadic exponent via exp(q ln x): (1/2)^{1/3}... use q = 1/3 enclosure.
        let third = Interval::from_rational(&parse_rational("1/3").unwrap(), 80);
        let y = pow_interval(&Interval::point(d("1/2")), &third, p).unwrap();
        assert_contains_decimal(&y, "0.79370052598409973737585281963615413020");
        assert!(y.width() <= Dyadic::two_pow(-50));
    }

    #[test]
    fn pow2_paths() {
        let p = prec(64);
        let exact = pow2_interval(&Interval::point(d("-3")), p).unwrap();
        assert!(exact.is_point());
        assert_eq!(exact.lo(), &d("1/8"));
        let half = pow2_interval(&Interval::point(d("1/2")), p).unwrap();
        assert_contains_decimal(&half, "1.4142135623730950488016887242096980786");
        let neg = pow2_interval(&Interval::point(d("-5/4")), p).unwrap();
        assert_contains_decimal(&neg, "0.42044820762685727151556273811660744752");
    }

    #[test]
    fn refinement_never_widens() {
        for (x, q) in [
            ("3/4", "3/2"),
            ("5/8", "-2"),
            ("1/2", "5/4"),
            ("7/4", "1/8"),
        ] {
            let coarse = pow_interval(
                &Interval::point(d(x)),
                &Interval::point(d(q)),
                prec(32),
            )
            .unwrap();
            let fine = pow_interval(
                &Interval::point(d(x)),
                &Interval::point(d(q)),
                prec(64),
            )
            .unwrap();
            assert!(
                coarse.contains_interval(&fine),
                "refinement escaped for {x}^{q}: {coarse} vs {fine}"
            );
        }
    }

    #[test]
    fn enclosure_soundness_random() {
        // Pseudo-random dyadic inputs; the 128-bit evaluation must sit
        // inside the 24-bit one.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 40
        };
        for _ in 0..5_000 {
            let xm = (next() % 4000 + 1) as i64;
            let qm = (next() % 600) as i64 - 300;
            let x = Dyadic::new(BigInt::from(xm), -10); // (0, ~4]
            let q = Dyadic::new(BigInt::from(qm), -7); // [-2.35, 2.35]
            if x.is_zero() || q.is_zero() {
                continue;
            }
            let coarse =
                pow_interval(&Interval::point(x.clone()), &Interval::point(q.clone()), prec(24))
                    .unwrap();
            let fine =
                pow_interval(&Interval::point(x), &Interval::point(q), prec(128)).unwrap();
            assert!(coarse.contains_interval(&fine));
        }
        for _ in 0..5_000 {
            let xm = (next() % 8000 + 1) as i64;
            let x = Dyadic::new(BigInt::from(xm), -10);
            let coarse = ln_interval(&Interval::point(x.clone()), prec(24)).unwrap();
            let fine = ln_interval(&Interval::point(x), prec(128)).unwrap();
            assert!(coarse.contains_interval(&fine));
        }
    }
}
