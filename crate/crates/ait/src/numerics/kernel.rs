//! The kernel F(x) = (x - x^q)/(q - 1) for q > 1.
//!
//! F is increasing on (0, q^{1/(1-q)}], decreasing on [q^{1/(1-q)}, 1],
//! and attains its maximum q^{q/(1-q)} at x = q^{1/(1-q)}. The transforms
//! on semi-measures lean on the increasing branch; the root-finding
//! construction works on the decreasing one.

use super::dyadic::Dyadic;
use super::functions::pow_interval;
use super::interval::{Interval, NumericError, Precision};

/// Enclosure of F(x) = (x - x^q)/(q - 1).
///
/// Requires 0 < x <= 1 interval-wise and q.lo > 1.
pub fn tsallis_kernel_f(
    x: &Interval,
    q: &Interval,
    prec: Precision,
) -> Result<Interval, NumericError> {
    if !x.lo().is_positive() {
        return Err(NumericError::Domain(
            "kernel F requires x > 0 interval-wise".to_string(),
        ));
    }
    if x.hi() > &Dyadic::one() {
        return Err(NumericError::Domain(
            "kernel F requires x <= 1 interval-wise".to_string(),
        ));
    }
    let q_minus_1 = q.sub(&Interval::point(Dyadic::one()));
    if !q_minus_1.lo().is_positive() {
        return Err(NumericError::Domain(
            "kernel F requires q > 1 (q - 1 must not enclose 0)".to_string(),
        ));
    }
    let xq = pow_interval(x, q, prec)?;
    let num = x.sub(&xq);
    divide_by(&num, &q_minus_1, prec)
}

/// Division that stays exact when the divisor is a point power of two.
fn divide_by(num: &Interval, den: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    if den.is_point() && den.lo().mantissa().magnitude().count_ones() == 1 {
        let shift = -den.lo().exponent();
        let scaled = num.scale(&Dyadic::two_pow(shift));
        return if den.lo().is_negative() {
            Ok(scaled.neg())
        } else {
            Ok(scaled)
        };
    }
    num.div(den, prec.working(16))
}

/// Enclosure of the maximum point x* = q^{1/(1-q)} of F.
pub fn kernel_max_point(q: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let exponent = reciprocal_of_one_minus(q, prec)?;
    pow_interval(q, &exponent, prec)
}

/// Enclosure of the maximum value F(x*) = q^{q/(1-q)}.
pub fn kernel_max_value(q: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let exponent = reciprocal_of_one_minus(q, prec)?.mul(q);
    pow_interval(q, &exponent.outward_round(prec.working(16)), prec)
}

fn reciprocal_of_one_minus(q: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    let one_minus_q = Interval::point(Dyadic::one()).sub(q);
    if one_minus_q.contains(&Dyadic::zero()) {
        return Err(NumericError::Domain(
            "q must exclude 1".to_string(),
        ));
    }
    Interval::point(Dyadic::one()).div(&one_minus_q, prec.working(16))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dyadic::{parse_dyadic, parse_rational};

    fn d(s: &str) -> Dyadic {
        parse_dyadic(s).unwrap()
    }

    fn pt(s: &str) -> Interval {
        Interval::point(d(s))
    }

    fn prec(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    #[test]
    fn kernel_point_values() {
        let p = prec(64);
        // F(1/2) at q=2 is exactly 1/4 (dyadic arithmetic end to end).
        let half = tsallis_kernel_f(&pt("1/2"), &pt("2"), p).unwrap();
        assert!(half.is_point());
        assert_eq!(half.lo(), &d("1/4"));
        // F(1) = 0.
        let one = tsallis_kernel_f(&pt("1"), &pt("2"), p).unwrap();
        assert!(one.is_point() && one.lo().is_zero());
    }

    #[test]
    fn kernel_at_inverse_sqrt3() {
        // F(3^{-1/2}) at q=3 equals 3^{-3/2}.
        let p = prec(64);
        let x = pow_interval(&pt("3"), &pt("-1/2"), p).unwrap();
        let f = tsallis_kernel_f(&x, &pt("3"), p).unwrap();
        let expected = parse_rational("0.19245008972987525483638292683398581855").unwrap();
        assert!(f.contains_rational(&expected));
        assert!(f.width() <= Dyadic::two_pow(-50));
    }

    #[test]
    fn kernel_domain_checks() {
        let p = prec(32);
        assert!(tsallis_kernel_f(&pt("0"), &pt("2"), p).is_err());
        assert!(tsallis_kernel_f(&pt("2"), &pt("2"), p).is_err());
        assert!(tsallis_kernel_f(&pt("1/2"), &pt("1"), p).is_err());
        let q_through_one = Interval::new(d("1/2"), d("3/2")).unwrap();
        assert!(tsallis_kernel_f(&pt("1/2"), &q_through_one, p).is_err());
    }

    #[test]
    fn max_point_and_value() {
        let p = prec(64);
        // q = 2: x* = 1/2, F(x*) = 1/4.
        let x_star = kernel_max_point(&pt("2"), p).unwrap();
        assert!(x_star.contains(&d("1/2")));
        assert!(x_star.width() <= Dyadic::two_pow(-60));
        let f_max = kernel_max_value(&pt("2"), p).unwrap();
        assert!(f_max.contains(&d("1/4")));
        // q = 3/2: x* = 4/9, F(x*) = 8/27.
        let x32 = kernel_max_point(&pt("3/2"), p).unwrap();
        assert!(x32.contains_rational(&parse_rational("4/9").unwrap()));
        let v32 = kernel_max_value(&pt("3/2"), p).unwrap();
        assert!(v32.contains_rational(&parse_rational("8/27").unwrap()));
    }
}
