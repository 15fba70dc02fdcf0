//! Bracketing bisection on interval evaluations: both branches of the
//! kernel F, and a target interval propagating into the root enclosure.
//!
//! Run with: cargo run --example root_finding

use ait::numerics::{
    bisect_monotone, parse_dyadic, tsallis_kernel_f, Direction, Interval, Precision,
};

fn main() {
    let prec = Precision::new(48).unwrap();
    let q = Interval::point(parse_dyadic("2").unwrap());
    let f = |x: &Interval| tsallis_kernel_f(x, &q, Precision::new(80).unwrap());
    let target = Interval::point(parse_dyadic("1/8").unwrap());

    let upper = bisect_monotone(
        f,
        &target,
        &Interval::new(parse_dyadic("1/2").unwrap(), parse_dyadic("1").unwrap()).unwrap(),
        Direction::Decreasing,
        prec,
    )
    .unwrap();
    println!("x - x^2 = 1/8 on [1/2, 1]:   x = {}", upper.to_report_string(16));
    println!("                              ((2+sqrt 2)/4 = 0.8535533905932738…)");

    let lower = bisect_monotone(
        f,
        &target,
        &Interval::new(parse_dyadic("1/1024").unwrap(), parse_dyadic("1/2").unwrap()).unwrap(),
        Direction::Increasing,
        prec,
    )
    .unwrap();
    println!("same target on (0, 1/2]:     x = {}", lower.to_report_string(16));

    // A fat target produces a correspondingly fat certified enclosure.
    let band = Interval::new(parse_dyadic("1/8").unwrap(), parse_dyadic("9/64").unwrap()).unwrap();
    let fat = bisect_monotone(
        f,
        &band,
        &Interval::new(parse_dyadic("1/2").unwrap(), parse_dyadic("1").unwrap()).unwrap(),
        Direction::Decreasing,
        prec,
    )
    .unwrap();
    println!("target [1/8, 9/64]:          x = {}", fat.to_report_string(16));
}
