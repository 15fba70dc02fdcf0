//! Exact dyadics, outward-rounded enclosures, and the kernel identities
//! F(1) = 0, F(q^{1/(1-q)}) = q^{q/(1-q)}, x/q <= F(x).
//!
//! Run with: cargo run --example certified_intervals

use ait::numerics::{
    kernel_max_point, kernel_max_value, ln_interval, parse_dyadic, pow_interval,
    tsallis_kernel_f, Interval, Precision,
};

fn main() {
    let prec = Precision::default();
    let half = Interval::point(parse_dyadic("1/2").unwrap());

    let sq = pow_interval(&half, &Interval::point(parse_dyadic("2").unwrap()), prec).unwrap();
    println!("(1/2)^2        = {sq} (exact, width 0)");
    let rt = pow_interval(&half, &Interval::point(parse_dyadic("3/2").unwrap()), prec).unwrap();
    println!("(1/2)^(3/2)    = {}", rt.to_report_string(20));
    let ln2 = ln_interval(&Interval::point(parse_dyadic("2").unwrap()), prec).unwrap();
    println!("ln 2           = {}", ln2.to_report_string(20));

    for q_text in ["3/2", "2", "3"] {
        let q = Interval::point(parse_dyadic(q_text).unwrap());
        let x_star = kernel_max_point(&q, prec).unwrap();
        let f_max = kernel_max_value(&q, prec).unwrap();
        let f_at_star = tsallis_kernel_f(&x_star, &q, prec).unwrap();
        println!(
            "q = {q_text:>3}: x* = {}  F(x*) = {}  (must enclose q^(q/(1-q)) = {})",
            x_star.to_report_string(12),
            f_at_star.to_report_string(12),
            f_max.to_report_string(12),
        );
        assert!(f_at_star.intersects(&f_max));
    }

    let one = Interval::point(parse_dyadic("1").unwrap());
    let f_one = tsallis_kernel_f(&one, &Interval::point(parse_dyadic("2").unwrap()), prec).unwrap();
    println!("F(1) at q = 2  = {f_one} (exactly zero)");
}
