//! S_q recovers the Shannon entropy as q -> 1: the semi-distribution
//! (1/4, 1/4) has H = ln 2, and S_q stays within 0.005 of it at q = 1±0.01.
//!
//! Run with: cargo run --example tsallis_vs_shannon

use ait::numerics::{
    ln2_interval, parse_dyadic, parse_rational, pow_interval, Interval, Precision,
};

fn main() {
    let prec = Precision::default();
    let v = Interval::point(parse_dyadic("1/4").unwrap());
    let ln2 = ln2_interval(96);
    println!("H(1/4, 1/4) = ln 2 = {}", ln2.to_report_string(16));

    for q_text in ["9/10", "99/100", "101/100", "11/10"] {
        let q = Interval::from_rational(&parse_rational(q_text).unwrap(), 96);
        let vq = pow_interval(&v, &q, prec).unwrap();
        let q_minus_1 = q.sub(&Interval::from_int(1));
        // S_q = 2·(v - v^q)/(q - 1) for the two equal entries.
        let sq = v
            .sub(&vq)
            .scale(&parse_dyadic("2").unwrap())
            .div(&q_minus_1, 96)
            .unwrap();
        let drift = sq.sub(&ln2);
        println!(
            "S_q at q = {q_text:>7}: {}   (S_q - ln 2 in {})",
            sq.to_report_string(12),
            drift.to_report_string(8),
        );
    }
}
