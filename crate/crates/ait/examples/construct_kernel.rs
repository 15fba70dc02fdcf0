//! The kernel transform r = F(m)/d on the increasing branch of F, with
//! the pointwise domination m/(q·d) <= r it guarantees.
//!
//! Run with: cargo run --example construct_kernel

use std::sync::Arc;

use ait::enumeration::EnumerationLog;
use ait::numerics::{parse_dyadic, Dyadic, Precision, Round};
use ait::semimeasure::LowerSemimeasure;
use ait::BitString;

fn main() {
    let prec = Precision::default();
    let log = Arc::new(EnumerationLog::sdvm_exhaustive(12));
    let m = LowerSemimeasure::from_p_hat(log);
    let q = parse_dyadic("2").unwrap();
    // S_2(m) <= Σ m(s)/(2-1) <= 1 certifies d = 1.
    let r = m.tewcr_transform(&q, 1, prec).unwrap();

    let n = r.max_stage();
    let lambda = BitString::empty();
    println!(
        "m(λ) = {} -> r(λ) = {} (tends to F(1/3) = 2/9 ≈ 0.2222)",
        m.approx(n, &lambda).to_decimal_string(),
        r.approx(n, &lambda).to_decimal_string()
    );

    let mut worst = Dyadic::zero();
    for s in m.support(n) {
        let lhs = m.approx(n, &s).div(&q, 80, Round::Up);
        let slack = lhs.sub(&r.approx(n, &s));
        if slack > worst {
            worst = slack;
        }
    }
    println!(
        "max over support of m(s)/(q·d) - r(s): {} (never above the kernel rounding slack)",
        worst.to_decimal_string()
    );
    println!("stage mass of r: {}", r.stage_mass(n).to_decimal_string());
}
