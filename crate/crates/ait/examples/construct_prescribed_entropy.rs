//! Build a semi-measure whose Tsallis entropy is exactly the prescribed
//! y: solve F(x0) = y/2, scale, enclose Θ = S_q(r1), solve F(a) = y - Θ,
//! and splice a at λ with the shifted r1 behind it.
//!
//! Run with: cargo run --example construct_prescribed_entropy

use std::sync::Arc;

use ait::enumeration::EnumerationLog;
use ait::numerics::parse_dyadic;
use ait::semimeasure::{sqy_construct, LowerSemimeasure};
use ait::{BitString, Precision};

fn main() {
    let prec = Precision::default();
    let log = Arc::new(EnumerationLog::sdvm_exhaustive(18));
    let r = LowerSemimeasure::from_p_hat(log);
    let q = parse_dyadic("2").unwrap();
    let y = parse_dyadic("1/4").unwrap(); // the maximum allowed at q = 2
    let stream = vec![y.clone(); r.max_stage() as usize + 1];

    let (m, report, artifacts) = sqy_construct(&r, &q, &stream, &y, prec).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    let n = m.max_stage();
    let lambda = BitString::empty();
    println!("\nm(λ) at the final stage: {}", m.approx(n, &lambda).to_decimal_string());
    println!("stage mass Σ m: {} (< 1 strictly)", m.stage_mass(n).to_decimal_string());
    println!(
        "S_2(m) enclosure {} contains the prescribed y = 1/4: {}",
        artifacts.sq_m.to_report_string(12),
        artifacts.sq_m.contains(&y)
    );
    println!("shift: m(s) = r1(s - 1), e.g. m(\"0\") = r1(λ):");
    let zero: BitString = "0".parse().unwrap();
    let r1 = r.scale(&artifacts.c).unwrap();
    println!(
        "  m(0) = {} = c·p̂(λ) = {}",
        m.approx(n, &zero).to_decimal_string(),
        r1.approx(n, &lambda).to_decimal_string()
    );
}
