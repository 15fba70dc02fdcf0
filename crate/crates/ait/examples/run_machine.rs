//! Boot the reference machine on a few programs and inspect outcomes.
//!
//! Run with: cargo run --example run_machine

use ait::machine::{run, trace, Sdvm, Spinner};
use ait::BitString;

fn main() {
    let programs = ["11", "010011", "00", "00101011", "0", "1100"];
    println!("SDVM outcomes (budget 32):");
    for text in programs {
        let p: BitString = text.parse().unwrap();
        let label = if text.is_empty() { "λ" } else { text };
        match run(&Sdvm, &p, 32) {
            Ok(outcome) => println!("  {label:10} -> {outcome:?}"),
            Err(e) => println!("  {label:10} -> error: {e}"),
        }
    }

    println!("\nOpcode trace of 00101011 (EMIT0, DUP, DUP, HALT):");
    for (op, out) in trace(&"00101011".parse().unwrap()) {
        println!("  {op:6} output so far: {out:?}");
    }

    // The spinner diverges on opcode 10, exercising budget exhaustion.
    let spin: BitString = "10".parse().unwrap();
    println!("\nSpinner on \"10\" with budget 1000: {:?}", run(&Spinner, &spin, 1000).unwrap());
}
