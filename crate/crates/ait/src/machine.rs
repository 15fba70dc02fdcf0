//! Self-delimiting computers and the concrete reference machine.
//!
//! A computer reads program bits on demand from a read-once tape and
//! never detects end-of-input: on any supplied string it either halts
//! having consumed the whole string, requests one more bit, or runs out
//! of budget. Its domain is therefore a prefix-free set by construction.
//!
//! The reference machine SDVM has four two-bit opcodes, read
//! most-significant-bit first:
//!
//! | bits | opcode | effect                                    |
//! |------|--------|-------------------------------------------|
//! | 00   | EMIT0  | append 0 to the output                    |
//! | 01   | EMIT1  | append 1 to the output                    |
//! | 10   | DUP    | append a copy of the entire current output|
//! | 11   | HALT   | stop, output is the result                |
//!
//! Cost model: one step per opcode plus one step per appended output
//! bit, so DUP's cost reflects the work it does. Every opcode consumes
//! exactly two program bits and halting happens only via HALT, hence
//! every domain element has even length and the domain is prefix-free.
//! SDVM is total on opcode streams: every string in ({00,01,10})*·11
//! halts. It is a computer C in the abstract sense, *not* an optimal
//! computer U; quantities derived from it are machine-relative.

use std::fmt;
use std::sync::Arc;

use num::rational::BigRational;
use num::{BigInt, One};
use thiserror::Error;

use crate::bitcore::BitString;

/// Result of running a computer on a supplied program string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Halted within budget having consumed exactly the whole string.
    Halted { output: BitString, steps: u64 },
    /// Requested the bit just past the end of the supplied string.
    NeedsMoreInput { consumed: u64 },
    /// Still running when the step budget ran out.
    OutOfBudget { consumed: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    /// The machine halted after consuming a proper prefix of the program:
    /// the caller passed a string extending a domain element.
    #[error("domain violation: machine halted after consuming {consumed} of {supplied} bits")]
    DomainViolation { consumed: u64, supplied: u64 },
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("unknown machine {0:?}")]
    UnknownMachine(String),
}

/// Incremental execution of one machine on one bit stream.
///
/// `advance` runs until the machine halts, requests another input bit,
/// or its total step count would exceed the given budget. Budgets are
/// absolute, so re-advancing the same execution with a larger budget
/// resumes where it stopped.
pub trait Execution: Send {
    fn advance(&mut self, budget: u64) -> Phase;
    fn feed(&mut self, bit: bool);
    fn steps(&self) -> u64;
    fn consumed(&self) -> u64;
    fn output(&self) -> &BitString;
    fn clone_box(&self) -> Box<dyn Execution>;
}

/// What an execution is waiting for after `advance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Halted,
    WantsBit,
    Exhausted,
}

/// A self-delimiting computer: deterministic, reading bits on demand,
/// never detecting end-of-input.
pub trait Computer: Send + Sync {
    fn name(&self) -> &'static str;

    /// Begin a fresh execution with an empty tape.
    fn boot(&self) -> Box<dyn Execution>;

    /// Exact total halting mass Σ 2^{-|p|} over the whole domain, when a
    /// totality argument certifies it (None for machines without one).
    fn exact_omega(&self) -> Option<BigRational> {
        None
    }
}

/// Run `machine` on `program` with the given step budget.
///
/// Returns `Halted` only when the machine consumed exactly the whole
/// program; halting on a proper prefix is a caller error (the supplied
/// string has a halting proper prefix and cannot be a domain element).
pub fn run(
    machine: &dyn Computer,
    program: &BitString,
    budget: u64,
) -> Result<Outcome, MachineError> {
    if budget == 0 {
        return Err(MachineError::ZeroBudget);
    }
    let mut exec = machine.boot();
    run_execution(exec.as_mut(), program, budget)
}

/// Drive an already-booted execution over `program`.
pub fn run_execution(
    exec: &mut dyn Execution,
    program: &BitString,
    budget: u64,
) -> Result<Outcome, MachineError> {
    loop {
        match exec.advance(budget) {
            Phase::Halted => {
                let consumed = exec.consumed();
                if consumed < program.len() as u64 {
                    return Err(MachineError::DomainViolation {
                        consumed,
                        supplied: program.len() as u64,
                    });
                }
                return Ok(Outcome::Halted {
                    output: exec.output().clone(),
                    steps: exec.steps(),
                });
            }
            Phase::WantsBit => {
                let consumed = exec.consumed();
                if consumed >= program.len() as u64 {
                    return Ok(Outcome::NeedsMoreInput { consumed });
                }
                exec.feed(program.bit(consumed as usize));
            }
            Phase::Exhausted => {
                return Ok(Outcome::OutOfBudget {
                    consumed: exec.consumed(),
                })
            }
        }
    }
}

/// SDVM opcodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Opcode {
    Emit0,
    Emit1,
    Dup,
    Halt,
}

impl Opcode {
    fn decode(b1: bool, b2: bool) -> Opcode {
        match (b1, b2) {
            (false, false) => Opcode::Emit0,
            (false, true) => Opcode::Emit1,
            (true, false) => Opcode::Dup,
            (true, true) => Opcode::Halt,
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Opcode::Emit0 => "EMIT0",
            Opcode::Emit1 => "EMIT1",
            Opcode::Dup => "DUP",
            Opcode::Halt => "HALT",
        })
    }
}

/// The reference machine. See the module docs for the opcode table.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sdvm;

impl Computer for Sdvm {
    fn name(&self) -> &'static str {
        "sdvm"
    }

    fn boot(&self) -> Box<dyn Execution> {
        Box::new(TableExec::new(Style::Sdvm))
    }

    fn exact_omega(&self) -> Option<BigRational> {
        // Total on opcode streams: Σ_k 3^k 4^{-(k+1)} = 1.
        Some(BigRational::from_integer(BigInt::one()))
    }
}

/// Decoded opcode trace of an SDVM program: the executed opcodes with the
/// output after each, up to halt or input exhaustion.
pub fn trace(program: &BitString) -> Vec<(Opcode, BitString)> {
    let mut out = BitString::empty();
    let mut entries = Vec::new();
    let mut i = 0;
    while i + 1 < program.len() {
        let op = Opcode::decode(program.bit(i), program.bit(i + 1));
        i += 2;
        match op {
            Opcode::Emit0 => out.push(false),
            Opcode::Emit1 => out.push(true),
            Opcode::Dup => out.double(),
            Opcode::Halt => {
                entries.push((op, out.clone()));
                return entries;
            }
        }
        entries.push((op, out.clone()));
    }
    entries
}

/// A synthetic diverging machine for exercising budget exhaustion: the
/// opcode 10 spins forever (one step per iteration, never another bit).
/// Otherwise identical to SDVM without DUP.
#[derive(Clone, Copy, Debug, Default)]
pub struct Spinner;

impl Computer for Spinner {
    fn name(&self) -> &'static str {
        "spinner"
    }

    fn boot(&self) -> Box<dyn Execution> {
        Box::new(TableExec::new(Style::Spinner))
    }

    fn exact_omega(&self) -> Option<BigRational> {
        // Domain is ({00,01})*·11: Σ_k 2^k 4^{-(k+1)} = 1/2.
        Some(BigRational::new(BigInt::one(), BigInt::from(2)))
    }
}

/// Select a machine by CLI name.
pub fn machine_by_name(name: &str) -> Result<Arc<dyn Computer>, MachineError> {
    match name {
        "sdvm" => Ok(Arc::new(Sdvm)),
        "spinner" => Ok(Arc::new(Spinner)),
        other => Err(MachineError::UnknownMachine(other.to_string())),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Sdvm,
    Spinner,
}

/// Shared bit-at-a-time executor for the two table machines.
#[derive(Clone)]
struct TableExec {
    style: Style,
    output: BitString,
    steps: u64,
    consumed: u64,
    first_bit: Option<bool>,
    queued: Option<Opcode>,
    spinning: bool,
    halted: bool,
}

impl TableExec {
    fn new(style: Style) -> Self {
        TableExec {
            style,
            output: BitString::empty(),
            steps: 0,
            consumed: 0,
            first_bit: None,
            queued: None,
            spinning: false,
            halted: false,
        }
    }

    fn op_cost(&self, op: Opcode) -> u64 {
        match op {
            Opcode::Emit0 | Opcode::Emit1 => 2,
            Opcode::Dup => 1 + self.output.len() as u64,
            Opcode::Halt => 1,
        }
    }
}

impl Execution for TableExec {
    fn advance(&mut self, budget: u64) -> Phase {
        loop {
            if self.halted {
                return Phase::Halted;
            }
            if self.spinning {
                // Burn the remaining budget one step at a time.
                if self.steps >= budget {
                    return Phase::Exhausted;
                }
                self.steps = budget;
                return Phase::Exhausted;
            }
            let Some(op) = self.queued else {
                return Phase::WantsBit;
            };
            if self.style == Style::Spinner && op == Opcode::Dup {
                self.queued = None;
                self.spinning = true;
                continue;
            }
            let cost = self.op_cost(op);
            if self.steps + cost > budget {
                return Phase::Exhausted;
            }
            self.steps += cost;
            self.queued = None;
            match op {
                Opcode::Emit0 => self.output.push(false),
                Opcode::Emit1 => self.output.push(true),
                Opcode::Dup => self.output.double(),
                Opcode::Halt => {
                    self.halted = true;
                    return Phase::Halted;
                }
            }
        }
    }

    fn feed(&mut self, bit: bool) {
        assert!(
            self.queued.is_none() && !self.halted && !self.spinning,
            "feed called while not waiting for input"
        );
        self.consumed += 1;
        match self.first_bit.take() {
            None => self.first_bit = Some(bit),
            Some(b1) => self.queued = Some(Opcode::decode(b1, bit)),
        }
    }

    fn steps(&self) -> u64 {
        self.steps
    }

    fn consumed(&self) -> u64 {
        self.consumed
    }

    fn output(&self) -> &BitString {
        &self.output
    }

    fn clone_box(&self) -> Box<dyn Execution> {
        Box::new(self.clone())
    }
}

/// Exact P(s) = Σ_{SDVM(p)=s} 2^{-|p|} for the reference machine.
///
/// Derivations of s are opcode strings over {EMIT0, EMIT1, DUP} whose
/// final output is s, each followed by HALT. Classifying by the last
/// opcode gives the recursion
///   P(λ) = 1/3 (DUP chains only),
///   P(s) = (P(s without its last bit) + [s = ww] P(w)) / 4  for s ≠ λ,
/// which is exact because every derivation ends in exactly one way.
pub mod sdvm_exact {
    use std::collections::HashMap;
    use std::sync::Mutex;

    use num::rational::BigRational;
    use num::BigInt;

    use crate::bitcore::BitString;

    fn quarter() -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(4))
    }

    /// Exact machine probability of the output `s`.
    pub fn probability(s: &BitString) -> BigRational {
        let cache = Mutex::new(HashMap::new());
        probability_cached(s, &cache)
    }

    /// As [`probability`] but reusing a caller-held memo table across calls.
    pub fn probability_cached(
        s: &BitString,
        cache: &Mutex<HashMap<BitString, BigRational>>,
    ) -> BigRational {
        if let Some(v) = cache.lock().unwrap().get(s) {
            return v.clone();
        }
        let value = if s.is_empty() {
            BigRational::new(BigInt::from(1), BigInt::from(3))
        } else {
            let mut acc = probability_cached(&s.parent().expect("nonempty"), cache);
            if let Some(w) = s.square_root() {
                acc += probability_cached(&w, cache);
            }
            acc * quarter()
        };
        cache.lock().unwrap().insert(s.clone(), value.clone());
        value
    }
}
