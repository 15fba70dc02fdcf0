//! Dovetailed enumeration of a computer's halting programs.
//!
//! Stage t explores every program prefix of length <= t under step
//! budget t, so the records at stage t are exactly the domain elements
//! p with |p| <= t that halt within t steps. The frontier is a tree of
//! bit requests: a prefix is extended only when the machine actually
//! asks for another bit, so subtrees past a halting point are never
//! visited. Results are independent of exploration order and worker
//! count (records are merged in sorted order).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num::rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::bitcore::BitString;
use crate::machine::{run, Computer, Execution, MachineError, Outcome, Phase, Sdvm};
use crate::numerics::{rational_to_dyadic, Dyadic, Round};

/// A discovered (program, output, step-count) triple:
/// `run(machine, program, steps)` halts with exactly this output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaltRecord {
    pub program: BitString,
    pub output: BitString,
    pub steps: u64,
}

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cache machine mismatch: cache holds {found:?}, requested {expected:?}")]
    MachineMismatch { expected: String, found: String },
    #[error("budget {budget} insufficient to certify the domain up to length {max_len}: prefix {prefix:?} still running")]
    BudgetInsufficient {
        prefix: BitString,
        max_len: usize,
        budget: u64,
    },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum PendingKind {
    /// The machine requested the bit just past this prefix.
    AwaitingBit,
    /// The machine was still running on this prefix when the stage
    /// budget ran out.
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Pending {
    prefix: BitString,
    consumed: u64,
    kind: PendingKind,
}

/// Snapshot of a dovetailed enumeration.
///
/// Equality and persistence cover (machine, stage, records); the
/// frontier is a derived cache rebuilt on demand after a load.
#[derive(Clone)]
pub struct EnumerationState {
    machine: Arc<dyn Computer>,
    stage: u32,
    records: Vec<HaltRecord>,
    frontier: Option<Vec<Pending>>,
}

impl PartialEq for EnumerationState {
    fn eq(&self, other: &Self) -> bool {
        self.machine.name() == other.machine.name()
            && self.stage == other.stage
            && self.records == other.records
    }
}

impl fmt::Debug for EnumerationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnumerationState")
            .field("machine", &self.machine.name())
            .field("stage", &self.stage)
            .field("records", &self.records.len())
            .finish()
    }
}

/// Outcome of exploring one prefix subtree: new records plus frontier nodes.
#[derive(Default)]
struct Exploration {
    records: Vec<HaltRecord>,
    pending: Vec<Pending>,
}

impl EnumerationState {
    pub fn new(machine: Arc<dyn Computer>) -> Self {
        EnumerationState {
            machine,
            stage: 0,
            records: Vec::new(),
            frontier: Some(vec![Pending {
                prefix: BitString::empty(),
                consumed: 0,
                kind: PendingKind::AwaitingBit,
            }]),
        }
    }

    pub fn machine(&self) -> &Arc<dyn Computer> {
        &self.machine
    }

    pub fn machine_name(&self) -> &str {
        self.machine.name()
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn records(&self) -> &[HaltRecord] {
        &self.records
    }

    /// Advance the dovetailing schedule by one stage.
    pub fn advance_stage(&self) -> EnumerationState {
        let target = self.stage + 1;
        let frontier = match &self.frontier {
            Some(f) => f.clone(),
            None => rebuild_frontier(self.machine.as_ref(), self.stage),
        };
        let explored: Vec<Exploration> = frontier
            .par_iter()
            .map(|pending| {
                let mut out = Exploration::default();
                process_pending(self.machine.as_ref(), pending, target, &mut out);
                out
            })
            .collect();
        let mut records = self.records.clone();
        let mut new_frontier = Vec::new();
        for e in explored {
            records.extend(e.records);
            new_frontier.extend(e.pending);
        }
        records.sort_by(|a, b| a.program.cmp(&b.program));
        records.dedup_by(|a, b| a.program == b.program);
        EnumerationState {
            machine: Arc::clone(&self.machine),
            stage: target,
            records,
            frontier: Some(new_frontier),
        }
    }

    /// Advance to the given stage.
    pub fn advance_to(&self, stage: u32) -> EnumerationState {
        let mut st = self.clone();
        while st.stage < stage {
            st = st.advance_stage();
        }
        st
    }

    #[cfg(test)]
    fn frontier_snapshot(&self) -> Option<Vec<Pending>> {
        self.frontier.as_ref().map(|f| {
            let mut sorted = f.clone();
            sorted.sort_by(|a, b| a.prefix.cmp(&b.prefix));
            sorted
        })
    }

    /// Write machine name, stage, and sorted records as CSV.
    pub fn persist_records(&self, path: &Path) -> Result<(), EnumerationError> {
        let mut out = String::new();
        out.push_str(&format!("{},{}\n", self.machine.name(), self.stage));
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.program, r.output, r.steps));
        }
        let mut file = fs::File::create(path)?;
        file.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Load a cached state, validating every row against the machine.
    pub fn load_records(
        path: &Path,
        machine: Arc<dyn Computer>,
    ) -> Result<EnumerationState, EnumerationError> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(EnumerationError::Format {
            line: 1,
            message: "empty cache file".to_string(),
        })?;
        let (name, stage_text) = header.split_once(',').ok_or(EnumerationError::Format {
            line: 1,
            message: "header must be machine,stage".to_string(),
        })?;
        if name != machine.name() {
            return Err(EnumerationError::MachineMismatch {
                expected: machine.name().to_string(),
                found: name.to_string(),
            });
        }
        let stage: u32 = stage_text.trim().parse().map_err(|_| EnumerationError::Format {
            line: 1,
            message: format!("invalid stage {stage_text:?}"),
        })?;
        let mut records = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (program, output, steps) = match (fields.next(), fields.next(), fields.next()) {
                (Some(p), Some(o), Some(s)) if fields.next().is_none() => (p, o, s),
                _ => {
                    return Err(EnumerationError::Format {
                        line: line_no,
                        message: "expected program,output,steps".to_string(),
                    })
                }
            };
            let program: BitString = program.parse().map_err(|e| EnumerationError::Format {
                line: line_no,
                message: format!("bad program field: {e}"),
            })?;
            let output: BitString = output.parse().map_err(|e| EnumerationError::Format {
                line: line_no,
                message: format!("bad output field: {e}"),
            })?;
            let steps: u64 = steps.trim().parse().map_err(|_| EnumerationError::Format {
                line: line_no,
                message: "bad steps field".to_string(),
            })?;
            // Replay the record: it must halt at exactly this step count
            // with exactly this output and consume the whole program.
            match run(machine.as_ref(), &program, steps) {
                Ok(Outcome::Halted {
                    output: real_out,
                    steps: real_steps,
                }) if real_out == output && real_steps == steps => {}
                other => {
                    return Err(EnumerationError::Format {
                        line: line_no,
                        message: format!(
                            "record {program:?} does not replay: expected Halted with output \
                             {output:?} in {steps} steps, machine said {other:?}"
                        ),
                    })
                }
            }
            if program.len() as u64 > stage as u64 || steps > stage as u64 {
                return Err(EnumerationError::Format {
                    line: line_no,
                    message: format!(
                        "record {program:?} (len {}, steps {steps}) exceeds stage {stage}",
                        program.len()
                    ),
                });
            }
            records.push(HaltRecord {
                program,
                output,
                steps,
            });
        }
        records.sort_by(|a, b| a.program.cmp(&b.program));
        records.dedup_by(|a, b| a.program == b.program);
        Ok(EnumerationState {
            machine,
            stage,
            records,
            frontier: None,
        })
    }
}

/// Exact dyadic mass Σ 2^{-|p|} of a record set.
pub fn mass_of(records: &[HaltRecord]) -> Dyadic {
    let mut total = Dyadic::zero();
    for r in records {
        total = total.add(&Dyadic::two_pow(-(r.program.len() as i64)));
    }
    total
}

/// Queryable view of a set of halting records: the approximations k̂,
/// p̂ and ω̂ are functions of the discovered records only, so they are
/// shared between dovetail stages and exhaustive snapshots.
pub trait HaltView {
    fn view_records(&self) -> &[HaltRecord];

    /// Upper bound on K for `s`: min |p| over records outputting `s`.
    fn k_hat(&self, s: &BitString) -> Option<u64> {
        self.view_records()
            .iter()
            .filter(|r| &r.output == s)
            .map(|r| r.program.len() as u64)
            .min()
    }

    /// Lower bound on P(s): Σ 2^{-|p|} over records outputting `s`, exactly.
    fn p_hat(&self, s: &BitString) -> Dyadic {
        let mut total = Dyadic::zero();
        for r in self.view_records().iter().filter(|r| &r.output == s) {
            total = total.add(&Dyadic::two_pow(-(r.program.len() as i64)));
        }
        total
    }

    /// Lower bound on the halting probability: Σ 2^{-|p|} over all records.
    fn omega_hat(&self) -> Dyadic {
        mass_of(self.view_records())
    }

    /// Distinct outputs discovered so far, sorted.
    fn support(&self) -> Vec<BitString> {
        let mut outputs: Vec<BitString> = self
            .view_records()
            .iter()
            .map(|r| r.output.clone())
            .collect();
        outputs.sort();
        outputs.dedup();
        outputs
    }
}

impl HaltView for EnumerationState {
    fn view_records(&self) -> &[HaltRecord] {
        &self.records
    }
}

/// A labeled record snapshot (e.g. an exhaustive domain listing), the
/// second kind of input the report operations accept.
#[derive(Clone, Debug)]
pub struct DomainSnapshot {
    pub machine_name: String,
    pub description: String,
    records: Vec<HaltRecord>,
}

impl DomainSnapshot {
    pub fn new(machine_name: String, description: String, records: Vec<HaltRecord>) -> Self {
        DomainSnapshot {
            machine_name,
            description,
            records,
        }
    }

    /// Exhaustive snapshot of the domain up to `max_len`.
    pub fn exhaustive(
        machine: &dyn Computer,
        max_len: usize,
        budget: u64,
    ) -> Result<Self, EnumerationError> {
        let records = exact_domain_upto(machine, max_len, budget)?;
        Ok(DomainSnapshot {
            machine_name: machine.name().to_string(),
            description: format!("exhaustive domain, length <= {max_len}"),
            records,
        })
    }
}

impl HaltView for DomainSnapshot {
    fn view_records(&self) -> &[HaltRecord] {
        &self.records
    }
}

fn process_pending(machine: &dyn Computer, pending: &Pending, stage: u32, out: &mut Exploration) {
    match pending.kind {
        PendingKind::AwaitingBit => {
            if (pending.prefix.len() as u64) < stage as u64 {
                explore(machine, pending.prefix.child(false), stage, out);
                explore(machine, pending.prefix.child(true), stage, out);
            } else {
                out.pending.push(pending.clone());
            }
        }
        PendingKind::Stalled => {
            explore(machine, pending.prefix.clone(), stage, out);
        }
    }
}

/// Run one prefix under the stage budget and recurse while the machine
/// keeps asking for bits within the stage's length bound.
fn explore(machine: &dyn Computer, prefix: BitString, stage: u32, out: &mut Exploration) {
    let outcome = run(machine, &prefix, stage as u64)
        .expect("prefixes reached through bit requests cannot violate the domain");
    match outcome {
        Outcome::Halted { output, steps } => out.records.push(HaltRecord {
            program: prefix,
            output,
            steps,
        }),
        Outcome::NeedsMoreInput { consumed } => {
            if (prefix.len() as u64) < stage as u64 {
                explore(machine, prefix.child(false), stage, out);
                explore(machine, prefix.child(true), stage, out);
            } else {
                out.pending.push(Pending {
                    prefix,
                    consumed,
                    kind: PendingKind::AwaitingBit,
                });
            }
        }
        Outcome::OutOfBudget { consumed } => out.pending.push(Pending {
            prefix,
            consumed,
            kind: PendingKind::Stalled,
        }),
    }
}

/// Recompute the frontier of a state (used after loading a cache, where
/// only records persist).
fn rebuild_frontier(machine: &dyn Computer, stage: u32) -> Vec<Pending> {
    let mut out = Exploration::default();
    if stage == 0 {
        return vec![Pending {
            prefix: BitString::empty(),
            consumed: 0,
            kind: PendingKind::AwaitingBit,
        }];
    }
    explore(machine, BitString::empty(), stage, &mut out);
    out.pending
}

/// Exhaustively enumerate the domain elements of length <= `max_len`.
///
/// Fails with `BudgetInsufficient` if any explored prefix is still
/// running at the budget, since exactness can then not be certified.
pub fn exact_domain_upto(
    machine: &dyn Computer,
    max_len: usize,
    budget: u64,
) -> Result<Vec<HaltRecord>, EnumerationError> {
    if budget == 0 {
        return Err(MachineError::ZeroBudget.into());
    }
    let mut exec = machine.boot();
    let mut records = Vec::new();
    let mut prefix = BitString::empty();
    match exec.advance(budget) {
        Phase::Halted => {
            records.push(HaltRecord {
                program: BitString::empty(),
                output: exec.output().clone(),
                steps: exec.steps(),
            });
        }
        Phase::WantsBit => {
            dfs_domain(exec.as_ref(), &mut prefix, max_len, budget, &mut records)?
        }
        Phase::Exhausted => {
            return Err(EnumerationError::BudgetInsufficient {
                prefix,
                max_len,
                budget,
            })
        }
    }
    records.sort_by(|a, b| a.program.cmp(&b.program));
    Ok(records)
}

fn dfs_domain(
    exec: &dyn Execution,
    prefix: &mut BitString,
    max_len: usize,
    budget: u64,
    records: &mut Vec<HaltRecord>,
) -> Result<(), EnumerationError> {
    for bit in [false, true] {
        let mut child = exec.clone_box();
        child.feed(bit);
        prefix.push(bit);
        match child.advance(budget) {
            Phase::Halted => records.push(HaltRecord {
                program: prefix.clone(),
                output: child.output().clone(),
                steps: child.steps(),
            }),
            Phase::WantsBit => {
                if prefix.len() < max_len {
                    dfs_domain(child.as_ref(), prefix, max_len, budget, records)?;
                }
            }
            Phase::Exhausted => {
                return Err(EnumerationError::BudgetInsufficient {
                    prefix: prefix.clone(),
                    max_len,
                    budget,
                });
            }
        }
        prefix.pop();
    }
    Ok(())
}

/// A step budget sufficient to resolve every SDVM prefix of length
/// <= `max_len` (halt or request another bit). Executing j opcodes
/// appends at most max_e e·2^{j-e} = 2^{j-1} output bits, so the worst
/// prefix of length 2j costs j + 2^{j-1} steps.
pub fn sdvm_sufficient_budget(max_len: usize) -> u64 {
    let h = (max_len / 2) as u64;
    if h == 0 {
        return 1;
    }
    let appended = if h >= 1 { 1u64 << (h - 1).min(56) } else { 0 };
    h + appended + 2
}

/// How the stages of an [`EnumerationLog`] are indexed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Stage n = dovetailing stage n (length <= n, budget n).
    Dovetail,
    /// Stage n = all domain elements of length <= n (total machines only).
    Exhaustive { max_len: usize },
}

/// An enumeration with birth stages: everything the monotone
/// approximations k̂ and P̂ need, for every stage up to `max_stage`.
pub struct EnumerationLog {
    machine_name: String,
    max_stage: u32,
    schedule: Schedule,
    entries: Vec<(HaltRecord, u32)>,
    by_output: BTreeMap<BitString, Vec<(u32, u64)>>,
    omega_by_stage: Vec<Dyadic>,
    exact_omega: Option<BigRational>,
}

impl EnumerationLog {
    /// Build a log by running the dovetailing schedule for `stages` stages.
    pub fn dovetail(machine: Arc<dyn Computer>, stages: u32) -> Self {
        let mut st = EnumerationState::new(Arc::clone(&machine));
        let mut entries: Vec<(HaltRecord, u32)> = Vec::new();
        let mut seen = 0usize;
        for stage in 1..=stages {
            st = st.advance_stage();
            let mut fresh: Vec<HaltRecord> = Vec::new();
            // Records are sorted; previously seen ones stay a subset.
            let prior: std::collections::BTreeSet<&BitString> = entries
                .iter()
                .map(|(r, _)| &r.program)
                .collect();
            for r in st.records() {
                if !prior.contains(&r.program) {
                    fresh.push(r.clone());
                }
            }
            seen += fresh.len();
            for r in fresh {
                entries.push((r, stage));
            }
        }
        debug_assert_eq!(seen, st.records().len());
        entries.sort_by(|a, b| a.0.program.cmp(&b.0.program));
        Self::from_entries(
            machine.name().to_string(),
            stages,
            Schedule::Dovetail,
            entries,
            machine.exact_omega(),
        )
    }

    /// Build a log of the full domain up to `max_len`, with the record
    /// birth stage equal to its program length. The budget must certify
    /// exactness (see [`exact_domain_upto`]).
    pub fn exhaustive(
        machine: Arc<dyn Computer>,
        max_len: usize,
        budget: u64,
    ) -> Result<Self, EnumerationError> {
        let records = exact_domain_upto(machine.as_ref(), max_len, budget)?;
        let entries: Vec<(HaltRecord, u32)> = records
            .into_iter()
            .map(|r| {
                let birth = r.program.len() as u32;
                (r, birth)
            })
            .collect();
        Ok(Self::from_entries(
            machine.name().to_string(),
            max_len as u32,
            Schedule::Exhaustive { max_len },
            entries,
            machine.exact_omega(),
        ))
    }

    /// Exhaustive SDVM log with an automatically certified budget.
    pub fn sdvm_exhaustive(max_len: usize) -> Self {
        Self::exhaustive(
            Arc::new(Sdvm),
            max_len,
            sdvm_sufficient_budget(max_len),
        )
        .expect("SDVM is total with the certified budget")
    }

    fn from_entries(
        machine_name: String,
        max_stage: u32,
        schedule: Schedule,
        entries: Vec<(HaltRecord, u32)>,
        exact_omega: Option<BigRational>,
    ) -> Self {
        let mut by_output: BTreeMap<BitString, Vec<(u32, u64)>> = BTreeMap::new();
        for (r, birth) in &entries {
            by_output
                .entry(r.output.clone())
                .or_default()
                .push((*birth, r.program.len() as u64));
        }
        for arrivals in by_output.values_mut() {
            arrivals.sort();
        }
        let mut omega_by_stage = vec![Dyadic::zero(); max_stage as usize + 1];
        let mut by_birth: Vec<(u32, i64)> = entries
            .iter()
            .map(|(r, b)| (*b, r.program.len() as i64))
            .collect();
        by_birth.sort();
        let mut acc = Dyadic::zero();
        let mut idx = 0;
        for (stage, slot) in omega_by_stage.iter_mut().enumerate() {
            while idx < by_birth.len() && by_birth[idx].0 as usize <= stage {
                acc = acc.add(&Dyadic::two_pow(-by_birth[idx].1));
                idx += 1;
            }
            *slot = acc.clone();
        }
        EnumerationLog {
            machine_name,
            max_stage,
            schedule,
            entries,
            by_output,
            omega_by_stage,
            exact_omega,
        }
    }

    pub fn machine_name(&self) -> &str {
        &self.machine_name
    }

    pub fn max_stage(&self) -> u32 {
        self.max_stage
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn entries(&self) -> impl Iterator<Item = (&HaltRecord, u32)> {
        self.entries.iter().map(|(r, b)| (r, *b))
    }

    pub fn k_hat(&self, stage: u32, s: &BitString) -> Option<u64> {
        self.by_output
            .get(s)?
            .iter()
            .take_while(|(b, _)| *b <= stage)
            .map(|(_, len)| *len)
            .min()
    }

    pub fn p_hat(&self, stage: u32, s: &BitString) -> Dyadic {
        let mut total = Dyadic::zero();
        if let Some(arrivals) = self.by_output.get(s) {
            for (birth, len) in arrivals {
                if *birth > stage {
                    break;
                }
                total = total.add(&Dyadic::two_pow(-(*len as i64)));
            }
        }
        total
    }

    pub fn omega(&self, stage: u32) -> Dyadic {
        let i = (stage.min(self.max_stage)) as usize;
        self.omega_by_stage[i].clone()
    }

    /// Σ_s 2^{-k̂(stage, s)} over discovered strings.
    pub fn theta(&self, stage: u32) -> Dyadic {
        let mut total = Dyadic::zero();
        for s in self.by_output.keys() {
            if let Some(k) = self.k_hat(stage, s) {
                total = total.add(&Dyadic::two_pow(-(k as i64)));
            }
        }
        total
    }

    /// Outputs discovered by `stage`, sorted in enumeration order.
    pub fn support(&self, stage: u32) -> Vec<BitString> {
        self.by_output
            .iter()
            .filter(|(_, arrivals)| arrivals.first().map(|(b, _)| *b <= stage).unwrap_or(false))
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Certified upper bound on the undiscovered halting mass at `stage`
    /// (requires the machine's exact total mass).
    pub fn tail_mass_upper(&self, stage: u32) -> Option<Dyadic> {
        let total = self.exact_omega.as_ref()?;
        let covered = self.omega(stage).to_rational();
        let tail = total - covered;
        Some(match rational_to_dyadic(&tail) {
            Some(d) => d,
            None => Dyadic::from_rational(&tail, 128, Round::Up),
        })
    }

    /// For an exhaustive SDVM log: an upper bound on P(s) for every
    /// string outside the support covered by `stage`. Any such s has
    /// K(s) > stage, and an SDVM output with K = k has at most 2^j
    /// derivations of opcode-length j, giving P(s) <= 2^{-K(s)/2}.
    pub fn outside_sup_upper_at(&self, stage: u32) -> Option<Dyadic> {
        match self.schedule {
            Schedule::Exhaustive { .. } if self.machine_name == "sdvm" => {
                let even = (stage & !1) as i64;
                Some(Dyadic::two_pow(-((even + 2) / 2)))
            }
            _ => None,
        }
    }
}
