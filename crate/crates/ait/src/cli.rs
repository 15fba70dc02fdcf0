//! Command-line front end.
//!
//! One binary, verb-style subcommands, no config file: all state lives
//! in the flags plus the enumeration cache CSV, so an invocation line is
//! a complete experiment log. Numeric flags are parsed exactly (integer,
//! fraction `1/8`, or finite decimal `0.25`) and never pass through
//! binary floating point. Identical command lines and caches produce
//! byte-identical outputs; `--jobs` changes wall time only.
//!
//! Exit codes: 0 success, 1 validation error, 2 computation error
//! (bracket, precision, budget, or precondition failures).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::rational::BigRational;
use num::One;

use crate::bitcore::BitString;
use crate::entropy::{self, LogBase, WitnessVerdict};
use crate::enumeration::{
    sdvm_sufficient_budget, DomainSnapshot, EnumerationError, EnumerationLog, EnumerationState,
    HaltView,
};
use crate::machine::{machine_by_name, Computer};
use crate::numerics::{
    parse_dyadic, parse_rational, pow2_interval, rational_to_dyadic, Dyadic, Interval, Precision,
    Round,
};
use crate::semimeasure::{check_domination, sqy_construct, LowerSemimeasure};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "ait",
    version,
    about = "Desk-scale algorithmic information theory on a self-delimiting reference machine",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Machine name: "sdvm" or "spinner".
    #[arg(long, default_value = "sdvm")]
    machine: String,
    /// Dovetailing stage (length <= stage, budget = stage).
    #[arg(long)]
    stage: Option<u32>,
    /// Exhaustive coverage of all programs of length <= this bound.
    #[arg(long)]
    max_len: Option<usize>,
    /// Enumeration cache CSV (relative paths resolve under AIT_CACHE_DIR).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Fractional bits for enclosure widths.
    #[arg(long, default_value_t = 64)]
    precision: u32,
    /// Truncate supports to strings with enumeration index below this.
    #[arg(long)]
    support_bound: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (affects wall time only, never output bytes).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the dovetailing schedule and manage the record cache.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Table of p̂(s) over the discovered support.
    Ptable {
        #[command(flatten)]
        common: Common,
    },
    /// Table of k̂(s) over the discovered support.
    Ktable {
        #[command(flatten)]
        common: Common,
    },
    /// The halting-mass lower bound ω̂, with a tail certificate when the
    /// machine's total mass is known exactly.
    Omega {
        #[command(flatten)]
        common: Common,
    },
    /// θ̂ = Σ 2^{-k̂(s)}, or θ̂^D with --D.
    Theta {
        #[command(flatten)]
        common: Common,
        /// Degree D in (0, 1] (D > 1 allowed, flagged machine-relative).
        #[arg(long = "D")]
        d: Option<String>,
    },
    /// Entropy-style partial sums of a semi-measure.
    Entropy {
        #[command(subcommand)]
        kind: EntropyCommand,
    },
    /// Σ f(|p|)·2^{-|p|} or Σ f(k̂(s))·2^{-k̂(s)} over a string predicate.
    WeightedSum {
        #[command(flatten)]
        common: Common,
        /// Which sum: over halting programs or over k̂ values.
        #[arg(long, value_enum, default_value_t = SumKind::Halting)]
        kind: SumKind,
        /// Weight function f.
        #[arg(long, value_enum, default_value_t = WeightName::N)]
        f: WeightName,
        /// Output predicate A.
        #[arg(long, value_enum, default_value_t = PredicateName::All)]
        predicate: PredicateName,
    },
    /// Certified divergence witness for the power-sum lower bound.
    Witness {
        #[command(flatten)]
        common: Common,
        /// Exponent q (exact rational).
        #[arg(long)]
        q: String,
        /// Threshold B the bound must reach.
        #[arg(long)]
        bound: String,
    },
    /// Slack table k̂(α_n) - D·n for a prefix α.
    Deficiency {
        #[command(flatten)]
        common: Common,
        /// The prefix α as a 0/1 string.
        #[arg(long)]
        alpha: String,
        /// Degree D >= 0 (dyadic).
        #[arg(long = "D")]
        d: String,
    },
    /// Per-string gap k̂(s) + log2 p̂(s), the finite-stage additive gap.
    Kgap {
        #[command(flatten)]
        common: Common,
    },
    /// The explicit semi-measure constructions.
    Construct {
        #[command(subcommand)]
        kind: ConstructCommand,
    },
}

#[derive(Subcommand, Debug)]
enum EntropyCommand {
    /// -Σ v·log v over the stage values.
    Shannon {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = BaseName::Natural)]
        base: BaseName,
        #[arg(long, value_enum, default_value_t = SemimeasureName::PHat)]
        of: SemimeasureName,
    },
    /// (Σv - Σv^q)/(q-1), cross-checked between both formulas.
    Tsallis {
        #[command(flatten)]
        common: Common,
        /// Exact rational q > 0, q != 1.
        #[arg(long)]
        q: String,
        #[arg(long, value_enum, default_value_t = SemimeasureName::PHat)]
        of: SemimeasureName,
    },
    /// Σ v^q over the stage values.
    Powersum {
        #[command(flatten)]
        common: Common,
        /// Exact rational q > 0.
        #[arg(long)]
        q: String,
        #[arg(long, value_enum, default_value_t = SemimeasureName::PHat)]
        of: SemimeasureName,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructCommand {
    /// Splice 2^{-c}·θ̂ onto the empty string of P̂.
    Ceps {
        #[command(flatten)]
        common: Common,
        /// The shift c with 2^{-c}·θ <= r(λ).
        #[arg(long)]
        c: u32,
    },
    /// The kernel transform r = F(P̂)/d on the increasing branch.
    Tewcr {
        #[command(flatten)]
        common: Common,
        /// Dyadic q > 1.
        #[arg(long)]
        q: String,
        /// Divisor d >= S_q(m); defaults to the certified ceil(1/(q-1)).
        #[arg(long)]
        d: Option<u64>,
    },
    /// Build m with S_q(m) = y (constant right-computable stream).
    Sqy {
        #[command(flatten)]
        common: Common,
        /// Dyadic q > 1.
        #[arg(long)]
        q: String,
        /// Dyadic y in (0, q^{q/(1-q)}].
        #[arg(long)]
        y: String,
    },
    /// Build m with S_q(m) = a·(1 - θ^D), the degree-D instance.
    #[command(name = "sqy-thetaD")]
    SqyThetaD {
        #[command(flatten)]
        common: Common,
        /// Dyadic q > 1.
        #[arg(long)]
        q: String,
        /// Degree D (dyadic, 0 < D < 2/log2(3) for the tail certificate).
        #[arg(long = "D")]
        d: String,
        /// Dyadic a in (0, q^{q/(1-q)}].
        #[arg(long)]
        a: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SumKind {
    Halting,
    K,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum WeightName {
    /// f(n) = n.
    N,
    /// f ≡ 1.
    One,
    /// f(n) = n².
    NSquared,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PredicateName {
    All,
    Nonempty,
    Empty,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BaseName {
    Natural,
    Binary,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SemimeasureName {
    PHat,
    KHat,
}

enum CliError {
    Validation(String),
    Computation(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Computation(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Computation(m) => m,
        }
    }
}

impl From<crate::numerics::NumericError> for CliError {
    fn from(e: crate::numerics::NumericError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<crate::entropy::EntropyError> for CliError {
    fn from(e: crate::entropy::EntropyError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<crate::semimeasure::SemimeasureError> for CliError {
    fn from(e: crate::semimeasure::SemimeasureError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<EnumerationError> for CliError {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::Io(_)
            | EnumerationError::Format { .. }
            | EnumerationError::MachineMismatch { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

/// Entry point used by the `ait` binary: parse, dispatch, map errors to
/// exit codes.
pub fn run<I>(argv: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ait: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let common = command_common(&command).clone();
    let run_body = move || match command {
        Command::Enumerate { common } => cmd_enumerate(&common),
        Command::Ptable { common } => cmd_ptable(&common),
        Command::Ktable { common } => cmd_ktable(&common),
        Command::Omega { common } => cmd_omega(&common),
        Command::Theta { common, d } => cmd_theta(&common, d.as_deref()),
        Command::Entropy { kind } => cmd_entropy(kind),
        Command::WeightedSum {
            common,
            kind,
            f,
            predicate,
        } => cmd_weighted_sum(&common, kind, f, predicate),
        Command::Witness { common, q, bound } => cmd_witness(&common, &q, &bound),
        Command::Deficiency { common, alpha, d } => cmd_deficiency(&common, &alpha, &d),
        Command::Kgap { common } => cmd_kgap(&common),
        Command::Construct { kind } => cmd_construct(kind),
    };
    match common.jobs {
        Some(jobs) => {
            if jobs == 0 {
                return Err(CliError::Validation("--jobs must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| CliError::Validation(format!("cannot build thread pool: {e}")))?;
            pool.install(run_body)
        }
        None => run_body(),
    }
}

fn command_common(command: &Command) -> &Common {
    match command {
        Command::Enumerate { common }
        | Command::Ptable { common }
        | Command::Ktable { common }
        | Command::Omega { common }
        | Command::Theta { common, .. }
        | Command::WeightedSum { common, .. }
        | Command::Witness { common, .. }
        | Command::Deficiency { common, .. }
        | Command::Kgap { common } => common,
        Command::Entropy { kind } => match kind {
            EntropyCommand::Shannon { common, .. }
            | EntropyCommand::Tsallis { common, .. }
            | EntropyCommand::Powersum { common, .. } => common,
        },
        Command::Construct { kind } => match kind {
            ConstructCommand::Ceps { common, .. }
            | ConstructCommand::Tewcr { common, .. }
            | ConstructCommand::Sqy { common, .. }
            | ConstructCommand::SqyThetaD { common, .. } => common,
        },
    }
}

fn precision_of(common: &Common) -> Result<Precision, CliError> {
    Precision::new(common.precision)
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn machine_of(common: &Common) -> Result<Arc<dyn Computer>, CliError> {
    machine_by_name(&common.machine).map_err(|e| CliError::Validation(e.to_string()))
}

fn support_bound_of(common: &Common) -> u64 {
    common.support_bound.unwrap_or(1 << 22)
}

fn cache_path(common: &Common) -> Option<PathBuf> {
    let path = common.cache.clone()?;
    if path.is_relative() {
        if let Ok(dir) = std::env::var("AIT_CACHE_DIR") {
            return Some(Path::new(&dir).join(path));
        }
    }
    Some(path)
}

fn parse_dyadic_flag(name: &str, text: &str) -> Result<Dyadic, CliError> {
    parse_dyadic(text)
        .map_err(|e| CliError::Validation(format!("--{name}: {e}")))
}

fn parse_rational_flag(name: &str, text: &str) -> Result<BigRational, CliError> {
    parse_rational(text)
        .map_err(|e| CliError::Validation(format!("--{name}: {e}")))
}

/// The data source for the record-view commands.
enum Source {
    State(EnumerationState),
    Snapshot(DomainSnapshot),
}

impl Source {
    fn view(&self) -> &dyn ErasedView {
        match self {
            Source::State(st) => st,
            Source::Snapshot(snap) => snap,
        }
    }

    fn label(&self) -> String {
        match self {
            Source::State(st) => format!("{} stage {}", st.machine_name(), st.stage()),
            Source::Snapshot(snap) => format!("{} {}", snap.machine_name, snap.description),
        }
    }
}

/// Object-safe mirror of [`HaltView`] for dispatch in the CLI only.
trait ErasedView {
    fn records_slice(&self) -> &[crate::enumeration::HaltRecord];
}

impl<T: HaltView> ErasedView for T {
    fn records_slice(&self) -> &[crate::enumeration::HaltRecord] {
        self.view_records()
    }
}

/// A concrete view the entropy operations can consume.
struct SliceView<'a>(&'a [crate::enumeration::HaltRecord]);

impl HaltView for SliceView<'_> {
    fn view_records(&self) -> &[crate::enumeration::HaltRecord] {
        self.0
    }
}

fn resolve_source(common: &Common) -> Result<Source, CliError> {
    let machine = machine_of(common)?;
    match (&common.cache, common.stage, common.max_len) {
        (Some(_), None, None) => {
            let path = cache_path(common).expect("cache flag present");
            let st = EnumerationState::load_records(&path, machine)?;
            Ok(Source::State(st))
        }
        (None, Some(stage), None) => {
            let st = EnumerationState::new(machine).advance_to(stage);
            Ok(Source::State(st))
        }
        (None, None, Some(max_len)) => {
            validate_max_len(max_len)?;
            let budget = exhaustive_budget(&common.machine, max_len);
            let snap = DomainSnapshot::exhaustive(machine.as_ref(), max_len, budget)?;
            Ok(Source::Snapshot(snap))
        }
        (None, None, None) => Err(CliError::Validation(
            "provide one of --cache, --stage, or --max-len".to_string(),
        )),
        _ => Err(CliError::Validation(
            "--cache, --stage, and --max-len are mutually exclusive".to_string(),
        )),
    }
}

fn validate_max_len(max_len: usize) -> Result<(), CliError> {
    if max_len > 34 {
        return Err(CliError::Validation(format!(
            "--max-len {max_len} is too large for exhaustive coverage (3^{} programs); cap is 34",
            max_len / 2
        )));
    }
    Ok(())
}

fn exhaustive_budget(machine: &str, max_len: usize) -> u64 {
    if machine == "sdvm" {
        sdvm_sufficient_budget(max_len)
    } else {
        // No totality certificate: a generous budget; exactness failures
        // surface as BudgetInsufficient computation errors.
        (max_len as u64 + 2) * 64
    }
}

fn resolve_log(common: &Common) -> Result<Arc<EnumerationLog>, CliError> {
    let machine = machine_of(common)?;
    match (common.stage, common.max_len, &common.cache) {
        (Some(stage), None, None) => Ok(Arc::new(EnumerationLog::dovetail(machine, stage))),
        (None, Some(max_len), None) => {
            validate_max_len(max_len)?;
            let budget = exhaustive_budget(&common.machine, max_len);
            Ok(Arc::new(EnumerationLog::exhaustive(
                machine, max_len, budget,
            )?))
        }
        (None, None, None) => Err(CliError::Validation(
            "provide --stage (dovetail) or --max-len (exhaustive coverage)".to_string(),
        )),
        _ => Err(CliError::Validation(
            "this command takes exactly one of --stage or --max-len (no --cache)".to_string(),
        )),
    }
}

fn semimeasure_of(name: SemimeasureName, log: Arc<EnumerationLog>) -> LowerSemimeasure {
    match name {
        SemimeasureName::PHat => LowerSemimeasure::from_p_hat(log),
        SemimeasureName::KHat => LowerSemimeasure::from_k_hat(log),
    }
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_header(command: &str, source: &str) -> String {
    format!("# ait {VERSION} {command} ({source}); machine-relative quantities refer to a non-optimal reference computer\n")
}

fn json_wrap(command: &str, source: &str, body: serde_json::Value) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("version".into(), VERSION.into());
    obj.insert("command".into(), command.into());
    obj.insert("source".into(), source.into());
    obj.insert(
        "caveat".into(),
        "machine-relative: computed for a non-optimal reference computer".into(),
    );
    obj.insert("data".into(), body);
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(obj))
        .expect("report serialization cannot fail");
    text.push('\n');
    text
}

fn interval_json(iv: &Interval) -> serde_json::Value {
    serde_json::json!([
        iv.lo().to_decimal_rounded(30, Round::Down),
        iv.hi().to_decimal_rounded(30, Round::Up)
    ])
}

fn cmd_enumerate(common: &Common) -> Result<(), CliError> {
    let machine = machine_of(common)?;
    let Some(target) = common.stage else {
        return Err(CliError::Validation(
            "enumerate needs --stage".to_string(),
        ));
    };
    if common.max_len.is_some() {
        return Err(CliError::Validation(
            "enumerate advances the dovetail schedule; --max-len does not apply".to_string(),
        ));
    }
    let path = cache_path(common);
    let start = match &path {
        Some(p) if p.exists() => EnumerationState::load_records(p, Arc::clone(&machine))?,
        _ => EnumerationState::new(Arc::clone(&machine)),
    };
    if start.stage() > target {
        return Err(CliError::Validation(format!(
            "cache is already at stage {} > requested {target}",
            start.stage()
        )));
    }
    let st = start.advance_to(target);
    if let Some(p) = &path {
        st.persist_records(p)?;
    }
    let omega = st.omega_hat();
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("enumerate", &format!("{} stage {target}", st.machine_name()));
            let _ = writeln!(out, "machine,stage,records,omega_hat");
            let _ = writeln!(
                out,
                "{},{},{},{}",
                st.machine_name(),
                st.stage(),
                st.records().len(),
                omega.to_decimal_string()
            );
            out
        }
        Format::Json => json_wrap(
            "enumerate",
            &format!("{} stage {target}", st.machine_name()),
            serde_json::json!({
                "machine": st.machine_name(),
                "stage": st.stage(),
                "records": st.records().len(),
                "omega_hat": omega.to_decimal_string(),
            }),
        ),
    };
    emit(common, &body)
}

fn cmd_ptable(common: &Common) -> Result<(), CliError> {
    let source = resolve_source(common)?;
    let view = SliceView(source.view().records_slice());
    let bound = crate::bitcore::string_at(support_bound_of(common));
    let mut rows: Vec<(BitString, Dyadic)> = Vec::new();
    for s in view.support() {
        if s >= bound {
            break;
        }
        let p = view.p_hat(&s);
        rows.push((s, p));
    }
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("ptable", &source.label());
            let _ = writeln!(out, "s,p_hat");
            for (s, p) in &rows {
                let _ = writeln!(out, "{s},{}", p.to_decimal_string());
            }
            out
        }
        Format::Json => json_wrap(
            "ptable",
            &source.label(),
            serde_json::json!(rows
                .iter()
                .map(|(s, p)| serde_json::json!({
                    "s": s.to_string(),
                    "p_hat": p.to_decimal_string()
                }))
                .collect::<Vec<_>>()),
        ),
    };
    emit(common, &body)
}

fn cmd_ktable(common: &Common) -> Result<(), CliError> {
    let source = resolve_source(common)?;
    let view = SliceView(source.view().records_slice());
    let bound = crate::bitcore::string_at(support_bound_of(common));
    let mut rows: Vec<(BitString, u64)> = Vec::new();
    for s in view.support() {
        if s >= bound {
            break;
        }
        if let Some(k) = view.k_hat(&s) {
            rows.push((s, k));
        }
    }
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("ktable", &source.label());
            let _ = writeln!(out, "s,k_hat");
            for (s, k) in &rows {
                let _ = writeln!(out, "{s},{k}");
            }
            out
        }
        Format::Json => json_wrap(
            "ktable",
            &source.label(),
            serde_json::json!(rows
                .iter()
                .map(|(s, k)| serde_json::json!({"s": s.to_string(), "k_hat": k}))
                .collect::<Vec<_>>()),
        ),
    };
    emit(common, &body)
}

fn cmd_omega(common: &Common) -> Result<(), CliError> {
    let source = resolve_source(common)?;
    let machine = machine_of(common)?;
    let view = SliceView(source.view().records_slice());
    let omega = view.omega_hat();
    // Tail certificate: exact total mass minus the covered mass.
    let tail = machine.exact_omega().map(|total| {
        let gap = total - omega.to_rational();
        rational_to_dyadic(&gap).unwrap_or_else(|| Dyadic::from_rational(&gap, 128, Round::Up))
    });
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("omega", &source.label());
            let _ = writeln!(out, "omega_hat,tail_upper");
            let _ = writeln!(
                out,
                "{},{}",
                omega.to_decimal_string(),
                tail.as_ref()
                    .map(|t| t.to_decimal_string())
                    .unwrap_or_default()
            );
            out
        }
        Format::Json => json_wrap(
            "omega",
            &source.label(),
            serde_json::json!({
                "omega_hat": omega.to_decimal_string(),
                "tail_upper": tail.as_ref().map(|t| t.to_decimal_string()),
            }),
        ),
    };
    emit(common, &body)
}

fn cmd_theta(common: &Common, d: Option<&str>) -> Result<(), CliError> {
    let prec = precision_of(common)?;
    let source = resolve_source(common)?;
    let view = SliceView(source.view().records_slice());
    let body = match d {
        None => {
            let theta = entropy::theta_hat(&view);
            match common.format {
                Format::Csv => {
                    let mut out = csv_header("theta", &source.label());
                    let _ = writeln!(out, "theta_hat");
                    let _ = writeln!(out, "{}", theta.to_decimal_string());
                    out
                }
                Format::Json => json_wrap(
                    "theta",
                    &source.label(),
                    serde_json::json!({"theta_hat": theta.to_decimal_string()}),
                ),
            }
        }
        Some(d_text) => {
            let d = parse_dyadic_flag("D", d_text)?;
            if !d.is_positive() {
                return Err(CliError::Validation("--D must be positive".to_string()));
            }
            let machine_relative_divergent = d > Dyadic::one();
            let value = entropy::theta_d_hat(&view, &d, prec)?;
            match common.format {
                Format::Csv => {
                    let mut out = csv_header("theta", &source.label());
                    let _ = writeln!(out, "D,theta_d_lo,theta_d_hi,divergent_on_optimal");
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        d.to_decimal_string(),
                        value.lo().to_decimal_rounded(30, Round::Down),
                        value.hi().to_decimal_rounded(30, Round::Up),
                        machine_relative_divergent
                    );
                    out
                }
                Format::Json => json_wrap(
                    "theta",
                    &source.label(),
                    serde_json::json!({
                        "D": d.to_decimal_string(),
                        "theta_d": interval_json(&value),
                        "divergent_on_optimal": machine_relative_divergent,
                    }),
                ),
            }
        }
    };
    emit(common, &body)
}

fn series_report(
    command: &str,
    source: &str,
    series: &entropy::PartialSumSeries,
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut out = csv_header(command, source);
            let _ = writeln!(out, "s,term_lo,term_hi");
            for (s, term) in &series.terms {
                let _ = writeln!(
                    out,
                    "{s},{},{}",
                    term.lo().to_decimal_rounded(30, Round::Down),
                    term.hi().to_decimal_rounded(30, Round::Up)
                );
            }
            let _ = writeln!(
                out,
                "cumulative,{},{}",
                series.cumulative.lo().to_decimal_rounded(30, Round::Down),
                series.cumulative.hi().to_decimal_rounded(30, Round::Up)
            );
            if let Some(tail) = &series.tail_bound {
                let _ = writeln!(out, "tail_bound,{},", tail.to_decimal_string());
            }
            out
        }
        Format::Json => json_wrap(
            command,
            source,
            serde_json::json!({
                "stage": series.stage,
                "support_bound": series.support_bound,
                "terms": series.terms.iter().map(|(s, t)| serde_json::json!({
                    "s": s.to_string(),
                    "term": interval_json(t),
                })).collect::<Vec<_>>(),
                "cumulative": interval_json(&series.cumulative),
                "tail_bound": series.tail_bound.as_ref().map(|t| t.to_decimal_string()),
            }),
        ),
    }
}

fn cmd_entropy(kind: EntropyCommand) -> Result<(), CliError> {
    match kind {
        EntropyCommand::Shannon { common, base, of } => {
            let prec = precision_of(&common)?;
            let log = resolve_log(&common)?;
            let label = log_label(&log);
            let r = semimeasure_of(of, Arc::clone(&log));
            let base = match base {
                BaseName::Natural => LogBase::Natural,
                BaseName::Binary => LogBase::Binary,
            };
            let series = entropy::shannon_partial(
                &r,
                log.max_stage(),
                support_bound_of(&common),
                base,
                prec,
            )?;
            emit(&common, &series_report("entropy-shannon", &label, &series, common.format))
        }
        EntropyCommand::Tsallis { common, q, of } => {
            let prec = precision_of(&common)?;
            let q_rat = parse_rational_flag("q", &q)?;
            if q_rat <= BigRational::from_integer(0.into()) {
                return Err(CliError::Validation("q must be positive".to_string()));
            }
            if q_rat == BigRational::one() {
                return Err(CliError::Validation(
                    "q must exclude 1 (Tsallis entropy is undefined at q = 1)".to_string(),
                ));
            }
            let log = resolve_log(&common)?;
            let label = log_label(&log);
            let r = semimeasure_of(of, Arc::clone(&log));
            let q_iv = Interval::from_rational(&q_rat, prec.working(16));
            let series = entropy::tsallis_partial(
                &r,
                log.max_stage(),
                support_bound_of(&common),
                &q_iv,
                prec,
            )?;
            emit(&common, &series_report("entropy-tsallis", &label, &series, common.format))
        }
        EntropyCommand::Powersum { common, q, of } => {
            let prec = precision_of(&common)?;
            let q_rat = parse_rational_flag("q", &q)?;
            if q_rat <= BigRational::from_integer(0.into()) {
                return Err(CliError::Validation("q must be positive".to_string()));
            }
            let log = resolve_log(&common)?;
            let label = log_label(&log);
            let r = semimeasure_of(of, Arc::clone(&log));
            let q_iv = Interval::from_rational(&q_rat, prec.working(16));
            let series = entropy::power_sum_partial(
                &r,
                log.max_stage(),
                support_bound_of(&common),
                &q_iv,
                prec,
            )?;
            emit(&common, &series_report("entropy-powersum", &label, &series, common.format))
        }
    }
}

fn log_label(log: &EnumerationLog) -> String {
    match log.schedule() {
        crate::enumeration::Schedule::Dovetail => {
            format!("{} dovetail stage {}", log.machine_name(), log.max_stage())
        }
        crate::enumeration::Schedule::Exhaustive { max_len } => {
            format!("{} exhaustive length <= {max_len}", log.machine_name())
        }
    }
}

fn cmd_weighted_sum(
    common: &Common,
    kind: SumKind,
    f: WeightName,
    predicate: PredicateName,
) -> Result<(), CliError> {
    let source = resolve_source(common)?;
    let view = SliceView(source.view().records_slice());
    let weight: Box<dyn Fn(u64) -> u64> = match f {
        WeightName::N => Box::new(|n| n),
        WeightName::One => Box::new(|_| 1),
        WeightName::NSquared => Box::new(|n| n * n),
    };
    let pred: Box<dyn Fn(&BitString) -> bool> = match predicate {
        PredicateName::All => Box::new(|_| true),
        PredicateName::Nonempty => Box::new(|s| !s.is_empty()),
        PredicateName::Empty => Box::new(|s| s.is_empty()),
    };
    let value = match kind {
        SumKind::Halting => entropy::weighted_halting_sum(&view, &*weight, &*pred),
        SumKind::K => entropy::weighted_k_sum(&view, &*weight, &*pred),
    };
    let kind_name = match kind {
        SumKind::Halting => "halting",
        SumKind::K => "k",
    };
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("weighted-sum", &source.label());
            let _ = writeln!(out, "kind,f,predicate,value");
            let _ = writeln!(
                out,
                "{kind_name},{:?},{:?},{}",
                f,
                predicate,
                value.to_decimal_string()
            );
            out
        }
        Format::Json => json_wrap(
            "weighted-sum",
            &source.label(),
            serde_json::json!({
                "kind": kind_name,
                "f": format!("{f:?}"),
                "predicate": format!("{predicate:?}"),
                "value": value.to_decimal_string(),
            }),
        ),
    };
    emit(common, &body)
}

fn cmd_witness(common: &Common, q_text: &str, bound_text: &str) -> Result<(), CliError> {
    let prec = precision_of(common)?;
    let q = parse_rational_flag("q", q_text)?;
    if q <= BigRational::from_integer(0.into()) {
        return Err(CliError::Validation("q must be positive".to_string()));
    }
    let bound = parse_dyadic_flag("bound", bound_text)?;
    if !bound.is_positive() {
        return Err(CliError::Validation("--bound must be positive".to_string()));
    }
    if common.machine != "sdvm" {
        return Err(CliError::Validation(
            "the certified length profile exists for sdvm only".to_string(),
        ));
    }
    let profile = entropy::sdvm_length_profile();
    let verdict = entropy::divergence_witness(&profile, &q, &bound, prec)?;
    let label = format!("profile g(n) = {}n + {}", profile.alpha, profile.beta);
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("witness", &label);
            let _ = writeln!(out, "q,bound,outcome,n");
            match &verdict {
                WitnessVerdict::ReachesBound { n } => {
                    let _ = writeln!(out, "{q_text},{bound_text},reaches-bound,{n}");
                }
                WitnessVerdict::Converges => {
                    let _ = writeln!(out, "{q_text},{bound_text},converges,");
                }
            }
            out
        }
        Format::Json => json_wrap(
            "witness",
            &label,
            serde_json::json!({
                "q": q_text,
                "bound": bound_text,
                "verdict": verdict,
            }),
        ),
    };
    emit(common, &body)
}

fn cmd_deficiency(common: &Common, alpha: &str, d_text: &str) -> Result<(), CliError> {
    let alpha: BitString = alpha
        .parse()
        .map_err(|e| CliError::Validation(format!("--alpha: {e}")))?;
    let d = parse_dyadic_flag("D", d_text)?;
    if d.is_negative() {
        return Err(CliError::Validation("--D must be nonnegative".to_string()));
    }
    let source = resolve_source(common)?;
    let view = SliceView(source.view().records_slice());
    let profile = entropy::deficiency_profile(&view, &alpha, &d);
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("deficiency", &source.label());
            let _ = writeln!(out, "n,k_hat,slack");
            for (i, slack) in profile.slacks.iter().enumerate() {
                let n = i + 1;
                let prefix = BitString::from_bits(alpha.bits()[..n].iter().copied());
                match (view.k_hat(&prefix), slack) {
                    (Some(k), Some(s)) => {
                        let _ = writeln!(out, "{n},{k},{}", s.to_decimal_string());
                    }
                    _ => {
                        let _ = writeln!(out, "{n},inf,");
                    }
                }
            }
            let _ = writeln!(
                out,
                "min_slack,{},",
                profile
                    .min_slack
                    .as_ref()
                    .map(|s| s.to_decimal_string())
                    .unwrap_or_else(|| "inf".to_string())
            );
            out
        }
        Format::Json => json_wrap(
            "deficiency",
            &source.label(),
            serde_json::json!({
                "alpha": alpha.to_string(),
                "D": d.to_decimal_string(),
                "slacks": profile.slacks.iter().map(|s| s.as_ref().map(|v| v.to_decimal_string())).collect::<Vec<_>>(),
                "min_slack": profile.min_slack.as_ref().map(|s| s.to_decimal_string()),
            }),
        ),
    };
    emit(common, &body)
}

fn cmd_kgap(common: &Common) -> Result<(), CliError> {
    let prec = precision_of(common)?;
    let source = resolve_source(common)?;
    let view = SliceView(source.view().records_slice());
    let report = entropy::kgap_report(&view, support_bound_of(common), prec)?;
    let body = match common.format {
        Format::Csv => {
            let mut out = csv_header("kgap", &source.label());
            let _ = writeln!(out, "s,k_hat,neg_log2_p_lo,neg_log2_p_hi,gap_lo,gap_hi");
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.s,
                    row.k_hat,
                    row.neg_log2_p.lo().to_decimal_rounded(30, Round::Down),
                    row.neg_log2_p.hi().to_decimal_rounded(30, Round::Up),
                    row.gap.lo().to_decimal_rounded(30, Round::Down),
                    row.gap.hi().to_decimal_rounded(30, Round::Up)
                );
            }
            if let (Some(min), Some(max)) = (&report.min_gap, &report.max_gap) {
                let _ = writeln!(
                    out,
                    "min_gap,,{},{},,",
                    min.lo().to_decimal_rounded(30, Round::Down),
                    min.hi().to_decimal_rounded(30, Round::Up)
                );
                let _ = writeln!(
                    out,
                    "max_gap,,{},{},,",
                    max.lo().to_decimal_rounded(30, Round::Down),
                    max.hi().to_decimal_rounded(30, Round::Up)
                );
            }
            out
        }
        Format::Json => json_wrap(
            "kgap",
            &source.label(),
            serde_json::json!({
                "rows": report.rows.iter().map(|row| serde_json::json!({
                    "s": row.s.to_string(),
                    "k_hat": row.k_hat,
                    "neg_log2_p": interval_json(&row.neg_log2_p),
                    "gap": interval_json(&row.gap),
                    "exact_nonneg": row.exact_nonneg,
                })).collect::<Vec<_>>(),
                "min_gap": report.min_gap.as_ref().map(interval_json),
                "max_gap": report.max_gap.as_ref().map(interval_json),
            }),
        ),
    };
    emit(common, &body)
}

/// Final-stage table of a constructed semimeasure.
fn semimeasure_table(
    command: &str,
    source: &str,
    m: &LowerSemimeasure,
    format: Format,
    extra: serde_json::Value,
) -> String {
    let n = m.max_stage();
    let mass = m.stage_mass(n);
    match format {
        Format::Csv => {
            let mut out = csv_header(command, source);
            let _ = writeln!(out, "s,value");
            for s in m.support(n) {
                let _ = writeln!(out, "{s},{}", m.approx(n, &s).to_decimal_string());
            }
            let _ = writeln!(out, "stage_mass,{}", mass.to_decimal_string());
            out
        }
        Format::Json => json_wrap(
            command,
            source,
            serde_json::json!({
                "stage": n,
                "values": m.support(n).iter().map(|s| serde_json::json!({
                    "s": s.to_string(),
                    "value": m.approx(n, s).to_decimal_string(),
                })).collect::<Vec<_>>(),
                "stage_mass": mass.to_decimal_string(),
                "details": extra,
            }),
        ),
    }
}

fn cmd_construct(kind: ConstructCommand) -> Result<(), CliError> {
    match kind {
        ConstructCommand::Ceps { common, c } => {
            let log = resolve_log(&common)?;
            let label = log_label(&log);
            let r = LowerSemimeasure::from_p_hat(Arc::clone(&log));
            let theta: Vec<Dyadic> = (0..=log.max_stage()).map(|n| log.theta(n)).collect();
            let m = r.ceps_transform(c, theta)?;
            let body = semimeasure_table(
                "construct-ceps",
                &label,
                &m,
                common.format,
                serde_json::json!({"c": c}),
            );
            emit(&common, &body)
        }
        ConstructCommand::Tewcr { common, q, d } => {
            let prec = precision_of(&common)?;
            let q = parse_dyadic_flag("q", &q)?;
            if q <= Dyadic::one() {
                return Err(CliError::Validation("--q must exceed 1".to_string()));
            }
            let d = match d {
                Some(d) => d,
                None => certified_tewcr_divisor(&q),
            };
            let log = resolve_log(&common)?;
            let label = log_label(&log);
            let m = LowerSemimeasure::from_p_hat(Arc::clone(&log));
            let r = m.tewcr_transform(&q, d, prec)?;
            let body = semimeasure_table(
                "construct-tewcr",
                &label,
                &r,
                common.format,
                serde_json::json!({"q": q.to_decimal_string(), "d": d}),
            );
            emit(&common, &body)
        }
        ConstructCommand::Sqy { common, q, y } => {
            let prec = precision_of(&common)?;
            let q = parse_dyadic_flag("q", &q)?;
            if q <= Dyadic::one() {
                return Err(CliError::Validation("--q must exceed 1".to_string()));
            }
            let y = parse_dyadic_flag("y", &y)?;
            if !y.is_positive() {
                return Err(CliError::Validation("--y must be positive".to_string()));
            }
            let log = resolve_log(&common)?;
            let label = log_label(&log);
            let r = LowerSemimeasure::from_p_hat(Arc::clone(&log));
            let stream = vec![y.clone(); r.max_stage() as usize + 1];
            let (_m, report, _artifacts) = sqy_construct(&r, &q, &stream, &y, prec)?;
            let body = construction_report_body(&common, "construct-sqy", &label, &report);
            emit(&common, &body)
        }
        ConstructCommand::SqyThetaD { common, q, d, a } => {
            let prec = precision_of(&common)?;
            let q = parse_dyadic_flag("q", &q)?;
            if q <= Dyadic::one() {
                return Err(CliError::Validation("--q must exceed 1".to_string()));
            }
            let d = parse_dyadic_flag("D", &d)?;
            if !d.is_positive() {
                return Err(CliError::Validation("--D must be positive".to_string()));
            }
            let a = parse_dyadic_flag("a", &a)?;
            if !a.is_positive() {
                return Err(CliError::Validation("--a must be positive".to_string()));
            }
            let Some(max_len) = common.max_len else {
                return Err(CliError::Validation(
                    "construct sqy-thetaD needs --max-len: the θ^D upper bound requires \
                     exhaustive coverage"
                        .to_string(),
                ));
            };
            if common.machine != "sdvm" {
                return Err(CliError::Validation(
                    "construct sqy-thetaD needs the sdvm tail certificates".to_string(),
                ));
            }
            let log = resolve_log(&common)?;
            let label = log_label(&log);
            let r = LowerSemimeasure::from_p_hat(Arc::clone(&log));
            // θ̂^D lower bounds per stage make y_n = a(1 - θ̂^D_n) a
            // nonincreasing stream of upper bounds on y = a(1 - θ^D).
            let mut y_stream = Vec::with_capacity(log.max_stage() as usize + 1);
            let mut theta_lo_running = Dyadic::zero();
            for n in 0..=log.max_stage() {
                let snap = log_stage_view(&log, n);
                let view = SliceView(&snap);
                let enclosure = entropy::theta_d_hat(&view, &d, prec)?;
                theta_lo_running = theta_lo_running.max(enclosure.lo().clone());
                y_stream.push(a.mul(&Dyadic::one().sub(&theta_lo_running)));
            }
            // Certified upper bound on θ^D from the final coverage.
            let final_snap = log_stage_view(&log, log.max_stage());
            let final_view = SliceView(&final_snap);
            let theta_enc = entropy::theta_d_hat(&final_view, &d, prec)?;
            let tail = sdvm_theta_d_tail(max_len, &d, prec)?;
            let theta_upper = theta_enc.hi().add(&tail);
            let y_lower = a.mul(&Dyadic::one().sub(&theta_upper));
            if !y_lower.is_positive() {
                return Err(CliError::Validation(format!(
                    "cannot certify y > 0: θ^D upper bound {} reaches 1",
                    theta_upper.to_decimal_string()
                )));
            }
            let (_m, report, _artifacts) = sqy_construct(&r, &q, &y_stream, &y_lower, prec)?;
            let body = construction_report_body(&common, "construct-sqy-thetaD", &label, &report);
            emit(&common, &body)
        }
    }
}

/// S_q(m) = Σ F(m(s)) <= Σ m(s)/(q-1) <= 1/(q-1), so ceil(1/(q-1)) is a
/// certified divisor for the kernel transform.
fn certified_tewcr_divisor(q: &Dyadic) -> u64 {
    let q_minus_1 = q.sub(&Dyadic::one()).to_rational();
    let inv = BigRational::one() / q_minus_1;
    let ceil = inv.ceil().to_integer();
    u64::try_from(ceil).unwrap_or(u64::MAX).max(1)
}

/// Records visible at stage `n` of a log, cloned into a snapshot.
fn log_stage_view(log: &EnumerationLog, n: u32) -> Vec<crate::enumeration::HaltRecord> {
    log.entries()
        .filter(|(_, birth)| *birth <= n)
        .map(|(r, _)| r.clone())
        .collect()
}

/// Upper bound on the θ^D tail Σ_{K(s) > max_len} 2^{-K(s)/D} for the
/// reference machine: at most 3^j outputs have K = 2j+2, so the tail is
/// dominated by the geometric series with ratio 3·2^{-2/D}.
fn sdvm_theta_d_tail(max_len: usize, d: &Dyadic, prec: Precision) -> Result<Dyadic, CliError> {
    let wp = prec.working(16);
    let d_iv = Interval::point(d.clone());
    let ratio = pow2_interval(&Interval::from_int(-2).div(&d_iv, wp)?, prec)?
        .scale(&Dyadic::from_int(3));
    if ratio.hi() >= &Dyadic::one() {
        return Err(CliError::Validation(format!(
            "no tail certificate: 3·2^(-2/D) >= 1 for D = {} (need D < 2/log2 3 ≈ 1.26)",
            d.to_decimal_string()
        )));
    }
    let j0 = (max_len / 2) as i64;
    // First tail term: 3^{j0}·2^{-(2 j0 + 2)/D}.
    let exp = Interval::point(Dyadic::from_int(-(2 * j0 + 2))).div(&d_iv, wp)?;
    let first = pow2_interval(&exp, prec)?.scale(&Dyadic::new(
        num::BigInt::from(3).pow(j0 as u32),
        0,
    ));
    let denom = Interval::point(Dyadic::one()).sub(&ratio);
    let tail = first.div(&denom, wp)?;
    Ok(tail.hi().clone())
}

fn construction_report_body(
    common: &Common,
    command: &str,
    source: &str,
    report: &crate::semimeasure::ConstructionReport,
) -> String {
    match common.format {
        Format::Csv => {
            let mut out = csv_header(command, source);
            let _ = writeln!(out, "field,lo,hi");
            let _ = writeln!(out, "q,{},", report.q);
            let _ = writeln!(out, "y_hi,{},", report.y_hi);
            let _ = writeln!(out, "c,{},", report.c);
            let _ = writeln!(out, "x0,{},{}", report.x0[0], report.x0[1]);
            let _ = writeln!(out, "theta,{},{}", report.theta[0], report.theta[1]);
            let _ = writeln!(out, "a,{},{}", report.a[0], report.a[1]);
            let _ = writeln!(out, "sq_m,{},{}", report.sq_m[0], report.sq_m[1]);
            let _ = writeln!(out, "stage,{},", report.stage);
            let _ = writeln!(out, "support_bound,{},", report.support_bound);
            out
        }
        Format::Json => json_wrap(
            command,
            source,
            serde_json::to_value(report).expect("report serializes"),
        ),
    }
}

/// Re-exported for integration tests: scan c·r <= m over a support.
pub fn domination_scan(
    r: &LowerSemimeasure,
    m: &LowerSemimeasure,
    c: &Dyadic,
    max_stage: u32,
    support_bound: u64,
) -> crate::semimeasure::DominationReport {
    check_domination(r, m, c, max_stage, support_bound)
}
