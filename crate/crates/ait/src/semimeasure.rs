//! Lower-computable semi-measures and the explicit constructions on them.
//!
//! A [`LowerSemimeasure`] is a stage-indexed stream of monotone dyadic
//! lower bounds: `approx(n, s)` never decreases in n, vanishes outside a
//! finite per-stage support, and the stage mass never exceeds 1. The
//! base streams come from enumeration (P̂ and 2^{-K̂}); on top of those
//! sit scaling, finite mixtures, the empty-string splice (a left-
//! computable real placed at λ), the kernel transform r = F(m)/d on the
//! increasing branch of F, and the root-finding construction that
//! realizes a prescribed Tsallis entropy S_q(m) = y.
//!
//! Where a construction's hypothesis can only be checked against exact
//! limits, the check runs against a [`LimitCertificate`] when one exists
//! and fails loudly instead of guessing when it does not.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::rational::BigRational;
use num::{BigInt, One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bitcore::BitString;
use crate::enumeration::{EnumerationLog, Schedule};
use crate::machine::sdvm_exact;
use crate::numerics::{
    bisect_monotone, kernel_max_point, kernel_max_value, tsallis_kernel_f, Direction, Dyadic,
    Interval, NumericError, Precision, Round,
};

#[derive(Debug, Error)]
pub enum SemimeasureError {
    #[error("weight error: {0}")]
    Weight(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("precondition violation: {0}")]
    Precondition(String),
    #[error("stage mass bound violated: {0}")]
    MassBound(String),
    #[error("construction needs an exact limit certificate: {0}")]
    NeedsCertificate(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

impl From<crate::entropy::EntropyError> for SemimeasureError {
    fn from(e: crate::entropy::EntropyError) -> Self {
        use crate::entropy::EntropyError as E;
        match e {
            E::Validation(msg) => SemimeasureError::Precondition(msg),
            E::NeedsCertificate(msg) => SemimeasureError::NeedsCertificate(msg),
            E::Numeric(n) => SemimeasureError::Numeric(n),
        }
    }
}

/// Exact limit information for a semi-measure whose limits are known in
/// closed form on the covered support.
pub struct LimitCertificate {
    exact: Arc<dyn Fn(&BitString) -> BigRational + Send + Sync>,
    /// Upper bound on Σ of limit values over strings outside the support.
    pub outside_mass_upper: BigRational,
    /// Upper bound on the limit value of any string outside the support.
    pub outside_sup_upper: BigRational,
}

impl LimitCertificate {
    /// Exact limit value of a covered string.
    pub fn exact(&self, s: &BitString) -> BigRational {
        (self.exact)(s)
    }
}

enum Kind {
    PHat(Arc<EnumerationLog>),
    KHat(Arc<EnumerationLog>),
    Scaled {
        base: LowerSemimeasure,
        factor: Dyadic,
    },
    Mixture {
        parts: Vec<(Dyadic, LowerSemimeasure)>,
    },
    /// m(λ) = 2^{-shift}·θ_n, m(s) = base(s) elsewhere.
    Ceps {
        base: LowerSemimeasure,
        shift: u32,
        theta: Arc<Vec<Dyadic>>,
    },
    /// r(s) = F(base(s))/d on the increasing branch of F.
    Tewcr {
        base: LowerSemimeasure,
        q: Dyadic,
        d: u64,
        prec: Precision,
        // Running-max memo keeps the stream monotone under interval slack.
        memo: Mutex<HashMap<(u32, BitString), Dyadic>>,
    },
    /// m(λ) = a_n, m(s) = base(s - 1) elsewhere (enumeration-order shift).
    SqyOutput {
        base: LowerSemimeasure,
        lambda_values: Arc<Vec<Dyadic>>,
    },
}

/// A stage-indexed stream of monotone lower bounds on a semi-measure.
#[derive(Clone)]
pub struct LowerSemimeasure {
    inner: Arc<Kind>,
    max_stage: u32,
}

impl LowerSemimeasure {
    /// The P̂ adapter: approx(n, s) = p̂ at stage n.
    pub fn from_p_hat(log: Arc<EnumerationLog>) -> Self {
        let max_stage = log.max_stage();
        LowerSemimeasure {
            inner: Arc::new(Kind::PHat(log)),
            max_stage,
        }
    }

    /// The 2^{-K̂} adapter: approx(n, s) = 2^{-k̂(n, s)}.
    pub fn from_k_hat(log: Arc<EnumerationLog>) -> Self {
        let max_stage = log.max_stage();
        LowerSemimeasure {
            inner: Arc::new(Kind::KHat(log)),
            max_stage,
        }
    }

    /// Pointwise scaling by a dyadic constant in (0, 1].
    pub fn scale(&self, factor: &Dyadic) -> Result<Self, SemimeasureError> {
        if !factor.is_positive() || factor > &Dyadic::one() {
            return Err(SemimeasureError::Weight(format!(
                "scale factor must lie in (0, 1], got {factor}"
            )));
        }
        Ok(LowerSemimeasure {
            inner: Arc::new(Kind::Scaled {
                base: self.clone(),
                factor: factor.clone(),
            }),
            max_stage: self.max_stage,
        })
    }

    /// Convex-ish combination Σ w_i r_i with Σ w_i <= 1, w_i > 0.
    pub fn finite_mixture(
        parts: Vec<(Dyadic, LowerSemimeasure)>,
    ) -> Result<Self, SemimeasureError> {
        if parts.is_empty() {
            return Err(SemimeasureError::Weight(
                "mixture needs at least one component".to_string(),
            ));
        }
        let mut total = Dyadic::zero();
        for (w, _) in &parts {
            if !w.is_positive() {
                return Err(SemimeasureError::Weight(format!(
                    "mixture weights must be positive, got {w}"
                )));
            }
            total = total.add(w);
        }
        if total > Dyadic::one() {
            return Err(SemimeasureError::Weight(format!(
                "mixture weights sum to {total} > 1"
            )));
        }
        let max_stage = parts.iter().map(|(_, r)| r.max_stage).min().unwrap();
        Ok(LowerSemimeasure {
            inner: Arc::new(Kind::Mixture { parts }),
            max_stage,
        })
    }

    /// The empty-string splice: m(λ) = 2^{-shift}·θ_n, m(s) = r(s) else.
    ///
    /// `theta` must be a nondecreasing stream of dyadic lower bounds of a
    /// left-computable real <= 1. The caller certifies 2^{-shift}·θ <=
    /// lim r(λ); the construction falsifies that against the base's
    /// limit certificate when one exists and audits the stage mass.
    pub fn ceps_transform(
        &self,
        shift: u32,
        theta: Vec<Dyadic>,
    ) -> Result<Self, SemimeasureError> {
        if theta.is_empty() {
            return Err(SemimeasureError::Precondition(
                "theta stream must be non-empty".to_string(),
            ));
        }
        for w in theta.windows(2) {
            if w[1] < w[0] {
                return Err(SemimeasureError::Precondition(
                    "theta stream must be nondecreasing".to_string(),
                ));
            }
        }
        if theta.iter().any(|t| t.is_negative()) {
            return Err(SemimeasureError::Precondition(
                "theta stream must be nonnegative".to_string(),
            ));
        }
        let factor = Dyadic::two_pow(-(shift as i64));
        let max_stage = self.max_stage.min(theta.len() as u32 - 1);
        let lambda = BitString::empty();
        let lambda_limit_upper = self
            .limit_certificate(max_stage)
            .map(|cert| cert.exact(&lambda));
        for (n, t) in theta.iter().enumerate().take(max_stage as usize + 1) {
            let spliced = t.mul(&factor);
            if spliced > Dyadic::one() {
                return Err(SemimeasureError::Precondition(format!(
                    "2^-{shift}·θ_{n} = {spliced} exceeds 1"
                )));
            }
            if let Some(upper) = &lambda_limit_upper {
                if spliced.to_rational() > *upper {
                    return Err(SemimeasureError::Precondition(format!(
                        "2^-{shift}·θ_{n} = {spliced} exceeds the certified limit of r(λ)"
                    )));
                }
            }
            // Mass audit: replacing the λ term must keep the stage mass <= 1.
            let n = n as u32;
            let mass_without_lambda = self.stage_mass(n).sub(&self.approx(n, &lambda));
            let mass = mass_without_lambda.add(&spliced);
            if mass > Dyadic::one() {
                return Err(SemimeasureError::MassBound(format!(
                    "stage {n} mass {mass} > 1 after splice (precondition was false)"
                )));
            }
        }
        Ok(LowerSemimeasure {
            inner: Arc::new(Kind::Ceps {
                base: self.clone(),
                shift,
                theta: Arc::new(theta),
            }),
            max_stage,
        })
    }

    /// The kernel transform r(s) = F(m(s))/d on the increasing branch.
    ///
    /// The caller certifies m(s) <= q^{1/(1-q)} for all s and d >= S_q(m);
    /// the transform errors if any stage lower bound cannot be placed on
    /// the increasing branch.
    pub fn tewcr_transform(
        &self,
        q: &Dyadic,
        d: u64,
        prec: Precision,
    ) -> Result<Self, SemimeasureError> {
        if q <= &Dyadic::one() {
            return Err(SemimeasureError::Range(format!(
                "kernel transform needs q > 1, got {q}"
            )));
        }
        if d == 0 {
            return Err(SemimeasureError::Weight(
                "divisor d must be positive".to_string(),
            ));
        }
        let branch_top = kernel_max_point(&Interval::point(q.clone()), prec)?;
        let n = self.max_stage;
        for s in self.support(n) {
            let v = self.approx(n, &s);
            if &v > branch_top.lo() {
                return Err(SemimeasureError::Branch(format!(
                    "stage lower bound m({s:?}) = {v} cannot be certified on the increasing \
                     branch (x* >= {})",
                    branch_top.lo()
                )));
            }
        }
        Ok(LowerSemimeasure {
            inner: Arc::new(Kind::Tewcr {
                base: self.clone(),
                q: q.clone(),
                d,
                prec,
                memo: Mutex::new(HashMap::new()),
            }),
            max_stage: self.max_stage,
        })
    }

    /// Monotone lower bound at stage `n` for string `s`.
    pub fn approx(&self, n: u32, s: &BitString) -> Dyadic {
        let n = n.min(self.max_stage);
        match &*self.inner {
            Kind::PHat(log) => log.p_hat(n, s),
            Kind::KHat(log) => match log.k_hat(n, s) {
                Some(k) => Dyadic::two_pow(-(k as i64)),
                None => Dyadic::zero(),
            },
            Kind::Scaled { base, factor } => base.approx(n, s).mul(factor),
            Kind::Mixture { parts } => {
                let mut acc = Dyadic::zero();
                for (w, r) in parts {
                    acc = acc.add(&r.approx(n, s).mul(w));
                }
                acc
            }
            Kind::Ceps { base, shift, theta } => {
                if s.is_empty() {
                    let idx = (n as usize).min(theta.len() - 1);
                    theta[idx].mul(&Dyadic::two_pow(-(*shift as i64)))
                } else {
                    base.approx(n, s)
                }
            }
            Kind::Tewcr {
                base,
                q,
                d,
                prec,
                memo,
            } => {
                if let Some(v) = memo.lock().unwrap().get(&(n, s.clone())) {
                    return v.clone();
                }
                let prev = if n == 0 {
                    Dyadic::zero()
                } else {
                    self.approx(n - 1, s)
                };
                let v = base.approx(n, s);
                let raw = if v.is_zero() {
                    Dyadic::zero()
                } else {
                    let f = tsallis_kernel_f(
                        &Interval::point(v),
                        &Interval::point(q.clone()),
                        *prec,
                    )
                    .expect("branch checked at construction");
                    let lower = f.lo().clone().max(Dyadic::zero());
                    if *d == 1 {
                        lower
                    } else {
                        lower.div(&Dyadic::from_int(*d as i64), prec.bits() + 16, Round::Down)
                    }
                };
                let value = raw.max(prev);
                memo.lock()
                    .unwrap()
                    .insert((n, s.clone()), value.clone());
                value
            }
            Kind::SqyOutput {
                base,
                lambda_values,
            } => {
                if s.is_empty() {
                    let idx = (n as usize).min(lambda_values.len() - 1);
                    lambda_values[idx].clone()
                } else {
                    let prev = s.predecessor().expect("nonempty string");
                    base.approx(n, &prev)
                }
            }
        }
    }

    /// The finite support at stage `n`, sorted in enumeration order.
    pub fn support(&self, n: u32) -> Vec<BitString> {
        let n = n.min(self.max_stage);
        match &*self.inner {
            Kind::PHat(log) | Kind::KHat(log) => log.support(n),
            Kind::Scaled { base, .. } => base.support(n),
            Kind::Mixture { parts } => {
                let mut all: Vec<BitString> =
                    parts.iter().flat_map(|(_, r)| r.support(n)).collect();
                all.sort();
                all.dedup();
                all
            }
            Kind::Ceps { base, theta, .. } => {
                let mut sup = base.support(n);
                let idx = (n as usize).min(theta.len() - 1);
                if theta[idx].is_positive() && !sup.iter().any(|s| s.is_empty()) {
                    sup.insert(0, BitString::empty());
                }
                sup
            }
            Kind::Tewcr { base, .. } => base.support(n),
            Kind::SqyOutput { base, .. } => {
                let mut sup = vec![BitString::empty()];
                sup.extend(base.support(n).iter().map(|s| s.successor()));
                sup.sort();
                sup.dedup();
                sup
            }
        }
    }

    pub fn max_stage(&self) -> u32 {
        self.max_stage
    }

    /// Exact dyadic stage mass Σ_{s ∈ support(n)} approx(n, s).
    pub fn stage_mass(&self, n: u32) -> Dyadic {
        let mut acc = Dyadic::zero();
        for s in self.support(n) {
            acc = acc.add(&self.approx(n, &s));
        }
        acc
    }

    /// Upper bound on Σ_s (limit(s) - approx(stage, s)), when certified.
    pub fn mass_gap_upper(&self, stage: u32) -> Option<Dyadic> {
        let stage = stage.min(self.max_stage);
        match &*self.inner {
            Kind::PHat(log) => log.tail_mass_upper(stage),
            Kind::KHat(log) => sdvm_theta_tail(log, stage),
            Kind::Scaled { base, factor } => Some(base.mass_gap_upper(stage)?.mul(factor)),
            Kind::Mixture { parts } => {
                let mut acc = Dyadic::zero();
                for (w, r) in parts {
                    acc = acc.add(&r.mass_gap_upper(stage)?.mul(w));
                }
                Some(acc)
            }
            _ => None,
        }
    }

    /// Upper bound on Σ |p|·2^{-|p|} over the programs not yet counted
    /// at `stage` (the quantity behind the Shannon tail certificate);
    /// only the plain P̂ of an exhaustive reference-machine log has one.
    pub fn weighted_length_gap_upper(&self, stage: u32) -> Option<Dyadic> {
        let stage = stage.min(self.max_stage);
        match &*self.inner {
            Kind::PHat(log)
                if matches!(log.schedule(), Schedule::Exhaustive { .. })
                    && log.machine_name() == "sdvm" =>
            {
                let missing = crate::entropy::sdvm_sums::weighted_length_limit()
                    - crate::entropy::sdvm_sums::weighted_length_partial(stage as usize);
                Some(Dyadic::from_rational(&missing, 96, Round::Up))
            }
            _ => None,
        }
    }

    /// Exact limit certificate, when the underlying log supports one
    /// (exhaustive enumeration of the reference machine).
    pub fn limit_certificate(&self, stage: u32) -> Option<LimitCertificate> {
        let stage = stage.min(self.max_stage);
        match &*self.inner {
            Kind::PHat(log) => {
                if !matches!(log.schedule(), Schedule::Exhaustive { .. })
                    || log.machine_name() != "sdvm"
                {
                    return None;
                }
                let cache = Arc::new(Mutex::new(HashMap::new()));
                let cache_for_fn = Arc::clone(&cache);
                let exact: Arc<dyn Fn(&BitString) -> BigRational + Send + Sync> =
                    Arc::new(move |s| sdvm_exact::probability_cached(s, &cache_for_fn));
                let mut covered = BigRational::zero();
                for s in log.support(stage) {
                    covered += exact(&s);
                }
                let outside_mass_upper = BigRational::one() - covered;
                let outside_sup_upper = log
                    .outside_sup_upper_at(stage)
                    .expect("exhaustive sdvm log")
                    .to_rational();
                Some(LimitCertificate {
                    exact,
                    outside_mass_upper,
                    outside_sup_upper,
                })
            }
            Kind::KHat(log) => {
                if !matches!(log.schedule(), Schedule::Exhaustive { .. })
                    || log.machine_name() != "sdvm"
                {
                    return None;
                }
                // Exhaustive coverage to `stage`: every covered k̂ is the
                // exact K, and uncovered strings have K > stage.
                let log2 = Arc::clone(log);
                let stage_copy = stage;
                let exact: Arc<dyn Fn(&BitString) -> BigRational + Send + Sync> =
                    Arc::new(move |s| match log2.k_hat(stage_copy, s) {
                        Some(k) => Dyadic::two_pow(-(k as i64)).to_rational(),
                        None => BigRational::zero(),
                    });
                let tail = sdvm_theta_tail(log, stage)?;
                let even = stage & !1;
                Some(LimitCertificate {
                    exact,
                    outside_mass_upper: tail.to_rational(),
                    outside_sup_upper: Dyadic::two_pow(-(even as i64 + 2)).to_rational(),
                })
            }
            Kind::Scaled { base, factor } => {
                let cert = base.limit_certificate(stage)?;
                let f = factor.to_rational();
                let inner = cert.exact;
                let f2 = f.clone();
                Some(LimitCertificate {
                    exact: Arc::new(move |s| inner(s) * &f2),
                    outside_mass_upper: cert.outside_mass_upper * &f,
                    outside_sup_upper: cert.outside_sup_upper * &f,
                })
            }
            Kind::Mixture { parts } => {
                let mut certs = Vec::with_capacity(parts.len());
                for (w, r) in parts {
                    certs.push((w.to_rational(), r.limit_certificate(stage)?));
                }
                let mut outside_mass = BigRational::zero();
                let mut outside_sup = BigRational::zero();
                for (w, c) in &certs {
                    outside_mass += w * &c.outside_mass_upper;
                    outside_sup += w * &c.outside_sup_upper;
                }
                let exacts: Vec<(
                    BigRational,
                    Arc<dyn Fn(&BitString) -> BigRational + Send + Sync>,
                )> = certs.into_iter().map(|(w, c)| (w, c.exact)).collect();
                Some(LimitCertificate {
                    exact: Arc::new(move |s| {
                        let mut acc = BigRational::zero();
                        for (w, e) in &exacts {
                            acc += w * e(s);
                        }
                        acc
                    }),
                    outside_mass_upper: outside_mass,
                    outside_sup_upper: outside_sup,
                })
            }
            _ => None,
        }
    }
}

/// θ-tail for an exhaustive SDVM log: strings outside the coverage have
/// K > stage, and there are at most 3^j programs of opcode-length j, so
/// Σ 2^{-K} over them is at most (3/4)^{stage/2}.
fn sdvm_theta_tail(log: &EnumerationLog, stage: u32) -> Option<Dyadic> {
    match log.schedule() {
        Schedule::Exhaustive { .. } if log.machine_name() == "sdvm" => {
            let j0 = (stage / 2) as i64;
            Some(Dyadic::new(BigInt::from(3).pow(j0 as u32), -2 * j0))
        }
        _ => None,
    }
}

/// Verdict of a domination scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DominationVerdict {
    NotFalsified { vacuous: bool },
    Violated { witness: String, stage: u32 },
}

/// Result of scanning c·r(s) <= m(s) over stages and support.
#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub max_stage: u32,
    pub support_bound: u64,
    pub constant: String,
    #[serde(flatten)]
    pub verdict: DominationVerdict,
}

/// Scan for witnesses against c·r(s) <= m(s).
///
/// "Violated" is reported only when c·(a stage lower bound of r) exceeds
/// a certified upper bound of m(s); without a limit certificate for m
/// the scan can only report non-falsification over its scope.
pub fn check_domination(
    r: &LowerSemimeasure,
    m: &LowerSemimeasure,
    c: &Dyadic,
    max_stage: u32,
    support_bound: u64,
) -> DominationReport {
    let vacuous = !c.is_positive();
    let cert = m.limit_certificate(m.max_stage());
    let bound_string = crate::bitcore::string_at(support_bound);
    if let Some(cert) = cert {
        let c_rat = c.to_rational();
        let m_support = m.support(m.max_stage());
        for stage in 0..=max_stage.min(r.max_stage()) {
            for s in r.support(stage) {
                if s >= bound_string {
                    break;
                }
                let lower = c_rat.clone() * r.approx(stage, &s).to_rational();
                let upper = if m_support.binary_search(&s).is_ok() {
                    cert.exact(&s)
                } else {
                    cert.outside_sup_upper.clone()
                };
                if lower > upper {
                    return DominationReport {
                        max_stage,
                        support_bound,
                        constant: c.to_decimal_string(),
                        verdict: DominationVerdict::Violated {
                            witness: s.to_string(),
                            stage,
                        },
                    };
                }
            }
        }
    }
    DominationReport {
        max_stage,
        support_bound,
        constant: c.to_decimal_string(),
        verdict: DominationVerdict::NotFalsified { vacuous },
    }
}

/// Everything the Tsallis-entropy-prescription construction decided,
/// with certified enclosures for each intermediate real.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub q: String,
    pub y_hi: String,
    pub c: String,
    pub x0: [String; 2],
    pub theta: [String; 2],
    pub a: [String; 2],
    pub sq_m: [String; 2],
    pub stage: u32,
    pub support_bound: u64,
}

fn interval_strings(iv: &Interval) -> [String; 2] {
    [
        iv.lo().to_decimal_rounded(30, Round::Down),
        iv.hi().to_decimal_rounded(30, Round::Up),
    ]
}

/// Intermediate enclosures of [`sqy_construct`], exposed for reporting
/// and for the end-to-end checks.
pub struct SqyArtifacts {
    pub x0: Interval,
    pub c: Dyadic,
    pub theta: Interval,
    pub a: Interval,
    pub sq_m: Interval,
}

/// Realize a prescribed Tsallis entropy: build m with S_q(m) = y.
///
/// `y_stream` is the nonincreasing stream of dyadic upper bounds of the
/// right-computable target y; `y_lower` is a caller-certified positive
/// lower bound on y (for a constant stream, y itself). The recipe: solve
/// F(x0) = y/2 on the decreasing branch; pick c as the largest power of
/// two below min{q^{1/(1-q)}, 1-x0, (q-1)y/2}; scale r to r1 = c·r;
/// enclose Θ = S_q(r1); solve F(a) = y - Θ on the decreasing branch with
/// a in (q^{1/(1-q)}, x0); emit m(λ) = a, m(s) = r1(s-1) otherwise.
pub fn sqy_construct(
    r: &LowerSemimeasure,
    q: &Dyadic,
    y_stream: &[Dyadic],
    y_lower: &Dyadic,
    prec: Precision,
) -> Result<(LowerSemimeasure, ConstructionReport, SqyArtifacts), SemimeasureError> {
    if q <= &Dyadic::one() {
        return Err(SemimeasureError::Range(format!(
            "construction needs q > 1, got {q}"
        )));
    }
    if y_stream.is_empty() {
        return Err(SemimeasureError::Precondition(
            "y stream must be non-empty".to_string(),
        ));
    }
    for w in y_stream.windows(2) {
        if w[1] > w[0] {
            return Err(SemimeasureError::Precondition(
                "y stream must be nonincreasing".to_string(),
            ));
        }
    }
    let y_final = y_stream.last().unwrap();
    if !y_lower.is_positive() || y_lower > y_final {
        return Err(SemimeasureError::Precondition(format!(
            "y_lower must satisfy 0 < y_lower <= min of the y stream, got {y_lower}"
        )));
    }
    let q_iv = Interval::point(q.clone());
    let max_value = kernel_max_value(&q_iv, prec)?;
    if y_lower > max_value.hi() {
        return Err(SemimeasureError::Range(format!(
            "y > q^(q/(1-q)): lower bound {y_lower} exceeds {}",
            max_value.hi()
        )));
    }
    if y_final > max_value.lo() {
        return Err(SemimeasureError::Range(format!(
            "cannot certify y <= q^(q/(1-q)) = {max_value}: stream bottoms out at {y_final}"
        )));
    }
    let x_star = kernel_max_point(&q_iv, prec)?;
    let stages = r.max_stage();
    let f = |x: &Interval| tsallis_kernel_f(x, &q_iv, prec);

    // (1) F(x0) = y/2 on the decreasing branch (x*, 1).
    let half_target = Interval::new(y_lower.shift(-1), y_final.shift(-1))?;
    let bracket = Interval::new(x_star.hi().clone(), Dyadic::one())?;
    let x0 = bisect_monotone(f, &half_target, &bracket, Direction::Decreasing, prec)?;

    // (2) Deterministic c: largest power of two below the proof's bound.
    let one_minus_x0 = Dyadic::one().sub(x0.hi());
    if !one_minus_x0.is_positive() {
        return Err(SemimeasureError::Range(
            "x0 enclosure reaches 1; cannot pick c".to_string(),
        ));
    }
    let q_minus_1 = q.sub(&Dyadic::one());
    let c_cap = x_star
        .lo()
        .clone()
        .min(one_minus_x0)
        .min(q_minus_1.mul(y_lower).shift(-1));
    if !c_cap.is_positive() {
        return Err(SemimeasureError::Range(
            "the c bound min{x*, 1-x0, (q-1)y/2} is not positive".to_string(),
        ));
    }
    let c = Dyadic::two_pow(c_cap.log2_floor());

    // (3) r1 = c·r.
    let r1 = r.scale(&c)?;

    // (4) Θ = S_q(r1) as a certified enclosure of the limit.
    let theta = crate::entropy::sq_limit_enclosure(&r1, q, stages, prec)?;

    // (5) F(a) = y - Θ on the decreasing branch, a in (x*, x0).
    let target_lo = y_lower.sub(theta.hi());
    let target_hi = y_final.sub(theta.lo());
    if !target_lo.is_positive() {
        return Err(SemimeasureError::Precondition(format!(
            "y - Θ is not certifiably positive (Θ = {theta})"
        )));
    }
    let a_target = Interval::new(target_lo, target_hi)?;
    let a_bracket = Interval::new(x_star.hi().clone(), x0.hi().clone())?;
    let a = bisect_monotone(f, &a_target, &a_bracket, Direction::Decreasing, prec)?;

    // (6) Per-stage lower bounds for m(λ): running max of the a-roots for
    // the stagewise targets y_n - Θ̂_n.
    let mut lambda_values = Vec::with_capacity(stages as usize + 1);
    let mut running = Dyadic::zero();
    for n in 0..=stages {
        let y_n = &y_stream[(n as usize).min(y_stream.len() - 1)];
        let theta_lo_n = crate::entropy::tsallis_lower_partial(&r1, n, q, prec)?;
        let tau_hi = y_n.sub(&theta_lo_n);
        let stage_lb = if n == stages {
            a.lo().clone()
        } else {
            match bisect_monotone(
                f,
                &Interval::point(tau_hi),
                &Interval::new(x_star.hi().clone(), Dyadic::one())?,
                Direction::Decreasing,
                Precision::new(prec.bits().min(40)).expect("valid precision"),
            ) {
                Ok(enc) => enc.lo().clone(),
                // Early stages can put the target above the bracket's
                // reachable values; x* is then still a certified bound.
                Err(NumericError::Bracket(_)) => x_star.lo().clone(),
                Err(e) => return Err(e.into()),
            }
        };
        running = running.max(stage_lb);
        lambda_values.push(running.clone());
    }

    let m = LowerSemimeasure {
        inner: Arc::new(Kind::SqyOutput {
            base: r1.clone(),
            lambda_values: Arc::new(lambda_values),
        }),
        max_stage: stages,
    };

    // Σ m stage mass < 1, certified at the limit: a + c <= a_hi + c < 1.
    let limit_mass_upper = a.hi().add(&c);
    if limit_mass_upper >= Dyadic::one() {
        return Err(SemimeasureError::MassBound(format!(
            "cannot certify Σ m < 1: a_hi + c = {limit_mass_upper}"
        )));
    }

    // S_q(m) = F(a) + Θ, which must be consistent with y.
    let sq_m = f(&a)?.add(&theta);
    let y_band = Interval::new(y_lower.clone(), y_final.clone())?;
    if !sq_m.intersects(&y_band) {
        return Err(SemimeasureError::MassBound(format!(
            "internal inconsistency: S_q(m) enclosure {sq_m} misses the y band {y_band}"
        )));
    }

    let support_count = m.support(stages).len() as u64;
    let report = ConstructionReport {
        q: q.to_decimal_string(),
        y_hi: y_final.to_decimal_string(),
        c: c.to_decimal_string(),
        x0: interval_strings(&x0),
        theta: interval_strings(&theta),
        a: interval_strings(&a),
        sq_m: interval_strings(&sq_m),
        stage: stages,
        support_bound: support_count,
    };
    let artifacts = SqyArtifacts {
        x0,
        c,
        theta,
        a,
        sq_m,
    };
    Ok((m, report, artifacts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::EnumerationLog;
    use crate::machine::Sdvm;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn d(s: &str) -> Dyadic {
        crate::numerics::parse_dyadic(s).unwrap()
    }

    fn sdvm_log(stages: u32) -> Arc<EnumerationLog> {
        Arc::new(EnumerationLog::dovetail(Arc::new(Sdvm), stages))
    }

    #[test]
    fn p_hat_adapter_values() {
        let r = LowerSemimeasure::from_p_hat(sdvm_log(8));
        assert_eq!(r.approx(5, &BitString::empty()), d("5/16"));
        assert_eq!(r.approx(0, &bs("0")), Dyadic::zero());
        assert_eq!(r.approx(5, &bs("0")), d("1/16"));
    }

    #[test]
    fn k_hat_adapter_values() {
        let r = LowerSemimeasure::from_k_hat(sdvm_log(8));
        assert_eq!(r.approx(2, &BitString::empty()), d("1/4"));
        assert_eq!(r.approx(5, &bs("1")), d("1/16"));
        // Pointwise bound: 2^{-k̂} <= p̂ (the witness program's own mass).
        let p = LowerSemimeasure::from_p_hat(sdvm_log(8));
        for n in 0..=8 {
            for s in p.support(n) {
                assert!(r.approx(n, &s) <= p.approx(n, &s));
            }
        }
    }

    #[test]
    fn scale_and_mixture() {
        let r = LowerSemimeasure::from_p_hat(sdvm_log(6));
        let half = r.scale(&d("1/2")).unwrap();
        assert_eq!(half.approx(5, &BitString::empty()), d("5/32"));
        assert_eq!(half.stage_mass(5), r.stage_mass(5).mul(&d("1/2")));
        assert!(r.scale(&d("0")).is_err());
        assert!(r.scale(&d("2")).is_err());

        let mix = LowerSemimeasure::finite_mixture(vec![
            (d("1/2"), r.clone()),
            (d("1/2"), half.clone()),
        ])
        .unwrap();
        assert_eq!(
            mix.approx(5, &BitString::empty()),
            d("5/32").add(&d("5/64"))
        );
        assert!(mix.stage_mass(6) <= Dyadic::one());
        assert!(LowerSemimeasure::finite_mixture(vec![
            (d("3/4"), r.clone()),
            (d("1/2"), half),
        ])
        .is_err());
        // Identity mixture.
        let id = LowerSemimeasure::finite_mixture(vec![(Dyadic::one(), r.clone())]).unwrap();
        assert_eq!(id.approx(4, &bs("0")), r.approx(4, &bs("0")));
    }

    #[test]
    fn contract_audit_monotone_mass() {
        let log = sdvm_log(10);
        let p = LowerSemimeasure::from_p_hat(Arc::clone(&log));
        let k = LowerSemimeasure::from_k_hat(log);
        let mix =
            LowerSemimeasure::finite_mixture(vec![(d("1/2"), p.clone()), (d("1/4"), k.clone())])
                .unwrap();
        for r in [&p, &k, &mix] {
            let mut last_mass = Dyadic::zero();
            for n in 0..=10u32 {
                let mass = r.stage_mass(n);
                assert!(mass <= Dyadic::one());
                assert!(mass >= last_mass);
                last_mass = mass;
                for s in r.support(n) {
                    if n > 0 {
                        assert!(r.approx(n, &s) >= r.approx(n - 1, &s));
                    }
                }
            }
        }
    }

    #[test]
    fn ceps_examples() {
        let log = sdvm_log(8);
        let r = LowerSemimeasure::from_p_hat(Arc::clone(&log));
        // θ̂ stream from the same enumeration.
        let theta: Vec<Dyadic> = (0..=8).map(|n| log.theta(n)).collect();
        assert_eq!(theta[5], d("3/8"));
        let m = r.ceps_transform(2, theta.clone()).unwrap();
        // Stage value at λ when the θ stage value is 3/8: 2^{-2}·(3/8).
        assert_eq!(m.approx(5, &BitString::empty()), d("3/32"));
        // Changes exactly one point.
        for n in 0..=8u32 {
            for s in m.support(n) {
                if !s.is_empty() {
                    assert_eq!(m.approx(n, &s), r.approx(n, &s));
                }
            }
        }
        // Degenerate all-zero stream.
        let zeros = vec![Dyadic::zero(); 9];
        let z = r.ceps_transform(2, zeros).unwrap();
        assert!(z.approx(8, &BitString::empty()).is_zero());
        // Large shift keeps the mass audit comfortable.
        let big = r.ceps_transform(10, theta).unwrap();
        assert!(big.stage_mass(8) <= Dyadic::one());
    }

    #[test]
    fn ceps_falsification_against_certificate() {
        // Exhaustive SDVM log certifies lim r(λ) = 1/3; a huge splice
        // must be rejected.
        let log = Arc::new(EnumerationLog::sdvm_exhaustive(10));
        let r = LowerSemimeasure::from_p_hat(log);
        let too_big = vec![d("7/8"); 11];
        let err = r.ceps_transform(0, too_big);
        assert!(matches!(err, Err(SemimeasureError::Precondition(_))));
    }

    #[test]
    fn tewcr_examples() {
        let prec = Precision::default();
        let log = Arc::new(EnumerationLog::sdvm_exhaustive(12));
        let m = LowerSemimeasure::from_p_hat(log);
        let r = m.tewcr_transform(&d("2"), 1, prec).unwrap();
        // r(λ) tends to F(1/3) = 2/9 from below.
        let lam = BitString::empty();
        let at_end = r.approx(12, &lam);
        let target = BigRational::new(BigInt::from(2), BigInt::from(9));
        assert!(at_end.to_rational() <= target);
        let p_lam = m.approx(12, &lam).to_rational(); // p̂ close to 1/3
        let f_of_phat = &p_lam - &p_lam * &p_lam; // F at the stage value
        assert!(
            at_end.to_rational()
                >= f_of_phat - BigRational::new(BigInt::one(), BigInt::from(1u64 << 40))
        );
        // Pointwise domination m/(qd) <= r + slack.
        let q = d("2");
        for n in 0..=12u32 {
            for s in m.support(n) {
                let lhs = m.approx(n, &s).div(&q, 80, Round::Up);
                let rhs = r.approx(n, &s).add(&Dyadic::two_pow(-(prec.bits() as i64)));
                assert!(lhs <= rhs, "domination failed at stage {n} for {s:?}");
            }
        }
        // Stage value 0 maps to 0.
        assert!(r.approx(0, &lam).is_zero());
        // Monotone in stage.
        for s in m.support(12) {
            for n in 1..=12u32 {
                assert!(r.approx(n, &s) >= r.approx(n - 1, &s));
            }
        }
        assert!(r.stage_mass(12) <= Dyadic::one());
    }

    #[test]
    fn tewcr_branch_error() {
        // A semimeasure with a stage value above x*(2) = 1/2 must be
        // rejected; plant one at λ via the splice.
        let log = sdvm_log(6);
        let r = LowerSemimeasure::from_p_hat(Arc::clone(&log));
        let planted = r
            .ceps_transform(0, vec![d("9/16"); 7])
            .expect("mass still fine");
        let err = planted.tewcr_transform(&d("2"), 1, Precision::default());
        assert!(matches!(err, Err(SemimeasureError::Branch(_))));
        assert!(matches!(
            r.tewcr_transform(&d("1"), 1, Precision::default()),
            Err(SemimeasureError::Range(_))
        ));
    }

    #[test]
    fn domination_examples() {
        let log = Arc::new(EnumerationLog::sdvm_exhaustive(12));
        let r_k = LowerSemimeasure::from_k_hat(Arc::clone(&log));
        let r_p = LowerSemimeasure::from_p_hat(Arc::clone(&log));
        // 2^{-K̂} <= P̂ pointwise: c = 1 never falsified.
        let rep = check_domination(&r_k, &r_p, &Dyadic::one(), 12, 1 << 10);
        assert_eq!(
            rep.verdict,
            DominationVerdict::NotFalsified { vacuous: false }
        );
        // c = 2 against exact 2^{-K}: violated at λ (2·(1/3) > 1/4).
        let rep2 = check_domination(&r_p, &r_k, &d("2"), 12, 1 << 10);
        match rep2.verdict {
            DominationVerdict::Violated { ref witness, .. } => assert!(witness.is_empty()),
            other => panic!("expected violation, got {other:?}"),
        }
        // c = 0 is vacuous.
        let rep3 = check_domination(&r_p, &r_k, &Dyadic::zero(), 4, 64);
        assert_eq!(
            rep3.verdict,
            DominationVerdict::NotFalsified { vacuous: true }
        );
    }

    #[test]
    fn sqy_small_instance() {
        // q = 2, y = 1/4 on a modest exhaustive log; the full-scale
        // instance lives in the acceptance suite.
        let prec = Precision::default();
        let log = Arc::new(EnumerationLog::sdvm_exhaustive(14));
        let r = LowerSemimeasure::from_p_hat(log);
        let y = d("1/4");
        let stream = vec![y.clone(); r.max_stage() as usize + 1];
        let (m, report, artifacts) = sqy_construct(&r, &d("2"), &stream, &y, prec).unwrap();
        // x0 encloses (2+sqrt 2)/4; c = 1/8.
        let x0_expected =
            crate::numerics::parse_rational("0.85355339059327376220042218105242451964").unwrap();
        assert!(artifacts.x0.contains_rational(&x0_expected));
        assert_eq!(artifacts.c, d("1/8"));
        assert_eq!(report.c, "0.125");
        // a in (1/2, x0), S_q(m) contains 1/4, mass < 1.
        assert!(artifacts.a.lo() > &d("1/2"));
        assert!(artifacts.a.hi() < artifacts.x0.hi());
        assert!(artifacts.sq_m.contains(&y));
        assert!(m.stage_mass(m.max_stage()) < Dyadic::one());
        // Shift correctness: m(s) = r1(s - 1).
        let r1 = r.scale(&artifacts.c).unwrap();
        for s in m.support(m.max_stage()) {
            if s.is_empty() {
                continue;
            }
            let prev = s.predecessor().unwrap();
            assert_eq!(m.approx(m.max_stage(), &s), r1.approx(m.max_stage(), &prev));
        }
        // λ stream is monotone.
        let lam = BitString::empty();
        for n in 1..=m.max_stage() {
            assert!(m.approx(n, &lam) >= m.approx(n - 1, &lam));
        }
    }

    #[test]
    fn sqy_range_error() {
        let log = Arc::new(EnumerationLog::sdvm_exhaustive(10));
        let r = LowerSemimeasure::from_p_hat(log);
        let y = d("3/8"); // above q^{q/(1-q)} = 1/4 for q = 2
        let stream = vec![y.clone(); r.max_stage() as usize + 1];
        let err = sqy_construct(&r, &d("2"), &stream, &y, Precision::default());
        assert!(matches!(err, Err(SemimeasureError::Range(_))));
    }
}
