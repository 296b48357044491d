//! The iterative comb-extraction procedure with per-step instrumentation.
//!
//! Every quantitative step is recorded as a [`Check`] carrying two verdicts:
//! one against the thresholds at their nominal values and one against the
//! thresholds after the [`RelaxFactors`] are applied. Control flow follows the
//! relaxed thresholds; in strict mode all factors are 1 and the verdicts agree.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::constants::{self, ConstantsError};
use super::keyob::{self, KeyobError};
use crate::blockade::{self, Blockade};
use crate::cograph::{self, SearchLimits, TauParams, TauVerdict};
use crate::comb::{self, Comb, CombDefect};
use crate::graph::Graph;
use crate::k2::{self, K2Caps, K2Error, WitnessOptions};
use crate::numeric::{self, Comparison, Threshold};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LemmaError {
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error("tau must lie in (0, 1), got {0}")]
    BadTau(f64),
    #[error("blockade is not equicardinal")]
    NotEquicardinal,
    #[error("blockade lives on {blockade} vertices but the graph has {graph}")]
    HostMismatch { blockade: usize, graph: usize },
    #[error("blockade length {0} is below 2")]
    ShortBlockade(usize),
    #[error("bad relax factors: {0}")]
    BadRelax(String),
    #[error("strict mode refused; unmet: {unmet:?}; unverifiable: {unverifiable:?}")]
    Refused {
        unmet: Vec<String>,
        unverifiable: Vec<String>,
    },
}

/// Multipliers applied to the nominal thresholds in relaxed mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxFactors {
    /// On `|G|/t^d`, the per-step removal budget.
    pub scale: f64,
    /// On `|G|/t^{2d}`, the case split.
    pub delta: f64,
    /// On `|G|/t^{2d+2}`, the tooth width.
    pub width: f64,
    /// On `t^{1/8}`, the target comb length and the number of steps.
    pub len: f64,
}

impl Default for RelaxFactors {
    fn default() -> Self {
        RelaxFactors {
            scale: 1.0,
            delta: 1.0,
            width: 1.0,
            len: 1.0,
        }
    }
}

impl RelaxFactors {
    pub fn validate(&self) -> Result<(), LemmaError> {
        for (name, v) in [
            ("scale", self.scale),
            ("delta", self.delta),
            ("width", self.width),
            ("len", self.len),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LemmaError::BadRelax(format!("{name}={v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        *self == RelaxFactors::default()
    }
}

/// Parses `key=value` pairs separated by commas, e.g. `width=0.5,len=0.5`.
impl FromStr for RelaxFactors {
    type Err = LemmaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut f = RelaxFactors::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| LemmaError::BadRelax(format!("expected key=value, got {part:?}")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| LemmaError::BadRelax(format!("bad number {value:?}")))?;
            match key.trim() {
                "scale" => f.scale = v,
                "delta" => f.delta = v,
                "width" => f.width = v,
                "len" => f.len = v,
                other => return Err(LemmaError::BadRelax(format!("unknown key {other:?}"))),
            }
        }
        f.validate()?;
        Ok(f)
    }
}

impl fmt::Display for RelaxFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scale={},delta={},width={},len={}",
            self.scale, self.delta, self.width, self.len
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Mode {
    Strict,
    Relaxed(RelaxFactors),
}

impl Mode {
    fn factors(&self) -> RelaxFactors {
        match self {
            Mode::Strict => RelaxFactors::default(),
            Mode::Relaxed(f) => *f,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaParams {
    pub k: usize,
    pub d: f64,
    pub tau: f64,
    pub t: usize,
    pub big_k: f64,
    pub l0: u64,
    pub tau0: f64,
}

impl LemmaParams {
    pub fn new(k: usize, d: f64, tau: f64, t: usize) -> Result<Self, LemmaError> {
        let c = constants::compute_constants(k, d)?;
        if !(tau > 0.0 && tau < 1.0) {
            return Err(LemmaError::BadTau(tau));
        }
        Ok(LemmaParams {
            k,
            d,
            tau,
            t,
            big_k: c.big_k,
            l0: c.l0,
            tau0: c.tau0,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcedureOptions {
    pub mode: Mode,
    /// Total number of steps, including those after the main phase.
    pub work_limit: usize,
    /// Run the key-observation oracle on a successful comb.
    pub check_keyob: bool,
    /// Never draw a tooth from the block containing `a_u`.
    pub exclude_home_block: bool,
    pub caps: K2Caps,
    /// Largest block on which Case (i) computes an explicit cograph.
    pub cograph_limit: usize,
    pub limits: SearchLimits,
    /// Largest host on which `W_G` is computed exhaustively.
    pub w_g_limit: usize,
}

impl Default for ProcedureOptions {
    fn default() -> Self {
        ProcedureOptions {
            mode: Mode::Relaxed(RelaxFactors::default()),
            work_limit: 100_000,
            check_keyob: false,
            exclude_home_block: false,
            caps: K2Caps::default(),
            cograph_limit: 24,
            limits: SearchLimits::default(),
            w_g_limit: 12,
        }
    }
}

/// Threshold values as used by one of the two verdicts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// `|G|/t^d`.
    pub budget: f64,
    /// `|G|/t^{2d}`.
    pub delta: f64,
    /// `|G|/t^{2d+2}`.
    pub tooth: f64,
    /// Width demanded of the first admitted apex.
    pub first: f64,
    /// `t^{1/8}`.
    pub length: f64,
    /// `⌈t^{1/8}⌉`.
    pub steps: usize,
}

#[derive(Clone, Debug)]
struct Levels {
    budget: Threshold,
    delta: Threshold,
    tooth: Threshold,
    first: Threshold,
    length: Threshold,
    steps: usize,
}

impl Levels {
    fn new(n: usize, t: usize, d: f64, f: &RelaxFactors) -> Levels {
        let budget = Threshold::ratio_power(n, t, d).scaled(f.scale);
        let delta = Threshold::ratio_power(n, t, 2.0 * d).scaled(f.delta);
        let tooth = Threshold::ratio_power(n, t, 2.0 * d + 2.0).scaled(f.width);
        let first = delta.times_rational(&BigRational::new(BigInt::from(2), BigInt::from(3 * t)));
        let first = if first.value() >= tooth.value() {
            first
        } else {
            tooth.clone()
        };
        let length = Threshold::real((t as f64).powf(0.125)).scaled(f.len);
        let steps = length.ceil_count().max(1);
        Levels {
            budget,
            delta,
            tooth,
            first,
            length,
            steps,
        }
    }

    fn summary(&self) -> Thresholds {
        Thresholds {
            budget: self.budget.value(),
            delta: self.delta.value(),
            tooth: self.tooth.value(),
            first: self.first.value(),
            length: self.length.value(),
            steps: self.steps,
        }
    }
}

/// One recorded inequality. `value` is compared against each bound; boolean
/// checks carry no bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub strict_bound: Option<f64>,
    pub relaxed_bound: Option<f64>,
    pub strict: Comparison,
    pub relaxed: Comparison,
}

impl Check {
    fn flag(name: &str, ok: bool) -> Check {
        let c = Comparison::exact(ok);
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            strict_bound: None,
            relaxed_bound: None,
            strict: c,
            relaxed: c,
        }
    }

    /// `count ≤ bound`.
    fn at_most(name: &str, count: usize, strict: &Threshold, relaxed: &Threshold) -> Check {
        Check {
            name: name.into(),
            value: count as f64,
            strict_bound: Some(strict.value()),
            relaxed_bound: Some(relaxed.value()),
            strict: strict.bounds(count),
            relaxed: relaxed.bounds(count),
        }
    }

    /// `count < bound`.
    fn below(name: &str, count: usize, strict: &Threshold, relaxed: &Threshold) -> Check {
        Check {
            name: name.into(),
            value: count as f64,
            strict_bound: Some(strict.value()),
            relaxed_bound: Some(relaxed.value()),
            strict: strict.exceeds(count),
            relaxed: relaxed.exceeds(count),
        }
    }

    /// `count ≥ bound`.
    fn at_least(name: &str, count: usize, strict: &Threshold, relaxed: &Threshold) -> Check {
        Check {
            name: name.into(),
            value: count as f64,
            strict_bound: Some(strict.value()),
            relaxed_bound: Some(relaxed.value()),
            strict: strict.reached_by(count),
            relaxed: relaxed.reached_by(count),
        }
    }

    /// `value < bound` on reals.
    fn real_below(name: &str, value: f64, strict: f64, relaxed: f64) -> Check {
        Check {
            name: name.into(),
            value,
            strict_bound: Some(strict),
            relaxed_bound: Some(relaxed),
            strict: numeric::lt(value, strict),
            relaxed: numeric::lt(value, relaxed),
        }
    }

    fn real_above(name: &str, value: f64, strict: f64, relaxed: f64) -> Check {
        Check {
            name: name.into(),
            value,
            strict_bound: Some(strict),
            relaxed_bound: Some(relaxed),
            strict: numeric::gt(value, strict),
            relaxed: numeric::gt(value, relaxed),
        }
    }

    pub fn passes(&self, relaxed: bool) -> bool {
        if relaxed {
            self.relaxed.holds
        } else {
            self.strict.holds
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepCase {
    /// `Δ_u ≥ |G|/t^{2d}`.
    Case1,
    Case2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectedApex {
    /// 1-based layer.
    pub layer: u32,
    /// Position inside the layer.
    pub index: usize,
    pub apex: usize,
    /// 0-based block the tooth is drawn from.
    pub block: usize,
    pub tooth: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub u: usize,
    pub a_u: usize,
    pub delta: usize,
    pub r: VertexSet,
    /// `E(a_u, R_u)`.
    pub neighbourhood: VertexSet,
    pub case: StepCase,
    /// Step taken after the main phase, while `Δ_u > 0`.
    pub tail: bool,
    /// Non-neighbours of `a_u` in `R_u` with a neighbour in `E(a_u, R_u)`.
    pub removed: usize,
    pub next_size: usize,
    /// Apex count per layer.
    pub layer_sizes: Vec<usize>,
    /// The `l` of Case 1, capped by the number of layers built.
    pub l: Option<u32>,
    /// `|I_α|` for `α = 1..=l`.
    pub i_sizes: Vec<usize>,
    pub selected: Vec<SelectedApex>,
    pub s1: usize,
    pub s2: usize,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum KeyobStatus {
    Passed,
    NotApplicable { reason: String },
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CombCertificate {
    pub step: usize,
    /// The vertex `b` whose neighbourhood hosts the apexes.
    pub b: usize,
    pub comb: Comb,
    pub blocks: Vec<usize>,
    pub defect: Option<CombDefect>,
    pub minor: bool,
    pub keyob: Option<KeyobStatus>,
    pub checks: Vec<Check>,
}

impl CombCertificate {
    pub fn is_valid(&self) -> bool {
        self.defect.is_none() && self.minor && self.checks.iter().all(|c| c.relaxed.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseOneCertificate {
    /// `E(a_u, R_u)` for `u = 1..=⌈t^{1/8}⌉`.
    pub blocks: Vec<VertexSet>,
    pub sizes: Vec<usize>,
    pub pairwise_anticomplete: bool,
    /// `Σ |E_u|^τ`.
    pub tau_sum: f64,
    /// `(|G|/t^{2d})^τ · ⌈t^{1/8}⌉`.
    pub tau_lower: f64,
    pub n_tau: f64,
    /// A cograph union of largest cographs of the blocks, when all blocks are small.
    pub explicit_cograph: Option<Vec<usize>>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseTwoCertificate {
    pub r_star: usize,
    pub neighbourhood_sum: usize,
    pub removed_sum: usize,
    pub apex_count: usize,
    pub residual: usize,
    /// The four measured ratios over `|R_{⌈t^{1/8}⌉}|`.
    pub ratios: [f64; 4],
    /// `t^{−d−1/2+2dτ}`, `c·t^{−1/2+2dτ}`, `2|G|^{τ−1}t^{d−1/2}`.
    pub terms: [f64; 3],
    pub term_sum: f64,
    /// The last displayed form, with `|G|^{−(d+1)τ}·2^{d+1/2}` as third term.
    pub final_form: f64,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetReason {
    IterationCap,
    WorkLimit,
    ResidualEmpty,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    Comb(CombCertificate),
    CaseOne(CaseOneCertificate),
    CaseTwo(CaseTwoCertificate),
    BudgetExhausted { reason: BudgetReason, steps: usize },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Comb(_) => "comb",
            Outcome::CaseOne(_) => "case-one",
            Outcome::CaseTwo(_) => "case-two",
            Outcome::BudgetExhausted { .. } => "budget-exhausted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreStatus {
    Met,
    Unmet,
    Unverifiable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Precondition {
    pub name: String,
    pub status: PreStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionTrace {
    pub params: LemmaParams,
    pub mode: Mode,
    pub n: usize,
    pub width: usize,
    pub strict: Thresholds,
    pub relaxed: Thresholds,
    pub preconditions: Vec<Precondition>,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
}

impl ConstructionTrace {
    /// `(u, name)` of every step check failing the chosen verdict.
    pub fn failed_checks(&self, relaxed: bool) -> Vec<(usize, String)> {
        self.steps
            .iter()
            .flat_map(|s| {
                s.checks
                    .iter()
                    .filter(|c| !c.passes(relaxed))
                    .map(move |c| (s.u, c.name.clone()))
            })
            .collect()
    }

    pub fn check_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.steps
            .iter()
            .flat_map(move |s| s.checks.iter().filter(move |c| c.name == name))
    }
}

struct Ctx<'a> {
    g: &'a Graph,
    b: &'a Blockade,
    p: &'a LemmaParams,
    opts: &'a ProcedureOptions,
    strict: Levels,
    relaxed: Levels,
    /// `|A|`.
    a_size: usize,
    width: usize,
    t: usize,
}

enum StepResult {
    Continue(VertexSet),
    Success(Box<CombCertificate>),
}

/// Runs the construction on `(g, b)` and returns its trace.
pub fn main_lemma_procedure(
    g: &Graph,
    b: &Blockade,
    p: &LemmaParams,
    opts: &ProcedureOptions,
) -> Result<ConstructionTrace, LemmaError> {
    if b.host_size() != g.n() {
        return Err(LemmaError::HostMismatch {
            blockade: b.host_size(),
            graph: g.n(),
        });
    }
    if !b.is_equicardinal() {
        return Err(LemmaError::NotEquicardinal);
    }
    if b.len() < 2 {
        return Err(LemmaError::ShortBlockade(b.len()));
    }
    let factors = opts.mode.factors();
    factors.validate()?;
    let strict_mode = opts.mode == Mode::Strict;
    let preconditions = preconditions(g, b, p, opts, strict_mode);
    if strict_mode {
        let unmet: Vec<String> = preconditions
            .iter()
            .filter(|c| c.status == PreStatus::Unmet)
            .map(|c| c.name.clone())
            .collect();
        let unverifiable: Vec<String> = preconditions
            .iter()
            .filter(|c| c.status == PreStatus::Unverifiable)
            .map(|c| c.name.clone())
            .collect();
        if !unmet.is_empty() || !unverifiable.is_empty() {
            return Err(LemmaError::Refused {
                unmet,
                unverifiable,
            });
        }
    }
    let t = b.len();
    let n = g.n();
    let ctx = Ctx {
        g,
        b,
        p,
        opts,
        strict: Levels::new(n, t, p.d, &RelaxFactors::default()),
        relaxed: Levels::new(n, t, p.d, &factors),
        a_size: b.union().len(),
        width: b.width().expect("nonempty blockade"),
        t,
    };
    let (steps, outcome) = run(&ctx);
    Ok(ConstructionTrace {
        params: p.clone(),
        mode: opts.mode,
        n,
        width: ctx.width,
        strict: ctx.strict.summary(),
        relaxed: ctx.relaxed.summary(),
        preconditions,
        steps,
        outcome,
    })
}

fn run(ctx: &Ctx) -> (Vec<StepRecord>, Outcome) {
    let g = ctx.g;
    let u_max = ctx.relaxed.steps;
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut r = ctx.b.union();
    let mut blocks: Vec<VertexSet> = Vec::new();
    for u in 0..u_max {
        if steps.len() >= ctx.opts.work_limit {
            return (
                steps,
                Outcome::BudgetExhausted {
                    reason: BudgetReason::WorkLimit,
                    steps: u,
                },
            );
        }
        if r.is_empty() {
            return (
                steps,
                Outcome::BudgetExhausted {
                    reason: BudgetReason::ResidualEmpty,
                    steps: u,
                },
            );
        }
        let (record, result) = step(ctx, u, &r, &blocks, false);
        blocks.push(record.neighbourhood.clone());
        steps.push(record);
        match result {
            StepResult::Success(cert) => return (steps, Outcome::Comb(*cert)),
            StepResult::Continue(next) => r = next,
        }
    }
    if r.is_empty() {
        return (
            steps,
            Outcome::BudgetExhausted {
                reason: BudgetReason::ResidualEmpty,
                steps: u_max,
            },
        );
    }
    let (a, delta) = g.max_degree_in(&r).expect("nonempty residual");
    if ctx.relaxed.delta.reached_by(delta).holds {
        let mut e_blocks: Vec<VertexSet> = blocks[1..].to_vec();
        e_blocks.push(g.neighborhood(a, &r));
        return (steps, Outcome::CaseOne(case_one(ctx, e_blocks)));
    }
    let r_star = r.len();
    let mut tail: Vec<StepRecord> = Vec::new();
    let mut u = u_max;
    while let Ok((_, delta)) = g.max_degree_in(&r) {
        if delta == 0 {
            break;
        }
        if steps.len() + tail.len() >= ctx.opts.work_limit {
            steps.extend(tail);
            return (
                steps,
                Outcome::BudgetExhausted {
                    reason: BudgetReason::WorkLimit,
                    steps: u,
                },
            );
        }
        let (record, result) = step(ctx, u, &r, &blocks, true);
        blocks.push(record.neighbourhood.clone());
        tail.push(record);
        match result {
            StepResult::Continue(next) => r = next,
            StepResult::Success(_) => unreachable!("tail steps never run Case 1"),
        }
        u += 1;
    }
    let cert = case_two(ctx, r_star, &tail, r.len());
    steps.extend(tail);
    (steps, Outcome::CaseTwo(cert))
}

fn neighbours_of(g: &Graph, x: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.n());
    x.iter().for_each(|v| out.union_with(g.neighbors(v)));
    out
}

fn step(
    ctx: &Ctx,
    u: usize,
    r: &VertexSet,
    blocks: &[VertexSet],
    tail: bool,
) -> (StepRecord, StepResult) {
    let g = ctx.g;
    let (s, x) = (&ctx.strict, &ctx.relaxed);
    let (a, delta) = g.max_degree_in(r).expect("nonempty residual");
    let c = g.neighborhood(a, r);
    let mut d_set = r.difference(&c);
    d_set.remove(a);
    let hit_by_c = neighbours_of(g, &c);
    let w_set = d_set.intersection(&hit_by_c);
    let next = d_set.difference(&hit_by_c);
    let case = if !tail && x.delta.reached_by(delta).holds {
        StepCase::Case1
    } else {
        StepCase::Case2
    };
    let mut record = StepRecord {
        u,
        a_u: a,
        delta,
        r: r.clone(),
        neighbourhood: c.clone(),
        case,
        tail,
        removed: w_set.len(),
        next_size: next.len(),
        layer_sizes: Vec::new(),
        l: None,
        i_sizes: Vec::new(),
        selected: Vec::new(),
        s1: 0,
        s2: 0,
        checks: vec![Check::below("degree-budget", delta, &s.budget, &x.budget)],
    };
    let c_const = constants::comb_constant();
    let quarter = (ctx.t as f64).powf(0.25);
    match case {
        StepCase::Case1 => {
            if let Some(cert) = case_one_step(ctx, &mut record, &c, &d_set, &w_set) {
                return (record, StepResult::Success(Box::new(cert)));
            }
            let removed = Check::at_most(
                "removed",
                w_set.len(),
                &Threshold::real(s.budget.value() * quarter),
                &Threshold::real(x.budget.value() * quarter),
            );
            record.checks.push(removed);
        }
        StepCase::Case2 => {
            let sqrt_form = Threshold::real(c_const * ((g.n() * delta) as f64).sqrt());
            record.checks.push(Check::at_most(
                "removed-case2-sqrt",
                w_set.len(),
                &sqrt_form,
                &sqrt_form,
            ));
            record.checks.push(Check::at_most(
                "removed-case2",
                w_set.len(),
                &Threshold::real(c_const * s.budget.value()),
                &Threshold::real(c_const * x.budget.value()),
            ));
        }
    }
    let per_step = |lv: &Levels| lv.budget.value() + 1.0 + lv.budget.value() * quarter;
    let r_step = |lv: &Levels| r.len() as f64 - per_step(lv);
    record.checks.push(Check::at_least(
        "r-step",
        next.len(),
        &Threshold::real(r_step(s)),
        &Threshold::real(r_step(x)),
    ));
    let induction = |lv: &Levels| ctx.a_size as f64 - per_step(lv) * (u + 1) as f64;
    record.checks.push(Check::at_least(
        "induction",
        next.len(),
        &Threshold::real(induction(s)),
        &Threshold::real(induction(x)),
    ));
    let nested = next.is_subset(r) && r.contains(a) && !next.contains(a) && next.len() < r.len();
    record.checks.push(Check::flag("nesting", nested));
    let mut closed = c.clone();
    closed.insert(a);
    record.checks.push(Check::flag(
        "anticomplete-next",
        neighbours_of(g, &closed).is_disjoint(&next),
    ));
    let earlier_ok = blocks.iter().all(|e| neighbours_of(g, e).is_disjoint(&c));
    record
        .checks
        .push(Check::flag("anticomplete-blocks", earlier_ok));
    (record, StepResult::Continue(next))
}

/// Layers, the `I_l, …, I_1` selection and either a comb or the Case 1 bounds.
fn case_one_step(
    ctx: &Ctx,
    record: &mut StepRecord,
    c: &VertexSet,
    d_set: &VertexSet,
    w_set: &VertexSet,
) -> Option<CombCertificate> {
    let g = ctx.g;
    let (s, x) = (&ctx.strict, &ctx.relaxed);
    let delta = record.delta;
    let layers = comb::build_layers(g, c, d_set, delta);
    record.layer_sizes = layers.layers.iter().map(|l| l.apexes.len()).collect();
    let observed = layers.check_observations(g);
    record.checks.push(Check::at_most(
        "observations",
        observed.len(),
        &Threshold::integer(0),
        &Threshold::integer(0),
    ));
    let defining_l = largest_l(delta, &x.delta);
    let l = defining_l.min(layers.layers.len() as u32);
    record.l = Some(l);
    // (2/3)^l Δ ≥ (2/3)|G|/t^{2d}, equivalent to the definition of l.
    let lhs = numeric::two_thirds_pow(delta, defining_l);
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    let cmp = |lv: &Levels| lv.delta.times_rational(&two_thirds).le_rational(&lhs);
    record.checks.push(Check {
        name: "l-definition".into(),
        value: numeric::rational_to_f64(&lhs),
        strict_bound: Some(s.delta.value() * 2.0 / 3.0),
        relaxed_bound: Some(x.delta.value() * 2.0 / 3.0),
        strict: cmp(s),
        relaxed: cmp(x),
    });

    let home = ctx.b.block_of(record.a_u);
    let mut used = vec![false; ctx.t];
    let mut hit = VertexSet::empty(g.n());
    let mut selected: Vec<SelectedApex> = Vec::new();
    let mut sel_union = VertexSet::empty(g.n());
    let mut s1_union = VertexSet::empty(g.n());
    let mut s2_union = VertexSet::empty(g.n());
    let (mut s1, mut s2) = (0usize, 0usize);
    let mut first_failed = false;
    let mut low_teeth = 0usize;
    for layer in layers.layers[..l as usize].iter().rev() {
        for m in (0..layer.apexes.len()).rev() {
            low_teeth += 1;
            let tooth = &layer.teeth[m];
            let apex = layer.apexes[m];
            let first = selected.is_empty();
            if !first && 2 * tooth.intersection_len(&hit) >= tooth.len() {
                s1 += 1;
                s1_union.union_with(tooth);
                continue;
            }
            let free = tooth.difference(&hit);
            let thr = if first { &x.first } else { &x.tooth };
            let block = (0..ctx.t).find(|&i| {
                !used[i]
                    && !(ctx.opts.exclude_home_block && home == Some(i))
                    && thr.reached_by(ctx.b.block(i).intersection_len(&free)).holds
            });
            match block {
                Some(i) => {
                    used[i] = true;
                    hit.union_with(g.neighbors(apex));
                    sel_union.union_with(tooth);
                    selected.push(SelectedApex {
                        layer: layer.s,
                        index: m,
                        apex,
                        block: i,
                        tooth: ctx.b.block(i).intersection(&free),
                    });
                }
                None => {
                    first_failed |= first;
                    s2 += 1;
                    s2_union.union_with(tooth);
                }
            }
        }
    }
    record.i_sizes = (1..=l)
        .map(|alpha| selected.iter().filter(|sa| sa.layer == alpha).count())
        .collect();
    record.s1 = s1;
    record.s2 = s2;
    record.selected = selected.clone();
    if x.length.reached_by(selected.len()).holds {
        return Some(comb_certificate(ctx, record, selected));
    }
    record
        .checks
        .push(Check::flag("first-admitted", !first_failed));

    // S_1: Σ_α 3·(2/3)^{α−1}Δ·(|I_α| + … + |I_l|).
    let mut s1_bound = BigRational::from_integer(BigInt::from(0));
    for alpha in 1..=l {
        let tail_count: usize = record.i_sizes[(alpha - 1) as usize..].iter().sum();
        s1_bound += numeric::two_thirds_pow(delta, alpha - 1)
            * BigRational::from_integer(BigInt::from(3 * tail_count));
    }
    let s1_thr = Threshold::rational(s1_bound);
    record
        .checks
        .push(Check::at_most("s1-union", s1_union.len(), &s1_thr, &s1_thr));

    // S_2: 2·(t·tooth·|S_2| + width·|I|), nominally 2·((3/2)|G|/t^d + (|G|/t^d)·|I|).
    let i_total = selected.len() as f64;
    let s2_strict = 2.0 * (1.5 * s.budget.value() + s.budget.value() * i_total);
    let s2_relaxed =
        2.0 * (ctx.t as f64 * x.tooth.value() * s2 as f64 + ctx.width as f64 * i_total);
    record.checks.push(Check::at_most(
        "s2-union",
        s2_union.len(),
        &Threshold::real(s2_strict),
        &Threshold::real(s2_relaxed),
    ));
    let count_bound = |lv: &Levels| ctx.a_size as f64 / (2.0 / 3.0 * lv.delta.value());
    record.checks.push(Check::at_most(
        "tooth-count",
        low_teeth,
        &Threshold::real(1.5 * (ctx.t as f64).powf(ctx.p.d + 1.0)),
        &Threshold::real(count_bound(x)),
    ));

    let mut low = VertexSet::empty(g.n());
    layers.layers[..l as usize]
        .iter()
        .for_each(|ly| low.union_with(&ly.covered));
    let mut high = VertexSet::empty(g.n());
    layers.layers[l as usize..]
        .iter()
        .for_each(|ly| high.union_with(&ly.covered));
    let partition_ok = sel_union.len() + s1_union.len() + s2_union.len() == low.len()
        && low.union(&high) == *w_set
        && low.is_disjoint(&high);
    record
        .checks
        .push(Check::flag("cover-identity", partition_ok));

    let k = ctx.p.big_k;
    let low_bound = |lv: &Levels| lv.budget.value() * ((3.0 + 4.5 * k) * lv.length.value() + 3.0);
    record.checks.push(Check::at_most(
        "low-layers",
        low.len(),
        &Threshold::real(low_bound(s)),
        &Threshold::real(low_bound(x)),
    ));
    let c_const = constants::comb_constant();
    let tail_delta = numeric::rational_to_f64(&numeric::two_thirds_pow(delta, l));
    let sqrt_form = Threshold::real(c_const * (g.n() as f64).sqrt() * tail_delta.sqrt());
    record.checks.push(Check::at_most(
        "high-layers-sqrt",
        high.len(),
        &sqrt_form,
        &sqrt_form,
    ));
    record.checks.push(Check::at_most(
        "high-layers",
        high.len(),
        &Threshold::real(c_const * s.budget.value()),
        &Threshold::real(c_const * x.budget.value()),
    ));
    let chain =
        |lv: &Levels| lv.budget.value() * ((3.0 + 4.5 * k) * lv.length.value() + 3.0 + c_const);
    record.checks.push(Check::at_most(
        "removed-chain",
        w_set.len(),
        &Threshold::real(chain(s)),
        &Threshold::real(chain(x)),
    ));
    None
}

/// Largest `l ≥ 1` with `(2/3)^{l−1}Δ ≥ thr`; assumes `Δ ≥ thr > 0`.
fn largest_l(delta: usize, thr: &Threshold) -> u32 {
    let mut l = 1u32;
    while thr.le_rational(&numeric::two_thirds_pow(delta, l)).holds {
        l += 1;
    }
    l
}

fn comb_certificate(
    ctx: &Ctx,
    record: &StepRecord,
    mut selected: Vec<SelectedApex>,
) -> CombCertificate {
    let g = ctx.g;
    selected.sort_by_key(|sa| sa.block);
    let w = selected.iter().map(|sa| sa.tooth.len()).min().unwrap_or(0);
    let comb = Comb {
        apexes: selected.iter().map(|sa| sa.apex).collect(),
        teeth: selected.iter().map(|sa| sa.tooth.take_lowest(w)).collect(),
    };
    let blocks: Vec<usize> = selected.iter().map(|sa| sa.block).collect();
    let all = ctx.b.union();
    let b = record.a_u;
    let cs = g.neighbors(b).intersection(&all);
    let mut ds = all.difference(g.neighbors(b));
    ds.remove(b);
    let k = ctx.relaxed.tooth.ceil_count().max(1);
    let defect = comb::check_comb_in(g, &comb, k, &cs, &ds).err();
    let minor = Blockade::from_sets(g.n(), comb.teeth.clone())
        .map(|t| t.is_minor_of(ctx.b))
        .unwrap_or(false)
        && blocks.windows(2).all(|p| p[0] < p[1]);
    let (s, x) = (&ctx.strict, &ctx.relaxed);
    let checks = vec![
        Check::at_least("comb-width", w, &s.tooth, &x.tooth),
        Check::at_least("comb-length", comb.len(), &s.length, &x.length),
        Check::flag("comb-equicardinal", comb.is_equicardinal()),
    ];
    let keyob = ctx.opts.check_keyob.then(|| keyob_status(ctx, b, &comb));
    CombCertificate {
        step: record.u,
        b,
        comb,
        blocks,
        defect,
        minor,
        keyob,
        checks,
    }
}

fn keyob_status(ctx: &Ctx, b: usize, c: &Comb) -> KeyobStatus {
    match keyob::comb_to_rainbow_minor(
        ctx.g,
        ctx.b,
        ctx.p.k,
        b,
        c,
        WitnessOptions::default(),
        ctx.opts.caps,
    ) {
        Ok(_) => KeyobStatus::Passed,
        Err(
            e @ (KeyobError::NotRainbowFree(_)
            | KeyobError::ToothInHomeBlock(_)
            | KeyobError::SmallK(_)
            | KeyobError::Oracle(_)),
        ) => KeyobStatus::NotApplicable {
            reason: e.to_string(),
        },
        Err(e) => KeyobStatus::Failed {
            reason: e.to_string(),
        },
    }
}

fn case_one(ctx: &Ctx, blocks: Vec<VertexSet>) -> CaseOneCertificate {
    let g = ctx.g;
    let tau = ctx.p.tau;
    let d = ctx.p.d;
    let t = ctx.t as f64;
    let (s, x) = (&ctx.strict, &ctx.relaxed);
    let sizes: Vec<usize> = blocks.iter().map(VertexSet::len).collect();
    let pairwise_anticomplete = blockade::is_pairwise_anticomplete(g, &blocks);
    let tau_sum: f64 = sizes.iter().map(|&m| (m as f64).powf(tau)).sum();
    let count = blocks.len() as f64;
    let tau_lower = x.delta.value().powf(tau) * count;
    let n_tau = (g.n() as f64).powf(tau);
    let mut checks: Vec<Check> = sizes
        .iter()
        .map(|&m| Check::at_least("block-size", m, &s.delta, &x.delta))
        .collect();
    checks.push(Check::flag("pairwise-anticomplete", pairwise_anticomplete));
    checks.push(Check::real_above(
        "tau-sum",
        tau_sum,
        s.delta.value().powf(tau) * count,
        tau_lower,
    ));
    checks.push(Check::real_above("exceeds-n-tau", tau_lower, n_tau, n_tau));
    checks.push(Check::real_above(
        "length-exponent",
        t.powf(0.125 - 2.0 * d * tau),
        1.0,
        1.0,
    ));
    let explicit_cograph = explicit_cograph(g, &blocks, ctx.opts.cograph_limit);
    if let Some(h) = &explicit_cograph {
        let set = VertexSet::from_iter_in(g.n(), h.iter().copied());
        checks.push(Check::flag(
            "explicit-cograph",
            cograph::is_cograph_on(g, &set).is_some(),
        ));
    }
    CaseOneCertificate {
        blocks,
        sizes,
        pairwise_anticomplete,
        tau_sum,
        tau_lower,
        n_tau,
        explicit_cograph,
        checks,
    }
}

/// Union of a largest induced cograph of each block; anticomplete blocks make
/// the union a cograph.
fn explicit_cograph(g: &Graph, blocks: &[VertexSet], limit: usize) -> Option<Vec<usize>> {
    let mut union = VertexSet::empty(g.n());
    for blk in blocks {
        union.union_with(&cograph::largest_cograph_in(g, blk, limit).ok()?);
    }
    Some(union.to_vec())
}

fn case_two(ctx: &Ctx, r_star: usize, tail: &[StepRecord], residual: usize) -> CaseTwoCertificate {
    let n = ctx.g.n() as f64;
    let t = ctx.t as f64;
    let (d, tau) = (ctx.p.d, ctx.p.tau);
    let (s, x) = (&ctx.strict, &ctx.relaxed);
    let neighbourhood_sum: usize = tail.iter().map(|st| st.delta).sum();
    let removed_sum: usize = tail.iter().map(|st| st.removed).sum();
    let apex_count = tail.len();
    let rs = r_star as f64;
    let ratios = [
        neighbourhood_sum as f64 / rs,
        removed_sum as f64 / rs,
        apex_count as f64 / rs,
        residual as f64 / rs,
    ];
    let c_const = constants::comb_constant();
    let terms = [
        t.powf(-d - 0.5 + 2.0 * d * tau),
        c_const * t.powf(-0.5 + 2.0 * d * tau),
        2.0 * n.powf(tau - 1.0) * t.powf(d - 0.5),
    ];
    let term_sum = terms.iter().sum();
    let final_form = terms[0] + terms[1] + n.powf(-(d + 1.0) * tau) * 2f64.powf(d + 0.5);
    let n_tau = n.powf(tau);
    let half = t.sqrt();
    let x_max = tail
        .iter()
        .map(|st| st.delta as f64 / rs)
        .fold(0.0, f64::max);
    let checks = vec![
        Check::flag(
            "partition",
            neighbourhood_sum + removed_sum + apex_count + residual == r_star,
        ),
        Check::at_least(
            "r-star",
            r_star,
            &Threshold::real(s.budget.value() * half),
            &Threshold::real(x.budget.value() * half),
        ),
        Check {
            name: "x-bound".into(),
            value: x_max,
            strict_bound: Some(t.powf(-d - 0.5)),
            relaxed_bound: Some(x.delta.value() / (x.budget.value() * half)),
            strict: numeric::le(x_max, t.powf(-d - 0.5)),
            relaxed: numeric::le(x_max, x.delta.value() / (x.budget.value() * half)),
        },
        Check::real_below("apexes-below-n-tau", apex_count as f64, n_tau, n_tau),
        Check::real_below("residual-below-n-tau", residual as f64, n_tau, n_tau),
        Check::real_below("term-sum", term_sum, 1.0, 1.0),
        Check::real_below("final-form", final_form, 1.0, 1.0),
    ];
    CaseTwoCertificate {
        r_star,
        neighbourhood_sum,
        removed_sum,
        apex_count,
        residual,
        ratios,
        terms,
        term_sum,
        final_form,
        checks,
    }
}

fn preconditions(
    g: &Graph,
    b: &Blockade,
    p: &LemmaParams,
    opts: &ProcedureOptions,
    expensive: bool,
) -> Vec<Precondition> {
    let n = g.n();
    let t = b.len();
    let width = b.width().expect("nonempty blockade");
    let budget = Threshold::ratio_power(n, t, p.d);
    let mut out = Vec::new();
    let mut push = |name: &str, status: PreStatus, detail: String| {
        out.push(Precondition {
            name: name.into(),
            status,
            detail,
        })
    };
    let met = |ok: bool| if ok { PreStatus::Met } else { PreStatus::Unmet };

    push(
        "equicardinal",
        met(b.is_equicardinal()),
        format!("sizes {:?}", b.sizes()),
    );
    let exact_width = budget.reached_by(width);
    let exact_width = exact_width.holds && budget.bounds(width).holds;
    push(
        "width",
        met(exact_width),
        format!("width {width}, |G|/t^d = {}", budget.value()),
    );
    let upper = 2.0 * (n as f64).powf(1.0 / p.d);
    let length_ok = t as u64 >= p.l0 && numeric::le(t as f64, upper).holds;
    push(
        "length",
        met(length_ok),
        format!("t = {t}, L0 = {}, 2|G|^(1/d) = {upper}", p.l0),
    );
    let all = b.union();
    let max_deg = all.iter().map(|v| g.degree_in(v, &all)).max().unwrap_or(0);
    push(
        "degree",
        met(budget.exceeds(max_deg).holds),
        format!("max |E(a,A)| = {max_deg}"),
    );
    push(
        "tau",
        met(p.tau < p.tau0),
        format!("tau = {}, tau0 = {}", p.tau, p.tau0),
    );
    if !expensive {
        return out;
    }

    let delta = Threshold::ratio_power(n, t, 2.0 * p.d);
    match comb::compute_w_g(g, opts.w_g_limit) {
        Ok(w) => push(
            "w-g",
            met(delta.bounds(w).holds),
            format!("W_G = {w}, |G|/t^(2d) = {}", delta.value()),
        ),
        Err(e) => push("w-g", PreStatus::Unverifiable, e.to_string()),
    }
    let tau_result = TauParams::new(p.tau)
        .map_err(|e| e.to_string())
        .and_then(|tp| cograph::is_tau_critical(g, tp, opts.limits).map_err(|e| e.to_string()));
    match tau_result {
        Ok(report) => {
            let ok = report.verdict == TauVerdict::Critical;
            push("tau-critical", met(ok), format!("{:?}", report.verdict))
        }
        Err(e) => push("tau-critical", PreStatus::Unverifiable, e),
    }
    match k2::is_strongly_k2_free(g, p.k, WitnessOptions::default(), opts.caps) {
        Ok(v) => push("strongly-free", met(v.is_free()), format!("{v:?}")),
        Err(e @ K2Error::CapExceeded { .. }) => {
            push("strongly-free", PreStatus::Unverifiable, e.to_string())
        }
        Err(e) => push("strongly-free", PreStatus::Unmet, e.to_string()),
    }
    out
}

/// A defect found when replaying a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceDefect {
    pub step: Option<usize>,
    pub what: String,
}

/// Recomputes every step of a trace from the graph and blockade and reports
/// disagreements.
pub fn verify_trace(g: &Graph, b: &Blockade, trace: &ConstructionTrace) -> Vec<TraceDefect> {
    let mut out = Vec::new();
    let mut bad = |step: Option<usize>, what: String| out.push(TraceDefect { step, what });
    let mut expected_r = b.union();
    let mut seen: Vec<&VertexSet> = Vec::new();
    for st in &trace.steps {
        let u = Some(st.u);
        if st.r != expected_r {
            bad(u, "R_u does not match the recursion".into());
        }
        match g.max_degree_in(&st.r) {
            Ok((_, delta)) if delta == st.delta => {}
            _ => bad(u, "Δ_u is not the maximum degree in R_u".into()),
        }
        if !st.r.contains(st.a_u) || g.degree_in(st.a_u, &st.r) != st.delta {
            bad(u, "a_u does not attain Δ_u".into());
        }
        if st.neighbourhood != g.neighborhood(st.a_u, &st.r) {
            bad(u, "recorded neighbourhood differs from E(a_u, R_u)".into());
        }
        if seen
            .iter()
            .any(|e| !neighbours_of(g, e).is_disjoint(&st.neighbourhood))
        {
            bad(u, "neighbourhood not anticomplete to an earlier one".into());
        }
        let mut d_set = st.r.difference(&st.neighbourhood);
        d_set.remove(st.a_u);
        let next = d_set.difference(&neighbours_of(g, &st.neighbourhood));
        if next.len() != st.next_size || d_set.len() - next.len() != st.removed {
            bad(u, "removed set or R_{u+1} size disagrees".into());
        }
        for sa in &st.selected {
            if !sa.tooth.is_subset(b.block(sa.block)) || !sa.tooth.is_subset(g.neighbors(sa.apex)) {
                bad(u, format!("selected apex {} has an invalid tooth", sa.apex));
            }
        }
        seen.push(&st.neighbourhood);
        expected_r = next;
    }
    match &trace.outcome {
        Outcome::Comb(cert) => {
            let all = b.union();
            let mut ds = all.difference(g.neighbors(cert.b));
            ds.remove(cert.b);
            let cs = g.neighbors(cert.b).intersection(&all);
            if comb::check_comb_in(g, &cert.comb, 1, &cs, &ds).is_err() {
                bad(None, "comb does not validate".into());
            }
            let mut distinct = cert.blocks.clone();
            distinct.dedup();
            if distinct.len() != cert.blocks.len() {
                bad(None, "teeth share a block".into());
            }
        }
        Outcome::CaseOne(cert) => {
            if !blockade::is_pairwise_anticomplete(g, &cert.blocks) {
                bad(None, "Case (i) blocks are not pairwise anticomplete".into());
            }
        }
        Outcome::CaseTwo(cert) => {
            let total = cert.neighbourhood_sum + cert.removed_sum + cert.apex_count + cert.residual;
            if total != cert.r_star {
                bad(None, "Case (ii) partition does not add up".into());
            }
        }
        Outcome::BudgetExhausted { .. } => {}
    }
    out
}
