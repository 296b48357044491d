//! Batch runs of a generator and a check over many derived seeds.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use super::derive_seed;
use super::gen::{generate, GeneratorSpec, Instance};
use crate::blockade::Blockade;
use crate::cograph::{self, Homogeneity};
use crate::comb::{self, CombOrBound};
use crate::graph::Graph;
use crate::k2::{self, K2Caps, RainbowReading, StrongVerdict, WitnessOptions};
use crate::lemma::{self, LemmaParams, Mode, Outcome, ProcedureOptions, RelaxFactors};
use crate::numeric;
use crate::oracle;
use crate::set::VertexSet;

/// Largest `n` for which the closure oracle is tabulated.
pub const ORACLE_MAX_N: usize = 7;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot parse suite config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("suite `{suite}`: {what}")]
    Invalid { suite: String, what: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckSpec {
    /// `is_cograph` against the closure oracle.
    CographOracle {},
    /// The extracted homogeneous set of a random cograph.
    Homogeneous {},
    /// `comb_or_bound` on a bipartite instance, branch re-validated.
    CombOrBound {
        gamma: f64,
        d: f64,
    },
    /// `build_layers` observations, plus agreement with the plain oracle.
    Layers {},
    BaseCase {
        s: u32,
    },
    /// `comb_to_rainbow_minor` with `k = 3`, output re-checked for `k = 2`.
    Keyob {},
    Lemma {
        k: usize,
        d: f64,
        tau: f64,
        #[serde(default)]
        relax: RelaxFactors,
        #[serde(default)]
        expect_comb: bool,
        #[serde(default)]
        time_limit_ms: Option<u64>,
    },
    /// Strong freeness verdict of `g` against that of its complement.
    Symmetry {
        k: usize,
    },
}

/// Suite keys and check keys share one table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Map<String, Value>")]
pub struct SuiteSpec {
    pub name: String,
    /// Defaults to every graph when `exhaustive` is set.
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    /// Enumerate all labelled graphs on this many vertices instead of generating.
    #[serde(default)]
    pub exhaustive: Option<usize>,
    #[serde(flatten)]
    pub check: CheckSpec,
}

// `flatten` does not reject unknown keys of unit variants, so split by hand.
impl TryFrom<Map<String, Value>> for SuiteSpec {
    type Error = String;

    fn try_from(mut m: Map<String, Value>) -> Result<Self, String> {
        fn take<T: serde::de::DeserializeOwned + Default>(
            m: &mut Map<String, Value>,
            key: &str,
        ) -> Result<T, String> {
            m.remove(key)
                .map(|v| serde_json::from_value(v).map_err(|e| format!("{key}: {e}")))
                .unwrap_or_else(|| Ok(T::default()))
        }
        let name: String = m
            .remove("name")
            .ok_or("missing field `name`")
            .and_then(|v| serde_json::from_value(v).map_err(|_| "name must be a string"))?;
        let trials = take(&mut m, "trials")?;
        let seed = take(&mut m, "seed")?;
        let generator = take(&mut m, "generator")?;
        let exhaustive = take(&mut m, "exhaustive")?;
        let check = serde_json::from_value(Value::Object(m)).map_err(|e| e.to_string())?;
        Ok(SuiteSpec {
            name,
            trials,
            seed,
            generator,
            exhaustive,
            check,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub suite: Vec<SuiteSpec>,
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self, SuiteError> {
        Ok(toml::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialLine {
    pub suite: String,
    pub index: u64,
    pub seed: u64,
    pub pass: bool,
    pub outcome: String,
    pub detail: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FailureRef {
    pub index: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub suite: String,
    pub spec: SuiteSpec,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub outcomes: BTreeMap<String, u64>,
    /// Failing trials, at most 50; each replays from the spec echo and its seed.
    pub failures: Vec<FailureRef>,
    pub max_trial_ms: u64,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub lines: Vec<TrialLine>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.aggregate.failed > 0
    }

    /// One JSON object per trial followed by the aggregate, newline separated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(&serde_json::to_string(l).expect("serialisable"));
            out.push('\n');
        }
        out.push_str(
            &serde_json::to_string(&json!({ "aggregate": self.aggregate })).expect("serialisable"),
        );
        out.push('\n');
        out
    }
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Graph whose edge `{lo, hi}` is present iff bit `hi(hi−1)/2 + lo` of `mask` is set.
pub fn decode_graph(n: usize, mask: u64) -> Graph {
    Graph::from_fn(n, |u, v| {
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        mask >> (hi * (hi - 1) / 2 + lo) & 1 == 1
    })
}

fn closure(n: usize) -> &'static HashSet<u64> {
    static TABLES: [OnceLock<HashSet<u64>>; ORACLE_MAX_N + 1] =
        [const { OnceLock::new() }; ORACLE_MAX_N + 1];
    TABLES[n].get_or_init(|| oracle::cograph_closure(n))
}

fn invalid(spec: &SuiteSpec, what: impl Into<String>) -> SuiteError {
    SuiteError::Invalid {
        suite: spec.name.clone(),
        what: what.into(),
    }
}

fn validate(spec: &SuiteSpec) -> Result<u64, SuiteError> {
    match (&spec.generator, spec.exhaustive) {
        (Some(_), Some(_)) => {
            return Err(invalid(
                spec,
                "set either generator or exhaustive, not both",
            ))
        }
        (None, None) => return Err(invalid(spec, "set a generator or exhaustive")),
        (None, Some(n)) => {
            if pair_count(n) > 24 {
                return Err(invalid(
                    spec,
                    format!("exhaustive enumeration on {n} vertices is too large"),
                ));
            }
            if !matches!(
                spec.check,
                CheckSpec::CographOracle {} | CheckSpec::Symmetry { .. }
            ) {
                return Err(invalid(
                    spec,
                    "exhaustive mode only feeds graph-only checks",
                ));
            }
        }
        (Some(_), None) => {}
    }
    if let CheckSpec::Lemma { relax, .. } = &spec.check {
        relax.validate().map_err(|e| invalid(spec, e.to_string()))?;
    }
    match (spec.trials, spec.exhaustive) {
        (Some(t), _) => Ok(t),
        (None, Some(n)) => Ok(1 << pair_count(n)),
        (None, None) => Err(invalid(spec, "trials is required with a generator")),
    }
}

/// Runs every trial of `spec`; trials are independent and run in parallel,
/// lines come back in index order.
pub fn run_suite(spec: &SuiteSpec) -> Result<RunReport, SuiteError> {
    let trials = validate(spec)?;
    let start = Instant::now();
    let lines: Vec<(TrialLine, u64)> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(spec.seed, index);
            let t0 = Instant::now();
            let res = match (&spec.generator, spec.exhaustive) {
                (Some(g), _) => generate(g, seed)
                    .map_err(|e| e.to_string())
                    .and_then(|inst| trial(&spec.check, &inst)),
                (None, Some(n)) => trial(&spec.check, &Instance::bare(decode_graph(n, index))),
                (None, None) => unreachable!("validated"),
            };
            let (pass, outcome, detail) = match res {
                Ok(r) => (r.pass, r.outcome, r.detail),
                Err(e) => (false, "error".to_string(), json!({ "error": e })),
            };
            let ms = t0.elapsed().as_millis() as u64;
            (
                TrialLine {
                    suite: spec.name.clone(),
                    index,
                    seed,
                    pass,
                    outcome,
                    detail,
                },
                ms,
            )
        })
        .collect();
    let mut outcomes = BTreeMap::new();
    lines
        .iter()
        .for_each(|(l, _)| *outcomes.entry(l.outcome.clone()).or_insert(0) += 1);
    let failures: Vec<FailureRef> = lines
        .iter()
        .filter(|(l, _)| !l.pass)
        .map(|(l, _)| FailureRef {
            index: l.index,
            seed: l.seed,
        })
        .collect();
    let aggregate = Aggregate {
        suite: spec.name.clone(),
        spec: spec.clone(),
        trials,
        passed: trials - failures.len() as u64,
        failed: failures.len() as u64,
        outcomes,
        failures: failures.into_iter().take(50).collect(),
        max_trial_ms: lines.iter().map(|(_, ms)| *ms).max().unwrap_or(0),
        wall_ms: start.elapsed().as_millis() as u64,
    };
    Ok(RunReport {
        lines: lines.into_iter().map(|(l, _)| l).collect(),
        aggregate,
    })
}

struct Verdict {
    pass: bool,
    outcome: String,
    detail: Value,
}

impl Verdict {
    fn new(pass: bool, outcome: &str, detail: Value) -> Result<Self, String> {
        Ok(Verdict {
            pass,
            outcome: outcome.to_string(),
            detail,
        })
    }
}

fn need<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T, String> {
    x.as_ref()
        .ok_or_else(|| format!("generator provides no {what}"))
}

fn trial(check: &CheckSpec, inst: &Instance) -> Result<Verdict, String> {
    let g = &inst.graph;
    match check {
        CheckSpec::CographOracle {} => {
            if g.n() > ORACLE_MAX_N {
                return Err(format!("closure oracle supports n ≤ {ORACLE_MAX_N}"));
            }
            let fast = cograph::is_cograph(g).map_err(|e| e.to_string())?;
            let slow = g.n() == 0 || closure(g.n()).contains(&oracle::encode(g));
            let tree_ok = match &fast {
                Some(t) => t.evaluate(g.n()).map_err(|e| e.to_string())? == *g,
                None => true,
            };
            let label = if slow { "cograph" } else { "non-cograph" };
            Verdict::new(
                fast.is_some() == slow && tree_ok,
                label,
                json!({ "n": g.n(), "edges": g.edge_count() }),
            )
        }
        CheckSpec::Homogeneous {} => {
            let tree = need(&inst.cotree, "cotree")?;
            let h = cograph::homogeneous_in_cograph(tree);
            let m = tree.leaf_count();
            let set = VertexSet::from_iter_in(g.n(), h.vertices.iter().copied());
            let homogeneous = match h.kind {
                Homogeneity::Clique => g.is_clique(&set),
                Homogeneity::Anticlique => g.is_independent(&set),
            };
            let size = set.len();
            let big_enough = size * size >= m;
            let detail = json!({ "m": m, "size": size, "kind": h.kind });
            Verdict::new(
                homogeneous && big_enough && size == h.vertices.len(),
                "homogeneous",
                detail,
            )
        }
        CheckSpec::CombOrBound { gamma, d } => {
            let (a, b) = need(&inst.sides, "sides")?;
            match comb::comb_or_bound(g, a, b, *gamma, *d) {
                Ok(res) => {
                    let ok = comb::verify_comb_or_bound(g, a, b, *gamma, *d, &res);
                    let (label, detail) = match &res {
                        CombOrBound::Comb {
                            comb,
                            t,
                            required_width,
                            ..
                        } => {
                            let valid = comb::validate_comb(g, comb, comb.width())
                                && numeric::ge(comb.width() as f64, *required_width).holds;
                            return Verdict::new(
                                ok && valid,
                                "comb",
                                json!({ "t": t, "width": comb.width(), "required_width": required_width }),
                            );
                        }
                        CombOrBound::Bound {
                            b_size,
                            delta,
                            bound,
                            boundary,
                        } => (
                            "bound",
                            json!({ "b_size": b_size, "delta": delta, "bound": bound, "boundary": boundary }),
                        ),
                    };
                    Verdict::new(ok, label, detail)
                }
                Err(e) => Verdict::new(false, "unresolved", json!({ "error": e.to_string() })),
            }
        }
        CheckSpec::Layers {} => {
            let (a, b) = need(&inst.sides, "sides")?;
            let delta = a.iter().map(|x| g.degree_in(x, b)).max().unwrap_or(0);
            let layers = comb::build_layers(g, a, b, delta);
            let violations = layers.check_observations(g);
            let plain = oracle::greedy_layers(g, &a.to_vec(), &b.to_vec(), delta);
            let agrees = plain.len() == layers.layers.len()
                && plain.iter().zip(&layers.layers).all(|(p, l)| {
                    p.len() == l.apexes.len()
                        && p.iter()
                            .zip(l.apexes.iter().zip(&l.teeth))
                            .all(|((pa, pt), (la, lt))| pa == la && *pt == lt.to_vec())
                });
            let detail =
                json!({ "delta": delta, "layers": layers.layers.len(), "violations": violations });
            Verdict::new(violations.is_empty() && agrees, "layers", detail)
        }
        CheckSpec::BaseCase { s } => {
            let b = need(&inst.blockade, "blockade")?;
            match lemma::pure_blockade_from_rainbow22(g, b, *s, K2Caps::default()) {
                Ok(p) => {
                    let detail = json!({
                        "length": p.blockade.len(),
                        "width": p.blockade.width().unwrap_or(0),
                        "input_width": p.input_width,
                        "divisor": p.divisor,
                        "pattern": p.pattern,
                    });
                    Verdict::new(p.verify(g, *s), "pure", detail)
                }
                Err(e) => Verdict::new(false, "rejected", json!({ "error": e.to_string() })),
            }
        }
        CheckSpec::Keyob {} => {
            let b = need(&inst.blockade, "blockade")?;
            let a = *need(&inst.anchor, "anchor")?;
            let c = need(&inst.comb, "comb")?;
            let opts = WitnessOptions::default();
            match lemma::comb_to_rainbow_minor(g, b, 3, a, c, opts, K2Caps::default()) {
                Ok(teeth) => {
                    let again = k2::is_rainbow_k2_free(
                        g,
                        &teeth,
                        2,
                        opts,
                        RainbowReading::default(),
                        K2Caps::default(),
                    )
                    .map_err(|e| e.to_string())?;
                    let detail = json!({ "n": g.n(), "teeth": teeth.len(), "violation": again });
                    Verdict::new(again.is_none(), "minor", detail)
                }
                Err(e) => Verdict::new(false, "rejected", json!({ "error": e.to_string() })),
            }
        }
        CheckSpec::Lemma {
            k,
            d,
            tau,
            relax,
            expect_comb,
            time_limit_ms,
        } => {
            let b = need(&inst.blockade, "blockade")?;
            lemma_trial(g, b, *k, *d, *tau, *relax, *expect_comb, *time_limit_ms)
        }
        CheckSpec::Symmetry { k } => {
            let caps = K2Caps::default();
            let opts = WitnessOptions::default();
            let v = k2::is_strongly_k2_free(g, *k, opts, caps).map_err(|e| e.to_string())?;
            let w = k2::is_strongly_k2_free(&g.complement(), *k, opts, caps)
                .map_err(|e| e.to_string())?;
            // The complement's verdict must mirror this one: a violation found only
            // in the complement of g is the violation found in g's complement itself.
            let mirrored = match (&v, &w) {
                (StrongVerdict::Free, StrongVerdict::Free) => true,
                (
                    StrongVerdict::ViolationInComplement { violation: x },
                    StrongVerdict::ViolationInG { violation: y },
                ) => x == y,
                (
                    StrongVerdict::ViolationInG { violation: x },
                    StrongVerdict::ViolationInComplement { violation: y },
                ) => x == y,
                (StrongVerdict::ViolationInG { .. }, StrongVerdict::ViolationInG { .. }) => true,
                _ => false,
            };
            let label = if v.is_free() { "free" } else { "not-free" };
            Verdict::new(
                v.is_free() == w.is_free() && mirrored,
                label,
                json!({ "n": g.n(), "k": k }),
            )
        }
    }
}

/// Invariants that hold unconditionally, and those that follow from the degree premise.
const UNCONDITIONAL: [&str; 2] = ["nesting", "anticomplete-blocks"];
const DEGREE_BOUNDED: [&str; 2] = ["r-step", "induction"];

/// Failed invariant checks as `step:name`. A degree-bounded failure is
/// unsupported rather than broken once some step so far exceeded the relaxed
/// degree budget.
fn invariant_failures(trace: &lemma::ConstructionTrace) -> (Vec<String>, Vec<String>) {
    let mut broken = Vec::new();
    let mut unsupported = Vec::new();
    let mut premise = true;
    for (u, step) in trace.steps.iter().enumerate() {
        let failed = |name: &str| {
            step.checks
                .iter()
                .any(|c| c.name == name && !c.passes(true))
        };
        premise &= !failed("degree-budget");
        for name in UNCONDITIONAL {
            if failed(name) {
                broken.push(format!("{u}:{name}"));
            }
        }
        for name in DEGREE_BOUNDED {
            if failed(name) {
                if premise {
                    &mut broken
                } else {
                    &mut unsupported
                }
                .push(format!("{u}:{name}"));
            }
        }
    }
    (broken, unsupported)
}

#[allow(clippy::too_many_arguments)]
fn lemma_trial(
    g: &Graph,
    b: &Blockade,
    k: usize,
    d: f64,
    tau: f64,
    relax: RelaxFactors,
    expect_comb: bool,
    time_limit_ms: Option<u64>,
) -> Result<Verdict, String> {
    let params = LemmaParams::new(k, d, tau, b.len()).map_err(|e| e.to_string())?;
    let opts = ProcedureOptions {
        mode: Mode::Relaxed(relax),
        ..ProcedureOptions::default()
    };
    let t0 = Instant::now();
    let trace = lemma::main_lemma_procedure(g, b, &params, &opts).map_err(|e| e.to_string())?;
    let ms = t0.elapsed().as_millis() as u64;
    let defects: Vec<String> = lemma::verify_trace(g, b, &trace)
        .into_iter()
        .map(|d| d.what)
        .collect();
    let (broken, unsupported) = invariant_failures(&trace);
    let comb_ok = match &trace.outcome {
        Outcome::Comb(cert) => {
            cert.is_valid()
                && cert
                    .comb
                    .teeth
                    .iter()
                    .all(|t| blockade_index(b, t).is_some())
                && distinct_blocks(b, cert)
        }
        _ => !expect_comb,
    };
    let in_time = time_limit_ms.is_none_or(|limit| ms < limit);
    let detail = json!({
        "n": g.n(),
        "t": b.len(),
        "steps": trace.steps.len(),
        "ms": ms,
        "defects": defects,
        "broken": broken,
        "unsupported": unsupported,
    });
    Verdict::new(
        defects.is_empty() && broken.is_empty() && comb_ok && in_time,
        trace.outcome.label(),
        detail,
    )
}

fn blockade_index(b: &Blockade, tooth: &VertexSet) -> Option<usize> {
    let first = tooth.first()?;
    let i = b.block_of(first)?;
    tooth.is_subset(b.block(i)).then_some(i)
}

fn distinct_blocks(b: &Blockade, cert: &lemma::CombCertificate) -> bool {
    let mut seen = HashSet::new();
    cert.comb
        .teeth
        .iter()
        .all(|t| blockade_index(b, t).is_some_and(|i| seen.insert(i)))
}

impl Instance {
    pub(crate) fn bare(graph: Graph) -> Self {
        Instance {
            graph,
            blockade: None,
            sides: None,
            cotree: None,
            anchor: None,
            comb: None,
            attempts: 0,
        }
    }
}
