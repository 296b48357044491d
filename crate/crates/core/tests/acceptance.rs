//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! (visible with `--nocapture`) and then asserts it.

use std::time::{Duration, Instant};

use blockade_core::blockade::Blockade;
use blockade_core::comb::Comb;
use blockade_core::harness::{run_suite, RunReport, SuiteConfig, SuiteSpec};
use blockade_core::k2::{self, K2Caps, RainbowReading, WitnessOptions};
use blockade_core::lemma::{self, constants};
use blockade_core::{Graph, VertexSet};

fn report(id: u32, title: &str, pass: bool, detail: String) {
    println!(
        "[{}] criterion {id}: {title}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

fn suites(toml: &str) -> Vec<SuiteSpec> {
    SuiteConfig::from_toml(toml).expect("valid config").suite
}

fn run_all(toml: &str) -> Vec<RunReport> {
    suites(toml)
        .iter()
        .map(|s| run_suite(s).expect("suite runs"))
        .collect()
}

fn totals(reports: &[RunReport]) -> (u64, u64) {
    reports.iter().fold((0, 0), |(p, t), r| {
        (p + r.aggregate.passed, t + r.aggregate.trials)
    })
}

fn outcome(r: &RunReport, label: &str) -> u64 {
    r.aggregate.outcomes.get(label).copied().unwrap_or(0)
}

#[test]
fn criterion_1_cograph_oracle_equivalence() {
    let start = Instant::now();
    let config: String = (1..=6)
        .map(|n| {
            format!("[[suite]]\nname = \"n{n}\"\nexhaustive = {n}\ncheck = \"cograph-oracle\"\n")
        })
        .collect();
    let reports = run_all(&config);
    let (passed, trials) = totals(&reports);
    let at6 = &reports[5].aggregate;
    let secs = start.elapsed().as_secs_f64();
    let pass = passed == trials && at6.trials == 32_768 && at6.passed == 32_768 && secs < 60.0;
    report(
        1,
        "is_cograph agrees with the closure oracle on all graphs n <= 6",
        pass,
        format!(
            "{passed}/{trials} agree ({} at n=6, {} cographs), {secs:.2}s < 60s",
            at6.trials,
            outcome(&reports[5], "cograph")
        ),
    );
}

#[test]
fn criterion_2_homogeneous_set_bound() {
    let start = Instant::now();
    let r = &run_all(
        r#"
        [[suite]]
        name = "homogeneous"
        trials = 1000
        seed = 2
        check = "homogeneous"
        generator = { kind = "cograph-random", leaves = [4, 100], join_bias = 0.5 }
        "#,
    )[0];
    let sizes: Vec<u64> = r
        .lines
        .iter()
        .map(|l| l.detail["m"].as_u64().unwrap())
        .collect();
    let in_range = sizes.iter().all(|m| (4..=100).contains(m));
    let secs = start.elapsed().as_secs_f64();
    let pass = r.aggregate.passed == 1000 && in_range && secs < 30.0;
    report(
        2,
        "homogeneous set of size >= ceil(sqrt(m)) in random cographs",
        pass,
        format!(
            "{}/1000, m in [{}, {}], {secs:.2}s < 30s",
            r.aggregate.passed,
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap()
        ),
    );
}

#[test]
fn criterion_3_comb_or_bound_dichotomy() {
    let start = Instant::now();
    let r = &run_all(
        r#"
        [[suite]]
        name = "comb-or-bound"
        trials = 500
        seed = 3
        check = "comb-or-bound"
        gamma = 6.0
        d = 0.5
        generator = { kind = "bipartite", a = [1, 40], b = [1, 40], p = 0.15 }
        "#,
    )[0];
    let secs = start.elapsed().as_secs_f64();
    let pass = r.aggregate.passed == 500 && secs < 60.0;
    report(
        3,
        "comb_or_bound branch re-validates on random bipartite instances",
        pass,
        format!(
            "{}/500 ({} comb, {} bound), {secs:.2}s < 60s",
            r.aggregate.passed,
            outcome(r, "comb"),
            outcome(r, "bound")
        ),
    );
}

#[test]
fn criterion_4_layer_invariants() {
    let r = &run_all(
        r#"
        [[suite]]
        name = "layers"
        trials = 500
        seed = 4
        check = "layers"
        generator = { kind = "bipartite", a = [1, 40], b = [1, 40], p = 0.2 }
        "#,
    )[0];
    let violations: usize = r
        .lines
        .iter()
        .map(|l| l.detail["violations"].as_array().map_or(1, Vec::len))
        .sum();
    let layers: u64 = r
        .lines
        .iter()
        .map(|l| l.detail["layers"].as_u64().unwrap())
        .sum();
    report(
        4,
        "greedy layer observations hold",
        r.aggregate.passed == 500 && violations == 0,
        format!(
            "{}/500 runs, {layers} layers, {violations} violations",
            r.aggregate.passed
        ),
    );
}

#[test]
fn criterion_5_base_case() {
    let reports = run_all(
        r#"
        [[suite]]
        name = "s1"
        trials = 200
        seed = 5
        check = "base-case"
        s = 1
        generator = { kind = "rainbow-free-rejection", k = 2, blocks = 4, block_size = 4, extra = 4, p = 0.15, max_attempts = 1000 }

        [[suite]]
        name = "s2"
        trials = 20
        seed = 6
        check = "base-case"
        s = 2
        generator = { kind = "structured-rainbow-free", blocks = 128, width = 3, p_in = 0.3, p_cross = 0.5 }
        "#,
    );
    let dims_ok = |r: &RunReport, len: u64, div: u64| {
        r.lines.iter().all(|l| {
            let d = &l.detail;
            d["length"] == len
                && d["divisor"] == div
                && d["width"].as_u64().unwrap() * div >= d["input_width"].as_u64().unwrap()
        })
    };
    let (s1, s2) = (&reports[0], &reports[1]);
    let pass = s1.aggregate.passed == 200
        && s2.aggregate.passed == 20
        && dims_ok(s1, 2, 4)
        && dims_ok(s2, 4, 128);
    report(
        5,
        "pure blockade with a cograph pattern from rainbow (2 choose 2)-free input",
        pass,
        format!(
            "s=1: {}/200, s=2: {}/20",
            s1.aggregate.passed, s2.aggregate.passed
        ),
    );
}

/// Ten vertices in five blocks; anchor 0 sees apexes 2 and 4, whose teeth
/// sit in blocks {6, 7} and {8, 9}.
fn hand_built_keyob() -> bool {
    let g = Graph::new(10, &[(0, 2), (0, 4), (2, 6), (2, 7), (4, 8), (4, 9)]).unwrap();
    let b = Blockade::new(
        10,
        vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7], vec![8, 9]],
    )
    .unwrap();
    let c = Comb {
        apexes: vec![2, 4],
        teeth: vec![
            VertexSet::from_iter_in(10, [6, 7]),
            VertexSet::from_iter_in(10, [8, 9]),
        ],
    };
    let opts = WitnessOptions::default();
    let Ok(teeth) = lemma::comb_to_rainbow_minor(&g, &b, 3, 0, &c, opts, K2Caps::default()) else {
        return false;
    };
    k2::is_rainbow_k2_free(
        &g,
        &teeth,
        2,
        opts,
        RainbowReading::default(),
        K2Caps::default(),
    )
    .unwrap()
    .is_none()
}

#[test]
fn criterion_6_key_observation() {
    let r = &run_all(
        r#"
        [[suite]]
        name = "keyob"
        trials = 200
        seed = 7
        check = "keyob"
        generator = { kind = "keyob-instance", blocks = 7, block_size = 2, apexes = 2, noise = 0.05, max_attempts = 1000 }
        "#,
    )[0];
    let max_n = r
        .lines
        .iter()
        .map(|l| l.detail["n"].as_u64().unwrap())
        .max()
        .unwrap();
    let hand = hand_built_keyob();
    report(
        6,
        "teeth blockade is rainbow (2 choose 2)-free for k = 3",
        r.aggregate.passed == 200 && max_n <= 14 && hand,
        format!(
            "generated {}/200 (n <= {max_n}), hand-built {}",
            r.aggregate.passed,
            if hand { "ok" } else { "failed" }
        ),
    );
}

/// `3^{3/2} / (3/2 − √(3/2))` to 50 significant digits.
const FACT_CONSTANT_50: &str = "18.877586219651834053974810394293422673074862775124";

#[test]
fn criterion_7_constants() {
    let c = lemma::compute_constants(3, 2.0).unwrap();
    let k_ok = c.big_k == 2.0
        && constants::k_constant() == num_rational::BigRational::from_integer(2.into());
    let d1_ok = lemma::d_s(1) == 4u32.into();
    // Independent evaluation of both inequalities at L0 and L0 - 1.
    let reference: f64 = FACT_CONSTANT_50.parse().unwrap();
    let first = |l: f64| l.powf(0.25) - 12.0 * l.powf(0.125) - 3.0 - reference;
    let second = |l: f64| l - 2.0 * l.powf(0.125) * (5.0 + l.powf(0.25)) - l.sqrt();
    let l0 = c.l0 as f64;
    let bracket =
        first(l0) >= 0.0 && second(l0) >= 0.0 && (first(l0 - 1.0) < 0.0 || second(l0 - 1.0) < 0.0);
    let self_check = c.l0_check == [true, true] && c.l0_minus_one_check.contains(&false);
    let constant_err = (c.comb_constant - reference).abs();
    let pass = k_ok && d1_ok && bracket && self_check && c.l0_exact && constant_err < 1e-9;
    report(
        7,
        "K, D_1, bracketed L0 and the comb-bound constant",
        pass,
        format!(
            "K = {}, D_1 = {}, L0 = {} (f(L0) = {:.3e}, f(L0-1) = {:.3e}), |c - ref| = {constant_err:.1e} < 1e-9",
            c.big_k,
            lemma::d_s(1),
            c.l0,
            first(l0),
            first(l0 - 1.0)
        ),
    );
}

#[test]
fn criterion_8_main_lemma_traces() {
    let reports = run_all(
        r#"
        [[suite]]
        name = "planted"
        trials = 100
        seed = 8
        check = "lemma"
        k = 3
        d = 2.0
        tau = 0.01
        time_limit_ms = 10000
        generator = { kind = "planted-comb", t = 32, width = 15, apexes = 8, tooth_size = 3, noise = 0.01 }

        [[suite]]
        name = "sparse"
        trials = 100
        seed = 9
        check = "lemma"
        k = 3
        d = 2.0
        tau = 0.01
        relax = { scale = 4.0, len = 3.0 }
        time_limit_ms = 10000
        generator = { kind = "sparse-blockade", t = 16, width = 30, p = 0.01, max_degree = 3 }
        "#,
    );
    let (planted, sparse) = (&reports[0], &reports[1]);
    let sizes_ok = reports
        .iter()
        .flat_map(|r| &r.lines)
        .all(|l| l.detail["n"].as_u64().unwrap() <= 500 && l.detail["t"].as_u64().unwrap() <= 32);
    let clean = |r: &RunReport| {
        r.lines.iter().all(|l| {
            ["broken", "unsupported", "defects"]
                .iter()
                .all(|k| l.detail[k].as_array().is_some_and(Vec::is_empty))
        })
    };
    let invariants_ok = clean(planted) && clean(sparse);
    let combs = outcome(planted, "comb");
    let steps: u64 = sparse
        .lines
        .iter()
        .map(|l| l.detail["steps"].as_u64().unwrap())
        .sum();
    let slowest = Duration::from_millis(
        reports
            .iter()
            .map(|r| r.aggregate.max_trial_ms)
            .max()
            .unwrap(),
    );
    let pass = sizes_ok
        && invariants_ok
        && sparse.aggregate.passed == 100
        && combs >= 95
        && slowest < Duration::from_secs(10);
    report(
        8,
        "relaxed-mode trace invariants and planted-comb recovery",
        pass,
        format!(
            "planted: {combs}/100 validated combs (>= 95), sparse: {}/100 clean over {steps} steps, slowest run {slowest:?} < 10s",
            sparse.aggregate.passed
        ),
    );
}

#[test]
fn criterion_9_complement_symmetry() {
    let mut config = String::new();
    for k in [2, 3] {
        for n in 1..=5 {
            config += &format!("[[suite]]\nname = \"k{k}-n{n}\"\nexhaustive = {n}\ncheck = \"symmetry\"\nk = {k}\n");
        }
        for n in [6, 7] {
            config += &format!(
                "[[suite]]\nname = \"k{k}-n{n}\"\ntrials = 1000\nseed = {}\ncheck = \"symmetry\"\nk = {k}\n\
                 generator = {{ kind = \"gnp\", n = {n}, p = 0.5 }}\n",
                10 * k + n
            );
        }
    }
    let reports = run_all(&config);
    let (passed, trials) = totals(&reports);
    let free: u64 = reports.iter().map(|r| outcome(r, "free")).sum();
    report(
        9,
        "strong (k choose 2)-freeness verdict matches the complement's",
        passed == trials && reports.len() == 14,
        format!("{passed}/{trials} graphs ({free} strongly free), k in {{2, 3}}, exhaustive n <= 5, 1000 samples at n = 6, 7"),
    );
}
