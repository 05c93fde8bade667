//! Acceptance report. Prints one PASS/FAIL line per criterion.
//!
//! Exits successfully even when a criterion fails so the rest of the test
//! run is unaffected; set `ACCEPTANCE_STRICT=1` to turn any FAIL into a
//! non-zero exit.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twentyq_core::arena::{self, BatchConfig, Kg20qPlayer, RunMetrics, SimAnswerer, SimAnswererConfig, Strategy};
use twentyq_core::catalog::{load_catalog_file, preprocess, PreprocessOptions};
use twentyq_core::scoring::{combined_score, era_log_likelihood};
use twentyq_core::{Answer, AnswerSignal, Belief, EngineConfig, EstimatorConfig, Knowledge, LearnedStats};

const WARMUP_GAMES: usize = 50;
const WARMUP_SEED: u64 = 50;
const FLIP_GAMES: usize = 500;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, name: &str, pass: bool, detail: String, started: Instant) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "{} {name}: {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
}

fn reference() -> Knowledge {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/reference_catalog.json");
    let raw = load_catalog_file(&path).expect("reference catalog loads");
    Knowledge::new(preprocess(&raw, &PreprocessOptions::default()).expect("reference catalog preprocesses"))
}

/// Ten-term Gaussian log-density sum, sigma 10, mean birth year + 20.
fn era_oracle(decade_start: i32, birth_year: i32) -> f64 {
    let ln_norm = -(10.0f64.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln());
    let mut total = 0.0;
    let mut year = decade_start;
    while year < decade_start + 10 {
        let gap = (year - birth_year - 20) as f64;
        total += ln_norm - gap * gap / 200.0;
        year += 1;
    }
    total
}

fn ids(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn equation_oracles() -> (bool, String) {
    let mut notes = Vec::new();
    let est = EstimatorConfig::default();

    let eq1 = combined_score(0.5, 0.25, &est);
    let eq1_ok = (eq1 - 0.3).abs() < 1e-12;
    notes.push(format!("blend {eq1:.12}"));

    let mut eq2_ok = true;
    for (birth, expected) in [(1990, -44.640), (1975, -32.640)] {
        let got = era_log_likelihood("1990s", Some(birth), &est).unwrap();
        let oracle = era_oracle(1990, birth);
        eq2_ok &= (got - expected).abs() < 1e-3 && (got - oracle).abs() < 1e-9;
        notes.push(format!("era prior({birth}) {got:.3}"));
    }

    let two = Belief::from_weights([("A", 0.5), ("B", 0.5)]).unwrap();
    let signal = AnswerSignal {
        yes_set: ids(&["A"]),
        no_set: ids(&["B"]),
        kind: Answer::Yes,
    };
    let next = two.apply_answer(&signal, 1.0).unwrap();
    // The five-digit figures are the rounded hand evaluation e²/(e²+1); the
    // 1e-6 tolerance is applied against that expression itself.
    let e2 = 7.389_056_098_930_65_f64;
    let (oracle_a, oracle_b) = (e2 / (e2 + 1.0), 1.0 / (e2 + 1.0));
    let eq5_ok = (next.prob("A") - oracle_a).abs() < 1e-6
        && (next.prob("B") - oracle_b).abs() < 1e-6
        && format!("{:.5}/{:.5}", next.prob("A"), next.prob("B")) == "0.88080/0.11920";
    notes.push(format!("update {:.7}/{:.7}", next.prob("A"), next.prob("B")));

    let four = Belief::from_weights([("A", 0.4), ("B", 0.3), ("C", 0.2), ("D", 0.1)]).unwrap();
    let after = four.eliminate_and_redistribute(&ids(&["A"])).unwrap();
    let share = 0.4 / 3.0;
    let shares_ok = after.prob("A") == 0.0
        && [("B", 0.3), ("C", 0.2), ("D", 0.1)]
            .iter()
            .all(|(id, p)| (after.prob(id) - (p + share)).abs() < 1e-15);
    // exact in real arithmetic; binary rounding leaves a few ulps
    let pairs = [("B", "C"), ("C", "D"), ("B", "D")];
    let diffs_ok = pairs
        .iter()
        .all(|(x, y)| ((after.prob(x) - after.prob(y)) - (four.prob(x) - four.prob(y))).abs() <= 1e-15);
    notes.push(format!("redistribution B {:.4}", after.prob("B")));

    let checks = [
        ("blend", eq1_ok),
        ("era prior", eq2_ok),
        ("update", eq5_ok),
        ("shares", shares_ok),
        ("differences", diffs_ok),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if !failed.is_empty() {
        notes.push(format!("failed: {}", failed.join(" ")));
    }
    (failed.is_empty(), notes.join(", "))
}

fn normalization_fuzz() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut worst = 0.0f64;
    let mut negative = 0usize;
    let mut steps = 0usize;
    for seq in 0..10_000 {
        let n = rng.random_range(1..=500);
        let names: Vec<String> = (0..n).map(|i| format!("s{seq}-{i}")).collect();
        let mut belief = if rng.random_bool(0.5) {
            Belief::uniform(names.iter().cloned()).unwrap()
        } else {
            Belief::from_weights(names.iter().map(|s| (s.clone(), rng.random_range(1e-6..1.0)))).unwrap()
        };
        for _ in 0..rng.random_range(1..=25) {
            steps += 1;
            if rng.random_bool(0.75) {
                let kind = [Answer::Yes, Answer::No, Answer::Maybe][rng.random_range(0..3)];
                let signal = if kind == Answer::Maybe {
                    AnswerSignal::maybe()
                } else {
                    let cut = rng.random_range(0.0..1.0);
                    let (yes, no): (Vec<&String>, Vec<&String>) = names.iter().partition(|_| rng.random_bool(cut));
                    AnswerSignal {
                        yes_set: yes.into_iter().cloned().collect(),
                        no_set: no.into_iter().cloned().collect(),
                        kind,
                    }
                };
                belief = belief.apply_answer(&signal, 1.0).unwrap();
            } else {
                let positive: Vec<&str> = belief.iter().filter(|(_, p)| *p > 0.0).map(|(id, _)| id).collect();
                if positive.len() < 2 {
                    continue;
                }
                let k = rng.random_range(1..positive.len().min(6));
                let rejected: BTreeSet<String> = (0..k)
                    .map(|_| positive[rng.random_range(0..positive.len())].to_string())
                    .collect();
                belief = belief.eliminate_and_redistribute(&rejected).unwrap();
            }
            worst = worst.max((belief.total() - 1.0).abs());
            negative += belief.iter().filter(|(_, p)| *p < 0.0).count();
        }
    }
    (
        worst < 1e-9 && negative == 0,
        format!("10000 sequences, {steps} steps, max |sum-1| {worst:.2e}, negative entries {negative}"),
    )
}

fn fault_tolerance(k: &Knowledge, stats: &LearnedStats, cfg: &EngineConfig) -> (bool, String) {
    let targets: Vec<&str> = k.catalog.ids().collect();
    let mut games = 0usize;
    let mut kept = 0usize;
    let mut eliminated = [0usize; 2];
    let mut attempt = 0u64;
    while games < FLIP_GAMES {
        let target = targets[attempt as usize % targets.len()];
        let seed = arena::derive_seed(&[b"flip", &attempt.to_le_bytes()]);
        attempt += 1;
        let mut outcomes = Vec::new();
        for strategy in Strategy::ALL {
            outcomes.push(arena::forced_flip_game(strategy, k, stats, cfg, target, None, seed).unwrap());
        }
        // only games where every strategy heard the lie count
        if outcomes.iter().any(|(_, flipped)| !flipped) {
            continue;
        }
        games += 1;
        eliminated[0] += usize::from(!outcomes[0].0.true_movie_survived);
        eliminated[1] += usize::from(!outcomes[1].0.true_movie_survived);
        kept += usize::from(outcomes[2].0.true_movie_survived);
    }
    (
        kept == games && eliminated == [games, games],
        format!(
            "{games} games ({attempt} drawn): kg20q kept the true movie in {kept}, baseline1 eliminated it in {}, baseline2 in {}",
            eliminated[0], eliminated[1]
        ),
    )
}

fn zero_error(k: &Knowledge, stats: &LearnedStats, cfg: &EngineConfig) -> (bool, String) {
    let mut solved = 0usize;
    let mut total = 0usize;
    for (i, target) in k.catalog.ids().enumerate() {
        let seed = i as u64;
        let mut player = Kg20qPlayer::new(k, cfg, stats.clone(), None, seed).unwrap();
        let mut answerer = SimAnswerer::new(SimAnswererConfig::truthful(target, seed));
        let outcome = arena::play_game(&mut player, &mut answerer, k).unwrap();
        total += 1;
        solved += usize::from(outcome.solved_at.is_some());
    }
    let rate = solved as f64 / total as f64;
    (
        rate >= 0.95,
        format!("{solved}/{total} targets solved ({:.1}%)", rate * 100.0),
    )
}

fn ordering(m: &RunMetrics) -> (bool, String) {
    let b1 = m.buckets(Strategy::Baseline1);
    let b2 = m.buckets(Strategy::Baseline2);
    let kg = m.buckets(Strategy::Kg20q);
    let pass = kg.under_10 > b2.under_10
        && b2.under_10 > b1.under_10
        && kg.unsolved < b1.unsolved
        && kg.unsolved < b2.unsolved;
    (
        pass,
        format!(
            "<10: kg20q {} / baseline2 {} / baseline1 {} (published 127/72/37); unsolved: kg20q {} / baseline2 {} / baseline1 {} (published 23/46/66)",
            kg.under_10, b2.under_10, b1.under_10, kg.unsolved, b2.unsolved, b1.unsolved
        ),
    )
}

fn rank_curves(m: &RunMetrics) -> (bool, String) {
    let curve = |s| m.rank_cumulative(s);
    let monotone = Strategy::ALL.iter().all(|&s| curve(s).windows(2).all(|w| w[0] <= w[1]));
    let kg = curve(Strategy::Kg20q);
    let dominates = [Strategy::Baseline1, Strategy::Baseline2]
        .iter()
        .all(|&b| kg.iter().zip(curve(b)).all(|(x, y)| *x > y));
    let fmt = |c: [f64; 5]| c.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>().join(" ");
    (
        monotone && dominates,
        format!(
            "kg20q [{}] baseline2 [{}] baseline1 [{}] (published kg20q 0.564 .. 0.860)",
            fmt(kg),
            fmt(curve(Strategy::Baseline2)),
            fmt(curve(Strategy::Baseline1))
        ),
    )
}

fn core_manifest_is_standalone() -> (bool, String) {
    let manifest = include_str!("../Cargo.toml");
    let foreign = ["gateway", "playui", "axum", "tokio"]
        .into_iter()
        .filter(|name| manifest.contains(name))
        .collect::<Vec<_>>();
    (
        foreign.is_empty(),
        if foreign.is_empty() {
            "suite built from the core crate alone; no service or UI dependency".to_string()
        } else {
            format!("core manifest mentions {foreign:?}")
        },
    )
}

fn main() -> ExitCode {
    // libtest-style flags from `cargo test` are accepted and ignored
    let mut report = Report { failures: 0 };
    println!("acceptance report");

    let t = Instant::now();
    let (ok, detail) = equation_oracles();
    report.line("equation oracles", ok, detail, t);

    let t = Instant::now();
    let (ok, detail) = normalization_fuzz();
    report.line("normalization fuzz", ok, detail, t);

    let k = reference();
    let cfg = EngineConfig::default();
    let stats = arena::warmup(&LearnedStats::new(), &k, &cfg, WARMUP_GAMES, WARMUP_SEED).unwrap();

    let t = Instant::now();
    let (ok, detail) = fault_tolerance(&k, &stats, &cfg);
    report.line("fault tolerance", ok, detail, t);

    let t = Instant::now();
    let (ok, detail) = zero_error(&k, &stats, &cfg);
    report.line("zero-error identification", ok, detail, t);

    let t = Instant::now();
    let batch = BatchConfig::default();
    let first = arena::run_batch(&k, &stats, &cfg, &batch).unwrap();
    let (ok, detail) = ordering(&first);
    report.line("comparative ordering", ok, detail, t);

    let t = Instant::now();
    let (ok, detail) = rank_curves(&first);
    report.line("rank-cumulative ordering", ok, detail, t);

    let t = Instant::now();
    let again = arena::run_batch(&k, &stats, &cfg, &batch).unwrap();
    let (a, b) = (first.to_json(), again.to_json());
    report.line(
        "determinism",
        a == b,
        format!("two bench runs, {} byte JSON reports identical: {}", a.len(), a == b),
        t,
    );

    let t = Instant::now();
    let (ok, detail) = core_manifest_is_standalone();
    report.line("no secondary component", ok, detail, t);

    println!("{}", first.render_table());
    println!("{} criteria failed", report.failures);
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && report.failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
