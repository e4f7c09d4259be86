//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use refdecomp::catalog::{list_rules, MatchContext};
use refdecomp::equivalence::{seed_for, Oracle};
use refdecomp::harness::{self, EvalConfig, GenerateConfig};
use refdecomp::syntax::{method_tokens, Token, TokenKind};
use refdecomp::synth::random_method;
use refdecomp::{
    check_equivalent, decompose_pair, parse_method, print_method, token_delta, verify_trace, DecomposeConfig,
    DecompositionTrace, EvalSummary, Verdict,
};

fn report(n: u32, ok: bool, detail: impl AsRef<str>) {
    println!("criterion {n}: {} {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
}

fn seeds_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/seeds")
}

// ---- 1 ----------------------------------------------------------------------

/// LCS length straight from its recursive definition, memoized.
fn reference_lcs(a: &[Token], b: &[Token]) -> usize {
    fn go(a: &[Token], b: &[Token], i: usize, j: usize, memo: &mut Vec<Vec<Option<usize>>>) -> usize {
        if i == a.len() || j == b.len() {
            return 0;
        }
        if let Some(v) = memo[i][j] {
            return v;
        }
        let v = if a[i] == b[j] {
            1 + go(a, b, i + 1, j + 1, memo)
        } else {
            go(a, b, i + 1, j, memo).max(go(a, b, i, j + 1, memo))
        };
        memo[i][j] = Some(v);
        v
    }
    go(a, b, 0, 0, &mut vec![vec![None; b.len()]; a.len()])
}

fn random_tokens(rng: &mut ChaCha8Rng) -> Vec<Token> {
    let len = rng.gen_range(0..=40);
    let alphabet = rng.gen_range(1..=6);
    (0..len)
        .map(|_| match rng.gen_range(0..alphabet) {
            0 => Token::new(TokenKind::Separator, ";"),
            1 => Token::new(TokenKind::Operator, "+"),
            2 => Token::new(TokenKind::Identifier, "x"),
            3 => Token::new(TokenKind::IntLiteral, "1"),
            4 => Token::new(TokenKind::Keyword, "int"),
            _ => Token::new(TokenKind::StringLiteral, "\"x\""),
        })
        .collect()
}

#[test]
fn criterion_1_metric_matches_reference_lcs() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let (a, b) = (random_tokens(&mut rng), random_tokens(&mut rng));
        let common = reference_lcs(&a, &b);
        let d = token_delta(&a, &b);
        if d.added != b.len() - common || d.deleted != a.len() - common {
            mismatches += 1;
        }
    }
    let took = start.elapsed();
    let ok = mismatches == 0 && took < Duration::from_secs(30);
    report(1, ok, format!("10000 pairs, {mismatches} mismatches, {took:.2?}"));
    assert!(ok);
}

// ---- 2 ----------------------------------------------------------------------

#[test]
fn criterion_2_every_match_preserves_behavior() {
    let start = Instant::now();
    let per_method: Vec<(usize, Vec<String>)> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let m = random_method(seed);
            let oracle = Oracle::new(&m, 200, seed).unwrap();
            let cx = MatchContext::new(&m, None);
            let mut matches = 0;
            let mut violations = Vec::new();
            for rule in list_rules() {
                for (site, out) in cx.candidates(rule) {
                    matches += 1;
                    if !oracle.accepts(&out) {
                        violations.push(format!("method {seed}: {site}"));
                    }
                }
            }
            (matches, violations)
        })
        .collect();
    let matches: usize = per_method.iter().map(|p| p.0).sum();
    let violations: Vec<&String> = per_method.iter().flat_map(|p| &p.1).collect();
    let took = start.elapsed();
    let ok = violations.is_empty() && took < Duration::from_secs(600);
    report(
        2,
        ok,
        format!("1000 methods, {matches} matches, {} violations, {took:.2?}", violations.len()),
    );
    assert!(violations.is_empty(), "{violations:#?}");
    assert!(took < Duration::from_secs(600));
}

#[test]
fn cached_oracle_agrees_with_check_equivalent() {
    for seed in 0..30u64 {
        let m = random_method(seed);
        let oracle = Oracle::new(&m, 200, seed).unwrap();
        let cx = MatchContext::new(&m, None);
        for rule in list_rules() {
            for (_, out) in cx.candidates(rule).into_iter().take(2) {
                assert_eq!(oracle.check(&out).unwrap(), check_equivalent(&m, &out, 200, seed).unwrap());
            }
        }
    }
}

// ---- 3 ----------------------------------------------------------------------

#[test]
fn criterion_3_invertible_rules_round_trip() {
    let invertible: Vec<_> = list_rules().iter().filter(|r| r.invertible()).collect();
    let mut cycles: BTreeMap<&str, usize> = invertible.iter().map(|r| (r.id, 0)).collect();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seed = 0u64;
    while cycles.values().any(|&c| c < 100) && seed < 5000 {
        let m = random_method(10_000 + seed);
        seed += 1;
        let cx = MatchContext::new(&m, None);
        for rule in &invertible {
            let count = cycles.get_mut(rule.id).unwrap();
            if *count >= 100 {
                continue;
            }
            let mut cands = cx.candidates(rule);
            cands.shuffle(&mut rng);
            for (site, out) in cands.into_iter().take(3) {
                *count += 1;
                let inverse = rule.inverse_rule().unwrap();
                let restored = MatchContext::new(&out, Some(&m))
                    .candidates(inverse)
                    .into_iter()
                    .any(|(_, back)| method_tokens(&back) == method_tokens(&m));
                if !restored {
                    failures.push(format!("{site}\n{}", print_method(&m)));
                }
                if *count >= 100 {
                    break;
                }
            }
        }
    }
    let short: Vec<_> = cycles.iter().filter(|(_, &c)| c < 100).collect();
    let ok = failures.is_empty() && short.is_empty();
    report(
        3,
        ok,
        format!(
            "{} invertible rules, {} cycles, {} failures, {} rules under 100 cycles",
            invertible.len(),
            cycles.values().sum::<usize>(),
            failures.len(),
            short.len()
        ),
    );
    assert!(short.is_empty(), "too few cycles: {short:?}");
    assert!(failures.is_empty(), "{}", failures.join("\n----\n"));
}

// ---- 4, 5, 7: one generated corpus, evaluated twice --------------------------

struct Evaluation {
    corpus: tempfile::TempDir,
    first: tempfile::TempDir,
    second: tempfile::TempDir,
    summaries: Vec<EvalSummary>,
    first_took: Duration,
}

fn evaluation() -> &'static Evaluation {
    static EVAL: OnceLock<Evaluation> = OnceLock::new();
    EVAL.get_or_init(|| {
        let corpus = tempfile::tempdir().unwrap();
        let config = GenerateConfig {
            k_max: 5,
            n_pairs: 200,
            seed: 2024,
            ..GenerateConfig::default()
        };
        let generated = harness::generate_corpus(&seeds_dir(), corpus.path(), &config).unwrap();
        assert_eq!(generated.pairs.len(), 200, "skipped: {:?}", generated.skipped);
        let (first, second) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let start = Instant::now();
        let summaries = harness::eval_corpus(corpus.path(), first.path(), &EvalConfig::with_seed(11)).unwrap();
        let first_took = start.elapsed();
        harness::eval_corpus(corpus.path(), second.path(), &EvalConfig::with_seed(11)).unwrap();
        Evaluation {
            corpus,
            first,
            second,
            summaries,
            first_took,
        }
    })
}

fn summary<'a>(e: &'a Evaluation, tier: &str) -> &'a EvalSummary {
    e.summaries.iter().find(|s| s.tier_config == tier).unwrap()
}

#[test]
fn criterion_4_recovery_on_generated_corpus() {
    let e = evaluation();
    let (all, det) = (summary(e, "all"), summary(e, "detector"));
    let share = all.fully_decomposed as f64 / all.pairs as f64;
    let ok = all.pairs == 200
        && all.failures.is_empty()
        && share >= 0.9
        && all.mean_sim_final >= 0.95
        && det.mean_sim_final < all.mean_sim_final;
    report(
        4,
        ok,
        format!(
            "all tiers: {}/{} sim=1, mean {:.4}; detector only: mean {:.4}",
            all.fully_decomposed, all.pairs, all.mean_sim_final, det.mean_sim_final
        ),
    );
    assert!(ok);
}

#[test]
fn tier_dominance_per_pair() {
    let e = evaluation();
    let (all, det) = (summary(e, "all"), summary(e, "detector"));
    for (a, d) in all.rows.iter().zip(&det.rows) {
        assert_eq!(a.pair_id, d.pair_id);
        assert!(a.sim_final >= d.sim_final, "{}: {} < {}", a.pair_id, a.sim_final, d.sim_final);
    }
}

fn read_tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_5_monotone_and_deterministic() {
    let e = evaluation();
    let (first, second) = (read_tree(e.first.path()), read_tree(e.second.path()));
    let identical = first == second;
    let mut traces = 0;
    let mut bad = Vec::new();
    for (path, bytes) in &first {
        if path.extension().is_none_or(|x| x != "json") || !path.starts_with("traces") {
            continue;
        }
        traces += 1;
        let t: DecompositionTrace = serde_json::from_slice(bytes).unwrap();
        let mut last = t.baseline_delta_tokens;
        for s in &t.steps {
            if s.delta_before != last || s.delta_after >= s.delta_before {
                bad.push(format!("{}: {} at {}", t.pair_id, s.rule_id, s.path));
            }
            last = s.delta_after;
        }
        if last != t.residual_delta_tokens {
            bad.push(format!("{}: residual mismatch", t.pair_id));
        }
    }
    let ok = identical && bad.is_empty() && traces == 400;
    report(
        5,
        ok,
        format!(
            "{traces} traces, {} non-decreasing steps, reruns byte-identical: {identical}",
            bad.len()
        ),
    );
    assert!(ok, "{bad:?}");
}

#[test]
fn traces_reverify_against_snapshots() {
    let e = evaluation();
    let pairs = harness::read_corpus(e.corpus.path()).unwrap();
    for p in pairs.iter().step_by(10) {
        let (_, right) = p.load().unwrap();
        let path = e.first.path().join("traces/all").join(format!("{}.json", p.pair_id));
        let t: DecompositionTrace = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
        verify_trace(&t, &right, 200, 11).unwrap_or_else(|err| panic!("{}: {err}", p.pair_id));
    }
}

#[test]
fn generated_pairs_are_equivalent() {
    let e = evaluation();
    for p in harness::read_corpus(e.corpus.path()).unwrap() {
        let (left, right) = p.load().unwrap();
        let v = check_equivalent(&left, &right, 500, seed_for(&p.pair_id, 2024)).unwrap();
        assert_eq!(v, Verdict::Consistent, "{}", p.pair_id);
    }
}

// ---- 6 ----------------------------------------------------------------------

#[test]
fn criterion_6_degenerate_pairs() {
    let same = parse_method("int f(int x) { int y = x * 2; return y + 1; }").unwrap();
    let t = decompose_pair("same", &same, &same, &DecomposeConfig::default());
    let identical_ok = t.sim_final == 1.0 && t.steps.is_empty() && t.fully_decomposed;

    let left = parse_method("int f(int x) { return x + 1; }").unwrap();
    let right = parse_method("int f(int x) { return x + 2; }").unwrap();
    let t2 = decompose_pair("altered", &left, &right, &DecomposeConfig::default());
    let altered_ok = t2.steps.is_empty() && t2.sim_final == 0.0 && !t2.fully_decomposed;

    report(
        6,
        identical_ok && altered_ok,
        format!(
            "identical: sim {} with {} steps; x+1 vs x+2: sim {} with {} steps, fully decomposed {}",
            t.sim_final,
            t.steps.len(),
            t2.sim_final,
            t2.steps.len(),
            t2.fully_decomposed
        ),
    );
    assert!(identical_ok && altered_ok);
}

// ---- 7 ----------------------------------------------------------------------

#[test]
fn criterion_7_performance_envelope() {
    let e = evaluation();
    // The largest pair of the corpus that stays within 200 tokens.
    let mut largest: Option<(usize, String, refdecomp::MethodAst, refdecomp::MethodAst)> = None;
    for p in harness::read_corpus(e.corpus.path()).unwrap() {
        let (l, r) = p.load().unwrap();
        let size = method_tokens(&l).len().max(method_tokens(&r).len());
        if size <= 200 && largest.as_ref().is_none_or(|(s, ..)| size > *s) {
            largest = Some((size, p.pair_id.clone(), l, r));
        }
    }
    let (size, id, l, r) = largest.unwrap();
    let start = Instant::now();
    decompose_pair(&id, &l, &r, &DecomposeConfig::default());
    let single = start.elapsed();
    let ok = single <= Duration::from_secs(5) && e.first_took <= Duration::from_secs(600);
    report(
        7,
        ok,
        format!(
            "{size}-token pair in {single:.2?}; 200 pairs x 2 tier configs in {:.2?}",
            e.first_took
        ),
    );
    assert!(ok);
}
