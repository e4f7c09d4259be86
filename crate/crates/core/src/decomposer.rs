//! Decomposition of a Left→Right change into verified operations.
//!
//! Stage A unifies the method and parameter names. Stage B repeatedly
//! applies the catalog candidate that shrinks the token delta to Right the
//! most, as long as the result still behaves like Left.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, MatchContext, MatchSite, Tier};
use crate::diffmetric::{sim_from_totals, token_delta};
use crate::equivalence::{check_equivalent, seed_for, Oracle, Verdict, DEFAULT_SAMPLES};
use crate::syntax::{method_tokens, parse_method, print_method, MethodAst, NodePath, Token};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeConfig {
    pub tiers: Vec<Tier>,
    /// Beam width; 1 is plain greedy descent.
    pub beam: usize,
    pub max_steps: usize,
    /// Check every step against Left by differential execution.
    pub verify: bool,
    pub samples: usize,
    /// Base seed; the sampling seed of a pair also mixes in its id.
    pub seed: u64,
    /// Compare Left and Right before decomposing.
    pub precheck: bool,
    pub emit_snapshots: bool,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            tiers: vec![Tier::Detector, Tier::Extended],
            beam: 1,
            max_steps: 200,
            verify: true,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            precheck: true,
            emit_snapshots: false,
        }
    }
}

impl DecomposeConfig {
    pub fn detector_only() -> Self {
        DecomposeConfig {
            tiers: vec![Tier::Detector],
            ..Self::default()
        }
    }

    /// `detector` or `all`, as used in reports and file names.
    pub fn tier_label(&self) -> &'static str {
        tier_label(&self.tiers)
    }
}

pub fn tier_label(tiers: &[Tier]) -> &'static str {
    if tiers.contains(&Tier::Extended) {
        if tiers.contains(&Tier::Detector) {
            "all"
        } else {
            "extended"
        }
    } else {
        "detector"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule_id: String,
    pub path: NodePath,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, String>,
    pub delta_before: usize,
    pub delta_after: usize,
    pub stage: Stage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub pair_id: String,
    pub tier_config: String,
    pub sim_after_stage_a: f64,
    pub sim_final: f64,
    pub baseline_delta_tokens: usize,
    pub residual_delta_tokens: usize,
    pub fully_decomposed: bool,
    pub steps: Vec<Step>,
    /// Renames stage A could not perform.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    /// Set when Left and Right behave differently on some sampled input.
    #[serde(default)]
    pub not_equivalent_warning: bool,
    /// Printed Mid_0 = Left, then the method after each step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<Vec<String>>,
}

/// Token delta to a fixed target.
struct Target<'a> {
    method: &'a MethodAst,
    tokens: Vec<Token>,
}

impl<'a> Target<'a> {
    fn new(method: &'a MethodAst) -> Self {
        Target {
            method,
            tokens: method_tokens(method),
        }
    }

    fn delta(&self, m: &MethodAst) -> usize {
        token_delta(&method_tokens(m), &self.tokens).total()
    }
}

/// Accepts or rejects tentative steps.
enum Gate {
    Off,
    On(Oracle),
}

impl Gate {
    fn accepts(&self, m: &MethodAst) -> bool {
        match self {
            Gate::Off => true,
            Gate::On(o) => o.accepts(m),
        }
    }
}

struct Applied {
    site: MatchSite,
    result: MethodAst,
    delta_before: usize,
    delta_after: usize,
    stage: Stage,
}

impl Applied {
    fn step(&self) -> Step {
        Step {
            rule_id: self.site.rule_id.clone(),
            path: self.site.path.clone(),
            bindings: self.site.bindings.clone(),
            delta_before: self.delta_before,
            delta_after: self.delta_after,
            stage: self.stage,
        }
    }
}

/// Stage A: renames `left`'s method and, when arities agree, its
/// parameters to the names `right` uses. A rename is performed only when
/// the name is free and the rename shrinks the delta; other renames are
/// reported as skipped.
pub fn unify_names(left: &MethodAst, right: &MethodAst) -> (MethodAst, Vec<Step>, Vec<String>) {
    let target = Target::new(right);
    let (m, applied, skipped) = unify(left, &target, &Gate::Off);
    (m, applied.iter().map(Applied::step).collect(), skipped)
}

fn unify(left: &MethodAst, target: &Target, gate: &Gate) -> (MethodAst, Vec<Applied>, Vec<String>) {
    let right = target.method;
    let mut cur = left.clone();
    let mut applied = Vec::new();
    let mut skipped = Vec::new();
    let mut wanted: Vec<(&str, BTreeMap<String, String>, String)> = Vec::new();
    if left.name != right.name {
        wanted.push((
            "rename-method",
            BTreeMap::from([("$m1".into(), left.name.clone()), ("$m2".into(), right.name.clone())]),
            format!("method {} -> {}", left.name, right.name),
        ));
    }
    if left.params.len() == right.params.len() {
        for (lp, rp) in left.params.iter().zip(&right.params) {
            if lp.name != rp.name {
                wanted.push((
                    "rename-parameter",
                    BTreeMap::from([("$v1".into(), lp.name.clone()), ("$v2".into(), rp.name.clone())]),
                    format!("parameter {} -> {}", lp.name, rp.name),
                ));
            }
        }
    } else {
        skipped.push(format!(
            "parameters: arity {} vs {}",
            left.params.len(),
            right.params.len()
        ));
    }
    for (rule_id, bindings, what) in wanted {
        let rule = catalog::rule(rule_id).expect("rename rules exist");
        let before = target.delta(&cur);
        let found = MatchContext::new(&cur, Some(right))
            .candidates(rule)
            .into_iter()
            .find(|(s, _)| s.bindings == bindings);
        let Some((site, result)) = found else {
            skipped.push(format!("{what}: name already bound"));
            continue;
        };
        let after = target.delta(&result);
        if after >= before {
            skipped.push(format!("{what}: does not reduce the delta"));
            continue;
        }
        if !gate.accepts(&result) {
            skipped.push(format!("{what}: rejected by the equivalence gate"));
            continue;
        }
        cur = result.clone();
        applied.push(Applied {
            site,
            result,
            delta_before: before,
            delta_after: after,
            stage: Stage::A,
        });
    }
    (cur, applied, skipped)
}

/// One beam state.
#[derive(Clone)]
struct State {
    method: MethodAst,
    delta: usize,
    path: Vec<std::rc::Rc<Applied>>,
}

/// Candidates of one state that strictly reduce the delta, ordered by
/// largest reduction, then rule id, then document order.
fn improving(state: &State, rules: &[&'static catalog::RewriteRule], target: &Target) -> Vec<Applied> {
    let cx = MatchContext::new(&state.method, Some(target.method));
    let mut out = Vec::new();
    for rule in rules {
        for (site, result) in cx.candidates(rule) {
            let d = target.delta(&result);
            if d < state.delta {
                out.push(Applied {
                    site,
                    result,
                    delta_before: state.delta,
                    delta_after: d,
                    stage: Stage::B,
                });
            }
        }
    }
    // Rules come in id order and sites in document order, so a stable
    // sort on the reduction alone yields the full tie-break.
    out.sort_by_key(|a| a.delta_after);
    out
}

/// Stage B: descends toward `right` over the enabled tiers.
pub fn greedy_decompose(mid: &MethodAst, right: &MethodAst, config: &DecomposeConfig) -> (MethodAst, Vec<Step>) {
    let target = Target::new(right);
    let gate = if config.verify {
        match Oracle::new(mid, config.samples.max(1), config.seed) {
            Ok(o) => Gate::On(o),
            Err(_) => Gate::Off,
        }
    } else {
        Gate::Off
    };
    let (m, applied) = descend(mid, &target, config, &gate);
    (m, applied.iter().map(|a| a.step()).collect())
}

fn descend(mid: &MethodAst, target: &Target, config: &DecomposeConfig, gate: &Gate) -> (MethodAst, Vec<std::rc::Rc<Applied>>) {
    let rules = catalog::rules_in(&config.tiers);
    let width = config.beam.max(1);
    let start = State {
        method: mid.clone(),
        delta: target.delta(mid),
        path: Vec::new(),
    };
    let mut best = start.clone();
    let mut beam = vec![start];
    for _ in 0..config.max_steps {
        let mut next: Vec<State> = Vec::new();
        let mut seen = HashSet::new();
        let mut pool: Vec<(usize, usize, Applied)> = Vec::new();
        for (i, s) in beam.iter().enumerate() {
            for (j, a) in improving(s, &rules, target).into_iter().enumerate() {
                pool.push((i, j, a));
            }
        }
        // Best children first; ties keep parent order, then the per-state
        // candidate order.
        pool.sort_by_key(|(i, j, a)| (a.delta_after, *i, *j));
        for (i, _, a) in pool {
            if next.len() == width {
                break;
            }
            let text = print_method(&a.result);
            if seen.contains(&text) || !gate.accepts(&a.result) {
                continue;
            }
            seen.insert(text);
            let parent = &beam[i];
            let mut path = parent.path.clone();
            let method = a.result.clone();
            let delta = a.delta_after;
            path.push(std::rc::Rc::new(a));
            next.push(State { method, delta, path });
        }
        if next.is_empty() {
            break;
        }
        for s in &next {
            if (s.delta, s.path.len()) < (best.delta, best.path.len()) {
                best = s.clone();
            }
        }
        beam = next;
    }
    (best.method, best.path)
}

/// Runs stage A then stage B on one pair.
pub fn decompose_pair(
    pair_id: &str,
    left: &MethodAst,
    right: &MethodAst,
    config: &DecomposeConfig,
) -> DecompositionTrace {
    let seed = seed_for(pair_id, config.seed);
    let target = Target::new(right);
    let baseline = target.delta(left);
    let not_equivalent_warning = config.precheck
        && !matches!(
            check_equivalent(left, right, config.samples.max(1), seed),
            Ok(Verdict::Consistent)
        );
    if not_equivalent_warning {
        log::warn!("{pair_id}: left and right are not equivalent on the sampled inputs");
    }
    let gate = if config.verify {
        match Oracle::new(left, config.samples.max(1), seed) {
            Ok(o) => Gate::On(o),
            Err(e) => {
                log::warn!("{pair_id}: verification disabled: {e}");
                Gate::Off
            }
        }
    } else {
        Gate::Off
    };
    let (mid, stage_a, skipped) = unify(left, &target, &gate);
    let after_a = stage_a.last().map_or(baseline, |a| a.delta_after);
    let (fin, stage_b) = descend(&mid, &target, config, &gate);
    let residual = stage_b.last().map_or(after_a, |a| a.delta_after);
    let sim = |residual| sim_from_totals(residual, baseline).map_or(0.0, |s| s.value());
    let mut steps: Vec<Step> = stage_a.iter().map(Applied::step).collect();
    steps.extend(stage_b.iter().map(|a| a.step()));
    let snapshots = config.emit_snapshots.then(|| {
        let mut v = vec![print_method(left)];
        v.extend(stage_a.iter().map(|a| print_method(&a.result)));
        v.extend(stage_b.iter().map(|a| print_method(&a.result)));
        v
    });
    debug_assert_eq!(residual, target.delta(&fin));
    DecompositionTrace {
        pair_id: pair_id.to_string(),
        tier_config: config.tier_label().to_string(),
        sim_after_stage_a: sim(after_a),
        sim_final: sim(residual),
        baseline_delta_tokens: baseline,
        residual_delta_tokens: residual,
        fully_decomposed: residual == 0,
        steps,
        skipped,
        not_equivalent_warning,
        snapshots,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace has no snapshots")]
    NoSnapshots,
    #[error("trace has {snapshots} snapshots for {steps} steps")]
    Length { snapshots: usize, steps: usize },
    #[error("snapshot {0} does not parse: {1}")]
    Parse(usize, String),
    #[error("step {0}: {1}")]
    Step(usize, String),
}

/// Re-checks a trace against its snapshots: every step must re-apply to
/// give the next snapshot, report the right deltas, and preserve behavior
/// on `samples` inputs drawn with the pair's seed.
pub fn verify_trace(
    trace: &DecompositionTrace,
    right: &MethodAst,
    samples: usize,
    base_seed: u64,
) -> Result<(), TraceError> {
    let snaps = trace.snapshots.as_ref().ok_or(TraceError::NoSnapshots)?;
    if snaps.len() != trace.steps.len() + 1 {
        return Err(TraceError::Length {
            snapshots: snaps.len(),
            steps: trace.steps.len(),
        });
    }
    let methods = snaps
        .iter()
        .enumerate()
        .map(|(i, s)| parse_method(s).map_err(|e| TraceError::Parse(i, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let target = Target::new(right);
    let seed = seed_for(&trace.pair_id, base_seed);
    let mut last = None;
    for (i, step) in trace.steps.iter().enumerate() {
        let fail = |m: String| TraceError::Step(i, m);
        let (before, after) = (&methods[i], &methods[i + 1]);
        let rule = catalog::rule(&step.rule_id).ok_or_else(|| fail(format!("unknown rule {}", step.rule_id)))?;
        let reapplied = MatchContext::new(before, Some(right))
            .candidates(rule)
            .into_iter()
            .any(|(s, out)| s.path == step.path && s.bindings == step.bindings && out == *after);
        if !reapplied {
            return Err(fail(format!("{} at {} does not reproduce the snapshot", step.rule_id, step.path)));
        }
        let (db, da) = (target.delta(before), target.delta(after));
        if (db, da) != (step.delta_before, step.delta_after) {
            return Err(fail(format!(
                "recorded delta {}→{}, recomputed {db}→{da}",
                step.delta_before, step.delta_after
            )));
        }
        if da >= db || last.is_some_and(|l| l != db) {
            return Err(fail("delta does not strictly decrease".into()));
        }
        last = Some(da);
        match check_equivalent(before, after, samples, seed) {
            Ok(Verdict::Consistent) => {}
            Ok(v) => return Err(fail(format!("not equivalent: {v:?}"))),
            Err(e) => return Err(fail(e.to_string())),
        }
    }
    let residual = target.delta(methods.last().unwrap());
    if residual != trace.residual_delta_tokens {
        return Err(TraceError::Step(
            trace.steps.len(),
            format!("residual {} recorded, {residual} recomputed", trace.residual_delta_tokens),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::MatchContext;

    fn m(src: &str) -> MethodAst {
        parse_method(src).unwrap()
    }

    fn ids(steps: &[Step]) -> Vec<&str> {
        steps.iter().map(|s| s.rule_id.as_str()).collect()
    }

    #[test]
    fn renames_method_and_parameter() {
        let (out, steps, skipped) = unify_names(&m("int f(int a) { return a; }"), &m("int g(int b) { return b; }"));
        assert_eq!(print_method(&out), print_method(&m("int g(int b) { return b; }")));
        assert_eq!(ids(&steps), ["rename-method", "rename-parameter"]);
        assert!(skipped.is_empty());
        assert!(steps.iter().all(|s| s.stage == Stage::A && s.delta_after < s.delta_before));
    }

    #[test]
    fn same_names_need_no_steps() {
        let left = m("int f(int a) { return a * 2; }");
        let (out, steps, _) = unify_names(&left, &m("int f(int a) { return 2 * a; }"));
        assert!(steps.is_empty());
        assert_eq!(out, left);
    }

    #[test]
    fn arity_mismatch_renames_only_the_method() {
        let (_, steps, skipped) = unify_names(
            &m("int f(int a) { return a; }"),
            &m("int g(int x, int y) { return x; }"),
        );
        assert_eq!(ids(&steps), ["rename-method"]);
        assert_eq!(skipped.len(), 1);
    }

    #[test]
    fn identical_mid_needs_no_steps() {
        let right = m("int f(int x) { int y = x + 1; return y; }");
        let (out, steps) = greedy_decompose(&right, &right, &DecomposeConfig::default());
        assert!(steps.is_empty());
        assert_eq!(out, right);
    }

    #[test]
    fn one_de_morgan_scramble_is_undone_in_one_step() {
        let right = m("boolean f(boolean a, boolean b) { return !(a && b); }");
        let rule = catalog::rule("apply-de-morgans-law").unwrap();
        let (_, mid) = MatchContext::new(&right, None).candidates(rule).remove(0);
        assert!(print_method(&mid).contains("!a || !b"));
        let t = decompose_pair("dm", &mid, &right, &DecomposeConfig::default());
        assert_eq!(ids(&t.steps), ["apply-de-morgans-law"]);
        assert_eq!(t.residual_delta_tokens, 0);
        assert!(t.fully_decomposed);
    }

    #[test]
    fn changed_literal_is_not_explained() {
        let left = m("int f(int x) { return x + 1; }");
        let right = m("int f(int x) { return x + 2; }");
        let (_, steps) = greedy_decompose(&left, &right, &DecomposeConfig::default());
        assert!(steps.is_empty());
        let t = decompose_pair("lit", &left, &right, &DecomposeConfig::default());
        assert_eq!(t.residual_delta_tokens, 2);
        assert_eq!(t.sim_final, 0.0);
        assert!(!t.fully_decomposed);
        assert!(t.not_equivalent_warning);
    }

    #[test]
    fn identical_pair() {
        let a = m("int f(int x) { return x; }");
        let t = decompose_pair("same", &a, &a, &DecomposeConfig::default());
        assert_eq!(t.sim_final, 1.0);
        assert!(t.steps.is_empty() && t.fully_decomposed);
    }

    #[test]
    fn guard_clause_needs_the_extended_tier() {
        let left = m("int f(int x) { if (x > 0) { return 1; } else { return 2; } }");
        let right = m("int f(int x) { if (x > 0) { return 1; } return 2; }");
        let det = decompose_pair("g", &left, &right, &DecomposeConfig::detector_only());
        let all = decompose_pair("g", &left, &right, &DecomposeConfig::default());
        assert!(det.sim_final < 1.0);
        assert!(all.fully_decomposed, "{:?}", ids(&all.steps));
    }

    #[test]
    fn k_three_scramble_is_recovered() {
        let right = m("int f(int a, int b) { int s = a + b; if (!(s > 10)) { s = s * 2; } return s; }");
        let mut mid = right.clone();
        for id in ["swap-commutative-operands", "reverse-comparison-operator", "replace-assignment-with-compound-assignment"] {
            let rule = catalog::rule(id).unwrap();
            let cands = MatchContext::new(&mid, None).candidates(rule);
            assert!(!cands.is_empty(), "{id} does not apply");
            mid = cands[0].1.clone();
        }
        let t = decompose_pair("k3", &mid, &right, &DecomposeConfig::default());
        assert!(t.fully_decomposed, "{:?}", ids(&t.steps));
        assert!(t.steps.len() <= 3);
    }

    #[test]
    fn snapshots_follow_steps_and_reverify() {
        let left = m("int f(int p) { int q = p * 3; return q; }");
        let right = m("int g(int n) { return n * 3; }");
        let config = DecomposeConfig {
            emit_snapshots: true,
            ..DecomposeConfig::default()
        };
        let t = decompose_pair("snap", &left, &right, &config);
        assert!(t.fully_decomposed, "{:?}", ids(&t.steps));
        assert_eq!(t.snapshots.as_ref().unwrap().len(), t.steps.len() + 1);
        verify_trace(&t, &right, 100, 0).unwrap();
        assert_eq!(t.tier_config, "all");
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let left = m("int f(int p) { int q = p * 3; return q; }");
        let right = m("int f(int p) { return p * 3; }");
        let config = DecomposeConfig {
            emit_snapshots: true,
            ..DecomposeConfig::default()
        };
        let mut t = decompose_pair("tamper", &left, &right, &config);
        t.steps[0].delta_after += 1;
        assert!(verify_trace(&t, &right, 50, 0).is_err());
        t.snapshots = None;
        assert_eq!(verify_trace(&t, &right, 50, 0), Err(TraceError::NoSnapshots));
    }
}
