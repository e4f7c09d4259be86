use super::engine::{apply_change, Ctx};
use super::*;
use crate::equivalence::{evaluate, Value, DEFAULT_STEP_BUDGET};
use crate::syntax::{parse_method, print_method};

fn m(src: &str) -> MethodAst {
    parse_method(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn results(id: &str, src: &str, target: Option<&str>) -> Vec<String> {
    let ast = m(src);
    let target = target.map(m);
    MatchContext::new(&ast, target.as_ref())
        .candidates(rule(id).unwrap())
        .into_iter()
        .map(|(_, r)| print_method(&r))
        .collect()
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn assert_offers(id: &str, src: &str, target: Option<&str>, expected: &str) {
    let want = print_method(&m(expected));
    let got = results(id, src, target);
    assert!(
        got.contains(&want),
        "{id} does not produce\n{want}\nfrom {src}; got:\n{}",
        got.join("\n---\n")
    );
}

#[test]
fn registry_is_consistent() {
    let rules = list_rules();
    assert!(rules.len() >= 40, "{} rules", rules.len());
    for w in rules.windows(2) {
        assert!(w[0].id < w[1].id, "ids sorted and unique: {} {}", w[0].id, w[1].id);
    }
    for r in rules {
        if let Some(inv) = r.inverse_rule() {
            assert_eq!(inv.inverse, Some(r.id), "{} and {} pair up", r.id, inv.id);
        } else {
            assert!(r.inverse.is_none(), "{} names a missing inverse", r.id);
        }
    }
    assert_eq!(rules_in(&[Tier::Detector]).len(), 8);
    assert_eq!(rules_in(&[Tier::Detector, Tier::Extended]).len(), rules.len());
}

#[test]
fn every_schema_parses() {
    for r in list_rules() {
        for side in [r.lhs, r.rhs] {
            assert!(parse_pattern(side).is_ok(), "{}: {side:?}", r.id);
        }
    }
}

#[test]
fn de_morgan_site_and_rewrite() {
    let ast = m("boolean f(boolean a, boolean b) { return !(a && b); }");
    let r = rule("apply-de-morgans-law").unwrap();
    let sites = find_matches(r, &ast, None);
    assert_eq!(sites.len(), 1);
    assert_eq!(sites[0].path.to_string(), "/0/0");
    assert_eq!(sites[0].bindings["$e1"], "a");
    assert_eq!(sites[0].bindings["$e2"], "b");
    let out = apply_match(&ast, &sites[0]).unwrap();
    assert_eq!(
        squash(&print_method(&out)),
        "boolean f(boolean a, boolean b) { return !a || !b; }"
    );
}

#[test]
fn rename_takes_target_name() {
    assert_offers(
        "rename-variable",
        "int f(int x) { int tmp = x * 2; return tmp; }",
        Some("int f(int x) { int result = x * 2; return result; }"),
        "int f(int x) { int result = x * 2; return result; }",
    );
}

#[test]
fn guard_clause_from_nested_conditional() {
    assert_offers(
        "replace-nested-conditional-with-guard-clauses",
        "int f(int x) { if (x < 0) { return 0; } else { return x; } }",
        None,
        "int f(int x) { if (x < 0) { return 0; } return x; }",
    );
}

#[test]
fn compound_assignment_in_both_directions() {
    let plain = "int f(int x) { x = x * (x + 1); return x; }";
    let compound = "int f(int x) { x *= x + 1; return x; }";
    assert_offers("replace-assignment-with-compound-assignment", plain, None, compound);
    assert_offers("replace-compound-assignment-with-assignment", compound, None, plain);
}

#[test]
fn extract_and_inline_variable() {
    let before = "int f(int a, int b) { return (a + b) * (a + b); }";
    let after = "int f(int a, int b) { int sum = a + b; return sum * sum; }";
    assert_offers("extract-variable", before, Some(after), after);
    assert_offers("inline-variable", after, None, before);
}

#[test]
fn for_and_foreach() {
    let indexed = "int f(int[] a) { int s = 0; for (int i = 0; i < a.length; i++) { int v = a[i]; s += v; } return s; }";
    let each = "int f(int[] a) { int s = 0; for (int v : a) { s += v; } return s; }";
    assert_offers("replace-for-with-foreach", indexed, None, each);
    assert_offers("replace-foreach-with-for", each, Some(indexed), indexed);
}

#[test]
fn if_chain_and_switch() {
    let chain = "int f(int x) { int r = 0; if (x == 1) { r = 10; } else if (x == 2) { r = 20; } else { r = 5; } return r; }";
    let sw = "int f(int x) { int r = 0; switch (x) { case 1: r = 10; break; case 2: r = 20; break; default: r = 5; break; } return r; }";
    assert_offers("replace-if-with-switch", chain, None, sw);
    assert_offers("replace-switch-with-if", sw, None, chain);
}

#[test]
fn literal_rules() {
    assert_offers(
        "apply-constant-folding",
        "int f(int x) { return x + 2 * 3; }",
        None,
        "int f(int x) { return x + 6; }",
    );
    assert_offers(
        "replace-inclusive-comparison-with-exclusive",
        "boolean f(int x) { return x <= 9; }",
        None,
        "boolean f(int x) { return x < 10; }",
    );
    assert_offers(
        "replace-numeric-representation",
        "int f(int x) { return x + 255; }",
        None,
        "int f(int x) { return x + 0xFF; }",
    );
}

#[test]
fn apply_match_rejects_foreign_sites() {
    let a = m("boolean f(boolean a, boolean b) { return !(a && b); }");
    let b = m("boolean f(boolean a, boolean b) { return !(b && a); }");
    let site = find_matches(rule("apply-de-morgans-law").unwrap(), &a, None).remove(0);
    assert!(matches!(apply_match(&b, &site), Err(CatalogError::StaleSite { .. })));
    let mut bogus = site.clone();
    bogus.rule_id = "no-such-rule".into();
    assert!(matches!(apply_match(&a, &bogus), Err(CatalogError::UnknownRule(_))));
    // a site without its cached result is re-derived from path and bindings
    let bare: MatchSite = serde_json::from_str(&serde_json::to_string(&site).unwrap()).unwrap();
    assert_eq!(apply_match(&a, &bare).unwrap(), apply_match(&a, &site).unwrap());
}

#[test]
fn apply_match_reports_guard_violation() {
    let ast = m("int f(int x) { int y = 0; return (y = x) + y; }");
    let r = rule("swap-commutative-operands").unwrap();
    let ctx = Ctx::new(&ast, None).unwrap();
    let raw = r.raw(&ctx).into_iter().find(|x| !x.guard_ok).expect("unguarded raw");
    let site = MatchSite {
        rule_id: r.id.into(),
        path: raw.path,
        bindings: raw.bindings,
        source: None,
        result: None,
    };
    assert!(matches!(apply_match(&ast, &site), Err(CatalogError::GuardViolation { .. })));
}

/// Shows that a rule's guard matters: some match it refuses would produce a
/// well-typed method that behaves differently on `input`.
fn witness(id: &str, src: &str, input: &[Value]) {
    let ast = m(src);
    let ctx = Ctx::new(&ast, None).unwrap();
    let r = rule(id).unwrap();
    let expected = evaluate(&ast, input, DEFAULT_STEP_BUDGET);
    let accepted: Vec<MethodAst> = MatchContext::new(&ast, None)
        .candidates(r)
        .into_iter()
        .map(|(_, x)| x)
        .collect();
    let refused: Vec<MethodAst> = r
        .raw(&ctx)
        .into_iter()
        .filter(|x| !x.guard_ok)
        .filter_map(|x| apply_change(&ast, &x.path, &x.change))
        .filter(|x| check_method(x).is_ok())
        .collect();
    let breaking: Vec<&MethodAst> = refused
        .iter()
        .filter(|x| evaluate(x, input, DEFAULT_STEP_BUDGET) != expected)
        .collect();
    assert!(!breaking.is_empty(), "{id}: no refused rewrite of {src} changes behavior");
    for b in breaking {
        assert!(!accepted.contains(b), "{id} accepted a breaking rewrite");
    }
}

#[test]
fn guards_are_necessary() {
    use Value::{Boolean as B, Double as D, Int as I};
    witness("swap-commutative-operands", "int f(int x) { int y = 0; return (y = x) + y; }", &[I(3)]);
    witness("reverse-comparison-operator", "boolean f(int x) { int y = 0; return (y = x) < y + 1; }", &[I(3)]);
    witness("factor-out-coefficient", "long f(int a, long b) { return 2 * a + 2 * b; }", &[I(i32::MAX), Value::Long(0)]);
    witness("transpose-equation", "boolean f(int a, int b, long c) { return a + b == c; }", &[I(i32::MAX), I(1), Value::Long(i32::MIN as i64)]);
    witness("replace-postfix-with-prefix", "int f(int x) { int y = x++; return y; }", &[I(3)]);
    witness("replace-prefix-with-postfix", "int f(int x) { int y = ++x; return y; }", &[I(3)]);
    witness("replace-inclusive-comparison-with-exclusive", "boolean f(int x) { return x <= 2147483647; }", &[I(i32::MAX)]);
    witness("introduce-constant-to-comparison", "boolean f(int x, int y) { return x < y; }", &[I(0), I(i32::MAX)]);
    witness("remove-cast", "double f(double d) { return (int) d; }", &[D(1.5)]);
    witness("extract-variable", "int f(int x) { int y = 0; y = (x = x + 1) + (x + 1); return y; }", &[I(1)]);
    witness("inline-variable", "int f(int x) { long v = x; return (int) (v * 1000000 / 1000000); }", &[I(1 << 20)]);
    witness("change-variable-type", "long f(int x) { int v = x; long r = v * 2; return r; }", &[I(i32::MAX)]);
    witness(
        "swap-conditional-branches",
        "int f(int x) { if (x == 1) { return 1; } else if (x == 1) { return 2; } return 0; }",
        &[I(1)],
    );
    witness(
        "replace-if-with-switch",
        "int f(int x) { int r = 0; while (r < 5) { r++; if (x == 1) { break; } else if (x == 2) { r++; } } return r; }",
        &[I(1)],
    );
    witness(
        "replace-switch-with-if",
        "int f(int x) { int r = 0; switch (x) { case 1: r = 1; case 2: r = 2; break; } return r; }",
        &[I(1)],
    );
    witness(
        "replace-for-with-foreach",
        "int f(int[] a) { int s = 0; for (int i = 0; i < a.length; i++) { a[0] = 5; s += a[i]; } return s; }",
        &[Value::Array(vec![I(1), I(2)])],
    );
    witness(
        "replace-foreach-with-for",
        "int f(int[] a) { int s = 0; for (int v : a) { a[0] = 7; s += v; } return s; }",
        &[Value::Array(vec![I(1), I(2)])],
    );
    witness("remove-unused-variable", "int f(int x) { int u = 10 / x; return x; }", &[I(0)]);
    witness(
        "remove-branch-by-pre-assignment",
        "int f(int x, boolean c) { if (c) x = x + 1; else x = 0; return x; }",
        &[I(4), B(true)],
    );
    witness(
        "introduce-branch-for-pre-assignment",
        "int f(int y, boolean c) { int x = 0; x = y++; if (c) x = 1; return x + y; }",
        &[I(4), B(true)],
    );
    witness(
        "replace-nested-conditional-with-guard-clauses",
        "int f(int x) { int r = 0; { if (x > 0) { r = 1; } else { r = 2; } } return r; }",
        &[I(1)],
    );
    witness(
        "replace-guard-clause-with-conditional",
        "int f(int x) { int r = 0; { if (x > 0) r = 1; r = r + 2; } return r; }",
        &[I(1)],
    );
}

/// Applying an invertible rule and then its inverse, with the original as
/// target, can restore the original exactly.
fn round_trip(id: &str, src: &str) {
    let ast = m(src);
    let r = rule(id).unwrap();
    let inv = r.inverse_rule().unwrap();
    let fwd = MatchContext::new(&ast, None).candidates(r);
    assert!(!fwd.is_empty(), "{id} has no site in {src}");
    for (site, after) in fwd {
        let back = MatchContext::new(&after, Some(&ast)).candidates(inv);
        assert!(
            back.iter().any(|(_, b)| *b == ast),
            "{} at {site} not undone by {}:\n{}",
            id,
            inv.id,
            print_method(&after)
        );
    }
}

#[test]
fn inverses_restore_the_original() {
    let cases = [
        ("apply-de-morgans-law", "boolean f(boolean a, int b) { return !(a && b > 0); }"),
        ("rename-variable", "int f(int x) { int y = x; return y; }"),
        ("rename-parameter", "int f(int x) { return x; }"),
        ("rename-method", "int f(int x) { return x; }"),
        ("extract-variable", "int f(int x) { return x * 2 + 1; }"),
        ("add-variable-modifier", "int f(int x) { int y = x; return y; }"),
        ("reverse-conditional", "int f(int x) { if (x < 3) { return 1; } else if (x > 7) { return 2; } else { return 3; } }"),
        ("split-conditional-branch", "int f(int x) { if (x < 3 || x > 7) return 1; return 0; }"),
        ("conditional-to-expression", "int f(int x) { int y; if (x > 0) y = 1; else y = 2; return y; }"),
        ("replace-guard-clause-with-conditional", "int f(int x) { if (x < 0) return 0; x++; return x; }"),
        ("replace-foreach-with-for", "int f(int[] a) { int s = 0; for (int v : a) s += v; return s; }"),
        ("introduce-return-variable", "int f(int x) { return x + 1; }"),
        ("split-variable-declaration", "int f(int x) { int a = x, b = a + 1, c = 2; return a + b + c; }"),
        ("split-variable-declaration-and-initialization", "int f(int x) { int a = x; return a; }"),
        ("wrap-statement-in-block", "int f(int x) { if (x > 0) x--; return x; }"),
        ("introduce-dead-code", "int f(int x) { return x; }"),
        ("replace-numeric-representation", "long f(long x) { return x + 1000L; }"),
        ("introduce-parentheses", "int f(int x) { return x * 2 + 1; }"),
        ("introduce-cast", "long f(int x) { return x; }"),
        ("replace-array-declaration-style", "int f(int[] a) { int b[] = a; return b.length; }"),
        ("replace-switch-with-if", "int f(int x) { switch (x) { case 1: return 2; case 3: x++; break; default: x--; } return x; }"),
        ("introduce-branch-for-pre-assignment", "int f(int x, boolean c) { int y = 0; y = 1; if (c) { y = 2; } return y + x; }"),
    ];
    for (id, src) in cases {
        round_trip(id, src);
    }
}
