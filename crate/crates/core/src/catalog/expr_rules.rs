//! Expression-level rules: schema-driven ones and a few that compute new
//! literals.

use super::analysis::{const_value, fold, int_expr, interval, is_literal, is_pure, Const};
use super::engine::{bind, fit, show, Bindings, Change, Ctx, ExprSite, Raw};
use super::pattern::{compile, instantiate, matches, Env, KEPT};
use super::{Guard, Imp, RewriteRule, Tier};
use crate::syntax::ast::*;
use crate::syntax::path::ExprCtx;

type SchemaGuard = fn(&Ctx, &Env, ExprCtx) -> bool;

pub struct SchemaCase {
    lhs: Expr,
    rhs: Expr,
    guard: SchemaGuard,
}

fn case(lhs: &str, rhs: &str, guard: SchemaGuard) -> SchemaCase {
    SchemaCase {
        lhs: compile(lhs),
        rhs: compile(rhs),
        guard,
    }
}

pub fn schema_matches(ctx: &Ctx, cases: &[SchemaCase]) -> Vec<Raw> {
    let mut out = Vec::new();
    for site in &ctx.sites().exprs {
        for c in cases {
            let mut env = Env::new();
            if !matches(&c.lhs, site.expr, site.ctx, &mut env) {
                continue;
            }
            let kept: Vec<(String, Expr)> = env
                .iter()
                .filter_map(|(k, v)| Some((k.strip_suffix(KEPT)?.to_string(), v.clone())))
                .collect();
            env.retain(|k, _| !k.ends_with(KEPT));
            let ok = (c.guard)(ctx, &env, site.ctx);
            // A placeholder bound through a parenthesis its position needed
            // may also carry that parenthesis into the result.
            for mask in 0..1usize << kept.len().min(2) {
                let mut env = env.clone();
                for (i, (k, v)) in kept.iter().enumerate().take(2) {
                    if mask & (1 << i) != 0 {
                        env.insert(k.clone(), v.clone());
                    }
                }
                let result = fit(instantiate(&c.rhs, &env), site.ctx);
                let bindings = env.iter().map(|(k, v)| (k.clone(), show(v))).collect();
                out.push(Raw::new(site.path.clone(), bindings, ok, Change::Expr(result)));
            }
        }
    }
    out
}

fn always(_: &Ctx, _: &Env, _: ExprCtx) -> bool {
    true
}

fn pure_operands(_: &Ctx, env: &Env, _: ExprCtx) -> bool {
    env.values().all(is_pure)
}

fn integral_pure_operands(ctx: &Ctx, env: &Env, _: ExprCtx) -> bool {
    env.values()
        .all(|e| is_pure(e) && ctx.ty(e).is_some_and(|t| t.is_integral()))
}

fn value_unused(_: &Ctx, _: &Env, ctx: ExprCtx) -> bool {
    ctx.value_unused
}

/// `$c1 * $e1 ± $c1 * $e2`: every product and the sum share one integral
/// type, so wrapping arithmetic distributes.
fn same_integral_type(ctx: &Ctx, env: &Env, _: ExprCtx) -> bool {
    let (Some(t1), Some(t2), Some(tc)) = (ctx.ty(&env["$e1"]), ctx.ty(&env["$e2"]), ctx.ty(&env["$c1"])) else {
        return false;
    };
    t1 == t2 && t1.is_integral() && (tc == t1 || tc == Type::Int)
}

/// `$e1 ± $e2 == $e3`: one integral type throughout, and `$e2`, `$e3` may
/// be reordered.
fn transpose_guard(ctx: &Ctx, env: &Env, _: ExprCtx) -> bool {
    let tys: Vec<Option<Type>> = ["$e1", "$e2", "$e3"].iter().map(|k| ctx.ty(&env[*k])).collect();
    tys.iter().all(|t| t.as_ref().is_some_and(Type::is_integral))
        && tys.windows(2).all(|w| w[0] == w[1])
        && is_pure(&env["$e2"])
        && is_pure(&env["$e3"])
}

fn schema_rule(
    id: &'static str,
    name: &'static str,
    guards: &'static [Guard],
    inverse: Option<&'static str>,
    cases: Vec<SchemaCase>,
    lhs: &'static str,
    rhs: &'static str,
) -> RewriteRule {
    RewriteRule {
        id,
        name,
        tier: Tier::Extended,
        lhs,
        rhs,
        guards,
        inverse,
        imp: Imp::Schema(cases),
    }
}

fn native(
    id: &'static str,
    name: &'static str,
    guards: &'static [Guard],
    inverse: Option<&'static str>,
    lhs: &'static str,
    rhs: &'static str,
    f: super::Matcher,
) -> RewriteRule {
    RewriteRule {
        id,
        name,
        tier: Tier::Extended,
        lhs,
        rhs,
        guards,
        inverse,
        imp: Imp::Native(f),
    }
}

pub fn rules() -> Vec<RewriteRule> {
    use Guard::*;
    let arith = ["+", "-", "*", "/", "%"];
    let to_compound = arith
        .iter()
        .map(|op| case(&format!("$v1 = $v1 {op} $e1"), &format!("$v1 {op}= $e1"), always))
        .collect();
    let from_compound = arith
        .iter()
        .map(|op| case(&format!("$v1 {op}= $e1"), &format!("$v1 = $v1 {op} $e1"), always))
        .collect();
    vec![
        schema_rule(
            "apply-de-morgans-law",
            "Apply De Morgan's Law",
            &[],
            Some("apply-de-morgans-law"),
            vec![
                case("!($e1 && $e2)", "!$e1 || !$e2", always),
                case("!($e1 || $e2)", "!$e1 && !$e2", always),
                case("!$e1 || !$e2", "!($e1 && $e2)", always),
                case("!$e1 && !$e2", "!($e1 || $e2)", always),
            ],
            "!($e1 && $e2)",
            "!$e1 || !$e2",
        ),
        schema_rule(
            "apply-negation-as-inequality",
            "Apply Negation as Inequality",
            &[],
            Some("factor-out-inequality-as-negation"),
            vec![
                case("!($e1 == $e2)", "$e1 != $e2", always),
                case("!($e1 != $e2)", "$e1 == $e2", always),
            ],
            "!($e1 == $e2)",
            "$e1 != $e2",
        ),
        schema_rule(
            "factor-out-inequality-as-negation",
            "Factor Out Inequality as Negation",
            &[],
            Some("apply-negation-as-inequality"),
            vec![
                case("$e1 != $e2", "!($e1 == $e2)", always),
                case("$e1 == $e2", "!($e1 != $e2)", always),
            ],
            "$e1 != $e2",
            "!($e1 == $e2)",
        ),
        schema_rule(
            "remove-double-negation",
            "Remove Double Negation",
            &[],
            None,
            vec![case("!!$e1", "$e1", always)],
            "!!$e1",
            "$e1",
        ),
        schema_rule(
            "factor-out-coefficient",
            "Factor Out Coefficient",
            &[Typing],
            None,
            vec![
                case("$c1 * $e1 + $c1 * $e2", "$c1 * ($e1 + $e2)", same_integral_type),
                case("$c1 * $e1 - $c1 * $e2", "$c1 * ($e1 - $e2)", same_integral_type),
            ],
            "$c1 * $e1 + $c1 * $e2",
            "$c1 * ($e1 + $e2)",
        ),
        schema_rule(
            "swap-commutative-operands",
            "Swap Commutative Operands",
            &[Typing, Purity],
            Some("swap-commutative-operands"),
            vec![
                case("$e1 + $e2", "$e2 + $e1", integral_pure_operands),
                case("$e1 * $e2", "$e2 * $e1", integral_pure_operands),
                case("$e1 == $e2", "$e2 == $e1", pure_operands),
                case("$e1 != $e2", "$e2 != $e1", pure_operands),
                case("$e1 && $e2", "$e2 && $e1", pure_operands),
                case("$e1 || $e2", "$e2 || $e1", pure_operands),
            ],
            "$e1 + $e2",
            "$e2 + $e1",
        ),
        schema_rule(
            "reverse-comparison-operator",
            "Reverse Comparison Operator",
            &[Purity],
            Some("reverse-comparison-operator"),
            vec![
                case("$e1 < $e2", "$e2 > $e1", pure_operands),
                case("$e1 > $e2", "$e2 < $e1", pure_operands),
                case("$e1 <= $e2", "$e2 >= $e1", pure_operands),
                case("$e1 >= $e2", "$e2 <= $e1", pure_operands),
            ],
            "$e1 < $e2",
            "$e2 > $e1",
        ),
        schema_rule(
            "transpose-equation",
            "Transpose Equation",
            &[Typing, Purity],
            None,
            vec![
                case("$e1 + $e2 == $e3", "$e1 == $e3 - $e2", transpose_guard),
                case("$e1 + $e2 != $e3", "$e1 != $e3 - $e2", transpose_guard),
                case("$e1 - $e2 == $e3", "$e1 == $e3 + $e2", transpose_guard),
                case("$e1 - $e2 != $e3", "$e1 != $e3 + $e2", transpose_guard),
            ],
            "$e1 + $e2 == $e3",
            "$e1 == $e3 - $e2",
        ),
        schema_rule(
            "replace-assignment-with-compound-assignment",
            "Replace Assignment with Compound Assignment",
            &[Typing],
            Some("replace-compound-assignment-with-assignment"),
            to_compound,
            "$v1 = $v1 + $e1",
            "$v1 += $e1",
        ),
        schema_rule(
            "replace-compound-assignment-with-assignment",
            "Replace Compound Assignment with Assignment",
            &[Typing],
            Some("replace-assignment-with-compound-assignment"),
            from_compound,
            "$v1 += $e1",
            "$v1 = $v1 + $e1",
        ),
        schema_rule(
            "replace-postfix-with-prefix",
            "Replace Postfix Increment with Prefix Increment",
            &[ValueUnused],
            Some("replace-prefix-with-postfix"),
            vec![
                case("$e1++", "++$e1", value_unused),
                case("$e1--", "--$e1", value_unused),
            ],
            "$e1++",
            "++$e1",
        ),
        schema_rule(
            "replace-prefix-with-postfix",
            "Replace Prefix Increment with Postfix Increment",
            &[ValueUnused],
            Some("replace-postfix-with-prefix"),
            vec![
                case("++$e1", "$e1++", value_unused),
                case("--$e1", "$e1--", value_unused),
            ],
            "++$e1",
            "$e1++",
        ),
        native(
            "apply-constant-folding",
            "Apply Constant Folding",
            &[NonOverflow],
            None,
            "$c1 + $c2",
            "$c3",
            constant_folding,
        ),
        native(
            "introduce-parentheses",
            "Introduce Parentheses",
            &[],
            Some("remove-parentheses"),
            "$e1",
            "($e1)",
            introduce_parens,
        ),
        native(
            "remove-parentheses",
            "Remove Parentheses",
            &[],
            Some("introduce-parentheses"),
            "($e1)",
            "$e1",
            remove_parens,
        ),
        native(
            "introduce-cast",
            "Introduce Cast",
            &[Typing],
            Some("remove-cast"),
            "$e1",
            "(int) $e1",
            introduce_cast,
        ),
        native(
            "remove-cast",
            "Remove Cast",
            &[Typing],
            Some("introduce-cast"),
            "(int) $e1",
            "$e1",
            remove_cast,
        ),
        native(
            "replace-inclusive-comparison-with-exclusive",
            "Replace Inclusive Comparison with Exclusive",
            &[Typing, NonOverflow],
            None,
            "$e1 <= $c1",
            "$e1 < $c2",
            inclusive_to_exclusive,
        ),
        native(
            "introduce-constant-to-comparison",
            "Introduce Constant to Comparison Expression",
            &[Typing, NonOverflow],
            None,
            "$e1 < $e2",
            "$e1 + $c1 < $e2 + $c1",
            introduce_constant,
        ),
        native(
            "replace-numeric-representation",
            "Replace Numeric Representation",
            &[],
            Some("replace-numeric-representation"),
            "$c1",
            "$c2",
            numeric_representation,
        ),
    ]
}

/// Expression sites that are ordinary values: not assignment targets and
/// not the discarded root of an expression statement.
fn value_sites<'c, 'a>(ctx: &'c Ctx<'a>) -> impl Iterator<Item = &'c ExprSite<'a>> {
    ctx.sites()
        .exprs
        .iter()
        .filter(|s| !s.ctx.lvalue && !s.ctx.value_unused)
}

/// Sites reached through a parenthesis the position needs.
fn through_paren(s: &ExprSite) -> bool {
    !crate::syntax::path::fits(s.expr, s.ctx)
}

fn constant_folding(ctx: &Ctx) -> Vec<Raw> {
    value_sites(ctx)
        .filter_map(|s| {
            let v = fold(s.expr)?;
            let b = bind([("$e1", show(s.expr)), ("$c1", show(&v))]);
            Some(Raw::new(s.path.clone(), b, true, Change::Expr(fit(v, s.ctx))))
        })
        .collect()
}

fn introduce_parens(ctx: &Ctx) -> Vec<Raw> {
    value_sites(ctx)
        .filter(|s| !matches!(s.expr, Expr::Paren(_)) && !through_paren(s))
        .map(|s| {
            Raw::new(
                s.path.clone(),
                bind([("$e1", show(s.expr))]),
                true,
                Change::Expr(Expr::paren(s.expr.clone())),
            )
        })
        .collect()
}

fn remove_parens(ctx: &Ctx) -> Vec<Raw> {
    value_sites(ctx)
        .filter_map(|s| match s.expr {
            Expr::Paren(inner) => Some(Raw::new(
                s.path.clone(),
                bind([("$e1", show(inner))]),
                crate::syntax::path::fits(inner, s.ctx),
                Change::Expr((**inner).clone()),
            )),
            _ => None,
        })
        .collect()
}

fn introduce_cast(ctx: &Ctx) -> Vec<Raw> {
    value_sites(ctx)
        .filter_map(|s| {
            let ty = ctx.ty(s.expr)?;
            if !ty.is_numeric() || (matches!(s.expr, Expr::Cast(..)) && ctx.target.is_none()) {
                return None;
            }
            let cast = Expr::Cast(ty.clone(), Box::new(s.expr.clone()));
            Some(Raw::new(
                s.path.clone(),
                bind([("$e1", show(s.expr)), ("$T", ty.to_string())]),
                true,
                Change::Expr(fit(cast, s.ctx)),
            ))
        })
        .collect()
}

fn remove_cast(ctx: &Ctx) -> Vec<Raw> {
    value_sites(ctx)
        .filter_map(|s| match s.expr {
            Expr::Cast(ty, inner) => {
                let inner_ty = ctx.ty(inner)?;
                let bare = crate::syntax::path::strip_required(inner, crate::syntax::path::operand_ctx(s.expr, 0));
                let mut forms = vec![bare];
                if !std::ptr::eq(bare, &**inner) {
                    forms.push(&**inner);
                }
                Some(forms.into_iter().map(move |e| {
                    Raw::new(
                        s.path.clone(),
                        bind([("$e1", show(e)), ("$T", ty.to_string())]),
                        inner_ty == *ty,
                        Change::Expr(fit(e.clone(), s.ctx)),
                    )
                }))
            }
            _ => None,
        })
        .flatten()
        .collect()
}

/// Literal of the same kind as `like` denoting `v`, or `None` when out of
/// range.
fn literal_like(v: i128, like: Const) -> Option<Expr> {
    match like {
        Const::Int(_) => int_expr(v, &Type::Int),
        Const::Long(_) => int_expr(v, &Type::Long),
        Const::Bool(_) => None,
    }
}

fn inclusive_to_exclusive(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in value_sites(ctx) {
        let Expr::Binary(op @ (BinaryOp::Le | BinaryOp::Ge), l, r) = s.expr else {
            continue;
        };
        // `$e1 <= $c` becomes `$e1 < $c + 1`; a constant on the left moves
        // the other way
        let (const_side, other, delta, new_op) = match (is_literal(r), is_literal(l), op) {
            (true, _, BinaryOp::Le) => (r, l, 1, BinaryOp::Lt),
            (true, _, BinaryOp::Ge) => (r, l, -1, BinaryOp::Gt),
            (false, true, BinaryOp::Le) => (l, r, -1, BinaryOp::Lt),
            (false, true, BinaryOp::Ge) => (l, r, 1, BinaryOp::Gt),
            _ => continue,
        };
        let Some(c) = const_value(const_side) else { continue };
        let Some(cv) = c.as_i128() else { continue };
        let integral = ctx.ty(other).is_some_and(|t| t.is_integral());
        let new_lit = literal_like(cv + delta, c);
        let ok = integral && new_lit.is_some();
        let new_lit = new_lit.unwrap_or_else(|| const_side.as_ref().clone());
        let rewritten = if std::ptr::eq(const_side, r) {
            Expr::binary(new_op, (**l).clone(), new_lit.clone())
        } else {
            Expr::binary(new_op, new_lit.clone(), (**r).clone())
        };
        let b = bind([("$e1", show(other)), ("$c1", show(const_side)), ("$c2", show(&new_lit))]);
        out.push(Raw::new(s.path.clone(), b, ok, Change::Expr(fit(rewritten, s.ctx))));
    }
    out
}

/// Literals `k` appearing as `x + k` on both sides of a target comparison.
fn harvested_offsets(ctx: &Ctx) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    if let Some(t) = ctx.target {
        t.visit_exprs(&mut |e| {
            if let Expr::Binary(op, l, r) = e {
                if op.is_ordering() {
                    if let (Expr::Binary(BinaryOp::Add, _, a), Expr::Binary(BinaryOp::Add, _, b)) = (&**l, &**r) {
                        if a == b && is_literal(a) && !out.contains(a) {
                            out.push((**a).clone());
                        }
                    }
                }
            }
        });
    } else {
        out.push(Expr::Lit(Literal::int(1)));
    }
    out
}

fn introduce_constant(ctx: &Ctx) -> Vec<Raw> {
    let offsets = harvested_offsets(ctx);
    let mut out = Vec::new();
    for s in value_sites(ctx) {
        let Expr::Binary(op, l, r) = s.expr else { continue };
        if !op.is_ordering() {
            continue;
        }
        let (Some(lt), Some(rt)) = (ctx.ty(l), ctx.ty(r)) else { continue };
        for c in &offsets {
            let Some(cv) = const_value(c) else { continue };
            let Some(k) = cv.as_i128() else { continue };
            let ok = lt == rt
                && lt.is_integral()
                && match (&lt, cv) {
                    // int operands widen to long before the addition
                    (Type::Int, Const::Long(_)) => true,
                    (_, Const::Int(_)) | (Type::Long, Const::Long(_)) => [&**l, &**r].iter().all(|e| {
                        let (lo, hi) = interval(e, &lt);
                        let (min, max) = if lt == Type::Long {
                            (i64::MIN as i128, i64::MAX as i128)
                        } else {
                            (i32::MIN as i128, i32::MAX as i128)
                        };
                        lo + k >= min && hi + k <= max
                    }),
                    _ => false,
                };
            let rewritten = Expr::binary(
                *op,
                Expr::binary(BinaryOp::Add, (**l).clone(), c.clone()),
                Expr::binary(BinaryOp::Add, (**r).clone(), c.clone()),
            );
            let b = bind([("$e1", show(l)), ("$e2", show(r)), ("$c1", show(c))]);
            out.push(Raw::new(s.path.clone(), b, ok, Change::Expr(fit(rewritten, s.ctx))));
        }
    }
    out
}

/// Other spellings of an integral literal: decimal, hexadecimal in both
/// cases, underscore-grouped decimal, and any spelling of the same value
/// the target uses.
fn spellings(lit: &Literal, target_lits: &[Literal]) -> Vec<String> {
    let Some(v) = lit.integral_value() else { return vec![] };
    let suffix = if lit.kind == LitKind::Long {
        &lit.lexeme[lit.lexeme.len() - 1..]
    } else {
        ""
    };
    let dec = v.to_string();
    let mut forms = vec![
        format!("{dec}{suffix}"),
        format!("0x{v:X}{suffix}"),
        format!("0x{v:x}{suffix}"),
    ];
    if v >= 1000 {
        let mut grouped = String::new();
        for (i, ch) in dec.chars().enumerate() {
            if i > 0 && (dec.len() - i) % 3 == 0 {
                grouped.push('_');
            }
            grouped.push(ch);
        }
        forms.push(format!("{grouped}{suffix}"));
    }
    for t in target_lits {
        if t.kind == lit.kind && t.integral_value() == Some(v) {
            forms.push(t.lexeme.clone());
        }
    }
    let mut out: Vec<String> = Vec::new();
    for f in forms {
        if f != lit.lexeme && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

fn numeric_representation(ctx: &Ctx) -> Vec<Raw> {
    let mut target_lits = Vec::new();
    if let Some(t) = ctx.target {
        t.visit_exprs(&mut |e| {
            if let Expr::Lit(l) = e {
                if matches!(l.kind, LitKind::Int | LitKind::Long) {
                    target_lits.push(l.clone());
                }
            }
        });
    }
    let mut out = Vec::new();
    for s in &ctx.sites().exprs {
        let Expr::Lit(lit) = s.expr else { continue };
        if !matches!(lit.kind, LitKind::Int | LitKind::Long) {
            continue;
        }
        for form in spellings(lit, &target_lits) {
            let new = Expr::Lit(Literal::new(lit.kind, form.clone()));
            let b: Bindings = bind([("$c1", lit.lexeme.clone()), ("$c2", form)]);
            out.push(Raw::new(s.path.clone(), b, true, Change::Expr(new)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn lit(s: &str) -> Literal {
        match parse_expr(s).unwrap() {
            Expr::Lit(l) => l,
            _ => unreachable!(),
        }
    }

    #[test]
    fn literal_spellings() {
        assert_eq!(spellings(&lit("1000000"), &[]), ["0xF4240", "0xf4240", "1_000_000"]);
        assert_eq!(spellings(&lit("0xff"), &[]), ["255", "0xFF"]);
        assert_eq!(spellings(&lit("10L"), &[]), ["0xAL", "0xaL"]);
        assert_eq!(spellings(&lit("5"), &[lit("0x05")]), ["0x5", "0x05"]);
    }
}
