//! Statement and control-flow rules.

use super::analysis::{const_value, default_value, is_literal, is_pure, negations, stmt_writes_elements, stmt_writes_var};
use super::engine::{bind, fix, show, Bindings, Change, Ctx, Raw, StmtPos};
use super::{Guard, Imp, RewriteRule, Tier};
use crate::syntax::ast::*;
use crate::syntax::path::{operand_ctx, strip_required, NodePath};
use crate::syntax::print_stmt;
use crate::syntax::typeck::{always_returns, can_complete_normally, can_complete_normally_list, has_targeting_break};

fn rule(
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
    vec![
        rule(
            "conditional-to-expression",
            "Replace If with Conditional Expression",
            &[Typing],
            Some("replace-conditional-operator-with-if"),
            "if ($e1) $v1 = $e2; else $v1 = $e3;",
            "$v1 = $e1 ? $e2 : $e3;",
            conditional_to_expression,
        ),
        rule(
            "replace-conditional-operator-with-if",
            "Replace Conditional Operator with If",
            &[Typing],
            Some("conditional-to-expression"),
            "$v1 = $e1 ? $e2 : $e3;",
            "if ($e1) $v1 = $e2; else $v1 = $e3;",
            conditional_operator_to_if,
        ),
        rule(
            "reverse-conditional",
            "Reverse Conditional",
            &[Typing],
            Some("reverse-conditional"),
            "if ($e1) $s1; else $s2;",
            "if (!$e1) $s2; else $s1;",
            reverse_conditional,
        ),
        rule(
            "swap-conditional-branches",
            "Swap Conditional Branches",
            &[Purity, ControlFlow],
            Some("swap-conditional-branches"),
            "if ($e1 == $c1) $s1; else if ($e1 == $c2) $s2;",
            "if ($e1 == $c2) $s2; else if ($e1 == $c1) $s1;",
            swap_branches,
        ),
        rule(
            "split-conditional-branch",
            "Split Conditional Branch",
            &[],
            Some("merge-conditional-branch"),
            "if ($e1 || $e2) $s1;",
            "if ($e1) $s1; else if ($e2) $s1;",
            split_branch,
        ),
        rule(
            "merge-conditional-branch",
            "Merge Conditional Branch",
            &[],
            Some("split-conditional-branch"),
            "if ($e1) $s1; else if ($e2) $s1;",
            "if ($e1 || $e2) $s1;",
            merge_branch,
        ),
        rule(
            "decompose-conditional-branch",
            "Decompose Conditional Branch",
            &[],
            None,
            "if ($e1 && $e2) $s1;",
            "if ($e1) if ($e2) $s1;",
            decompose_branch,
        ),
        rule(
            "replace-nested-conditional-with-guard-clauses",
            "Replace Nested Conditional with Guard Clauses",
            &[ControlFlow],
            Some("replace-guard-clause-with-conditional"),
            "if ($e1) { return $e2; } else { $s1; }",
            "if ($e1) { return $e2; } $s1;",
            nested_to_guard,
        ),
        rule(
            "replace-guard-clause-with-conditional",
            "Replace Guard Clause with Conditional",
            &[ControlFlow],
            Some("replace-nested-conditional-with-guard-clauses"),
            "if ($e1) { return $e2; } $s1;",
            "if ($e1) { return $e2; } else { $s1; }",
            guard_to_nested,
        ),
        rule(
            "replace-if-with-switch",
            "Replace If with Switch",
            &[Typing, ControlFlow],
            Some("replace-switch-with-if"),
            "if ($v1 == 1) { $s1; } else if ($v1 == 2) { $s2; }",
            "switch ($v1) { case 1: $s1; break; case 2: $s2; }",
            if_to_switch,
        ),
        rule(
            "replace-switch-with-if",
            "Replace Switch with If",
            &[Typing, ControlFlow],
            Some("replace-if-with-switch"),
            "switch ($v1) { case 1: $s1; break; case 2: $s2; }",
            "if ($v1 == 1) { $s1; } else if ($v1 == 2) { $s2; }",
            switch_to_if,
        ),
        rule(
            "replace-for-with-foreach",
            "Replace For with Enhanced For",
            &[Binding, ControlFlow],
            Some("replace-foreach-with-for"),
            "for (int $v1 = 0; $v1 < $v2.length; $v1++) { int $v3 = $v2[$v1]; $s1; }",
            "for (int $v3 : $v2) { $s1; }",
            for_to_foreach,
        ),
        rule(
            "replace-foreach-with-for",
            "Replace Enhanced For with For",
            &[Binding],
            Some("replace-for-with-foreach"),
            "for (int $v3 : $v2) { $s1; }",
            "for (int $v1 = 0; $v1 < $v2.length; $v1++) { int $v3 = $v2[$v1]; $s1; }",
            foreach_to_for,
        ),
        rule(
            "wrap-statement-in-block",
            "Wrap Statement in Block",
            &[],
            Some("unwrap-statement-from-block"),
            "if ($e1) $s1;",
            "if ($e1) { $s1; }",
            wrap_in_block,
        ),
        rule(
            "unwrap-statement-from-block",
            "Unwrap Statement from Block",
            &[],
            Some("wrap-statement-in-block"),
            "if ($e1) { $s1; }",
            "if ($e1) $s1;",
            unwrap_block,
        ),
        rule(
            "remove-dead-code",
            "Remove Dead Code",
            &[ControlFlow],
            Some("introduce-dead-code"),
            "if (false) { $s1; }",
            "",
            remove_dead_code,
        ),
        rule(
            "introduce-dead-code",
            "Introduce Dead Code",
            &[ControlFlow],
            Some("remove-dead-code"),
            "",
            "if (false) { $s1; }",
            introduce_dead_code,
        ),
        rule(
            "remove-unused-variable",
            "Remove Unused Variable",
            &[Purity, Binding],
            None,
            "int $v1 = $e1;",
            "",
            remove_unused_variable,
        ),
        rule(
            "remove-branch-by-pre-assignment",
            "Remove Branch by Pre-Assignment",
            &[Purity, Binding],
            Some("introduce-branch-for-pre-assignment"),
            "if ($e1) $v1 = $e2; else $v1 = $e3;",
            "$v1 = $e3; if ($e1) $v1 = $e2;",
            remove_branch,
        ),
        rule(
            "introduce-branch-for-pre-assignment",
            "Introduce Branch for Pre-Assignment",
            &[Purity, Binding],
            Some("remove-branch-by-pre-assignment"),
            "$v1 = $e3; if ($e1) $v1 = $e2;",
            "if ($e1) $v1 = $e2; else $v1 = $e3;",
            introduce_branch,
        ),
        rule(
            "split-variable-declaration",
            "Split Variable Declaration",
            &[],
            Some("merge-variable-declaration"),
            "int $v1 = $e1, $v2 = $e2;",
            "int $v1 = $e1; int $v2 = $e2;",
            split_declaration,
        ),
        rule(
            "merge-variable-declaration",
            "Merge Variable Declaration",
            &[],
            Some("split-variable-declaration"),
            "int $v1 = $e1; int $v2 = $e2;",
            "int $v1 = $e1, $v2 = $e2;",
            merge_declaration,
        ),
        rule(
            "split-variable-declaration-and-initialization",
            "Split Variable Declaration and Initialization",
            &[],
            Some("consolidate-variable-declaration-and-initialization"),
            "int $v1 = $e1;",
            "int $v1; $v1 = $e1;",
            split_initialization,
        ),
        rule(
            "consolidate-variable-declaration-and-initialization",
            "Consolidate Variable Declaration and Initialization",
            &[Binding],
            Some("split-variable-declaration-and-initialization"),
            "int $v1; $v1 = $e1;",
            "int $v1 = $e1;",
            consolidate_initialization,
        ),
        rule(
            "introduce-return-variable",
            "Introduce Return Variable",
            &[Binding],
            Some("inline-return-variable"),
            "return $e1;",
            "int $v1 = $e1; return $v1;",
            introduce_return_variable,
        ),
        rule(
            "inline-return-variable",
            "Inline Return Variable",
            &[Typing, Binding],
            Some("introduce-return-variable"),
            "int $v1 = $e1; return $v1;",
            "return $e1;",
            inline_return_variable,
        ),
        rule(
            "split-chained-assignment",
            "Split Chained Assignment",
            &[],
            None,
            "$v1 = $v2 = $e1;",
            "$v2 = $e1; $v1 = $v2;",
            split_chained_assignment,
        ),
    ]
}

/// The `i`-th operand of `e` without the parentheses its position needs.
fn operand(e: &Expr, i: usize) -> &Expr {
    strip_required(e.children()[i], operand_ctx(e, i))
}

fn unbrace(s: &Stmt) -> &Stmt {
    match s {
        Stmt::Block(v) if v.len() == 1 => &v[0],
        s => s,
    }
}

/// The statement as written and wrapped in a block.
fn brace_variants(s: Stmt) -> [(Stmt, &'static str); 2] {
    [(s.clone(), "plain"), (Stmt::block(vec![s]), "braced")]
}

fn with(mut b: Bindings, key: &str, value: impl Into<String>) -> Bindings {
    b.insert(key.to_string(), value.into());
    b
}

/// `x = e;`, possibly as the only statement of a block.
fn assignment(s: &Stmt) -> Option<(&str, &Expr)> {
    match unbrace(s) {
        Stmt::Expr(Expr::Assign(AssignOp::Assign, t, v)) => Some((t.as_var()?, &**v)),
        _ => None,
    }
}

fn returned(s: &Stmt) -> Option<&Expr> {
    match unbrace(s) {
        Stmt::Return(e) => Some(e),
        _ => None,
    }
}

fn assign_stmt(x: &str, v: Expr) -> Stmt {
    Stmt::Expr(fix(Expr::assign(AssignOp::Assign, Expr::var(x), v)))
}

fn ternary(c: &Expr, a: &Expr, b: &Expr) -> Expr {
    fix(Expr::Ternary(Box::new(c.clone()), Box::new(a.clone()), Box::new(b.clone())))
}

fn list_positions<'c, 'a>(ctx: &'c Ctx<'a>) -> impl Iterator<Item = (NodePath, usize, &'a [Stmt])> + 'c {
    ctx.sites()
        .lists
        .iter()
        .flat_map(|l| (0..l.stmts.len()).map(move |i| (l.path.child(i), i, l.stmts)))
}

fn conditional_to_expression(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::If(c, t, e) = s.stmt else { continue };
        if let Some(e) = e {
            if let (Some((x, a)), Some((y, b))) = (assignment(t), assignment(e)) {
                if x == y {
                    let new = assign_stmt(x, ternary(c, a, b));
                    let bnd = bind([("$v1", x.to_string()), ("$e1", show(c)), ("$e2", show(a)), ("$e3", show(b))]);
                    out.push(Raw::new(s.path.clone(), bnd, true, Change::Stmt(new)));
                }
            }
            if let (Some(a), Some(b)) = (returned(t), returned(e)) {
                let new = Stmt::Return(ternary(c, a, b));
                let bnd = bind([("$e1", show(c)), ("$e2", show(a)), ("$e3", show(b))]);
                out.push(Raw::new(s.path.clone(), bnd, true, Change::Stmt(new)));
            }
        }
    }
    // `if (c) return a; return b;`
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::If(c, t, None) = &stmts[i] else { continue };
        let (Some(a), Some(Stmt::Return(b))) = (returned(t), stmts.get(i + 1)) else { continue };
        let new = Stmt::Return(ternary(c, a, b));
        let bnd = bind([("$e1", show(c)), ("$e2", show(a)), ("$e3", show(b)), ("form", "guard".into())]);
        out.push(Raw::new(path, bnd, true, Change::Splice { len: 2, with: vec![new] }));
    }
    out
}

fn conditional_operator_to_if(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let (x, tern) = match s.stmt {
            Stmt::Expr(Expr::Assign(AssignOp::Assign, t, v)) if t.as_var().is_some() => (t.as_var(), &**v),
            Stmt::Return(v) => (None, v),
            _ => continue,
        };
        let Expr::Ternary(..) = tern else { continue };
        let (c, a, b) = (operand(tern, 0), operand(tern, 1), operand(tern, 2));
        let make = |v: &Expr| match x {
            Some(x) => assign_stmt(x, v.clone()),
            None => Stmt::Return(v.clone()),
        };
        let mut bnd = bind([("$e1", show(c)), ("$e2", show(a)), ("$e3", show(b))]);
        if let Some(x) = x {
            bnd = with(bnd, "$v1", x);
        }
        for (then, tv) in brace_variants(make(a)) {
            for (els, ev) in brace_variants(make(b)) {
                let form = if tv == ev { tv.to_string() } else { format!("{tv}-{ev}") };
                let new = Stmt::if_(c.clone(), then.clone(), Some(els));
                out.push(Raw::new(s.path.clone(), with(bnd.clone(), "form", form), true, Change::Stmt(new)));
            }
        }
        if x.is_none() && s.pos == StmtPos::List {
            for (then, tv) in brace_variants(make(a)) {
                let new = vec![Stmt::if_(c.clone(), then, None), make(b)];
                out.push(Raw::new(
                    s.path.clone(),
                    with(bnd.clone(), "form", format!("guard-{tv}")),
                    true,
                    Change::Splice { len: 1, with: new },
                ));
            }
        }
    }
    out
}

/// Both operands of a comparison are integral, so orderings may flip.
fn integral_comparison(ctx: &Ctx, c: &Expr) -> bool {
    match c {
        Expr::Binary(op, l, r) if op.is_comparison() => {
            ctx.ty(l).is_some_and(|t| t.is_integral()) && ctx.ty(r).is_some_and(|t| t.is_integral())
        }
        _ => false,
    }
}

/// A branch as written, and the other nesting of an `if` it may take.
fn nesting_variants(s: &Stmt) -> Vec<Stmt> {
    let mut v = vec![s.clone()];
    match s {
        Stmt::If(..) => v.push(Stmt::block(vec![s.clone()])),
        Stmt::Block(items) if items.len() == 1 && matches!(items[0], Stmt::If(..)) => v.push(items[0].clone()),
        _ => {}
    }
    v
}

fn reverse_conditional(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::If(c, t, Some(e)) = s.stmt else { continue };
        for (k, neg) in negations(c, integral_comparison(ctx, c)).into_iter().enumerate() {
            for (i, then) in nesting_variants(e).into_iter().enumerate() {
                for (j, els) in nesting_variants(t).into_iter().enumerate() {
                    let bnd = bind([("$e1", show(c)), ("$e2", show(&neg)), ("form", format!("{k}{i}{j}"))]);
                    let new = Stmt::if_(neg.clone(), then.clone(), Some(els));
                    out.push(Raw::new(s.path.clone(), bnd, true, Change::Stmt(new)));
                }
            }
        }
    }
    out
}

/// `e == literal`.
fn eq_literal(c: &Expr) -> Option<(&Expr, &Expr)> {
    match c {
        Expr::Binary(BinaryOp::Eq, l, r) if is_literal(r) => Some((l, r)),
        _ => None,
    }
}

fn swap_branches(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::If(c1, s1, Some(rest)) = s.stmt else { continue };
        let Stmt::If(c2, s2, tail) = &**rest else { continue };
        let (Some((x1, l1)), Some((x2, l2))) = (eq_literal(c1), eq_literal(c2)) else { continue };
        if x1 != x2 {
            continue;
        }
        let (v1, v2) = (const_value(l1), const_value(l2));
        let disjoint = v1.is_some() && v2.is_some() && v1 != v2;
        let ok = disjoint && is_pure(x1);
        let inner = Stmt::If(c1.clone(), s1.clone(), tail.clone());
        let new = Stmt::if_(c2.clone(), (**s2).clone(), Some(inner));
        let bnd = bind([("$e1", show(x1)), ("$c1", show(l1)), ("$c2", show(l2))]);
        out.push(Raw::new(s.path.clone(), bnd, ok, Change::Stmt(new)));
    }
    out
}

fn split_branch(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::If(c, t, e) = s.stmt else { continue };
        let Expr::Binary(BinaryOp::Or, ..) = c else { continue };
        let (c1, c2) = (operand(c, 0), operand(c, 1));
        let inner = Stmt::If(c2.clone(), t.clone(), e.clone());
        let new = Stmt::if_(c1.clone(), (**t).clone(), Some(inner));
        let bnd = bind([("$e1", show(c1)), ("$e2", show(c2))]);
        out.push(Raw::new(s.path.clone(), bnd, true, Change::Stmt(new)));
    }
    out
}

fn merge_branch(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::If(c1, t1, Some(rest)) = s.stmt else { continue };
        let Stmt::If(c2, t2, tail) = &**rest else { continue };
        if t1 != t2 {
            continue;
        }
        let c = fix(Expr::binary(BinaryOp::Or, c1.clone(), c2.clone()));
        let new = Stmt::If(c, t1.clone(), tail.clone());
        let bnd = bind([("$e1", show(c1)), ("$e2", show(c2))]);
        out.push(Raw::new(s.path.clone(), bnd, true, Change::Stmt(new)));
    }
    out
}

fn decompose_branch(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::If(c, t, None) = s.stmt else { continue };
        let Expr::Binary(BinaryOp::And, ..) = c else { continue };
        let (c1, c2) = (operand(c, 0), operand(c, 1));
        let inner = Stmt::if_(c2.clone(), (**t).clone(), None);
        for (body, form) in brace_variants(inner) {
            let bnd = bind([("$e1", show(c1)), ("$e2", show(c2)), ("form", form.into())]);
            let new = Stmt::if_(c1.clone(), body, None);
            out.push(Raw::new(s.path.clone(), bnd, true, Change::Stmt(new)));
        }
    }
    out
}

fn nested_to_guard(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for l in &ctx.sites().lists {
        let Some(Stmt::If(c, t, Some(e))) = l.stmts.last() else { continue };
        let rest = e.as_list();
        let new: Vec<Stmt> = std::iter::once(Stmt::If(c.clone(), t.clone(), None)).chain(rest).collect();
        let bnd = bind([("$e1", show(c))]);
        let path = l.path.child(l.stmts.len() - 1);
        out.push(Raw::new(path, bnd, always_returns(t), Change::Splice { len: 1, with: new }));
    }
    out
}

fn guard_to_nested(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::If(c, t, None) = &stmts[i] else { continue };
        let rest = &stmts[i + 1..];
        if rest.is_empty() {
            continue;
        }
        let mut elses = vec![(Stmt::block(rest.to_vec()), "braced")];
        if rest.len() == 1 {
            elses.push((rest[0].clone(), "plain"));
        }
        for (els, form) in elses {
            let new = Stmt::If(c.clone(), t.clone(), Some(Box::new(els)));
            let bnd = bind([("$e1", show(c)), ("form", form.into())]);
            out.push(Raw::new(
                path.clone(),
                bnd,
                always_returns(t),
                Change::Splice {
                    len: rest.len() + 1,
                    with: vec![new],
                },
            ));
        }
    }
    out
}

/// Arms of an `if`/`else if` chain and its final `else`.
fn if_chain(s: &Stmt) -> (Vec<(&Expr, &Stmt)>, Option<&Stmt>) {
    let mut arms = Vec::new();
    let mut cur = s;
    loop {
        match cur {
            Stmt::If(c, t, e) => {
                arms.push((c, &**t));
                match e {
                    Some(e) if matches!(**e, Stmt::If(..)) => cur = e,
                    Some(e) => return (arms, Some(e)),
                    None => return (arms, None),
                }
            }
            _ => return (arms, None),
        }
    }
}

fn if_to_switch(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::If(..) = s.stmt else { continue };
        let (arms, els) = if_chain(s.stmt);
        let Some((Expr::Var(x), _)) = eq_literal(arms[0].0) else { continue };
        let mut labels = Vec::new();
        let mut bodies = Vec::new();
        let mut shape_ok = true;
        for (c, body) in &arms {
            match (eq_literal(c), body) {
                (Some((Expr::Var(y), l)), Stmt::Block(items)) if y == x => {
                    labels.push(Some(l.clone()));
                    bodies.push(items);
                }
                _ => shape_ok = false,
            }
        }
        match els {
            Some(Stmt::Block(items)) => {
                labels.push(None);
                bodies.push(items);
            }
            Some(_) => shape_ok = false,
            None => {}
        }
        if !shape_ok || bodies.len() < 2 {
            continue;
        }
        let values: Vec<_> = labels.iter().flatten().map(const_value).collect();
        let distinct = values.iter().all(|v| matches!(v, Some(super::analysis::Const::Int(_))))
            && (0..values.len()).all(|i| !values[i + 1..].contains(&values[i]));
        let ok = distinct
            && ctx.info.var_type(x) == Some(&Type::Int)
            && bodies.iter().all(|b| !b.iter().any(has_targeting_break));
        let n = bodies.len();
        let case = |i: usize, with_break: bool| {
            let mut body = bodies[i].clone();
            if with_break && can_complete_normally_list(&body) {
                body.push(Stmt::Break);
            }
            SwitchCase {
                label: labels[i].clone(),
                body,
            }
        };
        let mut variants = vec![true];
        if can_complete_normally_list(bodies[n - 1]) {
            variants.push(false);
        }
        for last_break in variants {
            let cases: Vec<SwitchCase> = (0..n).map(|i| case(i, i + 1 < n || last_break)).collect();
            let bnd = bind([("$v1", x.clone()), ("form", if last_break { "break" } else { "open" }.into())]);
            out.push(Raw::new(s.path.clone(), bnd, ok, Change::Stmt(Stmt::Switch(Expr::var(x), cases))));
        }
    }
    out
}

fn switch_to_if(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for s in &ctx.sites().stmts {
        let Stmt::Switch(Expr::Var(x), cases) = s.stmt else { continue };
        let n = cases.len();
        if n < 2 || cases[..n - 1].iter().any(|c| c.label.is_none()) || cases.iter().any(|c| c.body.is_empty()) {
            continue;
        }
        let mut ok = ctx.info.var_type(x) == Some(&Type::Int);
        let mut arms = Vec::new();
        for (i, c) in cases.iter().enumerate() {
            let mut body = c.body.clone();
            if body.last() == Some(&Stmt::Break) {
                body.pop();
            } else if i + 1 < n && can_complete_normally_list(&body) {
                // falls through into the next case
                ok = false;
            }
            ok &= !body.iter().any(has_targeting_break);
            arms.push((c.label.clone(), Stmt::block(body)));
        }
        let mut chain: Option<Stmt> = None;
        for (label, body) in arms.into_iter().rev() {
            chain = Some(match label {
                None => body,
                Some(l) => Stmt::if_(Expr::binary(BinaryOp::Eq, Expr::var(x), l), body, chain),
            });
        }
        let bnd = bind([("$v1", x.clone())]);
        out.push(Raw::new(s.path.clone(), bnd, ok, Change::Stmt(chain.expect("two or more cases"))));
    }
    out
}

/// `for (int i = 0; i < a.length; i++)`, returning `i` and `a`.
fn counting_loop(s: &Stmt) -> Option<(&str, &str, &Stmt)> {
    let Stmt::For {
        init,
        cond: Some(cond),
        update,
        body,
    } = s
    else {
        return None;
    };
    let [Stmt::Decl(d)] = init.as_slice() else { return None };
    let [dc] = d.declarators.as_slice() else { return None };
    if d.ty != Type::Int || dc.dims != 0 || dc.init != Some(Expr::Lit(Literal::int(0))) {
        return None;
    }
    let i = dc.name.as_str();
    let Expr::Binary(BinaryOp::Lt, l, r) = cond else { return None };
    let Expr::Length(arr) = &**r else { return None };
    let a = arr.as_var()?;
    if l.as_var() != Some(i) {
        return None;
    }
    match update.as_slice() {
        [Expr::IncDec(IncDec::Inc, Fixity::Postfix, t)] if t.as_var() == Some(i) => Some((i, a, body)),
        _ => None,
    }
}

fn is_elem_read(e: &Expr, a: &str, i: &str) -> bool {
    matches!(e, Expr::Index(x, y) if x.as_var() == Some(a) && y.as_var() == Some(i))
}

/// Every mention of `i` in `s` is an element read `a[i]`.
fn index_only_in_reads(s: &Stmt, a: &str, i: &str) -> bool {
    let (mut uses, mut reads) = (0, 0);
    s.visit_exprs(&mut |e| {
        uses += usize::from(e.as_var() == Some(i));
        reads += usize::from(is_elem_read(e, a, i));
    });
    uses == reads
}

fn replace_in_stmt(s: &mut Stmt, f: &dyn Fn(&Expr) -> Option<Expr>) {
    s.visit_exprs_mut(&mut |e| {
        if let Some(new) = f(e) {
            *e = new;
        }
    });
}

fn for_to_foreach(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    let fresh = ctx.new_names();
    for s in &ctx.sites().stmts {
        let Some((i, a, body)) = counting_loop(s.stmt) else { continue };
        let Some(elem) = ctx.info.var_type(a).and_then(Type::element).cloned() else { continue };
        let a_stable = !stmt_writes_var(body, a);
        // `T v = a[i];` opening the body
        if let Stmt::Block(items) = body {
            if let Some(Stmt::Decl(d)) = items.first() {
                if let [dc] = d.declarators.as_slice() {
                    if dc.dims == 0 && dc.init.as_ref().is_some_and(|e| is_elem_read(e, a, i)) {
                        let rest = &items[1..];
                        let ok = a_stable && !rest.iter().any(|r| r.mentions(i));
                        let mut bodies = vec![(Stmt::block(rest.to_vec()), "braced")];
                        if rest.len() == 1 {
                            bodies.push((rest[0].clone(), "plain"));
                        }
                        for (b, form) in bodies {
                            let new = Stmt::Foreach {
                                is_final: d.is_final,
                                ty: d.ty.clone(),
                                name: dc.name.clone(),
                                iterable: Expr::var(a),
                                body: Box::new(b),
                            };
                            let bnd = bind([("$v1", i.into()), ("$v2", a.into()), ("$v3", dc.name.clone()), ("form", form.into())]);
                            out.push(Raw::new(s.path.clone(), bnd, ok, Change::Stmt(new)));
                        }
                    }
                }
            }
        }
        // element reads replaced by a fresh loop variable
        for v in &fresh {
            let ok = a_stable && index_only_in_reads(body, a, i) && !stmt_writes_elements(body) && !ctx.is_bound(v);
            let mut b = body.clone();
            replace_in_stmt(&mut b, &|e| is_elem_read(e, a, i).then(|| Expr::var(v.clone())));
            let new = Stmt::Foreach {
                is_final: false,
                ty: elem.clone(),
                name: v.clone(),
                iterable: Expr::var(a),
                body: Box::new(b),
            };
            let bnd = bind([("$v1", i.into()), ("$v2", a.into()), ("$v3", v.clone()), ("form", "substituted".into())]);
            out.push(Raw::new(s.path.clone(), bnd, ok, Change::Stmt(new)));
        }
    }
    out
}

fn counting_for(i: &str, a: &str, body: Stmt) -> Stmt {
    Stmt::For {
        init: vec![Stmt::Decl(LocalDecl::single(Type::Int, i, Some(Expr::Lit(Literal::int(0)))))],
        cond: Some(Expr::binary(BinaryOp::Lt, Expr::var(i), Expr::Length(Box::new(Expr::var(a))))),
        update: vec![Expr::IncDec(IncDec::Inc, Fixity::Postfix, Box::new(Expr::var(i)))],
        body: Box::new(body),
    }
}

fn foreach_to_for(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    let fresh = ctx.new_names();
    for s in &ctx.sites().stmts {
        let Stmt::Foreach {
            is_final,
            ty,
            name: v,
            iterable: Expr::Var(a),
            body,
        } = s.stmt
        else {
            continue;
        };
        let elem = ctx.info.var_type(a).and_then(Type::element).cloned();
        let a_stable = !stmt_writes_var(body, a);
        for i in &fresh {
            let ok = a_stable && !ctx.is_bound(i);
            let read = Expr::Index(Box::new(Expr::var(a)), Box::new(Expr::var(i)));
            let decl = Stmt::Decl(LocalDecl {
                is_final: *is_final,
                ty: ty.clone(),
                declarators: vec![Declarator::new(v.clone(), Some(read.clone()))],
            });
            let items: Vec<Stmt> = std::iter::once(decl).chain(body.as_list()).collect();
            let bnd = bind([("$v1", i.clone()), ("$v2", a.clone()), ("$v3", v.clone())]);
            out.push(Raw::new(
                s.path.clone(),
                with(bnd.clone(), "form", "declared"),
                ok,
                Change::Stmt(counting_for(i, a, Stmt::block(items))),
            ));
            let sub_ok = ok && !is_final && elem.as_ref() == Some(ty) && !stmt_writes_var(body, v) && !stmt_writes_elements(body);
            let mut b = (**body).clone();
            replace_in_stmt(&mut b, &|e| (e.as_var() == Some(v)).then(|| read.clone()));
            out.push(Raw::new(
                s.path.clone(),
                with(bnd, "form", "substituted"),
                sub_ok,
                Change::Stmt(counting_for(i, a, b)),
            ));
        }
    }
    out
}

fn wrap_in_block(ctx: &Ctx) -> Vec<Raw> {
    ctx.sites()
        .stmts
        .iter()
        .filter(|s| s.pos == StmtPos::Body && (ctx.target.is_some() || !matches!(s.stmt, Stmt::Block(_))))
        .map(|s| {
            Raw::new(
                s.path.clone(),
                bind([("$s1", print_stmt(s.stmt))]),
                true,
                Change::Stmt(Stmt::block(vec![s.stmt.clone()])),
            )
        })
        .collect()
}

fn unwrap_block(ctx: &Ctx) -> Vec<Raw> {
    ctx.sites()
        .stmts
        .iter()
        .filter(|s| s.pos == StmtPos::Body)
        .filter_map(|s| match s.stmt {
            Stmt::Block(items) if items.len() == 1 => Some(Raw::new(
                s.path.clone(),
                bind([("$s1", print_stmt(&items[0]))]),
                !matches!(items[0], Stmt::Decl(_)),
                Change::Stmt(items[0].clone()),
            )),
            _ => None,
        })
        .collect()
}

fn is_false(e: &Expr) -> bool {
    matches!(e, Expr::Lit(l) if l.kind == LitKind::Bool && l.lexeme == "false")
}

fn remove_dead_code(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for l in &ctx.sites().lists {
        for (i, s) in l.stmts.iter().enumerate() {
            if let Stmt::If(c, _, None) = s {
                if is_false(c) {
                    out.push(Raw::new(
                        l.path.child(i),
                        bind([("$s1", print_stmt(s))]),
                        true,
                        Change::Splice { len: 1, with: vec![] },
                    ));
                }
            }
        }
        if let Some(k) = l.stmts.iter().position(|s| !can_complete_normally(s)) {
            let tail = &l.stmts[k + 1..];
            if !tail.is_empty() {
                let text: Vec<String> = tail.iter().map(print_stmt).collect();
                out.push(Raw::new(
                    l.path.child(k + 1),
                    bind([("$s1", text.join(" "))]),
                    true,
                    Change::Splice {
                        len: tail.len(),
                        with: vec![],
                    },
                ));
            }
        }
    }
    out
}

fn introduce_dead_code(ctx: &Ctx) -> Vec<Raw> {
    let mut guarded: Vec<Stmt> = Vec::new();
    let mut tails: Vec<Vec<Stmt>> = Vec::new();
    match ctx.target_sites() {
        Some(ts) => {
            for l in &ts.lists {
                for s in l.stmts {
                    if matches!(s, Stmt::If(c, _, None) if is_false(c)) && !guarded.contains(s) {
                        guarded.push(s.clone());
                    }
                }
                if let Some(k) = l.stmts.iter().position(|s| !can_complete_normally(s)) {
                    let tail = l.stmts[k + 1..].to_vec();
                    if !tail.is_empty() && !tails.contains(&tail) {
                        tails.push(tail);
                    }
                }
            }
        }
        None => {
            let ret = Stmt::Return(default_value(&ctx.ast.return_type));
            guarded.push(Stmt::if_(Expr::Lit(Literal::boolean(false)), Stmt::block(vec![ret]), None));
        }
    }
    let mut out = Vec::new();
    for l in &ctx.sites().lists {
        for g in &guarded {
            for i in 0..=l.stmts.len() {
                out.push(Raw::new(
                    l.path.child(i),
                    bind([("$s1", print_stmt(g))]),
                    true,
                    Change::Splice {
                        len: 0,
                        with: vec![g.clone()],
                    },
                ));
            }
        }
        let Some(last) = l.stmts.last() else { continue };
        if can_complete_normally(last) || l.stmts[..l.stmts.len() - 1].iter().any(|s| !can_complete_normally(s)) {
            continue;
        }
        for t in &tails {
            let text: Vec<String> = t.iter().map(print_stmt).collect();
            out.push(Raw::new(
                l.path.child(l.stmts.len()),
                bind([("$s1", text.join(" "))]),
                true,
                Change::Splice { len: 0, with: t.clone() },
            ));
        }
    }
    out
}

fn remove_unused_variable(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::Decl(d) = &stmts[i] else { continue };
        let [dc] = d.declarators.as_slice() else { continue };
        let ok = dc.init.as_ref().map_or(true, is_pure) && !ctx.ast.mentions(&dc.name);
        out.push(Raw::new(
            path,
            bind([("$v1", dc.name.clone())]),
            ok,
            Change::Splice { len: 1, with: vec![] },
        ));
    }
    out
}

/// `c` and `d` may move past each other and past a write of `x`, and `v`
/// does not read the pre-assigned value.
fn pre_assignable(c: &Expr, x: &str, v: &Expr, d: &Expr) -> bool {
    is_pure(c) && is_pure(d) && !c.mentions(x) && !v.mentions(x)
}

fn remove_branch(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::If(c, t, Some(e)) = &stmts[i] else { continue };
        let (Some((x, v)), Some((y, d))) = (assignment(t), assignment(e)) else { continue };
        if x != y {
            continue;
        }
        let ok = pre_assignable(c, x, v, d);
        let bnd = bind([("$v1", x.into()), ("$e1", show(c)), ("$e2", show(v)), ("$e3", show(d))]);
        for (then, form) in brace_variants(assign_stmt(x, v.clone())) {
            let new = vec![assign_stmt(x, d.clone()), Stmt::if_(c.clone(), then, None)];
            out.push(Raw::new(path.clone(), with(bnd.clone(), "form", form), ok, Change::Splice { len: 1, with: new }));
        }
    }
    out
}

fn introduce_branch(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Some(Stmt::If(c, t, None)) = stmts.get(i + 1) else { continue };
        let (Some((y, d)), Some((x, v))) = (assignment(&stmts[i]), assignment(t)) else { continue };
        if x != y || matches!(stmts[i], Stmt::Block(_)) {
            continue;
        }
        let ok = pre_assignable(c, x, v, d);
        let bnd = bind([("$v1", x.into()), ("$e1", show(c)), ("$e2", show(v)), ("$e3", show(d))]);
        for ((then, form), (els, _)) in brace_variants(assign_stmt(x, v.clone()))
            .into_iter()
            .zip(brace_variants(assign_stmt(x, d.clone())))
        {
            let new = Stmt::if_(c.clone(), then, Some(els));
            out.push(Raw::new(path.clone(), with(bnd.clone(), "form", form), ok, Change::Splice { len: 2, with: vec![new] }));
        }
    }
    out
}

fn split_declaration(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::Decl(d) = &stmts[i] else { continue };
        for k in 1..d.declarators.len() {
            let part = |ds: &[Declarator]| {
                Stmt::Decl(LocalDecl {
                    is_final: d.is_final,
                    ty: d.ty.clone(),
                    declarators: ds.to_vec(),
                })
            };
            let new = vec![part(&d.declarators[..k]), part(&d.declarators[k..])];
            let bnd = bind([("$v1", d.declarators[k - 1].name.clone()), ("$v2", d.declarators[k].name.clone())]);
            out.push(Raw::new(path.clone(), bnd, true, Change::Splice { len: 1, with: new }));
        }
    }
    out
}

fn merge_declaration(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let (Stmt::Decl(a), Some(Stmt::Decl(b))) = (&stmts[i], stmts.get(i + 1)) else { continue };
        if a.ty != b.ty || a.is_final != b.is_final {
            continue;
        }
        let mut merged = a.clone();
        merged.declarators.extend(b.declarators.iter().cloned());
        let bnd = bind([
            ("$v1", a.declarators.last().map(|d| d.name.clone()).unwrap_or_default()),
            ("$v2", b.declarators[0].name.clone()),
        ]);
        out.push(Raw::new(path, bnd, true, Change::Splice { len: 2, with: vec![Stmt::Decl(merged)] }));
    }
    out
}

fn split_initialization(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::Decl(d) = &stmts[i] else { continue };
        let [dc] = d.declarators.as_slice() else { continue };
        let Some(init) = &dc.init else { continue };
        if d.is_final || matches!(init, Expr::ArrayInit(..)) && dc.dims > 0 {
            continue;
        }
        let mut bare = d.clone();
        bare.declarators[0].init = None;
        let new = vec![Stmt::Decl(bare), assign_stmt(&dc.name, init.clone())];
        let bnd = bind([("$v1", dc.name.clone()), ("$e1", show(init))]);
        out.push(Raw::new(path, bnd, true, Change::Splice { len: 1, with: new }));
    }
    out
}

fn consolidate_initialization(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::Decl(d) = &stmts[i] else { continue };
        let [dc] = d.declarators.as_slice() else { continue };
        let Some(next) = stmts.get(i + 1) else { continue };
        let Stmt::Expr(Expr::Assign(AssignOp::Assign, t, v)) = next else { continue };
        if dc.init.is_some() || t.as_var() != Some(&dc.name) || d.is_final {
            continue;
        }
        let mut full = d.clone();
        full.declarators[0].init = Some((**v).clone());
        let bnd = bind([("$v1", dc.name.clone()), ("$e1", show(v))]);
        out.push(Raw::new(path, bnd, !v.mentions(&dc.name), Change::Splice { len: 2, with: vec![Stmt::Decl(full)] }));
    }
    out
}

fn introduce_return_variable(ctx: &Ctx) -> Vec<Raw> {
    let names = ctx.new_names();
    let names: Vec<&String> = match ctx.target {
        Some(_) => names.iter().collect(),
        None => names.iter().take(1).collect(),
    };
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::Return(e) = &stmts[i] else { continue };
        if matches!(e, Expr::Var(_)) && ctx.target.is_none() {
            continue;
        }
        for v in &names {
            let decl = Stmt::Decl(LocalDecl::single(ctx.ast.return_type.clone(), v.as_str(), Some(e.clone())));
            let new = vec![decl, Stmt::Return(Expr::var(v.as_str()))];
            let bnd = bind([("$v1", v.to_string()), ("$e1", show(e))]);
            out.push(Raw::new(path.clone(), bnd, !ctx.is_bound(v), Change::Splice { len: 1, with: new }));
        }
    }
    out
}

fn inline_return_variable(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let (Stmt::Decl(d), Some(Stmt::Return(Expr::Var(r)))) = (&stmts[i], stmts.get(i + 1)) else { continue };
        let [dc] = d.declarators.as_slice() else { continue };
        let Some(init) = &dc.init else { continue };
        if dc.name != *r {
            continue;
        }
        let ok = !d.is_final
            && dc.dims == 0
            && d.declared_type(dc) == ctx.ast.return_type
            && !stmts[i + 2..].iter().any(|s| s.mentions(r));
        let bnd = bind([("$v1", r.clone()), ("$e1", show(init))]);
        out.push(Raw::new(path, bnd, ok, Change::Splice { len: 2, with: vec![Stmt::Return(init.clone())] }));
    }
    out
}

fn split_chained_assignment(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (path, i, stmts) in list_positions(ctx) {
        let Stmt::Expr(Expr::Assign(AssignOp::Assign, a, inner)) = &stmts[i] else { continue };
        let Expr::Assign(AssignOp::Assign, b, e) = &**inner else { continue };
        let (Some(a), Some(b)) = (a.as_var(), b.as_var()) else { continue };
        let new = vec![assign_stmt(b, (**e).clone()), assign_stmt(a, Expr::var(b))];
        let bnd = bind([("$v1", a.into()), ("$v2", b.into()), ("$e1", show(e))]);
        out.push(Raw::new(path, bnd, true, Change::Splice { len: 1, with: new }));
    }
    out
}
