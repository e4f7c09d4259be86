//! Rules over names and declarations: renames, extracting and inlining
//! variables, local types and modifiers.

use super::analysis::{has_writes, is_pure, stmt_writes_var};
use super::engine::{bind, own_exprs_mut, rename_all, replace_expr, show, Change, Ctx, Raw, StmtPos};
use super::{Guard, Imp, RewriteRule, Tier};
use crate::syntax::ast::*;
use crate::syntax::path::NodePath;

#[allow(clippy::too_many_arguments)]
fn rule(
    id: &'static str,
    name: &'static str,
    tier: Tier,
    guards: &'static [Guard],
    inverse: Option<&'static str>,
    lhs: &'static str,
    rhs: &'static str,
    f: super::Matcher,
) -> RewriteRule {
    RewriteRule {
        id,
        name,
        tier,
        lhs,
        rhs,
        guards,
        inverse,
        imp: Imp::Native(f),
    }
}

pub fn rules() -> Vec<RewriteRule> {
    use Guard::*;
    use Tier::*;
    vec![
        rule(
            "rename-method",
            "Rename Method",
            Detector,
            &[Binding],
            Some("rename-method"),
            "int $m1(int $v1) { return $e1; }",
            "int $m2(int $v1) { return $e1; }",
            rename_method,
        ),
        rule(
            "rename-parameter",
            "Rename Parameter",
            Detector,
            &[Binding],
            Some("rename-parameter"),
            "int $m1(int $v1) { return $v1; }",
            "int $m1(int $v2) { return $v2; }",
            rename_parameter,
        ),
        rule(
            "rename-variable",
            "Rename Variable",
            Detector,
            &[Binding],
            Some("rename-variable"),
            "int $v1 = $e1; return $v1;",
            "int $v2 = $e1; return $v2;",
            rename_variable,
        ),
        rule(
            "extract-variable",
            "Extract Variable",
            Detector,
            &[Binding, Purity],
            Some("inline-variable"),
            "return $e1 + $e2;",
            "int $v1 = $e1; return $v1 + $e2;",
            extract_variable,
        ),
        rule(
            "inline-variable",
            "Inline Variable",
            Detector,
            &[Binding, Purity, Typing],
            Some("extract-variable"),
            "int $v1 = $e1; return $v1 + $e2;",
            "return $e1 + $e2;",
            inline_variable,
        ),
        rule(
            "change-variable-type",
            "Change Variable Type",
            Detector,
            &[Typing],
            None,
            "int $v1 = $e1;",
            "long $v1 = $e1;",
            change_variable_type,
        ),
        rule(
            "add-variable-modifier",
            "Add Variable Modifier",
            Detector,
            &[Binding],
            Some("remove-variable-modifier"),
            "int $v1 = $e1;",
            "final int $v1 = $e1;",
            add_modifier,
        ),
        rule(
            "remove-variable-modifier",
            "Remove Variable Modifier",
            Detector,
            &[],
            Some("add-variable-modifier"),
            "final int $v1 = $e1;",
            "int $v1 = $e1;",
            remove_modifier,
        ),
        rule(
            "replace-array-declaration-style",
            "Replace Array Declaration Style",
            Extended,
            &[],
            Some("replace-array-declaration-style"),
            "int[] $v1 = $e1;",
            "int $v1[] = $e1;",
            array_declaration_style,
        ),
    ]
}

fn rename_raw(ctx: &Ctx, path: NodePath, from: &str, to: &str) -> Raw {
    Raw::new(
        path,
        bind([("$v1", from.to_string()), ("$v2", to.to_string())]),
        !ctx.is_bound(to),
        Change::Method(rename_all(ctx.ast, from, to)),
    )
}

fn rename_method(ctx: &Ctx) -> Vec<Raw> {
    let mut names = ctx.new_names();
    if let Some(t) = ctx.target {
        // only the target's own name is a sensible new method name
        names.retain(|n| *n == t.name);
    }
    names
        .iter()
        .map(|n| {
            let mut m = ctx.ast.clone();
            m.name = n.clone();
            Raw::new(
                NodePath::root(),
                bind([("$m1", ctx.ast.name.clone()), ("$m2", n.clone())]),
                !ctx.is_bound(n),
                Change::Method(m),
            )
        })
        .collect()
}

fn rename_parameter(ctx: &Ctx) -> Vec<Raw> {
    let names = ctx.new_names();
    let mut out = Vec::new();
    for p in &ctx.ast.params {
        for n in &names {
            out.push(rename_raw(ctx, NodePath::root(), &p.name, n));
        }
    }
    out
}

/// Locals with the path of their first declaring statement.
fn locals(ctx: &Ctx) -> Vec<(String, NodePath)> {
    let mut out: Vec<(String, NodePath)> = Vec::new();
    for s in &ctx.sites().stmts {
        let names: Vec<&str> = match s.stmt {
            Stmt::Decl(d) => d.declarators.iter().map(|d| d.name.as_str()).collect(),
            Stmt::Foreach { name, .. } => vec![name],
            _ => continue,
        };
        for n in names {
            if !out.iter().any(|(m, _)| m == n) {
                out.push((n.to_string(), s.path.clone()));
            }
        }
    }
    out
}

fn rename_variable(ctx: &Ctx) -> Vec<Raw> {
    let names = ctx.new_names();
    let mut out = Vec::new();
    for (v, path) in locals(ctx) {
        for n in &names {
            out.push(rename_raw(ctx, path.clone(), &v, n));
        }
    }
    out
}

/// Whether the statement's own expressions write anything other than
/// through the root of an expression statement.
fn nested_writes(s: &Stmt) -> bool {
    match s {
        Stmt::Expr(e) => e.children().iter().any(|c| has_writes(c)),
        s => s.own_exprs().iter().any(|e| has_writes(e)),
    }
}

fn declared_names(s: &Stmt) -> Vec<&str> {
    match s {
        Stmt::Decl(d) => d.declarators.iter().map(|d| d.name.as_str()).collect(),
        _ => vec![],
    }
}

/// `$e1` may be computed once before `s` and stand in for each of its
/// occurrences among `s`'s own expressions.
fn extractable(s: &Stmt, e: &Expr) -> bool {
    !matches!(s, Stmt::While(..) | Stmt::For { .. })
        && is_pure(e)
        && !nested_writes(s)
        && !declared_names(s).iter().any(|n| e.mentions(n))
}

fn extract_variable(ctx: &Ctx) -> Vec<Raw> {
    // (name, type, expression) choices
    let mut wanted: Vec<(String, Type, Expr)> = Vec::new();
    if let Some(t) = ctx.target {
        t.visit_stmts(&mut |s| {
            if let Stmt::Decl(d) = s {
                for dc in &d.declarators {
                    if let Some(init) = &dc.init {
                        if !ctx.is_bound(&dc.name) {
                            wanted.push((dc.name.clone(), d.declared_type(dc), init.clone()));
                        }
                    }
                }
            }
        });
    }
    let fresh = ctx.new_names().into_iter().next();
    let sites = ctx.sites();
    let mut out = Vec::new();
    for st in sites.stmts.iter().filter(|s| s.pos == StmtPos::List) {
        let mut seen: Vec<&Expr> = Vec::new();
        for x in sites.exprs.iter().filter(|x| x.stmt == st.path) {
            if x.ctx.lvalue || x.ctx.value_unused || seen.contains(&x.expr) {
                continue;
            }
            seen.push(x.expr);
            let Some(ty) = ctx.ty(x.expr) else { continue };
            let choices: Vec<(String, Type)> = if ctx.target.is_some() {
                wanted
                    .iter()
                    .filter(|(_, _, e)| e == x.expr)
                    .map(|(n, t, _)| (n.clone(), t.clone()))
                    .collect()
            } else if x.expr.size() > 1 {
                fresh.iter().map(|n| (n.clone(), ty.clone())).collect()
            } else {
                vec![]
            };
            for (name, declared) in choices {
                let ok = declared == ty && !ctx.is_bound(&name) && extractable(st.stmt, x.expr);
                let mut rewritten = st.stmt.clone();
                let var = Expr::var(name.clone());
                for (e, ectx) in own_exprs_mut(&mut rewritten) {
                    replace_expr(e, ectx, x.expr, &var);
                }
                let decl = Stmt::Decl(LocalDecl::single(declared, name.clone(), Some(x.expr.clone())));
                out.push(Raw::new(
                    st.path.clone(),
                    bind([("$e1", show(x.expr)), ("$v1", name)]),
                    ok,
                    Change::Splice {
                        len: 1,
                        with: vec![decl, rewritten],
                    },
                ));
            }
        }
    }
    out
}

fn inline_variable(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for list in &ctx.sites().lists {
        for (i, pair) in list.stmts.windows(2).enumerate() {
            let Stmt::Decl(d) = &pair[0] else { continue };
            let [dc] = d.declarators.as_slice() else { continue };
            let Some(init) = &dc.init else { continue };
            let v = dc.name.as_str();
            let next = &pair[1];
            let used_once_here = next.own_exprs().iter().any(|e| e.mentions(v))
                && !next.sub_stmts().iter().any(|s| s.mentions(v))
                && list.stmts[i + 2..].iter().all(|s| !s.mentions(v));
            let elsewhere = next.own_exprs().iter().any(|e| {
                let mut found = false;
                e.visit(&mut |x| found |= x == init);
                found
            });
            let ok = used_once_here
                && !d.is_final
                && dc.dims == 0
                && !elsewhere
                && !stmt_writes_var(next, v)
                && extractable(next, init)
                && ctx.ty(init).as_ref() == Some(&d.declared_type(dc));
            let mut rewritten = next.clone();
            for (e, ectx) in own_exprs_mut(&mut rewritten) {
                replace_expr(e, ectx, &Expr::var(v), init);
            }
            out.push(Raw::new(
                list.path.child(i),
                bind([("$e1", show(init)), ("$v1", v.to_string())]),
                ok,
                Change::Splice {
                    len: 2,
                    with: vec![rewritten],
                },
            ));
        }
    }
    out
}

/// How a read of the retyped variable is used.
#[derive(Clone, Copy, PartialEq)]
enum Use {
    /// Widening the value to long changes nothing observable here.
    Widenable,
    Other,
}

fn is_wide(t: Option<&Type>) -> bool {
    matches!(t, Some(Type::Long | Type::Double))
}

/// Walks `e` and fails on any use of `v` whose result would differ if `v`
/// were a long holding the same value.
fn widen_safe(ctx: &Ctx, e: &Expr, v: &str, role: Use) -> bool {
    match e {
        Expr::Var(n) => n != v || role == Use::Widenable,
        Expr::Paren(x) => widen_safe(ctx, x, v, role),
        Expr::IncDec(_, _, t) => t.as_var() != Some(v) && widen_safe(ctx, t, v, Use::Other),
        Expr::Assign(op, t, r) => {
            if t.as_var() == Some(v) {
                return *op == AssignOp::Assign && widen_safe(ctx, r, v, Use::Widenable);
            }
            let sink = match t.as_var() {
                Some(n) if *op == AssignOp::Assign && is_wide(ctx.info.var_type(n)) => Use::Widenable,
                _ => Use::Other,
            };
            widen_safe(ctx, t, v, Use::Other) && widen_safe(ctx, r, v, sink)
        }
        Expr::Binary(op, l, r) => {
            let role = if op.is_comparison() || ctx.ty(e) == Some(Type::String) {
                Use::Widenable
            } else {
                Use::Other
            };
            widen_safe(ctx, l, v, role) && widen_safe(ctx, r, v, role)
        }
        e => e.children().iter().all(|c| widen_safe(ctx, c, v, Use::Other)),
    }
}

fn change_variable_type(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (v, path) in locals(ctx) {
        let mut decls_ok = true;
        let mut is_foreach = false;
        ctx.ast.visit_stmts(&mut |s| match s {
            Stmt::Decl(d) if d.declarators.iter().any(|dc| dc.name == v) => {
                decls_ok &= d.ty == Type::Int && d.declarators.len() == 1 && d.declarators[0].dims == 0;
            }
            Stmt::Foreach { name, .. } if *name == v => is_foreach = true,
            _ => {}
        });
        if !decls_ok || is_foreach {
            continue;
        }
        if let Some(t) = ctx.target {
            let mut wants_long = false;
            t.visit_stmts(&mut |s| {
                if let Stmt::Decl(d) = s {
                    wants_long |= d.ty == Type::Long && d.declarators.iter().any(|dc| dc.name == v);
                }
            });
            if !wants_long {
                continue;
            }
        }
        let ret_wide = is_wide(Some(&ctx.ast.return_type));
        let mut ok = true;
        ctx.ast.visit_stmts(&mut |s| {
            let root_role = match s {
                Stmt::Return(_) if ret_wide => Use::Widenable,
                Stmt::Decl(d) if is_wide(Some(&d.ty)) && d.ty.dims() == 0 => Use::Widenable,
                Stmt::Decl(d) if d.declarators.iter().any(|dc| dc.name == v) => Use::Widenable,
                _ => Use::Other,
            };
            for e in s.own_exprs() {
                ok &= widen_safe(ctx, e, &v, root_role);
            }
        });
        let mut m = ctx.ast.clone();
        for s in &mut m.body {
            retype(s, &v);
        }
        out.push(Raw::new(
            path,
            bind([("$v1", v.clone())]),
            ok,
            Change::Method(m),
        ));
    }
    out
}

fn retype(s: &mut Stmt, v: &str) {
    if let Stmt::Decl(d) = s {
        if d.declarators.iter().any(|dc| dc.name == v) {
            d.ty = Type::Long;
        }
    }
    match s {
        Stmt::If(_, t, e) => {
            retype(t, v);
            if let Some(e) = e {
                retype(e, v);
            }
        }
        Stmt::Switch(_, cases) => cases.iter_mut().flat_map(|c| c.body.iter_mut()).for_each(|s| retype(s, v)),
        Stmt::For { init, body, .. } => {
            init.iter_mut().for_each(|s| retype(s, v));
            retype(body, v);
        }
        Stmt::Foreach { body, .. } | Stmt::While(_, body) => retype(body, v),
        Stmt::Block(stmts) => stmts.iter_mut().for_each(|s| retype(s, v)),
        _ => {}
    }
}

/// Sets finality on every declaration statement sharing a name with the
/// one at `start`, since redeclarations in sibling scopes must agree.
fn set_final_group(ctx: &Ctx, start: &Stmt, fin: bool) -> (MethodAst, Vec<String>) {
    let mut names: Vec<String> = declared_names(start).into_iter().map(String::from).collect();
    loop {
        let before = names.len();
        ctx.ast.visit_stmts(&mut |s| {
            let ds = declared_names(s);
            if ds.iter().any(|d| names.iter().any(|n| n == d)) {
                for d in ds {
                    if !names.iter().any(|n| n == d) {
                        names.push(d.to_string());
                    }
                }
            }
        });
        if names.len() == before {
            break;
        }
    }
    let mut m = ctx.ast.clone();
    for s in &mut m.body {
        set_final(s, &names, fin);
    }
    (m, names)
}

fn set_final(s: &mut Stmt, names: &[String], fin: bool) {
    if let Stmt::Decl(d) = s {
        if d.declarators.iter().any(|dc| names.contains(&dc.name)) {
            d.is_final = fin;
        }
    }
    match s {
        Stmt::If(_, t, e) => {
            set_final(t, names, fin);
            if let Some(e) = e {
                set_final(e, names, fin);
            }
        }
        Stmt::Switch(_, cases) => cases
            .iter_mut()
            .flat_map(|c| c.body.iter_mut())
            .for_each(|s| set_final(s, names, fin)),
        Stmt::For { init, body, .. } => {
            init.iter_mut().for_each(|s| set_final(s, names, fin));
            set_final(body, names, fin);
        }
        Stmt::Foreach { body, .. } | Stmt::While(_, body) => set_final(body, names, fin),
        Stmt::Block(stmts) => stmts.iter_mut().for_each(|s| set_final(s, names, fin)),
        _ => {}
    }
}

fn never_written(ctx: &Ctx, name: &str) -> bool {
    !ctx.ast.body.iter().any(|s| stmt_writes_var(s, name))
}

fn modifier_raws(ctx: &Ctx, fin: bool) -> Vec<Raw> {
    let mut out = Vec::new();
    for p in ctx.ast.params.iter().filter(|p| p.is_final != fin) {
        let mut m = ctx.ast.clone();
        for q in &mut m.params {
            if q.name == p.name {
                q.is_final = fin;
            }
        }
        let ok = !fin || never_written(ctx, &p.name);
        out.push(Raw::new(NodePath::root(), bind([("$v1", p.name.clone())]), ok, Change::Method(m)));
    }
    for s in &ctx.sites().stmts {
        match s.stmt {
            Stmt::Decl(d) if d.is_final != fin => {
                let (m, names) = set_final_group(ctx, s.stmt, fin);
                let ok = !fin
                    || names.iter().all(|n| never_written(ctx, n))
                        && d.declarators.iter().all(|dc| dc.init.is_some());
                out.push(Raw::new(s.path.clone(), bind([("$v1", names.join(","))]), ok, Change::Method(m)));
            }
            Stmt::Foreach {
                is_final,
                name,
                body,
                ..
            } if *is_final != fin => {
                let mut new = s.stmt.clone();
                if let Stmt::Foreach { is_final, .. } = &mut new {
                    *is_final = fin;
                }
                let ok = !fin || !stmt_writes_var(body, name);
                out.push(Raw::new(s.path.clone(), bind([("$v1", name.clone())]), ok, Change::Stmt(new)));
            }
            _ => {}
        }
    }
    out
}

fn add_modifier(ctx: &Ctx) -> Vec<Raw> {
    modifier_raws(ctx, true)
}

fn remove_modifier(ctx: &Ctx) -> Vec<Raw> {
    modifier_raws(ctx, false)
}

fn array_declaration_style(ctx: &Ctx) -> Vec<Raw> {
    let mut out = Vec::new();
    for (i, p) in ctx.ast.params.iter().enumerate() {
        for to_decl in [true, false] {
            let movable = if to_decl { p.ty.dims() > 0 } else { p.dims > 0 };
            if !movable {
                continue;
            }
            let mut m = ctx.ast.clone();
            let q = &mut m.params[i];
            shift_dim(&mut q.ty, &mut q.dims, to_decl);
            out.push(Raw::new(
                NodePath::root(),
                bind([("$v1", p.name.clone()), ("to", side(to_decl))]),
                true,
                Change::Method(m),
            ));
        }
    }
    for s in &ctx.sites().stmts {
        let Stmt::Decl(d) = s.stmt else { continue };
        let [dc] = d.declarators.as_slice() else { continue };
        for to_decl in [true, false] {
            let movable = if to_decl { d.ty.dims() > 0 } else { dc.dims > 0 };
            if !movable {
                continue;
            }
            let mut nd = d.clone();
            let ndc = &mut nd.declarators[0];
            shift_dim(&mut nd.ty, &mut ndc.dims, to_decl);
            out.push(Raw::new(
                s.path.clone(),
                bind([("$v1", dc.name.clone()), ("to", side(to_decl))]),
                true,
                Change::Stmt(Stmt::Decl(nd)),
            ));
        }
    }
    out
}

fn side(to_decl: bool) -> String {
    if to_decl { "declarator" } else { "type" }.to_string()
}

fn shift_dim(ty: &mut Type, dims: &mut u8, to_decl: bool) {
    if to_decl {
        if let Type::Array(e) = ty {
            *ty = (**e).clone();
            *dims += 1;
        }
    } else {
        *dims -= 1;
        *ty = Type::array_of(ty.clone());
    }
}
