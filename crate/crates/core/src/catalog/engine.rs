//! Site enumeration, edit application, and the context rules match in.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::ast::*;
use crate::syntax::path::{
    expr_at_mut, fits, list_at_mut, operand_ctx, place, stmt_at_mut, ExprCtx, NodePath,
};
use crate::syntax::{check_method, print_expr, TypeInfo};

pub type Bindings = BTreeMap<String, String>;

/// A concrete edit produced by a rule at one site.
#[derive(Debug, Clone)]
pub enum Change {
    /// Replaces the expression at the site path.
    Expr(Expr),
    /// Replaces the statement at the site path.
    Stmt(Stmt),
    /// Replaces `len` statements starting at the site path (which addresses
    /// a statement inside a list) with `with`.
    Splice { len: usize, with: Vec<Stmt> },
    /// Replaces the whole method.
    Method(MethodAst),
}

/// A pattern match before guards and well-formedness are enforced.
#[derive(Debug, Clone)]
pub struct Raw {
    pub path: NodePath,
    pub bindings: Bindings,
    pub guard_ok: bool,
    pub change: Change,
}

impl Raw {
    pub fn new(path: NodePath, bindings: Bindings, guard_ok: bool, change: Change) -> Raw {
        Raw {
            path,
            bindings,
            guard_ok,
            change,
        }
    }
}

pub fn bind<const N: usize>(pairs: [(&str, String); N]) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn show(e: &Expr) -> String {
    print_expr(e)
}

/// Adds the parentheses every operand needs in its position. Valid trees
/// are fixed points.
pub fn fix(e: Expr) -> Expr {
    let mut e = e;
    fix_in_place(&mut e);
    e
}

fn fix_in_place(e: &mut Expr) {
    let ctxs: Vec<ExprCtx> = (0..e.children().len()).map(|i| operand_ctx(e, i)).collect();
    for (child, ctx) in e.children_mut().into_iter().zip(ctxs) {
        fix_in_place(child);
        if !ctx.lvalue && !fits(child, ctx) {
            let inner = std::mem::replace(child, Expr::Var(String::new()));
            *child = Expr::paren(inner);
        }
    }
}

/// `fix` followed by `place` in `ctx`.
pub fn fit(e: Expr, ctx: ExprCtx) -> Expr {
    place(fix(e), ctx)
}

/// Adds, for every expression replaced through a parenthesis its position
/// required, the variant that keeps the parenthesis.
pub fn with_kept_parens(ctx: &Ctx, raws: Vec<Raw>) -> Vec<Raw> {
    let through: std::collections::HashSet<&NodePath> = ctx
        .sites()
        .exprs
        .iter()
        .filter(|s| !fits(s.expr, s.ctx))
        .map(|s| &s.path)
        .collect();
    let mut out = Vec::with_capacity(raws.len());
    for raw in raws {
        let kept = match &raw.change {
            Change::Expr(e) if !matches!(e, Expr::Paren(_)) && through.contains(&raw.path) => {
                let mut bindings = raw.bindings.clone();
                bindings.insert("()".into(), "kept".into());
                Some(Raw::new(
                    raw.path.clone(),
                    bindings,
                    raw.guard_ok,
                    Change::Expr(Expr::paren(e.clone())),
                ))
            }
            _ => None,
        };
        out.push(raw);
        out.extend(kept);
    }
    out
}

/// Where a statement sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StmtPos {
    /// Item of the method body, a block, or a case arm.
    List,
    /// Branch of an `if` or body of a loop.
    Body,
    /// Initializer of a `for`.
    ForInit,
}

pub struct ExprSite<'a> {
    /// Path of the replaced node. For a site reached through a parenthesis
    /// the expression would need anyway, this is the parenthesis.
    pub path: NodePath,
    pub expr: &'a Expr,
    pub ctx: ExprCtx,
    /// Path of the innermost enclosing statement.
    pub stmt: NodePath,
}

pub struct StmtSite<'a> {
    pub path: NodePath,
    pub stmt: &'a Stmt,
    pub pos: StmtPos,
}

pub struct ListSite<'a> {
    pub path: NodePath,
    pub stmts: &'a [Stmt],
}

#[derive(Default)]
pub struct Sites<'a> {
    pub exprs: Vec<ExprSite<'a>>,
    pub stmts: Vec<StmtSite<'a>>,
    pub lists: Vec<ListSite<'a>>,
}

pub fn sites(ast: &MethodAst) -> Sites<'_> {
    let mut out = Sites::default();
    let root = NodePath::root();
    out.lists.push(ListSite {
        path: root.clone(),
        stmts: &ast.body,
    });
    for (i, s) in ast.body.iter().enumerate() {
        stmt_sites(s, root.child(i), StmtPos::List, &mut out);
    }
    out
}

fn stmt_sites<'a>(s: &'a Stmt, path: NodePath, pos: StmtPos, out: &mut Sites<'a>) {
    out.stmts.push(StmtSite {
        path: path.clone(),
        stmt: s,
        pos,
    });
    let e = |e: &'a Expr, i: usize, ctx: ExprCtx, out: &mut Sites<'a>| {
        expr_sites(e, path.child(i), ctx, &path, out)
    };
    match s {
        Stmt::Decl(d) => {
            for (i, init) in d.declarators.iter().filter_map(|d| d.init.as_ref()).enumerate() {
                e(init, i, ExprCtx::TOP, out);
            }
        }
        Stmt::Expr(x) => e(
            x,
            0,
            ExprCtx {
                value_unused: true,
                ..ExprCtx::TOP
            },
            out,
        ),
        Stmt::Return(x) => e(x, 0, ExprCtx::TOP, out),
        Stmt::If(c, t, els) => {
            e(c, 0, ExprCtx::TOP, out);
            stmt_sites(t, path.child(1), StmtPos::Body, out);
            if let Some(els) = els {
                stmt_sites(els, path.child(2), StmtPos::Body, out);
            }
        }
        Stmt::While(c, body) => {
            e(c, 0, ExprCtx::TOP, out);
            stmt_sites(body, path.child(1), StmtPos::Body, out);
        }
        Stmt::For {
            init,
            cond,
            update,
            body,
        } => {
            for (i, s) in init.iter().enumerate() {
                stmt_sites(s, path.child(i), StmtPos::ForInit, out);
            }
            let mut idx = init.len();
            if let Some(c) = cond {
                e(c, idx, ExprCtx::TOP, out);
                idx += 1;
            }
            for u in update {
                let ctx = ExprCtx {
                    value_unused: true,
                    ..ExprCtx::TOP
                };
                e(u, idx, ctx, out);
                idx += 1;
            }
            stmt_sites(body, path.child(idx), StmtPos::Body, out);
        }
        Stmt::Foreach { iterable, body, .. } => {
            e(iterable, 0, ExprCtx::TOP, out);
            stmt_sites(body, path.child(1), StmtPos::Body, out);
        }
        Stmt::Switch(scrutinee, cases) => {
            e(scrutinee, 0, ExprCtx::TOP, out);
            for (i, c) in cases.iter().enumerate() {
                let cpath = path.child(i + 1);
                out.lists.push(ListSite {
                    path: cpath.clone(),
                    stmts: &c.body,
                });
                for (j, s) in c.body.iter().enumerate() {
                    stmt_sites(s, cpath.child(j), StmtPos::List, out);
                }
            }
        }
        Stmt::Block(stmts) => {
            out.lists.push(ListSite {
                path: path.clone(),
                stmts,
            });
            for (j, s) in stmts.iter().enumerate() {
                stmt_sites(s, path.child(j), StmtPos::List, out);
            }
        }
        Stmt::Break => {}
    }
}

fn expr_sites<'a>(
    e: &'a Expr,
    path: NodePath,
    ctx: ExprCtx,
    stmt: &NodePath,
    out: &mut Sites<'a>,
) {
    // a parenthesis the context needs is transparent: the site is the
    // parenthesis, the matched expression its content
    if let Expr::Paren(inner) = e {
        if !ctx.lvalue && !fits(inner, ctx) {
            out.exprs.push(ExprSite {
                path: path.clone(),
                expr: inner,
                ctx,
                stmt: stmt.clone(),
            });
            expr_children(inner, &path.child(0), stmt, out);
            return;
        }
    }
    out.exprs.push(ExprSite {
        path: path.clone(),
        expr: e,
        ctx,
        stmt: stmt.clone(),
    });
    expr_children(e, &path, stmt, out);
}

fn expr_children<'a>(e: &'a Expr, path: &NodePath, stmt: &NodePath, out: &mut Sites<'a>) {
    for (i, c) in e.children().into_iter().enumerate() {
        expr_sites(c, path.child(i), operand_ctx(e, i), stmt, out);
    }
}

/// Applies `change` at `path`, returning `None` when the path does not fit.
pub fn apply_change(ast: &MethodAst, path: &NodePath, change: &Change) -> Option<MethodAst> {
    let mut out = ast.clone();
    match change {
        Change::Method(m) => return Some(m.clone()),
        Change::Expr(e) => *expr_at_mut(&mut out, path)? = e.clone(),
        Change::Stmt(s) => *stmt_at_mut(&mut out, path)? = s.clone(),
        Change::Splice { len, with } => {
            let (parent, i) = path.parent()?;
            let list = list_at_mut(&mut out, &parent)?;
            if i + len > list.len() {
                return None;
            }
            list.splice(i..i + len, with.iter().cloned());
        }
    }
    Some(out)
}

/// Everything a rule may consult while matching.
pub struct Ctx<'a> {
    pub ast: &'a MethodAst,
    pub info: TypeInfo,
    pub target: Option<&'a MethodAst>,
    sites: OnceCell<Sites<'a>>,
    target_sites: OnceCell<Option<Sites<'a>>>,
    bound: OnceCell<BTreeSet<String>>,
}

/// Names tried, in order, when a rule needs a fresh identifier and no
/// target suggests one.
const FRESH_POOL: &[&str] = &["tmp", "t", "val", "res", "aux", "k", "elem", "idx", "w"];

impl<'a> Ctx<'a> {
    pub fn new(ast: &'a MethodAst, target: Option<&'a MethodAst>) -> Option<Ctx<'a>> {
        let info = check_method(ast).ok()?;
        Some(Ctx {
            ast,
            info,
            target,
            sites: OnceCell::new(),
            target_sites: OnceCell::new(),
            bound: OnceCell::new(),
        })
    }

    pub fn sites(&self) -> &Sites<'a> {
        self.sites.get_or_init(|| sites(self.ast))
    }

    pub fn target_sites(&self) -> Option<&Sites<'a>> {
        self.target_sites
            .get_or_init(|| self.target.map(sites))
            .as_ref()
    }

    pub fn ty(&self, e: &Expr) -> Option<Type> {
        self.info.type_of(e)
    }

    pub fn bound(&self) -> &BTreeSet<String> {
        self.bound
            .get_or_init(|| self.ast.bound_names().into_iter().collect())
    }

    pub fn is_bound(&self, name: &str) -> bool {
        self.bound().contains(name)
    }

    /// Identifiers bound in the target but not in the method, in order of
    /// first appearance; without a target, unused names from a fixed pool.
    pub fn new_names(&self) -> Vec<String> {
        match self.target {
            Some(t) => {
                let mut seen = BTreeSet::new();
                t.bound_names()
                    .into_iter()
                    .filter(|n| !self.is_bound(n) && seen.insert(n.clone()))
                    .collect()
            }
            None => FRESH_POOL
                .iter()
                .filter(|n| !self.is_bound(n))
                .take(2)
                .map(|n| n.to_string())
                .collect(),
        }
    }
}

/// Renames every occurrence of `from` (binding and use) to `to`.
pub fn rename_all(m: &MethodAst, from: &str, to: &str) -> MethodAst {
    let mut out = m.clone();
    for p in &mut out.params {
        if p.name == from {
            p.name = to.to_string();
        }
    }
    for s in &mut out.body {
        rename_stmt(s, from, to);
    }
    out
}

fn rename_stmt(s: &mut Stmt, from: &str, to: &str) {
    match s {
        Stmt::Decl(d) => {
            for d in &mut d.declarators {
                if d.name == from {
                    d.name = to.to_string();
                }
            }
        }
        Stmt::Foreach { name, .. } if name == from => *name = to.to_string(),
        _ => {}
    }
    match s {
        Stmt::Decl(d) => {
            for d in &mut d.declarators {
                if let Some(e) = &mut d.init {
                    rename_expr(e, from, to);
                }
            }
        }
        Stmt::Expr(e) | Stmt::Return(e) => rename_expr(e, from, to),
        Stmt::If(c, t, e) => {
            rename_expr(c, from, to);
            rename_stmt(t, from, to);
            if let Some(e) = e {
                rename_stmt(e, from, to);
            }
        }
        Stmt::While(c, b) => {
            rename_expr(c, from, to);
            rename_stmt(b, from, to);
        }
        Stmt::For {
            init,
            cond,
            update,
            body,
        } => {
            for s in init {
                rename_stmt(s, from, to);
            }
            if let Some(c) = cond {
                rename_expr(c, from, to);
            }
            for u in update {
                rename_expr(u, from, to);
            }
            rename_stmt(body, from, to);
        }
        Stmt::Foreach { iterable, body, .. } => {
            rename_expr(iterable, from, to);
            rename_stmt(body, from, to);
        }
        Stmt::Switch(x, cases) => {
            rename_expr(x, from, to);
            for c in cases {
                for s in &mut c.body {
                    rename_stmt(s, from, to);
                }
            }
        }
        Stmt::Block(stmts) => {
            for s in stmts {
                rename_stmt(s, from, to);
            }
        }
        Stmt::Break => {}
    }
}

fn rename_expr(e: &mut Expr, from: &str, to: &str) {
    e.visit_mut(&mut |x| {
        if let Expr::Var(n) = x {
            if n == from {
                *n = to.to_string();
            }
        }
    });
}

/// Expressions a statement evaluates itself, mutably, with their contexts.
pub fn own_exprs_mut(s: &mut Stmt) -> Vec<(&mut Expr, ExprCtx)> {
    let unused = ExprCtx {
        value_unused: true,
        ..ExprCtx::TOP
    };
    match s {
        Stmt::Decl(d) => d
            .declarators
            .iter_mut()
            .filter_map(|d| d.init.as_mut())
            .map(|e| (e, ExprCtx::TOP))
            .collect(),
        Stmt::Expr(e) => vec![(e, unused)],
        Stmt::Return(e) | Stmt::While(e, _) | Stmt::If(e, ..) | Stmt::Switch(e, _) => vec![(e, ExprCtx::TOP)],
        Stmt::Foreach { iterable, .. } => vec![(iterable, ExprCtx::TOP)],
        Stmt::For { cond, update, .. } => cond
            .iter_mut()
            .map(|c| (c, ExprCtx::TOP))
            .chain(update.iter_mut().map(|u| (u, unused)))
            .collect(),
        Stmt::Break | Stmt::Block(_) => vec![],
    }
}

/// Replaces every occurrence of `what` (compared structurally, ignoring
/// parentheses the position needs) in `e` by `with`, fitting the
/// replacement to each position. Returns the number of replacements.
pub fn replace_expr(e: &mut Expr, ctx: ExprCtx, what: &Expr, with: &Expr) -> usize {
    let core = crate::syntax::path::strip_required(e, ctx);
    if core == what && !ctx.lvalue {
        *e = place(with.clone(), ctx);
        return 1;
    }
    let ctxs: Vec<ExprCtx> = (0..e.children().len()).map(|i| operand_ctx(e, i)).collect();
    let mut n = 0;
    for (child, cctx) in e.children_mut().into_iter().zip(ctxs) {
        n += replace_expr(child, cctx, what, with);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_method, print_expr};

    #[test]
    fn fix_adds_needed_parens_only() {
        let e = Expr::not(Expr::binary(
            BinaryOp::And,
            Expr::var("a"),
            Expr::binary(BinaryOp::Or, Expr::var("b"), Expr::var("c")),
        ));
        assert_eq!(print_expr(&fix(e)), "!(a && (b || c))");
        let valid = parse_expr("(a + b) * c").unwrap();
        assert_eq!(fix(valid.clone()), valid);
    }

    #[test]
    fn needed_parens_are_transparent_sites() {
        let m = parse_method("int f(int a, int b){return (a + b) * 2;}").unwrap();
        let s = sites(&m);
        let paths: Vec<String> = s.exprs.iter().map(|x| x.path.to_string()).collect();
        // the product, the sum reached through its parenthesis, a, b, 2
        assert_eq!(paths, ["/0/0", "/0/0/0", "/0/0/0/0/0", "/0/0/0/0/1", "/0/0/1"]);
        assert!(matches!(s.exprs[1].expr, Expr::Binary(BinaryOp::Add, ..)));
    }

    #[test]
    fn replace_fits_positions() {
        let mut e = parse_expr("t * 2 + t").unwrap();
        let n = replace_expr(
            &mut e,
            ExprCtx::TOP,
            &Expr::var("t"),
            &parse_expr("a + b").unwrap(),
        );
        assert_eq!(n, 2);
        assert_eq!(print_expr(&e), "(a + b) * 2 + (a + b)");
    }
}
