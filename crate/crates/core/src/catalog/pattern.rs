//! Expression schemas with placeholders.
//!
//! `$eN` matches any expression, `$cN` a literal (possibly negated) and
//! `$vN` a variable. A placeholder that occurs twice must bind structurally
//! equal fragments. Parentheses the context requires are invisible to
//! matching, both in the schema and in the subject, and instantiation adds
//! back whatever the new positions need.

use std::collections::BTreeMap;

use super::analysis::is_literal;
use super::engine::fix;
use crate::syntax::ast::*;
use crate::syntax::parser::{parse_pattern_expr, parse_pattern_method, parse_pattern_stmts};
use crate::syntax::path::{fits, operand_ctx, strip_required, ExprCtx};
use crate::syntax::SyntaxError;

pub type Env = BTreeMap<String, Expr>;

/// Suffix of the env entry that holds a placeholder's binding together
/// with the parenthesis its position required.
pub const KEPT: &str = "()";

/// A parsed schema side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Expr(Expr),
    Stmts(Vec<Stmt>),
    Method(MethodAst),
}

/// Parses schema text as an expression, statements, or a whole method,
/// whichever fits first.
pub fn parse_pattern(text: &str) -> Result<Pattern, SyntaxError> {
    if let Ok(e) = parse_pattern_expr(text) {
        return Ok(Pattern::Expr(e));
    }
    match parse_pattern_stmts(text) {
        Ok(s) => Ok(Pattern::Stmts(s)),
        Err(err) => parse_pattern_method(text).map(Pattern::Method).map_err(|_| err),
    }
}

/// Parses an expression schema and drops the parentheses it needs anyway.
pub fn compile(text: &str) -> Expr {
    let e = parse_pattern_expr(text).unwrap_or_else(|err| panic!("bad schema {text:?}: {err}"));
    normalize(e, ExprCtx::TOP)
}

fn normalize(e: Expr, ctx: ExprCtx) -> Expr {
    let e = match e {
        Expr::Paren(inner) if !fits(&inner, ctx) => *inner,
        e => e,
    };
    let mut e = e;
    let ctxs: Vec<ExprCtx> = (0..e.children().len()).map(|i| operand_ctx(&e, i)).collect();
    for (child, cctx) in e.children_mut().into_iter().zip(ctxs) {
        let c = std::mem::replace(child, Expr::Var(String::new()));
        *child = normalize(c, cctx);
    }
    e
}

fn placeholder(e: &Expr) -> Option<&str> {
    match e {
        Expr::Var(n) if n.starts_with('$') => Some(n),
        _ => None,
    }
}

/// Matches `pat` against `subject`, which sits in `ctx`.
pub fn matches(pat: &Expr, subject: &Expr, ctx: ExprCtx, env: &mut Env) -> bool {
    if let Some(name) = placeholder(pat) {
        let bound = strip_required(subject, ctx);
        let ok = match &name[1..2] {
            "c" => is_literal(bound),
            "v" => matches!(bound, Expr::Var(_)),
            _ => true,
        };
        if !ok {
            return false;
        }
        return match env.get(name) {
            Some(prev) => prev == bound,
            None => {
                env.insert(name.to_string(), bound.clone());
                if !std::ptr::eq(bound, subject) {
                    env.insert(format!("{name}{KEPT}"), subject.clone());
                }
                true
            }
        };
    }
    let s = match pat {
        Expr::Paren(_) => subject,
        _ => strip_required(subject, ctx),
    };
    let same_shape = match (pat, s) {
        (Expr::Lit(a), Expr::Lit(b)) => a == b,
        (Expr::Var(a), Expr::Var(b)) => a == b,
        (Expr::Paren(_), Expr::Paren(_)) => true,
        (Expr::Unary(a, _), Expr::Unary(b, _)) => a == b,
        (Expr::IncDec(a, f, _), Expr::IncDec(b, g, _)) => a == b && f == g,
        (Expr::Binary(a, ..), Expr::Binary(b, ..)) => a == b,
        (Expr::Ternary(..), Expr::Ternary(..)) => true,
        (Expr::Assign(a, ..), Expr::Assign(b, ..)) => a == b,
        (Expr::Cast(a, _), Expr::Cast(b, _)) => a == b,
        (Expr::Index(..), Expr::Index(..)) | (Expr::Length(_), Expr::Length(_)) => true,
        _ => false,
    };
    if !same_shape {
        return false;
    }
    let (pc, sc) = (pat.children(), s.children());
    pc.len() == sc.len()
        && pc
            .into_iter()
            .zip(sc)
            .enumerate()
            .all(|(i, (p, c))| matches(p, c, operand_ctx(s, i), env))
}

/// Substitutes bindings into `pat` and parenthesizes as needed.
pub fn instantiate(pat: &Expr, env: &Env) -> Expr {
    fn subst(p: &Expr, env: &Env) -> Expr {
        if let Some(name) = placeholder(p) {
            return env[name].clone();
        }
        let mut out = p.clone();
        let kids: Vec<Expr> = p.children().into_iter().map(|c| subst(c, env)).collect();
        for (slot, k) in out.children_mut().into_iter().zip(kids) {
            *slot = k;
        }
        out
    }
    fix(subst(pat, env))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, print_expr};

    fn run(lhs: &str, rhs: &str, subject: &str) -> Option<String> {
        let mut env = Env::new();
        let s = parse_expr(subject).unwrap();
        if !matches(&compile(lhs), &s, ExprCtx::TOP, &mut env) {
            return None;
        }
        Some(print_expr(&instantiate(&compile(rhs), &env)))
    }

    #[test]
    fn de_morgan_with_operand_parens() {
        assert_eq!(
            run("!($e1 && $e2)", "!$e1 || !$e2", "!(x > 0 && y)").as_deref(),
            Some("!(x > 0) || !y")
        );
        assert_eq!(
            run("!$e1 || !$e2", "!($e1 && $e2)", "!(x > 0) || !y").as_deref(),
            Some("!(x > 0 && y)")
        );
    }

    #[test]
    fn repeated_placeholders_must_agree() {
        assert_eq!(run("$v1 = $v1 + $e1", "$v1 += $e1", "x = x + 1").as_deref(), Some("x += 1"));
        assert_eq!(run("$v1 = $v1 + $e1", "$v1 += $e1", "x = y + 1"), None);
    }

    #[test]
    fn needed_parens_are_bound_stripped() {
        assert_eq!(
            run("$v1 = $v1 * $e1", "$v1 *= $e1", "x = x * (a + b)").as_deref(),
            Some("x *= a + b")
        );
        assert_eq!(
            run("$v1 *= $e1", "$v1 = $v1 * $e1", "x *= a + b").as_deref(),
            Some("x = x * (a + b)")
        );
    }

    #[test]
    fn redundant_parens_must_match_literally() {
        assert_eq!(run("!!$e1", "$e1", "!(!a)"), None);
        assert_eq!(run("!!$e1", "$e1", "!!a").as_deref(), Some("a"));
    }

    #[test]
    fn literal_placeholders() {
        assert!(run("$c1 * $e1", "$e1", "-3 * x").is_some());
        assert!(run("$c1 * $e1", "$e1", "y * x").is_none());
    }
}
