//! Static facts about expressions used by rule guards.

use crate::syntax::ast::*;
use crate::syntax::path::{place, ExprCtx};

/// No assignment, increment, division, remainder, indexing or array
/// creation anywhere inside. Pure expressions neither fail nor write.
pub fn is_pure(e: &Expr) -> bool {
    let mut pure = true;
    e.visit(&mut |x| match x {
        Expr::Assign(..) | Expr::IncDec(..) | Expr::Index(..) | Expr::NewArray(..) => pure = false,
        Expr::Binary(BinaryOp::Div | BinaryOp::Rem, ..) => pure = false,
        _ => {}
    });
    pure
}

/// Whether the expression writes any variable or element.
pub fn has_writes(e: &Expr) -> bool {
    let mut w = false;
    e.visit(&mut |x| w |= matches!(x, Expr::Assign(..) | Expr::IncDec(..)));
    w
}

/// Whether `name` is the target of an assignment or increment in `e`.
pub fn writes_var(e: &Expr, name: &str) -> bool {
    let mut w = false;
    e.visit(&mut |x| match x {
        Expr::Assign(_, t, _) | Expr::IncDec(_, _, t) => {
            w |= t.as_var() == Some(name);
        }
        _ => {}
    });
    w
}

/// Whether any statement under `s` assigns `name`.
pub fn stmt_writes_var(s: &Stmt, name: &str) -> bool {
    let mut w = false;
    s.visit_exprs(&mut |e| w |= matches!(e, Expr::Assign(_, t, _) | Expr::IncDec(_, _, t) if t.as_var() == Some(name)));
    w
}

/// Whether any statement under `s` writes an array element.
pub fn stmt_writes_elements(s: &Stmt) -> bool {
    let mut w = false;
    s.visit_exprs(&mut |e| {
        w |= matches!(e, Expr::Assign(_, t, _) | Expr::IncDec(_, _, t) if matches!(**t, Expr::Index(..)))
    });
    w
}

/// A compile-time constant of integral or boolean type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Const {
    Int(i32),
    Long(i64),
    Bool(bool),
}

impl Const {
    pub fn as_i128(self) -> Option<i128> {
        match self {
            Const::Int(v) => Some(v as i128),
            Const::Long(v) => Some(v as i128),
            Const::Bool(_) => None,
        }
    }
}

/// Value of a literal, a negated literal, or a parenthesized one.
pub fn const_value(e: &Expr) -> Option<Const> {
    match e {
        Expr::Paren(inner) => const_value(inner),
        Expr::Lit(l) => match l.kind {
            LitKind::Int => Some(Const::Int(l.integral_value()? as u32 as i32)),
            LitKind::Long => Some(Const::Long(l.integral_value()? as i64)),
            LitKind::Bool => Some(Const::Bool(l.lexeme == "true")),
            _ => None,
        },
        Expr::Unary(UnaryOp::Neg, inner) if matches!(**inner, Expr::Lit(_)) => {
            match const_value(inner)? {
                Const::Int(v) => Some(Const::Int(v.wrapping_neg())),
                Const::Long(v) => Some(Const::Long(v.wrapping_neg())),
                Const::Bool(_) => None,
            }
        }
        _ => None,
    }
}

/// Literal expression denoting `v` in type `ty` (int or long), or `None`
/// when `v` is out of range.
pub fn int_expr(v: i128, ty: &Type) -> Option<Expr> {
    let (lo, hi, suffix) = match ty {
        Type::Int => (i32::MIN as i128, i32::MAX as i128, ""),
        Type::Long => (i64::MIN as i128, i64::MAX as i128, "L"),
        _ => return None,
    };
    if v < lo || v > hi {
        return None;
    }
    let kind = if suffix.is_empty() { LitKind::Int } else { LitKind::Long };
    let lit = Expr::Lit(Literal::new(kind, format!("{}{suffix}", v.unsigned_abs())));
    Some(if v < 0 {
        Expr::Unary(UnaryOp::Neg, Box::new(lit))
    } else {
        lit
    })
}

pub fn bool_expr(b: bool) -> Expr {
    Expr::Lit(Literal::boolean(b))
}

/// Folds one operator applied to constant operands, refusing results that
/// overflow or fail.
pub fn fold(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Unary(UnaryOp::Not, inner) => match const_value(inner)? {
            Const::Bool(b) => Some(bool_expr(!b)),
            _ => None,
        },
        Expr::Unary(UnaryOp::Neg, inner) if matches!(**inner, Expr::Unary(UnaryOp::Neg, _)) => {
            let v = const_value(inner)?;
            let ty = if matches!(v, Const::Long(_)) { Type::Long } else { Type::Int };
            int_expr(-v.as_i128()?, &ty)
        }
        Expr::Binary(op, l, r) => {
            let (a, b) = (const_value(l)?, const_value(r)?);
            if let (Const::Bool(x), Const::Bool(y)) = (a, b) {
                return Some(bool_expr(match op {
                    BinaryOp::And => x && y,
                    BinaryOp::Or => x || y,
                    BinaryOp::Eq => x == y,
                    BinaryOp::Ne => x != y,
                    _ => return None,
                }));
            }
            let (x, y) = (a.as_i128()?, b.as_i128()?);
            let ty = if matches!(a, Const::Long(_)) || matches!(b, Const::Long(_)) {
                Type::Long
            } else {
                Type::Int
            };
            let v = match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x.checked_mul(y)?,
                BinaryOp::Div if y != 0 => x / y,
                BinaryOp::Rem if y != 0 => x % y,
                BinaryOp::Eq => return Some(bool_expr(x == y)),
                BinaryOp::Ne => return Some(bool_expr(x != y)),
                BinaryOp::Lt => return Some(bool_expr(x < y)),
                BinaryOp::Le => return Some(bool_expr(x <= y)),
                BinaryOp::Gt => return Some(bool_expr(x > y)),
                BinaryOp::Ge => return Some(bool_expr(x >= y)),
                _ => return None,
            };
            int_expr(v, &ty)
        }
        _ => None,
    }
}

/// Conservative value range of an integral expression of type `ty`.
pub fn interval(e: &Expr, ty: &Type) -> (i128, i128) {
    let full = match ty {
        Type::Long => (i64::MIN as i128, i64::MAX as i128),
        _ => (i32::MIN as i128, i32::MAX as i128),
    };
    let clamp = |(lo, hi): (i128, i128)| {
        if lo < full.0 || hi > full.1 {
            full
        } else {
            (lo, hi)
        }
    };
    match e {
        Expr::Paren(inner) => interval(inner, ty),
        Expr::Length(_) => (0, i32::MAX as i128),
        Expr::Binary(op @ (BinaryOp::Add | BinaryOp::Sub), l, r) => {
            let (a, b) = (interval(l, ty), interval(r, ty));
            clamp(if *op == BinaryOp::Add {
                (a.0 + b.0, a.1 + b.1)
            } else {
                (a.0 - b.1, a.1 - b.0)
            })
        }
        _ => match const_value(e).and_then(Const::as_i128) {
            Some(v) => (v, v),
            None => full,
        },
    }
}

/// Whether `e` is a literal (possibly negated).
pub fn is_literal(e: &Expr) -> bool {
    matches!(e, Expr::Lit(_)) || matches!(e, Expr::Unary(UnaryOp::Neg, inner) if matches!(**inner, Expr::Lit(_)))
}

fn flip_ordering(op: BinaryOp) -> Option<BinaryOp> {
    Some(match op {
        BinaryOp::Eq => BinaryOp::Ne,
        BinaryOp::Ne => BinaryOp::Eq,
        BinaryOp::Lt => BinaryOp::Ge,
        BinaryOp::Ge => BinaryOp::Lt,
        BinaryOp::Gt => BinaryOp::Le,
        BinaryOp::Le => BinaryOp::Gt,
        _ => return None,
    })
}

/// Negations of a condition, simplest first. `!e` negates to `e`; equality
/// flips on any type and orderings flip only on integral operands (NaN
/// breaks the law for doubles); anything may be wrapped in `!( )`.
pub fn negations(c: &Expr, integral_operands: bool) -> Vec<Expr> {
    let mut out = Vec::new();
    if let Expr::Unary(UnaryOp::Not, inner) = c {
        let inner = match &**inner {
            Expr::Paren(x) if x.precedence() < crate::syntax::ast::prec::UNARY => &**x,
            x => x,
        };
        out.push(inner.clone());
    }
    if let Expr::Binary(op, l, r) = c {
        if let Some(f) = flip_ordering(*op) {
            if !op.is_ordering() || integral_operands {
                out.push(Expr::Binary(f, l.clone(), r.clone()));
            }
        }
    }
    out.push(Expr::not(place(c.clone(), ExprCtx { req: prec::UNARY, ..ExprCtx::TOP })));
    out
}

/// Default value literal for a type, used for synthesized dead code.
pub fn default_value(ty: &Type) -> Expr {
    match ty {
        Type::Int => Expr::Lit(Literal::int(0)),
        Type::Long => Expr::Lit(Literal::new(LitKind::Long, "0L")),
        Type::Double => Expr::Lit(Literal::new(LitKind::Double, "0.0")),
        Type::Boolean => bool_expr(false),
        Type::String => Expr::Lit(Literal::new(LitKind::Str, "\"\"")),
        Type::Array(elem) => Expr::NewArray((**elem).clone(), Box::new(Expr::Lit(Literal::int(0)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn purity() {
        assert!(is_pure(&e("a + b * c > 0 && !d")));
        assert!(!is_pure(&e("a / b")));
        assert!(!is_pure(&e("a[0] + 1")));
        assert!(!is_pure(&e("x++ + 1")));
    }

    #[test]
    fn folding_respects_overflow() {
        assert_eq!(fold(&e("2 + 3")), Some(e("5")));
        assert_eq!(fold(&e("2 - 3")), Some(e("-1")));
        assert_eq!(fold(&e("2147483647 + 1")), None);
        assert_eq!(fold(&e("7 / 0")), None);
        assert_eq!(fold(&e("1 < 2")), Some(e("true")));
        assert_eq!(fold(&e("2L * 3")), Some(e("6L")));
        assert_eq!(fold(&e("-2147483647 - 1")), Some(e("-2147483648")));
    }

    #[test]
    fn negation_forms() {
        assert_eq!(negations(&e("!(a && b)"), false), vec![e("a && b"), e("!!(a && b)")]);
        assert_eq!(negations(&e("a < b"), true), vec![e("a >= b"), e("!(a < b)")]);
        assert_eq!(negations(&e("a < b"), false), vec![e("!(a < b)")]);
        assert_eq!(negations(&e("f"), false), vec![e("!f")]);
    }

    #[test]
    fn intervals() {
        assert_eq!(interval(&e("a.length - 1"), &Type::Int), (-1, i32::MAX as i128 - 1));
        assert_eq!(interval(&e("a.length + 1"), &Type::Int), (i32::MIN as i128, i32::MAX as i128));
        assert_eq!(interval(&e("-5"), &Type::Int), (-5, -5));
    }
}
