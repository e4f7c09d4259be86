//! Static checks: scoping, typing, and the structural invariants that make
//! `parse(print(ast)) == ast` hold (parenthesization, dangling `else`,
//! statement forms).

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::lexer::unescape;
use super::path::{fits, operand_ctx, ExprCtx, NodePath};
use super::SyntaxError;

/// Types of every name bound in a checked method.
///
/// Names are unique up to sibling scopes, and sibling redeclarations must
/// agree on the type, so one flat map suffices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeInfo {
    pub return_type: Type,
    pub vars: HashMap<String, Type>,
    pub finals: HashSet<String>,
}

impl TypeInfo {
    pub fn var_type(&self, name: &str) -> Option<&Type> {
        self.vars.get(name)
    }

    /// Type of an expression in a checked method. `None` only for
    /// expressions that do not type-check.
    pub fn type_of(&self, e: &Expr) -> Option<Type> {
        Some(match e {
            Expr::Lit(l) => l.ty(),
            Expr::Var(n) => self.vars.get(n)?.clone(),
            Expr::Paren(inner) => self.type_of(inner)?,
            Expr::Unary(UnaryOp::Not, _) => Type::Boolean,
            Expr::Unary(UnaryOp::Neg, inner) | Expr::IncDec(_, _, inner) => self.type_of(inner)?,
            Expr::Binary(op, l, r) => {
                if op.is_comparison() || matches!(op, BinaryOp::And | BinaryOp::Or) {
                    Type::Boolean
                } else {
                    let (lt, rt) = (self.type_of(l)?, self.type_of(r)?);
                    if *op == BinaryOp::Add && (lt == Type::String || rt == Type::String) {
                        Type::String
                    } else {
                        promote(&lt, &rt)?
                    }
                }
            }
            Expr::Ternary(_, a, b) => {
                let (at, bt) = (self.type_of(a)?, self.type_of(b)?);
                if at == bt {
                    at
                } else {
                    promote(&at, &bt)?
                }
            }
            Expr::Assign(_, t, _) => self.type_of(t)?,
            Expr::Cast(ty, _) => ty.clone(),
            Expr::NewArray(elem, _) | Expr::ArrayInit(elem, _) => Type::array_of(elem.clone()),
            Expr::Index(a, _) => self.type_of(a)?.element()?.clone(),
            Expr::Length(_) => Type::Int,
        })
    }
}

/// Binary numeric promotion.
pub fn promote(a: &Type, b: &Type) -> Option<Type> {
    if !a.is_numeric() || !b.is_numeric() {
        return None;
    }
    Some(if *a == Type::Double || *b == Type::Double {
        Type::Double
    } else if *a == Type::Long || *b == Type::Long {
        Type::Long
    } else {
        Type::Int
    })
}

/// Assignment conversion: identity or primitive widening.
pub fn assignable(to: &Type, from: &Type) -> bool {
    to == from
        || matches!(
            (to, from),
            (Type::Long, Type::Int) | (Type::Double, Type::Int) | (Type::Double, Type::Long)
        )
}

fn castable(to: &Type, from: &Type) -> bool {
    to == from || (to.is_numeric() && from.is_numeric())
}

/// Checks a parsed method and returns the types of its names.
pub fn check_method(m: &MethodAst) -> Result<TypeInfo, SyntaxError> {
    let mut c = Checker {
        scopes: vec![HashSet::new()],
        info: TypeInfo {
            return_type: m.return_type.clone(),
            vars: HashMap::new(),
            finals: HashSet::new(),
        },
        path: NodePath::root(),
        breakable: 0,
    };
    for p in &m.params {
        if p.name == m.name {
            // methods and variables live in different namespaces in Java,
            // but keeping them apart keeps renames unambiguous
            return Err(c.err("parameter shares the method name"));
        }
        c.declare(&p.name, p.declared_type(), p.is_final)?;
    }
    c.stmts(&m.body)?;
    if can_complete_normally_list(&m.body) {
        return Err(c.err("missing return statement"));
    }
    Ok(c.info)
}

struct Checker {
    scopes: Vec<HashSet<String>>,
    info: TypeInfo,
    path: NodePath,
    breakable: usize,
}

impl Checker {
    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Type {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    fn declare(&mut self, name: &str, ty: Type, is_final: bool) -> Result<(), SyntaxError> {
        if name.starts_with('$') {
            return Err(self.err(format!("placeholder '{name}' in concrete code")));
        }
        if self.scopes.iter().any(|s| s.contains(name)) {
            return Err(self.err(format!("'{name}' is already defined in an enclosing scope")));
        }
        if let Some(prev) = self.info.vars.get(name) {
            if *prev != ty {
                return Err(self.err(format!(
                    "'{name}' is redeclared with type {ty}, previously {prev}"
                )));
            }
            if self.info.finals.contains(name) != is_final {
                return Err(self.err(format!("'{name}' is redeclared with different modifiers")));
            }
        }
        self.info.vars.insert(name.to_string(), ty);
        if is_final {
            self.info.finals.insert(name.to_string());
        }
        self.scopes.last_mut().unwrap().insert(name.to_string());
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<Type, SyntaxError> {
        if self.scopes.iter().any(|s| s.contains(name)) {
            Ok(self.info.vars[name].clone())
        } else {
            Err(self.err(format!("cannot find symbol '{name}'")))
        }
    }

    fn scoped<T>(&mut self, f: impl FnOnce(&mut Self) -> T) -> T {
        self.scopes.push(HashSet::new());
        let r = f(self);
        self.scopes.pop();
        r
    }

    fn at<T>(&mut self, i: usize, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.0.push(i);
        let r = f(self);
        self.path.0.pop();
        r
    }

    fn stmts(&mut self, stmts: &[Stmt]) -> Result<(), SyntaxError> {
        for (i, s) in stmts.iter().enumerate() {
            self.at(i, |c| c.stmt(s))?;
        }
        Ok(())
    }

    /// A branch or loop body: a declaration there would be unscoped.
    fn sub_body(&mut self, i: usize, s: &Stmt) -> Result<(), SyntaxError> {
        self.at(i, |c| {
            if let Stmt::Decl(_) = s {
                return Err(c.err("declaration is not allowed as a branch or loop body"));
            }
            c.scoped(|c| c.stmt(s))
        })
    }

    fn cond(&mut self, i: usize, e: &Expr) -> Result<(), SyntaxError> {
        let t = self.at(i, |c| c.expr(e, ExprCtx::TOP, false))?;
        if t != Type::Boolean {
            return self.at(i, |c| Err(c.err(format!("condition has type {t}, expected boolean"))));
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), SyntaxError> {
        match s {
            Stmt::Decl(d) => self.decl(d),
            Stmt::Expr(e) => {
                if !matches!(e, Expr::Assign(..) | Expr::IncDec(..)) {
                    return Err(self.err("not a statement"));
                }
                self.at(0, |c| c.expr(e, ExprCtx::TOP, false))?;
                Ok(())
            }
            Stmt::Return(e) => {
                let t = self.at(0, |c| c.expr(e, ExprCtx::TOP, false))?;
                if !assignable(&self.info.return_type, &t) {
                    return Err(self.err(format!(
                        "cannot return {t} from a method returning {}",
                        self.info.return_type
                    )));
                }
                Ok(())
            }
            Stmt::Break => {
                if self.breakable == 0 {
                    return Err(self.err("break outside switch or loop"));
                }
                Ok(())
            }
            Stmt::Block(stmts) => self.scoped(|c| c.stmts(stmts)),
            Stmt::If(cond, then, els) => {
                self.cond(0, cond)?;
                if els.is_some() && ends_with_open_if(then) {
                    return Err(self.err("dangling else would bind to the inner if"));
                }
                self.sub_body(1, then)?;
                if let Some(e) = els {
                    self.sub_body(2, e)?;
                }
                Ok(())
            }
            Stmt::While(cond, body) => {
                self.cond(0, cond)?;
                self.breakable += 1;
                let r = self.sub_body(1, body);
                self.breakable -= 1;
                r
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
            } => self.scoped(|c| {
                if init.len() > 1 && init.iter().any(|s| matches!(s, Stmt::Decl(_))) {
                    return Err(c.err("malformed for-init"));
                }
                for (i, s) in init.iter().enumerate() {
                    match s {
                        Stmt::Decl(_) | Stmt::Expr(_) => c.at(i, |c| c.stmt(s))?,
                        _ => return Err(c.err("malformed for-init")),
                    }
                }
                let mut idx = init.len();
                if let Some(cond) = cond {
                    c.cond(idx, cond)?;
                    idx += 1;
                }
                for u in update {
                    if !matches!(u, Expr::Assign(..) | Expr::IncDec(..)) {
                        return c.at(idx, |c| Err(c.err("not a statement")));
                    }
                    c.at(idx, |c| c.expr(u, ExprCtx::TOP, false))?;
                    idx += 1;
                }
                c.breakable += 1;
                let r = c.sub_body(idx, body);
                c.breakable -= 1;
                r
            }),
            Stmt::Foreach {
                is_final,
                ty,
                name,
                iterable,
                body,
            } => {
                let it = self.at(0, |c| c.expr(iterable, ExprCtx::TOP, false))?;
                let Some(elem) = it.element() else {
                    return Err(self.err(format!("for-each over non-array type {it}")));
                };
                if !assignable(ty, elem) {
                    return Err(self.err(format!("incompatible element type {elem} for {ty}")));
                }
                self.scoped(|c| {
                    c.declare(name, ty.clone(), *is_final)?;
                    c.breakable += 1;
                    let r = c.sub_body(1, body);
                    c.breakable -= 1;
                    r
                })
            }
            Stmt::Switch(scrutinee, cases) => {
                let st = self.at(0, |c| c.expr(scrutinee, ExprCtx::TOP, false))?;
                if !matches!(st, Type::Int | Type::String) {
                    return Err(self.err(format!("cannot switch on {st}")));
                }
                let mut seen = HashSet::new();
                let mut defaults = 0;
                for (i, case) in cases.iter().enumerate() {
                    match &case.label {
                        None => defaults += 1,
                        Some(l) => {
                            let key = self.at(i + 1, |c| c.case_label(l, &st))?;
                            if !seen.insert(key) {
                                return self.at(i + 1, |c| Err(c.err("duplicate case label")));
                            }
                        }
                    }
                    self.breakable += 1;
                    let r = self.at(i + 1, |c| c.scoped(|c| c.stmts(&case.body)));
                    self.breakable -= 1;
                    r?;
                }
                if defaults > 1 {
                    return Err(self.err("duplicate default label"));
                }
                Ok(())
            }
        }
    }

    fn case_label(&mut self, l: &Expr, st: &Type) -> Result<String, SyntaxError> {
        let (neg, lit) = match l {
            Expr::Lit(lit) => (false, lit),
            Expr::Unary(UnaryOp::Neg, inner) => match &**inner {
                Expr::Lit(lit) => (true, lit),
                _ => return Err(self.err("case label must be a constant")),
            },
            _ => return Err(self.err("case label must be a constant")),
        };
        match (st, lit.kind) {
            (Type::Int, LitKind::Int) => {
                let v = lit
                    .integral_value()
                    .ok_or_else(|| self.err("malformed literal"))? as i64;
                let v = if neg { -v } else { v };
                if v > i32::MAX as i64 || v < i32::MIN as i64 {
                    return Err(self.err("integer number too large"));
                }
                Ok(v.to_string())
            }
            (Type::String, LitKind::Str) if !neg => Ok(unescape(&lit.lexeme)),
            _ => Err(self.err(format!("case label does not match switch type {st}"))),
        }
    }

    fn decl(&mut self, d: &LocalDecl) -> Result<(), SyntaxError> {
        let mut idx = 0;
        for decl in &d.declarators {
            let ty = d.declared_type(decl);
            if let Some(init) = &decl.init {
                let t = self.at(idx, |c| c.expr(init, ExprCtx::TOP, false))?;
                if !assignable(&ty, &t) {
                    return self.at(idx, |c| {
                        Err(c.err(format!("incompatible types: {t} cannot be assigned to {ty}")))
                    });
                }
                idx += 1;
            } else if d.is_final {
                return Err(self.err(format!("final variable '{}' needs an initializer", decl.name)));
            }
            self.declare(&decl.name, ty, d.is_final)?;
        }
        Ok(())
    }

    fn child(&mut self, parent: &Expr, i: usize, e: &Expr) -> Result<Type, SyntaxError> {
        let ctx = operand_ctx(parent, i);
        let neg_operand = matches!(parent, Expr::Unary(UnaryOp::Neg, _));
        self.at(i, |c| c.expr(e, ctx, neg_operand))
    }

    fn expr(&mut self, e: &Expr, ctx: ExprCtx, neg_operand: bool) -> Result<Type, SyntaxError> {
        if !fits(e, ctx) {
            return Err(self.err(if ctx.lvalue {
                "not an assignable location".to_string()
            } else {
                "expression needs parentheses in this position".to_string()
            }));
        }
        match e {
            Expr::Lit(l) => self.literal(l, neg_operand),
            Expr::Var(n) => {
                if n.starts_with('$') {
                    return Err(self.err(format!("placeholder '{n}' in concrete code")));
                }
                self.lookup(n)
            }
            Expr::Paren(inner) => self.child(e, 0, inner),
            Expr::Unary(op, inner) => {
                let t = self.child(e, 0, inner)?;
                match op {
                    UnaryOp::Not if t == Type::Boolean => Ok(t),
                    UnaryOp::Neg if t.is_numeric() => Ok(t),
                    _ => Err(self.err(format!("bad operand type {t} for unary operator"))),
                }
            }
            Expr::IncDec(_, _, inner) => {
                self.assignable_target(inner)?;
                let t = self.child(e, 0, inner)?;
                if !t.is_numeric() {
                    return Err(self.err(format!("bad operand type {t} for ++/--")));
                }
                Ok(t)
            }
            Expr::Binary(op, l, r) => {
                let lt = self.child(e, 0, l)?;
                let rt = self.child(e, 1, r)?;
                self.binary_type(*op, &lt, &rt)
            }
            Expr::Ternary(c, a, b) => {
                let ct = self.child(e, 0, c)?;
                if ct != Type::Boolean {
                    return Err(self.err("ternary condition must be boolean"));
                }
                let at = self.child(e, 1, a)?;
                let bt = self.child(e, 2, b)?;
                if at == bt {
                    Ok(at)
                } else {
                    promote(&at, &bt)
                        .ok_or_else(|| self.err(format!("incompatible ternary branches {at} and {bt}")))
                }
            }
            Expr::Assign(op, t, v) => {
                self.assignable_target(t)?;
                let tt = self.child(e, 0, t)?;
                let vt = self.child(e, 1, v)?;
                let ok = match op.binary() {
                    None => assignable(&tt, &vt),
                    Some(BinaryOp::Add) if tt == Type::String => {
                        !matches!(vt, Type::Array(_))
                    }
                    Some(_) => tt.is_numeric() && vt.is_numeric(),
                };
                if !ok {
                    return Err(self.err(format!(
                        "incompatible types in '{}': {tt} and {vt}",
                        op.symbol()
                    )));
                }
                Ok(tt)
            }
            Expr::Cast(ty, inner) => {
                let t = self.child(e, 0, inner)?;
                if !castable(ty, &t) {
                    return Err(self.err(format!("cannot cast {t} to {ty}")));
                }
                Ok(ty.clone())
            }
            Expr::NewArray(elem, _) | Expr::ArrayInit(elem, _) if elem.element().is_some() => {
                Err(self.err("multi-dimensional array creation is not supported"))
            }
            Expr::NewArray(elem, size) => {
                let st = self.child(e, 0, size)?;
                if st != Type::Int {
                    return Err(self.err("array size must be int"));
                }
                Ok(Type::array_of(elem.clone()))
            }
            Expr::ArrayInit(elem, items) => {
                for (i, item) in items.iter().enumerate() {
                    let t = self.child(e, i, item)?;
                    if !assignable(elem, &t) {
                        return Err(self.err(format!("array element {t} is not a {elem}")));
                    }
                }
                Ok(Type::array_of(elem.clone()))
            }
            Expr::Index(a, i) => {
                if matches!(**a, Expr::NewArray(..) | Expr::ArrayInit(..)) {
                    return Err(self.err("array creation must be parenthesized before indexing"));
                }
                let at = self.child(e, 0, a)?;
                let it = self.child(e, 1, i)?;
                if it != Type::Int {
                    return Err(self.err("array index must be int"));
                }
                at.element()
                    .cloned()
                    .ok_or_else(|| self.err(format!("array required, but {at} found")))
            }
            Expr::Length(a) => {
                if matches!(**a, Expr::NewArray(..) | Expr::ArrayInit(..)) {
                    return Err(self.err("array creation must be parenthesized before .length"));
                }
                let at = self.child(e, 0, a)?;
                if at.element().is_none() {
                    return Err(self.err(format!("length of non-array type {at}")));
                }
                Ok(Type::Int)
            }
        }
    }

    fn assignable_target(&self, t: &Expr) -> Result<(), SyntaxError> {
        if let Expr::Var(n) = t {
            if self.info.finals.contains(n) {
                return Err(self.err(format!("cannot assign a value to final variable '{n}'")));
            }
        }
        Ok(())
    }

    fn binary_type(&self, op: BinaryOp, lt: &Type, rt: &Type) -> Result<Type, SyntaxError> {
        let bad = || {
            self.err(format!(
                "bad operand types for '{}': {lt} and {rt}",
                op.symbol()
            ))
        };
        match op {
            BinaryOp::And | BinaryOp::Or => {
                if *lt == Type::Boolean && *rt == Type::Boolean {
                    Ok(Type::Boolean)
                } else {
                    Err(bad())
                }
            }
            BinaryOp::Eq | BinaryOp::Ne => {
                if (*lt == Type::Boolean && *rt == Type::Boolean) || promote(lt, rt).is_some() {
                    Ok(Type::Boolean)
                } else {
                    Err(bad())
                }
            }
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                promote(lt, rt).map(|_| Type::Boolean).ok_or_else(bad)
            }
            BinaryOp::Add if *lt == Type::String || *rt == Type::String => {
                if matches!(lt, Type::Array(_)) || matches!(rt, Type::Array(_)) {
                    Err(bad())
                } else {
                    Ok(Type::String)
                }
            }
            _ => promote(lt, rt).ok_or_else(bad),
        }
    }

    fn literal(&self, l: &Literal, neg_operand: bool) -> Result<Type, SyntaxError> {
        match l.kind {
            LitKind::Int | LitKind::Long => {
                let v = l
                    .integral_value()
                    .ok_or_else(|| self.err(format!("malformed literal {}", l.lexeme)))?;
                let is_hex = l.lexeme.starts_with("0x") || l.lexeme.starts_with("0X");
                let (max, min_mag) = if l.kind == LitKind::Int {
                    (i32::MAX as u64, 1u64 << 31)
                } else {
                    (i64::MAX as u64, 1u64 << 63)
                };
                let hex_max = if l.kind == LitKind::Int {
                    u32::MAX as u64
                } else {
                    u64::MAX
                };
                let ok = if is_hex {
                    v <= hex_max
                } else {
                    v <= max || (neg_operand && v == min_mag)
                };
                if !ok {
                    return Err(self.err(format!("integer number too large: {}", l.lexeme)));
                }
                Ok(l.ty())
            }
            LitKind::Double => {
                let cleaned: String = l.lexeme.chars().filter(|c| *c != '_').collect();
                match cleaned.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Type::Double),
                    _ => Err(self.err(format!("malformed floating literal {}", l.lexeme))),
                }
            }
            LitKind::Bool => Ok(Type::Boolean),
            LitKind::Str => Ok(Type::String),
        }
    }
}

/// Whether an `else` placed after `s` would attach to an `if` inside `s`.
fn ends_with_open_if(s: &Stmt) -> bool {
    match s {
        Stmt::If(_, _, None) => true,
        Stmt::If(_, _, Some(e)) => ends_with_open_if(e),
        Stmt::While(_, b) | Stmt::Foreach { body: b, .. } | Stmt::For { body: b, .. } => {
            ends_with_open_if(b)
        }
        _ => false,
    }
}

fn is_true_literal(e: &Expr) -> bool {
    matches!(e.unparen(), Expr::Lit(l) if l.kind == LitKind::Bool && l.lexeme == "true")
}

/// Whether a `break` inside `s` targets the statement enclosing `s`.
pub fn has_targeting_break(s: &Stmt) -> bool {
    match s {
        Stmt::Break => true,
        Stmt::While(..) | Stmt::For { .. } | Stmt::Foreach { .. } | Stmt::Switch(..) => false,
        Stmt::If(_, t, e) => {
            has_targeting_break(t) || e.as_deref().is_some_and(has_targeting_break)
        }
        Stmt::Block(stmts) => stmts.iter().any(has_targeting_break),
        _ => false,
    }
}

pub fn can_complete_normally_list(stmts: &[Stmt]) -> bool {
    stmts.iter().all(can_complete_normally)
}

/// Conservative reachability: `false` only when every execution of `s`
/// ends in `return` or `break`.
pub fn can_complete_normally(s: &Stmt) -> bool {
    match s {
        Stmt::Return(_) | Stmt::Break => false,
        Stmt::Block(stmts) => can_complete_normally_list(stmts),
        Stmt::If(_, _, None) => true,
        Stmt::If(_, t, Some(e)) => can_complete_normally(t) || can_complete_normally(e),
        Stmt::While(c, body) => !is_true_literal(c) || has_targeting_break(body),
        Stmt::For { cond, body, .. } => {
            cond.as_ref().is_some_and(|c| !is_true_literal(c)) || has_targeting_break(body)
        }
        Stmt::Switch(_, cases) => {
            let has_default = cases.iter().any(|c| c.label.is_none());
            !has_default
                || cases.iter().any(|c| c.body.iter().any(has_targeting_break))
                || cases
                    .last()
                    .is_none_or(|c| can_complete_normally_list(&c.body))
        }
        _ => true,
    }
}

/// Whether every execution of `s` ends in `return` (never `break` or
/// falling through).
pub fn always_returns(s: &Stmt) -> bool {
    match s {
        Stmt::Return(_) => true,
        Stmt::Block(stmts) => {
            for s in stmts {
                if always_returns(s) {
                    return true;
                }
                if has_targeting_break(s) {
                    return false;
                }
            }
            false
        }
        Stmt::If(_, t, Some(e)) => always_returns(t) && always_returns(e),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_method;

    fn err_of(src: &str) -> String {
        match parse_method(src) {
            Err(e) => e.to_string(),
            Ok(_) => panic!("expected rejection of {src}"),
        }
    }

    #[test]
    fn undeclared_variable() {
        assert!(matches!(
            parse_method("int f(){return y;}"),
            Err(SyntaxError::Type { .. })
        ));
    }

    #[test]
    fn shadowing_rejected() {
        err_of("int f(int x){ if (x > 0) { int x = 1; } return x;}");
    }

    #[test]
    fn sibling_redeclaration_must_agree() {
        parse_method("int f(){ {int t = 1;} {int t = 2;} return 0;}").unwrap();
        err_of("int f(){ {int t = 1;} {long t = 2;} return 0;}");
    }

    #[test]
    fn missing_return() {
        err_of("int f(int x){ if (x > 0) return 1; }");
        parse_method("int f(int x){ if (x > 0) return 1; else return 2; }").unwrap();
        parse_method("int f(int x){ while (true) { x++; } }").unwrap();
    }

    #[test]
    fn dangling_else_rejected_structurally() {
        // the parser never builds this shape; the checker guards hand-built trees
        let mut m = parse_method("int f(boolean a, boolean b){ if (a) { if (b) return 1; } else return 2; return 3; }").unwrap();
        if let Stmt::If(_, t, _) = &mut m.body[0] {
            let inner = t.as_list().remove(0);
            **t = inner;
        }
        assert!(check_method(&m).is_err());
    }

    #[test]
    fn missing_parentheses_rejected() {
        let mut m = parse_method("int f(int a, int b){ return (a + b) * 2; }").unwrap();
        if let Stmt::Return(Expr::Binary(_, l, _)) = &mut m.body[0] {
            let inner = l.unparen().clone();
            **l = inner;
        }
        assert!(check_method(&m).is_err());
    }

    #[test]
    fn int_literal_range() {
        parse_method("int f(){ return -2147483648; }").unwrap();
        err_of("int f(){ return 2147483648; }");
        parse_method("int f(){ return 0xFFFFFFFF; }").unwrap();
    }

    #[test]
    fn expression_statement_forms() {
        err_of("int f(int x){ x + 1; return x; }");
        parse_method("int f(int x){ x++; ++x; x += 2; return x; }").unwrap();
    }

    #[test]
    fn switch_label_checks() {
        err_of("int f(int x){ switch (x) { case 1: break; case 1: break; } return x; }");
        parse_method("int f(int x){ switch (x) { case 1: break; case -1: break; default: break; } return x; }").unwrap();
    }

    #[test]
    fn final_assignment_rejected() {
        err_of("int f(final int x){ x = 1; return x; }");
    }

    #[test]
    fn type_info_reports_expression_types() {
        let src = "double f(int a, long b){ double d = a + 0.5; return a + b + d; }";
        let m = parse_method(src).unwrap();
        let info = check_method(&m).unwrap();
        assert_eq!(info.var_type("d"), Some(&Type::Double));
        if let Stmt::Return(e) = &m.body[1] {
            assert_eq!(info.type_of(e), Some(Type::Double));
            if let Expr::Binary(_, l, _) = e {
                assert_eq!(info.type_of(l), Some(Type::Long));
            }
        }
    }

    #[test]
    fn always_returns_shapes() {
        let m = parse_method("int f(int x){ if (x > 0) { x++; return 1; } else { return 2; } }").unwrap();
        assert!(always_returns(&m.body[0]));
    }
}
