//! Tree-walking interpreter with Java semantics on the MiniJ subset.

use std::cell::RefCell;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::value::{java_double_string, Value};
use crate::syntax::ast::*;
use crate::syntax::lexer::unescape;
use crate::syntax::{check_method, TypeInfo};

pub const DEFAULT_STEP_BUDGET: u64 = 100_000;

/// Longest string a run may build before it is treated as runaway.
const MAX_STRING_LEN: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuntimeErrorKind {
    DivByZero,
    IndexOutOfBounds,
    NegativeArraySize,
    SwitchFallthroughViolation,
}

/// Result of running a method on one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Value { value: Value },
    RuntimeError { error: RuntimeErrorKind },
    BudgetExhausted,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Value { value } => write!(f, "value({value})"),
            Outcome::RuntimeError { error } => write!(f, "runtime_error({error:?})"),
            Outcome::BudgetExhausted => f.write_str("budget_exhausted"),
        }
    }
}

#[derive(Debug, Clone)]
enum Rt {
    Int(i32),
    Long(i64),
    Double(f64),
    Bool(bool),
    Str(Rc<str>),
    Array(Rc<RefCell<Vec<Rt>>>),
}

impl Rt {
    fn from_value(v: &Value) -> Rt {
        match v {
            Value::Int(i) => Rt::Int(*i),
            Value::Long(i) => Rt::Long(*i),
            Value::Double(d) => Rt::Double(*d),
            Value::Boolean(b) => Rt::Bool(*b),
            Value::String(s) => Rt::Str(Rc::from(s.as_str())),
            Value::Array(items) => {
                Rt::Array(Rc::new(RefCell::new(items.iter().map(Rt::from_value).collect())))
            }
        }
    }

    fn to_value(&self) -> Value {
        match self {
            Rt::Int(i) => Value::Int(*i),
            Rt::Long(i) => Value::Long(*i),
            Rt::Double(d) => Value::Double(*d),
            Rt::Bool(b) => Value::Boolean(*b),
            Rt::Str(s) => Value::String(s.to_string()),
            Rt::Array(a) => Value::Array(a.borrow().iter().map(Rt::to_value).collect()),
        }
    }

    fn default_for(ty: &Type) -> Rt {
        match ty {
            Type::Int => Rt::Int(0),
            Type::Long => Rt::Long(0),
            Type::Double => Rt::Double(0.0),
            Type::Boolean => Rt::Bool(false),
            Type::String => Rt::Str(Rc::from("")),
            Type::Array(_) => Rt::Array(Rc::new(RefCell::new(Vec::new()))),
        }
    }

    fn as_bool(&self) -> bool {
        match self {
            Rt::Bool(b) => *b,
            other => unreachable!("type checker admitted non-boolean {other:?}"),
        }
    }

    fn as_i64(&self) -> i64 {
        match self {
            Rt::Int(i) => *i as i64,
            Rt::Long(i) => *i,
            other => unreachable!("expected integral, got {other:?}"),
        }
    }

    fn as_f64(&self) -> f64 {
        match self {
            Rt::Int(i) => *i as f64,
            Rt::Long(i) => *i as f64,
            Rt::Double(d) => *d,
            other => unreachable!("expected numeric, got {other:?}"),
        }
    }

    fn java_string(&self) -> String {
        match self {
            Rt::Int(i) => i.to_string(),
            Rt::Long(i) => i.to_string(),
            Rt::Double(d) => java_double_string(*d),
            Rt::Bool(b) => b.to_string(),
            Rt::Str(s) => s.to_string(),
            Rt::Array(_) => unreachable!("arrays are not string-convertible in MiniJ"),
        }
    }

    /// Converts to `ty` the way a cast or assignment conversion would.
    fn convert(self, ty: &Type) -> Rt {
        match (ty, &self) {
            (Type::Int, Rt::Int(_))
            | (Type::Long, Rt::Long(_))
            | (Type::Double, Rt::Double(_)) => self,
            (Type::Int, Rt::Long(i)) => Rt::Int(*i as i32),
            (Type::Int, Rt::Double(d)) => Rt::Int(*d as i32),
            (Type::Long, Rt::Int(i)) => Rt::Long(*i as i64),
            (Type::Long, Rt::Double(d)) => Rt::Long(*d as i64),
            (Type::Double, Rt::Int(i)) => Rt::Double(*i as f64),
            (Type::Double, Rt::Long(i)) => Rt::Double(*i as f64),
            _ => self,
        }
    }
}

enum Stop {
    Error(RuntimeErrorKind),
    Budget,
}

type Eval<T> = Result<T, Stop>;

enum Flow {
    Normal,
    Break,
    Return(Rt),
}

/// Hashes a node address; addresses are already unique.
#[derive(Default)]
struct AddrHasher(u64);

impl std::hash::Hasher for AddrHasher {
    fn finish(&self) -> u64 {
        self.0.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 << 8) | b as u64;
        }
    }

    fn write_usize(&mut self, n: usize) {
        self.0 = n as u64;
    }
}

/// Literal values keyed by the address of their node.
type Literals = std::collections::HashMap<usize, Rt, std::hash::BuildHasherDefault<AddrHasher>>;

fn addr(l: &Literal) -> usize {
    l as *const Literal as usize
}

struct Machine<'a> {
    env: Vec<(&'a str, Rt)>,
    info: &'a TypeInfo,
    lits: &'a Literals,
    steps: u64,
    budget: u64,
}

/// A type-checked method ready to run repeatedly.
pub struct Program<'m> {
    method: &'m MethodAst,
    info: TypeInfo,
    lits: Literals,
}

impl<'m> Program<'m> {
    /// Panics if `method` does not type-check.
    pub fn new(method: &'m MethodAst) -> Self {
        let info = check_method(method).expect("interpreter requires a well-typed method");
        let mut lits = Literals::default();
        method.visit_exprs(&mut |e| {
            if let Expr::Lit(l) = e {
                lits.insert(addr(l), lit_value(l));
            }
        });
        Program { method, info, lits }
    }

    pub fn run(&self, input: &[Value], step_budget: u64) -> Outcome {
        let method = self.method;
        assert_eq!(
            input.len(),
            method.params.len(),
            "input arity does not match the signature"
        );
        let mut env = Vec::with_capacity(32);
        env.extend(
            method
                .params
                .iter()
                .zip(input)
                .map(|(p, v)| (p.name.as_str(), Rt::from_value(v))),
        );
        let mut m = Machine {
            env,
            info: &self.info,
            lits: &self.lits,
            steps: 0,
            budget: step_budget,
        };
        match m.stmts(&method.body) {
            Ok(Flow::Return(v)) => Outcome::Value {
                value: v.convert(&method.return_type).to_value(),
            },
            Ok(_) => unreachable!("type checker guarantees every path returns"),
            Err(Stop::Error(error)) => Outcome::RuntimeError { error },
            Err(Stop::Budget) => Outcome::BudgetExhausted,
        }
    }
}

/// Runs `method` on `input`. Inputs must match the signature.
pub fn evaluate(method: &MethodAst, input: &[Value], step_budget: u64) -> Outcome {
    Program::new(method).run(input, step_budget)
}

fn lit_value(l: &Literal) -> Rt {
    match l.kind {
        // magnitudes above the signed range only occur under unary minus or
        // as hex bit patterns; both wrap to the right value
        LitKind::Int => Rt::Int(l.integral_value().expect("checked literal") as u32 as i32),
        LitKind::Long => Rt::Long(l.integral_value().expect("checked literal") as i64),
        LitKind::Double => {
            let d = if l.lexeme.contains('_') {
                l.lexeme.replace('_', "").parse()
            } else {
                l.lexeme.parse()
            };
            Rt::Double(d.expect("checked literal"))
        }
        LitKind::Bool => Rt::Bool(l.lexeme == "true"),
        LitKind::Str => Rt::Str(Rc::from(unescape(&l.lexeme).as_str())),
    }
}

fn numeric_binop(op: BinaryOp, l: Rt, r: Rt) -> Eval<Rt> {
    let div0 = Err(Stop::Error(RuntimeErrorKind::DivByZero));
    Ok(match (&l, &r) {
        (Rt::Double(_), _) | (_, Rt::Double(_)) => {
            let (a, b) = (l.as_f64(), r.as_f64());
            Rt::Double(match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => a / b,
                BinaryOp::Rem => a % b,
                _ => unreachable!(),
            })
        }
        (Rt::Long(_), _) | (_, Rt::Long(_)) => {
            let (a, b) = (l.as_i64(), r.as_i64());
            Rt::Long(match op {
                BinaryOp::Add => a.wrapping_add(b),
                BinaryOp::Sub => a.wrapping_sub(b),
                BinaryOp::Mul => a.wrapping_mul(b),
                BinaryOp::Div if b == 0 => return div0,
                BinaryOp::Div => a.wrapping_div(b),
                BinaryOp::Rem if b == 0 => return div0,
                BinaryOp::Rem => a.wrapping_rem(b),
                _ => unreachable!(),
            })
        }
        (Rt::Int(a), Rt::Int(b)) => {
            let (a, b) = (*a, *b);
            Rt::Int(match op {
                BinaryOp::Add => a.wrapping_add(b),
                BinaryOp::Sub => a.wrapping_sub(b),
                BinaryOp::Mul => a.wrapping_mul(b),
                BinaryOp::Div if b == 0 => return div0,
                BinaryOp::Div => a.wrapping_div(b),
                BinaryOp::Rem if b == 0 => return div0,
                BinaryOp::Rem => a.wrapping_rem(b),
                _ => unreachable!(),
            })
        }
        _ => unreachable!("non-numeric arithmetic operands"),
    })
}

fn compare(op: BinaryOp, l: &Rt, r: &Rt) -> bool {
    match (l, r) {
        (Rt::Bool(a), Rt::Bool(b)) => match op {
            BinaryOp::Eq => a == b,
            BinaryOp::Ne => a != b,
            _ => unreachable!(),
        },
        (Rt::Double(_), _) | (_, Rt::Double(_)) => {
            let (a, b) = (l.as_f64(), r.as_f64());
            match op {
                BinaryOp::Eq => a == b,
                BinaryOp::Ne => a != b,
                BinaryOp::Lt => a < b,
                BinaryOp::Le => a <= b,
                BinaryOp::Gt => a > b,
                BinaryOp::Ge => a >= b,
                _ => unreachable!(),
            }
        }
        _ => {
            let (a, b) = (l.as_i64(), r.as_i64());
            match op {
                BinaryOp::Eq => a == b,
                BinaryOp::Ne => a != b,
                BinaryOp::Lt => a < b,
                BinaryOp::Le => a <= b,
                BinaryOp::Gt => a > b,
                BinaryOp::Ge => a >= b,
                _ => unreachable!(),
            }
        }
    }
}

fn concat(l: &Rt, r: &Rt) -> Eval<Rt> {
    let mut s = l.java_string();
    s.push_str(&r.java_string());
    if s.len() > MAX_STRING_LEN {
        return Err(Stop::Budget);
    }
    Ok(Rt::Str(Rc::from(s.as_str())))
}

/// `l op r` where `op` is arithmetic or string `+`.
fn apply_binop(op: BinaryOp, l: Rt, r: Rt) -> Eval<Rt> {
    if op == BinaryOp::Add && (matches!(l, Rt::Str(_)) || matches!(r, Rt::Str(_))) {
        concat(&l, &r)
    } else {
        numeric_binop(op, l, r)
    }
}

fn type_of_rt(v: &Rt) -> Type {
    match v {
        Rt::Int(_) => Type::Int,
        Rt::Long(_) => Type::Long,
        Rt::Double(_) => Type::Double,
        Rt::Bool(_) => Type::Boolean,
        Rt::Str(_) => Type::String,
        Rt::Array(_) => Type::array_of(Type::Int),
    }
}

fn check_index(len: usize, i: i32) -> Eval<usize> {
    if i < 0 || i as usize >= len {
        Err(Stop::Error(RuntimeErrorKind::IndexOutOfBounds))
    } else {
        Ok(i as usize)
    }
}

impl<'a> Machine<'a> {
    fn tick(&mut self, n: u64) -> Eval<()> {
        self.steps += n;
        if self.steps > self.budget {
            Err(Stop::Budget)
        } else {
            Ok(())
        }
    }

    fn lit(&self, l: &Literal) -> Rt {
        match self.lits.get(&addr(l)) {
            Some(v) => v.clone(),
            None => lit_value(l),
        }
    }

    fn lookup(&self, name: &str) -> &Rt {
        &self
            .env
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .expect("type checker guarantees declared names")
            .1
    }

    fn store(&mut self, name: &str, v: Rt) {
        let slot = self
            .env
            .iter_mut()
            .rev()
            .find(|(n, _)| *n == name)
            .expect("type checker guarantees declared names");
        // keep the declared type of the slot
        let ty = type_of_rt(&slot.1);
        slot.1 = if matches!(slot.1, Rt::Array(_) | Rt::Str(_)) {
            v
        } else {
            v.convert(&ty)
        };
    }

    fn stmts(&mut self, stmts: &'a [Stmt]) -> Eval<Flow> {
        let mark = self.env.len();
        let mut flow = Flow::Normal;
        for s in stmts {
            flow = self.stmt(s)?;
            if !matches!(flow, Flow::Normal) {
                break;
            }
        }
        self.env.truncate(mark);
        Ok(flow)
    }

    fn scoped(&mut self, s: &'a Stmt) -> Eval<Flow> {
        let mark = self.env.len();
        let flow = self.stmt(s);
        self.env.truncate(mark);
        flow
    }

    fn decl(&mut self, d: &'a LocalDecl) -> Eval<()> {
        for decl in &d.declarators {
            let ty = d.declared_type(decl);
            let v = match &decl.init {
                Some(e) => self.expr(e)?.convert(&ty),
                None => Rt::default_for(&ty),
            };
            self.env.push((decl.name.as_str(), v));
        }
        Ok(())
    }

    fn stmt(&mut self, s: &'a Stmt) -> Eval<Flow> {
        self.tick(1)?;
        match s {
            Stmt::Decl(d) => {
                self.decl(d)?;
                Ok(Flow::Normal)
            }
            Stmt::Expr(e) => {
                self.expr(e)?;
                Ok(Flow::Normal)
            }
            Stmt::Return(e) => Ok(Flow::Return(self.expr(e)?)),
            Stmt::Break => Ok(Flow::Break),
            Stmt::Block(stmts) => self.stmts(stmts),
            Stmt::If(c, t, e) => {
                if self.expr(c)?.as_bool() {
                    self.scoped(t)
                } else if let Some(e) = e {
                    self.scoped(e)
                } else {
                    Ok(Flow::Normal)
                }
            }
            Stmt::While(c, body) => {
                while self.expr(c)?.as_bool() {
                    match self.scoped(body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal => self.tick(1)?,
                    }
                }
                Ok(Flow::Normal)
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
            } => {
                let mark = self.env.len();
                let r = self.for_loop(init, cond.as_ref(), update, body);
                self.env.truncate(mark);
                r
            }
            Stmt::Foreach {
                ty,
                name,
                iterable,
                body,
                ..
            } => {
                let arr = match self.expr(iterable)? {
                    Rt::Array(a) => a,
                    _ => unreachable!(),
                };
                let len = arr.borrow().len();
                for i in 0..len {
                    let item = arr.borrow()[i].clone().convert(ty);
                    let mark = self.env.len();
                    self.env.push((name.as_str(), item));
                    let flow = self.stmt(body);
                    self.env.truncate(mark);
                    match flow? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal => self.tick(1)?,
                    }
                }
                Ok(Flow::Normal)
            }
            Stmt::Switch(scrutinee, cases) => {
                let v = self.expr(scrutinee)?;
                let start = cases
                    .iter()
                    .position(|c| {
                        c.label
                            .as_ref()
                            .is_some_and(|l| self.label_matches(l, &v))
                    })
                    .or_else(|| cases.iter().position(|c| c.label.is_none()));
                let Some(start) = start else {
                    return Ok(Flow::Normal);
                };
                for (i, case) in cases.iter().enumerate().skip(start) {
                    match self.stmts(&case.body)? {
                        Flow::Break => return Ok(Flow::Normal),
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal if i + 1 < cases.len() => {
                            return Err(Stop::Error(RuntimeErrorKind::SwitchFallthroughViolation))
                        }
                        Flow::Normal => {}
                    }
                }
                Ok(Flow::Normal)
            }
        }
    }

    fn label_matches(&self, label: &Expr, v: &Rt) -> bool {
        match (label, v) {
            (Expr::Lit(l), Rt::Int(i)) => matches!(self.lit(l), Rt::Int(x) if x == *i),
            (Expr::Unary(UnaryOp::Neg, inner), Rt::Int(i)) => match &**inner {
                Expr::Lit(l) => matches!(self.lit(l), Rt::Int(x) if x.wrapping_neg() == *i),
                _ => false,
            },
            (Expr::Lit(l), Rt::Str(s)) => l.kind == LitKind::Str && matches!(self.lit(l), Rt::Str(x) if x == *s),
            _ => false,
        }
    }

    fn for_loop(
        &mut self,
        init: &'a [Stmt],
        cond: Option<&'a Expr>,
        update: &'a [Expr],
        body: &'a Stmt,
    ) -> Eval<Flow> {
        for s in init {
            self.stmt(s)?;
        }
        loop {
            if let Some(c) = cond {
                if !self.expr(c)?.as_bool() {
                    break;
                }
            }
            match self.scoped(body)? {
                Flow::Break => break,
                Flow::Return(v) => return Ok(Flow::Return(v)),
                Flow::Normal => {}
            }
            self.tick(1)?;
            for u in update {
                self.expr(u)?;
            }
        }
        Ok(Flow::Normal)
    }

    fn expr(&mut self, e: &'a Expr) -> Eval<Rt> {
        match e {
            Expr::Lit(l) => Ok(self.lit(l)),
            Expr::Var(n) => Ok(self.lookup(n).clone()),
            Expr::Paren(inner) => self.expr(inner),
            Expr::Unary(UnaryOp::Not, inner) => Ok(Rt::Bool(!self.expr(inner)?.as_bool())),
            Expr::Unary(UnaryOp::Neg, inner) => {
                if let Expr::Lit(l) = &**inner {
                    if matches!(l.kind, LitKind::Int | LitKind::Long) {
                        return Ok(match self.lit(l) {
                            Rt::Int(i) => Rt::Int(i.wrapping_neg()),
                            Rt::Long(i) => Rt::Long(i.wrapping_neg()),
                            _ => unreachable!(),
                        });
                    }
                }
                Ok(match self.expr(inner)? {
                    Rt::Int(i) => Rt::Int(i.wrapping_neg()),
                    Rt::Long(i) => Rt::Long(i.wrapping_neg()),
                    Rt::Double(d) => Rt::Double(-d),
                    _ => unreachable!(),
                })
            }
            Expr::IncDec(op, fixity, target) => {
                let delta_op = match op {
                    IncDec::Inc => BinaryOp::Add,
                    IncDec::Dec => BinaryOp::Sub,
                };
                let place = self.place(target)?;
                let old = self.read_place(&place)?;
                let ty = type_of_rt(&old);
                let new = numeric_binop(delta_op, old.clone(), Rt::Int(1))?.convert(&ty);
                self.write_place(&place, new.clone())?;
                Ok(if *fixity == Fixity::Prefix { new } else { old })
            }
            Expr::Binary(op, l, r) => match op {
                BinaryOp::And => {
                    Ok(Rt::Bool(self.expr(l)?.as_bool() && self.expr(r)?.as_bool()))
                }
                BinaryOp::Or => Ok(Rt::Bool(self.expr(l)?.as_bool() || self.expr(r)?.as_bool())),
                op if op.is_comparison() => {
                    let lv = self.expr(l)?;
                    let rv = self.expr(r)?;
                    Ok(Rt::Bool(compare(*op, &lv, &rv)))
                }
                op => {
                    let lv = self.expr(l)?;
                    let rv = self.expr(r)?;
                    apply_binop(*op, lv, rv)
                }
            },
            Expr::Ternary(c, a, b) => {
                let result = if self.expr(c)?.as_bool() {
                    self.expr(a)?
                } else {
                    self.expr(b)?
                };
                match self.info.type_of(e) {
                    Some(ty) if ty.is_numeric() => Ok(result.convert(&ty)),
                    _ => Ok(result),
                }
            }
            Expr::Assign(op, target, value) => self.assign(*op, target, value),
            Expr::Cast(ty, inner) => Ok(self.expr(inner)?.convert(ty)),
            Expr::NewArray(elem, size) => {
                let n = match self.expr(size)? {
                    Rt::Int(n) => n,
                    _ => unreachable!(),
                };
                if n < 0 {
                    return Err(Stop::Error(RuntimeErrorKind::NegativeArraySize));
                }
                self.tick(n as u64)?;
                Ok(Rt::Array(Rc::new(RefCell::new(vec![
                    Rt::default_for(elem);
                    n as usize
                ]))))
            }
            Expr::ArrayInit(elem, items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    out.push(self.expr(item)?.convert(elem));
                }
                Ok(Rt::Array(Rc::new(RefCell::new(out))))
            }
            Expr::Index(a, i) => {
                let arr = self.expr(a)?;
                let idx = self.expr(i)?;
                match (arr, idx) {
                    (Rt::Array(arr), Rt::Int(i)) => {
                        let arr = arr.borrow();
                        let i = check_index(arr.len(), i)?;
                        Ok(arr[i].clone())
                    }
                    _ => unreachable!(),
                }
            }
            Expr::Length(a) => match self.expr(a)? {
                Rt::Array(arr) => Ok(Rt::Int(arr.borrow().len() as i32)),
                _ => unreachable!(),
            },
        }
    }

    fn place(&mut self, target: &'a Expr) -> Eval<Place<'a>> {
        match target {
            Expr::Var(n) => Ok(Place::Var(n)),
            Expr::Index(a, i) => {
                let arr = match self.expr(a)? {
                    Rt::Array(arr) => arr,
                    _ => unreachable!(),
                };
                let i = match self.expr(i)? {
                    Rt::Int(i) => i,
                    _ => unreachable!(),
                };
                Ok(Place::Elem(arr, i))
            }
            other => unreachable!("not an lvalue: {other:?}"),
        }
    }

    fn read_place(&self, place: &Place<'a>) -> Eval<Rt> {
        match place {
            Place::Var(n) => Ok(self.lookup(n).clone()),
            Place::Elem(arr, i) => {
                let arr = arr.borrow();
                let i = check_index(arr.len(), *i)?;
                Ok(arr[i].clone())
            }
        }
    }

    fn write_place(&mut self, place: &Place<'a>, v: Rt) -> Eval<()> {
        match place {
            Place::Var(n) => {
                self.store(n, v);
                Ok(())
            }
            Place::Elem(arr, i) => {
                let mut arr = arr.borrow_mut();
                let i = check_index(arr.len(), *i)?;
                let ty = type_of_rt(&arr[i]);
                arr[i] = if matches!(arr[i], Rt::Array(_) | Rt::Str(_)) {
                    v
                } else {
                    v.convert(&ty)
                };
                Ok(())
            }
        }
    }

    fn assign(&mut self, op: AssignOp, target: &'a Expr, value: &'a Expr) -> Eval<Rt> {
        let place = self.place(target)?;
        let new = match op.binary() {
            None => {
                // simple assignment to an element checks bounds after the
                // right-hand side is evaluated
                let v = self.expr(value)?;
                self.write_place(&place, v)?;
                return self.read_place(&place);
            }
            Some(bop) => {
                let old = self.read_place(&place)?;
                let rhs = self.expr(value)?;
                let ty = type_of_rt(&old);
                let r = apply_binop(bop, old, rhs)?;
                if ty == Type::String {
                    r
                } else {
                    r.convert(&ty)
                }
            }
        };
        self.write_place(&place, new.clone())?;
        Ok(new)
    }
}

enum Place<'a> {
    Var(&'a str),
    Elem(Rc<RefCell<Vec<Rt>>>, i32),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_method;

    fn run(src: &str, input: Vec<Value>) -> Outcome {
        evaluate(&parse_method(src).unwrap(), &input, DEFAULT_STEP_BUDGET)
    }

    fn int(v: i32) -> Outcome {
        Outcome::Value {
            value: Value::Int(v),
        }
    }

    #[test]
    fn increments() {
        assert_eq!(run("int f(int x){return x+1;}", vec![Value::Int(41)]), int(42));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            run("int f(int x){return 1/x;}", vec![Value::Int(0)]),
            Outcome::RuntimeError {
                error: RuntimeErrorKind::DivByZero
            }
        );
    }

    #[test]
    fn int_wraps() {
        assert_eq!(
            run("int f(int x){return x+1;}", vec![Value::Int(i32::MAX)]),
            int(i32::MIN)
        );
    }

    #[test]
    fn short_circuit_guards_division() {
        let src = "boolean f(int a, int b){return b != 0 && a / b > 1;}";
        assert_eq!(
            run(src, vec![Value::Int(5), Value::Int(0)]),
            Outcome::Value {
                value: Value::Boolean(false)
            }
        );
        let swapped = "boolean f(int a, int b){return a / b > 1 && b != 0;}";
        assert_eq!(
            run(swapped, vec![Value::Int(5), Value::Int(0)]),
            Outcome::RuntimeError {
                error: RuntimeErrorKind::DivByZero
            }
        );
    }

    #[test]
    fn loops_and_arrays() {
        let src = "int f(int[] a){int s = 0; for (int v : a) { s += v; } for (int i = 0; i < a.length; i++) s += a[i]; return s;}";
        assert_eq!(
            run(src, vec![Value::Array(vec![Value::Int(1), Value::Int(2)])]),
            int(6)
        );
        assert_eq!(
            run("int f(int[] a){return a[2];}", vec![Value::Array(vec![])]),
            Outcome::RuntimeError {
                error: RuntimeErrorKind::IndexOutOfBounds
            }
        );
        assert_eq!(
            run("int f(int n){int[] a = new int[n]; return a.length;}", vec![Value::Int(-1)]),
            Outcome::RuntimeError {
                error: RuntimeErrorKind::NegativeArraySize
            }
        );
    }

    #[test]
    fn budget_exhaustion() {
        assert_eq!(
            run("int f(int x){while (true) { x++; }}", vec![Value::Int(0)]),
            Outcome::BudgetExhausted
        );
    }

    #[test]
    fn switch_semantics() {
        let src = "int f(int x){int r = 0; switch (x) { case 1: r = 10; break; case -2: r = 20; case 3: r = 30; break; default: r = 40; break; } return r;}";
        assert_eq!(run(src, vec![Value::Int(1)]), int(10));
        assert_eq!(run(src, vec![Value::Int(7)]), int(40));
        assert_eq!(
            run(src, vec![Value::Int(-2)]),
            Outcome::RuntimeError {
                error: RuntimeErrorKind::SwitchFallthroughViolation
            }
        );
    }

    #[test]
    fn compound_assignment_narrows() {
        assert_eq!(
            run("int f(int x){x += 1.7; return x;}", vec![Value::Int(1)]),
            int(2)
        );
        assert_eq!(
            run("int f(int x){long y = 4000000000L; x += y; return x;}", vec![Value::Int(0)]),
            int(4000000000u32 as i32)
        );
    }

    #[test]
    fn string_concatenation() {
        assert_eq!(
            run(
                "String f(int x, double d){return \"v=\" + x + d + true;}",
                vec![Value::Int(3), Value::Double(1e7)]
            ),
            Outcome::Value {
                value: Value::String("v=31.0E7true".into())
            }
        );
    }

    #[test]
    fn arrays_alias() {
        let src = "int f(int[] a){int[] b = a; b[0] = 9; return a[0];}";
        assert_eq!(run(src, vec![Value::Array(vec![Value::Int(1)])]), int(9));
    }

    #[test]
    fn min_int_literal_and_casts() {
        assert_eq!(run("int f(){return -2147483648;}", vec![]), int(i32::MIN));
        assert_eq!(run("int f(double d){return (int) d;}", vec![Value::Double(f64::NAN)]), int(0));
        assert_eq!(run("int f(double d){return (int) d;}", vec![Value::Double(1e20)]), int(i32::MAX));
        assert_eq!(run("int f(){return 0xFFFFFFFF;}", vec![]), int(-1));
    }

    #[test]
    fn ternary_promotes() {
        assert_eq!(
            run("double f(boolean b){return b ? 1 : 2.5;}", vec![Value::Boolean(true)]),
            Outcome::Value {
                value: Value::Double(1.0)
            }
        );
    }
}
