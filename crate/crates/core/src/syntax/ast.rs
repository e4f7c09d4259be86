//! Abstract syntax tree for MiniJ methods.
//!
//! Parentheses are explicit [`Expr::Paren`] nodes and literals keep the
//! lexeme they were written with, so two trees that print differently are
//! never structurally equal.

use std::fmt;

/// Static type of a MiniJ value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Long,
    Double,
    Boolean,
    String,
    Array(Box<Type>),
}

impl Type {
    pub fn array_of(elem: Type) -> Type {
        Type::Array(Box::new(elem))
    }

    /// Wraps `self` in `dims` array levels.
    pub fn with_dims(self, dims: u8) -> Type {
        (0..dims).fold(self, |t, _| Type::array_of(t))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Type::Int | Type::Long | Type::Double)
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, Type::Int | Type::Long)
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, Type::Int | Type::Long | Type::Double | Type::Boolean)
    }

    pub fn element(&self) -> Option<&Type> {
        match self {
            Type::Array(e) => Some(e),
            _ => None,
        }
    }

    /// Keyword spelling of the innermost element type.
    pub fn base_name(&self) -> &'static str {
        match self {
            Type::Int => "int",
            Type::Long => "long",
            Type::Double => "double",
            Type::Boolean => "boolean",
            Type::String => "String",
            Type::Array(e) => e.base_name(),
        }
    }

    pub fn dims(&self) -> u8 {
        match self {
            Type::Array(e) => 1 + e.dims(),
            _ => 0,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base_name())?;
        for _ in 0..self.dims() {
            f.write_str("[]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LitKind {
    Int,
    Long,
    Double,
    Bool,
    Str,
}

/// A literal as written in the source.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub kind: LitKind,
    pub lexeme: String,
}

impl Literal {
    pub fn new(kind: LitKind, lexeme: impl Into<String>) -> Self {
        Literal {
            kind,
            lexeme: lexeme.into(),
        }
    }

    pub fn int(value: u32) -> Self {
        Literal::new(LitKind::Int, value.to_string())
    }

    pub fn boolean(value: bool) -> Self {
        Literal::new(LitKind::Bool, if value { "true" } else { "false" })
    }

    pub fn ty(&self) -> Type {
        match self.kind {
            LitKind::Int => Type::Int,
            LitKind::Long => Type::Long,
            LitKind::Double => Type::Double,
            LitKind::Bool => Type::Boolean,
            LitKind::Str => Type::String,
        }
    }

    /// Magnitude of an int or long literal, ignoring its representation.
    pub fn integral_value(&self) -> Option<u64> {
        match self.kind {
            LitKind::Int | LitKind::Long => parse_integral(&self.lexeme),
            _ => None,
        }
    }
}

/// Parses a decimal, hex (`0x..`) or underscore-grouped literal, with an
/// optional `L` suffix.
pub fn parse_integral(lexeme: &str) -> Option<u64> {
    let body = lexeme.trim_end_matches(['L', 'l']);
    let (digits, radix) = match body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        Some(hex) => (hex, 16),
        None => (body, 10),
    };
    let mut value: u64 = 0;
    let mut any = false;
    for &c in digits.as_bytes() {
        let d = match c {
            b'_' => continue,
            b'0'..=b'9' => c - b'0',
            b'a'..=b'f' if radix == 16 => c - b'a' + 10,
            b'A'..=b'F' if radix == 16 => c - b'A' + 10,
            _ => return None,
        };
        value = value.checked_mul(radix)?.checked_add(d as u64)?;
        any = true;
    }
    any.then_some(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IncDec {
    Inc,
    Dec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixity {
    Prefix,
    Postfix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => prec::OR,
            BinaryOp::And => prec::AND,
            BinaryOp::Eq | BinaryOp::Ne => prec::EQUALITY,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => prec::RELATIONAL,
            BinaryOp::Add | BinaryOp::Sub => prec::ADDITIVE,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => prec::MULTIPLICATIVE,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }

    pub fn is_ordering(self) -> bool {
        matches!(
            self,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Rem => "%=",
        }
    }

    /// The arithmetic operator a compound assignment applies.
    pub fn binary(self) -> Option<BinaryOp> {
        match self {
            AssignOp::Assign => None,
            AssignOp::Add => Some(BinaryOp::Add),
            AssignOp::Sub => Some(BinaryOp::Sub),
            AssignOp::Mul => Some(BinaryOp::Mul),
            AssignOp::Div => Some(BinaryOp::Div),
            AssignOp::Rem => Some(BinaryOp::Rem),
        }
    }

    pub fn compound_of(op: BinaryOp) -> Option<AssignOp> {
        match op {
            BinaryOp::Add => Some(AssignOp::Add),
            BinaryOp::Sub => Some(AssignOp::Sub),
            BinaryOp::Mul => Some(AssignOp::Mul),
            BinaryOp::Div => Some(AssignOp::Div),
            BinaryOp::Rem => Some(AssignOp::Rem),
            _ => None,
        }
    }
}

/// Binding strength of expression forms; larger binds tighter.
pub mod prec {
    pub const ASSIGN: u8 = 1;
    pub const TERNARY: u8 = 2;
    pub const OR: u8 = 3;
    pub const AND: u8 = 4;
    pub const EQUALITY: u8 = 5;
    pub const RELATIONAL: u8 = 6;
    pub const ADDITIVE: u8 = 7;
    pub const MULTIPLICATIVE: u8 = 8;
    pub const UNARY: u8 = 9;
    pub const POSTFIX: u8 = 10;
    pub const PRIMARY: u8 = 11;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Literal),
    Var(String),
    Paren(Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    IncDec(IncDec, Fixity, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
    Assign(AssignOp, Box<Expr>, Box<Expr>),
    Cast(Type, Box<Expr>),
    /// `new T[size]`; the type is the element type.
    NewArray(Type, Box<Expr>),
    /// `new T[]{a, b}`; the type is the element type.
    ArrayInit(Type, Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Length(Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn lit(lit: Literal) -> Expr {
        Expr::Lit(lit)
    }

    pub fn paren(e: Expr) -> Expr {
        Expr::Paren(Box::new(e))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnaryOp::Not, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn assign(op: AssignOp, target: Expr, value: Expr) -> Expr {
        Expr::Assign(op, Box::new(target), Box::new(value))
    }

    pub fn precedence(&self) -> u8 {
        match self {
            Expr::Lit(_) | Expr::Var(_) | Expr::Paren(_) | Expr::ArrayInit(..) => prec::PRIMARY,
            Expr::Index(..) | Expr::Length(_) => prec::POSTFIX,
            Expr::IncDec(_, Fixity::Postfix, _) => prec::POSTFIX,
            // `new int[n][0]` would parse as a two-dimensional creation.
            Expr::NewArray(..) => prec::POSTFIX,
            Expr::IncDec(_, Fixity::Prefix, _) | Expr::Unary(..) | Expr::Cast(..) => prec::UNARY,
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Ternary(..) => prec::TERNARY,
            Expr::Assign(..) => prec::ASSIGN,
        }
    }

    /// Strips any number of enclosing parentheses.
    pub fn unparen(&self) -> &Expr {
        match self {
            Expr::Paren(inner) => inner.unparen(),
            e => e,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Expr::Var(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_lit(&self) -> Option<&Literal> {
        match self {
            Expr::Lit(l) => Some(l),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Lit(_) | Expr::Var(_) => vec![],
            Expr::Paren(e)
            | Expr::Unary(_, e)
            | Expr::IncDec(_, _, e)
            | Expr::Cast(_, e)
            | Expr::NewArray(_, e)
            | Expr::Length(e) => vec![e],
            Expr::Binary(_, l, r) | Expr::Assign(_, l, r) | Expr::Index(l, r) => vec![l, r],
            Expr::Ternary(c, a, b) => vec![c, a, b],
            Expr::ArrayInit(_, items) => items.iter().collect(),
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Lit(_) | Expr::Var(_) => vec![],
            Expr::Paren(e)
            | Expr::Unary(_, e)
            | Expr::IncDec(_, _, e)
            | Expr::Cast(_, e)
            | Expr::NewArray(_, e)
            | Expr::Length(e) => vec![e],
            Expr::Binary(_, l, r) | Expr::Assign(_, l, r) | Expr::Index(l, r) => vec![l, r],
            Expr::Ternary(c, a, b) => vec![c, a, b],
            Expr::ArrayInit(_, items) => items.iter_mut().collect(),
        }
    }

    /// Visits this expression and all sub-expressions in preorder.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn visit_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        f(self);
        for c in self.children_mut() {
            c.visit_mut(f);
        }
    }

    /// Names of variables read or written anywhere in this expression.
    pub fn mentions(&self, name: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let Expr::Var(n) = e {
                found |= n == name;
            }
        });
        found
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Declarator {
    pub name: String,
    /// C-style dimensions written after the name (`int a[]`).
    pub dims: u8,
    pub init: Option<Expr>,
}

impl Declarator {
    pub fn new(name: impl Into<String>, init: Option<Expr>) -> Self {
        Declarator {
            name: name.into(),
            dims: 0,
            init,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalDecl {
    pub is_final: bool,
    pub ty: Type,
    pub declarators: Vec<Declarator>,
}

impl LocalDecl {
    pub fn single(ty: Type, name: impl Into<String>, init: Option<Expr>) -> Self {
        LocalDecl {
            is_final: false,
            ty,
            declarators: vec![Declarator::new(name, init)],
        }
    }

    pub fn declared_type(&self, d: &Declarator) -> Type {
        self.ty.clone().with_dims(d.dims)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SwitchCase {
    /// `None` for `default`; otherwise a literal, possibly negated.
    pub label: Option<Expr>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Decl(LocalDecl),
    Expr(Expr),
    If(Expr, Box<Stmt>, Option<Box<Stmt>>),
    Switch(Expr, Vec<SwitchCase>),
    For {
        init: Vec<Stmt>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    Foreach {
        is_final: bool,
        ty: Type,
        name: String,
        iterable: Expr,
        body: Box<Stmt>,
    },
    While(Expr, Box<Stmt>),
    Return(Expr),
    Break,
    Block(Vec<Stmt>),
}

impl Stmt {
    pub fn block(stmts: Vec<Stmt>) -> Stmt {
        Stmt::Block(stmts)
    }

    pub fn if_(cond: Expr, then: Stmt, els: Option<Stmt>) -> Stmt {
        Stmt::If(cond, Box::new(then), els.map(Box::new))
    }

    /// Statements of a block, or the statement itself.
    pub fn as_list(&self) -> Vec<Stmt> {
        match self {
            Stmt::Block(stmts) => stmts.clone(),
            s => vec![s.clone()],
        }
    }

    /// Expressions evaluated directly by this statement, excluding those of
    /// nested statements.
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match self {
            Stmt::Decl(d) => d.declarators.iter().filter_map(|d| d.init.as_ref()).collect(),
            Stmt::Expr(e) | Stmt::Return(e) | Stmt::While(e, _) | Stmt::If(e, ..) => vec![e],
            Stmt::Switch(e, _) => vec![e],
            Stmt::For { cond, update, .. } => cond.iter().chain(update.iter()).collect(),
            Stmt::Foreach { iterable, .. } => vec![iterable],
            Stmt::Break | Stmt::Block(_) => vec![],
        }
    }

    /// Direct sub-statements (branches, bodies, block items, case items).
    pub fn sub_stmts(&self) -> Vec<&Stmt> {
        match self {
            Stmt::If(_, t, e) => {
                let mut v: Vec<&Stmt> = vec![t];
                if let Some(e) = e {
                    v.push(e);
                }
                v
            }
            Stmt::Switch(_, cases) => cases.iter().flat_map(|c| c.body.iter()).collect(),
            Stmt::For { init, body, .. } => init.iter().chain(std::iter::once(&**body)).collect(),
            Stmt::Foreach { body, .. } | Stmt::While(_, body) => vec![body],
            Stmt::Block(stmts) => stmts.iter().collect(),
            _ => vec![],
        }
    }

    /// Visits every statement in preorder.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        for s in self.sub_stmts() {
            s.visit(f);
        }
    }

    /// Visits every expression in this statement and nested statements.
    pub fn visit_exprs<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        self.visit(&mut |s| {
            for e in s.own_exprs() {
                e.visit(f);
            }
        });
    }

    pub fn visit_exprs_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        match self {
            Stmt::Decl(d) => {
                for d in &mut d.declarators {
                    if let Some(e) = &mut d.init {
                        e.visit_mut(f);
                    }
                }
            }
            Stmt::Expr(e) | Stmt::Return(e) => e.visit_mut(f),
            Stmt::If(c, t, e) => {
                c.visit_mut(f);
                t.visit_exprs_mut(f);
                if let Some(e) = e {
                    e.visit_exprs_mut(f);
                }
            }
            Stmt::Switch(s, cases) => {
                s.visit_mut(f);
                for c in cases {
                    for st in &mut c.body {
                        st.visit_exprs_mut(f);
                    }
                }
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
            } => {
                for s in init {
                    s.visit_exprs_mut(f);
                }
                if let Some(c) = cond {
                    c.visit_mut(f);
                }
                for u in update {
                    u.visit_mut(f);
                }
                body.visit_exprs_mut(f);
            }
            Stmt::Foreach { iterable, body, .. } => {
                iterable.visit_mut(f);
                body.visit_exprs_mut(f);
            }
            Stmt::While(c, body) => {
                c.visit_mut(f);
                body.visit_exprs_mut(f);
            }
            Stmt::Break => {}
            Stmt::Block(stmts) => {
                for s in stmts {
                    s.visit_exprs_mut(f);
                }
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        let mut found = false;
        self.visit_exprs(&mut |e| {
            if let Expr::Var(n) = e {
                found |= n == name;
            }
        });
        found
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub is_final: bool,
    pub ty: Type,
    pub name: String,
    pub dims: u8,
}

impl Param {
    pub fn new(ty: Type, name: impl Into<String>) -> Self {
        Param {
            is_final: false,
            ty,
            name: name.into(),
            dims: 0,
        }
    }

    pub fn declared_type(&self) -> Type {
        self.ty.clone().with_dims(self.dims)
    }
}

/// One MiniJ method.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodAst {
    pub return_type: Type,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
}

impl MethodAst {
    /// Parameter types in declaration order.
    pub fn signature(&self) -> Vec<Type> {
        self.params.iter().map(Param::declared_type).collect()
    }

    pub fn visit_stmts<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        for s in &self.body {
            s.visit(f);
        }
    }

    pub fn visit_exprs<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        for s in &self.body {
            s.visit_exprs(f);
        }
    }

    pub fn visit_exprs_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        for s in &mut self.body {
            s.visit_exprs_mut(f);
        }
    }

    /// Every identifier bound in the method: its name, parameters and locals.
    pub fn bound_names(&self) -> Vec<String> {
        let mut names = vec![self.name.clone()];
        names.extend(self.params.iter().map(|p| p.name.clone()));
        self.visit_stmts(&mut |s| match s {
            Stmt::Decl(d) => names.extend(d.declarators.iter().map(|d| d.name.clone())),
            Stmt::Foreach { name, .. } => names.push(name.clone()),
            _ => {}
        });
        names
    }

    /// Whether `name` is referenced in the body.
    pub fn mentions(&self, name: &str) -> bool {
        self.body.iter().any(|s| s.mentions(name))
    }
}
