//! Recursive-descent parser producing [`MethodAst`] values.

use super::ast::*;
use super::lexer::{tokenize_with_positions, Pos, Token, TokenKind};
use super::SyntaxError;

/// Parses one complete method without type checking it.
pub fn parse_method_untyped(source: &str) -> Result<MethodAst, SyntaxError> {
    let mut p = Parser::new(source, false)?;
    let m = p.method()?;
    p.expect_eof()?;
    Ok(m)
}

/// Parses a statement list that may contain `$name` placeholders.
pub(crate) fn parse_pattern_stmts(source: &str) -> Result<Vec<Stmt>, SyntaxError> {
    let mut p = Parser::new(source, true)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.stmt()?);
    }
    Ok(out)
}

/// Parses a method that may contain `$name` placeholders.
pub(crate) fn parse_pattern_method(source: &str) -> Result<MethodAst, SyntaxError> {
    let mut p = Parser::new(source, true)?;
    let m = p.method()?;
    p.expect_eof()?;
    Ok(m)
}

/// Parses an expression that may contain `$name` placeholders.
pub(crate) fn parse_pattern_expr(source: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(source, true)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a standalone expression (no placeholders).
pub fn parse_expr(source: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(source, false)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    toks: Vec<(Token, Pos)>,
    at: usize,
    end: Pos,
}

const TYPE_KEYWORDS: &[&str] = &["int", "long", "double", "boolean", "String"];

impl Parser {
    fn new(source: &str, placeholders: bool) -> Result<Self, SyntaxError> {
        let toks = tokenize_with_positions(source, placeholders)?;
        let end = source
            .lines()
            .enumerate()
            .last()
            .map(|(i, l)| Pos {
                line: i + 1,
                col: l.chars().count() + 1,
            })
            .unwrap_or(Pos { line: 1, col: 1 });
        Ok(Parser { toks, at: 0, end })
    }

    fn at_eof(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn peek_tok(&self, off: usize) -> Option<&Token> {
        self.toks.get(self.at + off).map(|(t, _)| t)
    }

    fn peek_is(&self, off: usize, lexeme: &str) -> bool {
        self.peek_tok(off).is_some_and(|t| {
            t.lexeme == lexeme
                && !matches!(t.kind, TokenKind::StringLiteral | TokenKind::Identifier)
        })
    }

    fn is(&self, lexeme: &str) -> bool {
        self.peek_is(0, lexeme)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        let pos = self.pos();
        Err(SyntaxError::Parse {
            line: pos.line,
            col: pos.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .peek_tok(0)
                .map(|t| t.lexeme.clone())
                .unwrap_or_else(|| "end of input".into()),
        })
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].0.clone();
        self.at += 1;
        t
    }

    fn eat(&mut self, lexeme: &str) -> bool {
        if self.is(lexeme) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lexeme: &str) -> Result<(), SyntaxError> {
        if self.eat(lexeme) {
            Ok(())
        } else {
            self.fail(&[lexeme])
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek_tok(0) {
            Some(t) if t.kind == TokenKind::Identifier => Ok(self.bump().lexeme),
            _ => self.fail(&["identifier"]),
        }
    }

    fn at_type(&self) -> bool {
        TYPE_KEYWORDS.iter().any(|k| self.is(k))
    }

    fn base_type(&mut self) -> Result<Type, SyntaxError> {
        let t = match self.peek_tok(0).map(|t| t.lexeme.as_str()) {
            Some("int") => Type::Int,
            Some("long") => Type::Long,
            Some("double") => Type::Double,
            Some("boolean") => Type::Boolean,
            Some("String") => Type::String,
            _ => return self.fail(TYPE_KEYWORDS),
        };
        self.at += 1;
        Ok(t)
    }

    fn dims(&mut self) -> Result<u8, SyntaxError> {
        let mut d = 0u8;
        while self.is("[") && self.peek_is(1, "]") {
            self.at += 2;
            d += 1;
        }
        Ok(d)
    }

    fn ty(&mut self) -> Result<Type, SyntaxError> {
        let base = self.base_type()?;
        let d = self.dims()?;
        Ok(base.with_dims(d))
    }

    fn method(&mut self) -> Result<MethodAst, SyntaxError> {
        let return_type = self.ty()?;
        let name = self.ident()?;
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.is(")") {
            loop {
                let is_final = self.eat("final");
                let ty = self.ty()?;
                let name = self.ident()?;
                let dims = self.dims()?;
                params.push(Param {
                    is_final,
                    ty,
                    name,
                    dims,
                });
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        let body = self.block_items()?;
        Ok(MethodAst {
            return_type,
            name,
            params,
            body,
        })
    }

    fn block_items(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.is("}") {
            if self.at_eof() {
                return self.fail(&["}"]);
            }
            out.push(self.stmt()?);
        }
        self.expect("}")?;
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        if self.is("{") {
            return Ok(Stmt::Block(self.block_items()?));
        }
        if self.eat("if") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let then = self.stmt()?;
            let els = if self.eat("else") {
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            return Ok(Stmt::If(cond, Box::new(then), els));
        }
        if self.eat("while") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let body = self.stmt()?;
            return Ok(Stmt::While(cond, Box::new(body)));
        }
        if self.eat("for") {
            return self.for_stmt();
        }
        if self.eat("switch") {
            return self.switch_stmt();
        }
        if self.eat("return") {
            let e = self.expr()?;
            self.expect(";")?;
            return Ok(Stmt::Return(e));
        }
        if self.eat("break") {
            self.expect(";")?;
            return Ok(Stmt::Break);
        }
        if self.is("final") || self.at_type() {
            let d = self.local_decl()?;
            self.expect(";")?;
            return Ok(Stmt::Decl(d));
        }
        let e = self.expr()?;
        self.expect(";")?;
        Ok(Stmt::Expr(e))
    }

    fn local_decl(&mut self) -> Result<LocalDecl, SyntaxError> {
        let is_final = self.eat("final");
        let ty = self.ty()?;
        let mut declarators = Vec::new();
        loop {
            let name = self.ident()?;
            let dims = self.dims()?;
            let init = if self.eat("=") {
                Some(self.expr()?)
            } else {
                None
            };
            declarators.push(Declarator { name, dims, init });
            if !self.eat(",") {
                break;
            }
        }
        Ok(LocalDecl {
            is_final,
            ty,
            declarators,
        })
    }

    fn for_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect("(")?;
        if self.is("final") || self.at_type() {
            let save = self.at;
            let is_final = self.eat("final");
            let ty = self.ty()?;
            let name = self.ident()?;
            if self.eat(":") {
                let iterable = self.expr()?;
                self.expect(")")?;
                let body = self.stmt()?;
                return Ok(Stmt::Foreach {
                    is_final,
                    ty,
                    name,
                    iterable,
                    body: Box::new(body),
                });
            }
            self.at = save;
        }
        let mut init = Vec::new();
        if self.is("final") || self.at_type() {
            init.push(Stmt::Decl(self.local_decl()?));
        } else if !self.is(";") {
            loop {
                init.push(Stmt::Expr(self.expr()?));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(";")?;
        let cond = if self.is(";") {
            None
        } else {
            Some(self.expr()?)
        };
        self.expect(";")?;
        let mut update = Vec::new();
        if !self.is(")") {
            loop {
                update.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        let body = self.stmt()?;
        Ok(Stmt::For {
            init,
            cond,
            update,
            body: Box::new(body),
        })
    }

    fn switch_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect("(")?;
        let scrutinee = self.expr()?;
        self.expect(")")?;
        self.expect("{")?;
        let mut cases = Vec::new();
        while !self.eat("}") {
            let label = if self.eat("case") {
                let neg = self.eat("-");
                let lit = match self.peek_tok(0) {
                    Some(t)
                        if matches!(
                            t.kind,
                            TokenKind::IntLiteral
                                | TokenKind::LongLiteral
                                | TokenKind::StringLiteral
                        ) =>
                    {
                        self.primary()?
                    }
                    _ => return self.fail(&["literal"]),
                };
                Some(if neg {
                    Expr::Unary(UnaryOp::Neg, Box::new(lit))
                } else {
                    lit
                })
            } else if self.eat("default") {
                None
            } else {
                return self.fail(&["case", "default", "}"]);
            };
            self.expect(":")?;
            let mut body = Vec::new();
            while !self.is("case") && !self.is("default") && !self.is("}") {
                if self.at_eof() {
                    return self.fail(&["}"]);
                }
                body.push(self.stmt()?);
            }
            cases.push(SwitchCase { label, body });
        }
        Ok(Stmt::Switch(scrutinee, cases))
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.ternary()?;
        let op = match self.peek_tok(0) {
            Some(t) if t.kind == TokenKind::Operator => match t.lexeme.as_str() {
                "=" => Some(AssignOp::Assign),
                "+=" => Some(AssignOp::Add),
                "-=" => Some(AssignOp::Sub),
                "*=" => Some(AssignOp::Mul),
                "/=" => Some(AssignOp::Div),
                "%=" => Some(AssignOp::Rem),
                _ => None,
            },
            _ => None,
        };
        match op {
            Some(op) => {
                self.at += 1;
                let rhs = self.expr()?;
                Ok(Expr::Assign(op, Box::new(lhs), Box::new(rhs)))
            }
            None => Ok(lhs),
        }
    }

    fn ternary(&mut self) -> Result<Expr, SyntaxError> {
        let cond = self.binary(prec::OR)?;
        if self.eat("?") {
            let a = self.expr()?;
            self.expect(":")?;
            let b = self.ternary()?;
            Ok(Expr::Ternary(Box::new(cond), Box::new(a), Box::new(b)))
        } else {
            Ok(cond)
        }
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let t = self.peek_tok(0)?;
        if t.kind != TokenKind::Operator {
            return None;
        }
        Some(match t.lexeme.as_str() {
            "||" => BinaryOp::Or,
            "&&" => BinaryOp::And,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "%" => BinaryOp::Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let p = op.precedence();
            if p < min_prec {
                break;
            }
            self.at += 1;
            let rhs = self.binary(p + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat("!") {
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary()?)));
        }
        if self.eat("-") {
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        if self.eat("++") {
            return Ok(Expr::IncDec(IncDec::Inc, Fixity::Prefix, Box::new(self.unary()?)));
        }
        if self.eat("--") {
            return Ok(Expr::IncDec(IncDec::Dec, Fixity::Prefix, Box::new(self.unary()?)));
        }
        if self.is("(") && TYPE_KEYWORDS.iter().any(|k| self.peek_is(1, k)) {
            self.at += 1;
            let ty = self.ty()?;
            self.expect(")")?;
            let operand = self.unary()?;
            return Ok(Expr::Cast(ty, Box::new(operand)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.primary()?;
        loop {
            if self.is("[") {
                self.at += 1;
                let idx = self.expr()?;
                self.expect("]")?;
                e = Expr::Index(Box::new(e), Box::new(idx));
            } else if self.is(".") {
                self.at += 1;
                match self.peek_tok(0) {
                    Some(t) if t.kind == TokenKind::Identifier && t.lexeme == "length" => {
                        self.at += 1;
                    }
                    _ => return self.fail(&["length"]),
                }
                e = Expr::Length(Box::new(e));
            } else if self.eat("++") {
                e = Expr::IncDec(IncDec::Inc, Fixity::Postfix, Box::new(e));
            } else if self.eat("--") {
                e = Expr::IncDec(IncDec::Dec, Fixity::Postfix, Box::new(e));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let Some(tok) = self.peek_tok(0).cloned() else {
            return self.fail(&["expression"]);
        };
        let kind = match tok.kind {
            TokenKind::IntLiteral => Some(LitKind::Int),
            TokenKind::LongLiteral => Some(LitKind::Long),
            TokenKind::DoubleLiteral => Some(LitKind::Double),
            TokenKind::BoolLiteral => Some(LitKind::Bool),
            TokenKind::StringLiteral => Some(LitKind::Str),
            _ => None,
        };
        if let Some(kind) = kind {
            self.at += 1;
            return Ok(Expr::Lit(Literal::new(kind, tok.lexeme)));
        }
        if tok.kind == TokenKind::Identifier {
            self.at += 1;
            return Ok(Expr::Var(tok.lexeme));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(Expr::Paren(Box::new(e)));
        }
        if self.eat("new") {
            let elem = self.base_type()?;
            self.expect("[")?;
            if self.eat("]") {
                let extra = self.dims()?;
                let elem = elem.with_dims(extra);
                self.expect("{")?;
                let mut items = Vec::new();
                if !self.is("}") {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                self.expect("}")?;
                return Ok(Expr::ArrayInit(elem, items));
            }
            let size = self.expr()?;
            self.expect("]")?;
            let extra = self.dims()?;
            return Ok(Expr::NewArray(elem.with_dims(extra), Box::new(size)));
        }
        self.fail(&["expression"])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_method() {
        let m = parse_method_untyped("int f(int x){return x+1;}").unwrap();
        assert_eq!(m.name, "f");
        assert_eq!(m.params.len(), 1);
        assert!(matches!(m.body.as_slice(), [Stmt::Return(_)]));
    }

    #[test]
    fn c_style_array_param() {
        let m = parse_method_untyped("int f(int a[]){return a.length;}").unwrap();
        assert_eq!(m.params[0].dims, 1);
        assert_eq!(m.params[0].declared_type(), Type::array_of(Type::Int));
    }

    #[test]
    fn precedence_and_assoc() {
        let e = parse_expr("a - b - c * d").unwrap();
        match e {
            Expr::Binary(BinaryOp::Sub, l, r) => {
                assert!(matches!(*l, Expr::Binary(BinaryOp::Sub, ..)));
                assert!(matches!(*r, Expr::Binary(BinaryOp::Mul, ..)));
            }
            other => panic!("{other:?}"),
        }
        let e = parse_expr("a = b = 1").unwrap();
        assert!(matches!(e, Expr::Assign(AssignOp::Assign, _, ref r) if matches!(**r, Expr::Assign(..))));
    }

    #[test]
    fn parens_are_nodes() {
        let e = parse_expr("(a)").unwrap();
        assert_eq!(e, Expr::paren(Expr::var("a")));
    }

    #[test]
    fn cast_versus_paren() {
        assert!(matches!(parse_expr("(int) x").unwrap(), Expr::Cast(Type::Int, _)));
        assert!(matches!(parse_expr("(x) + 1").unwrap(), Expr::Binary(..)));
    }

    #[test]
    fn foreach_and_for() {
        let m = parse_method_untyped(
            "int f(int[] a){int s=0; for(int v:a){s+=v;} for(int i=0;i<a.length;i++) s++; return s;}",
        )
        .unwrap();
        assert!(matches!(m.body[1], Stmt::Foreach { .. }));
        assert!(matches!(m.body[2], Stmt::For { .. }));
    }

    #[test]
    fn switch_cases() {
        let m = parse_method_untyped(
            "int f(int x){switch(x){case 1: return 2; case -3: x = 1; break; default: break;} return x;}",
        )
        .unwrap();
        match &m.body[0] {
            Stmt::Switch(_, cases) => {
                assert_eq!(cases.len(), 3);
                assert!(cases[2].label.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_report_expected() {
        match parse_method_untyped("int f(int x){return x+;}") {
            Err(SyntaxError::Parse { expected, found, .. }) => {
                assert_eq!(found, ";");
                assert!(expected.contains(&"expression".to_string()));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_method_untyped("int f(int x){return x;} extra").is_err());
    }
}
