//! Canonical pretty-printer. Output is a pure function of the tree.

use super::ast::*;

pub fn print_method(m: &MethodAst) -> String {
    let mut p = Printer::default();
    p.out.push_str(&m.return_type.to_string());
    p.out.push(' ');
    p.out.push_str(&m.name);
    p.out.push('(');
    for (i, param) in m.params.iter().enumerate() {
        if i > 0 {
            p.out.push_str(", ");
        }
        if param.is_final {
            p.out.push_str("final ");
        }
        p.out.push_str(&param.ty.to_string());
        p.out.push(' ');
        p.out.push_str(&param.name);
        for _ in 0..param.dims {
            p.out.push_str("[]");
        }
    }
    p.out.push_str(") {\n");
    p.indent += 1;
    for s in &m.body {
        p.stmt(s);
    }
    p.out.push_str("}\n");
    p.out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

pub fn print_stmt(s: &Stmt) -> String {
    let mut p = Printer::default();
    p.stmt(s);
    p.out
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn line_start(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        self.line_start();
        self.stmt_inline(s);
    }

    /// Prints a statement whose indentation has already been written.
    fn stmt_inline(&mut self, s: &Stmt) {
        match s {
            Stmt::Decl(d) => {
                write_decl(&mut self.out, d);
                self.out.push_str(";\n");
            }
            Stmt::Expr(e) => {
                write_expr(&mut self.out, e);
                self.out.push_str(";\n");
            }
            Stmt::Return(e) => {
                self.out.push_str("return ");
                write_expr(&mut self.out, e);
                self.out.push_str(";\n");
            }
            Stmt::Break => self.out.push_str("break;\n"),
            Stmt::Block(stmts) => {
                self.out.push_str("{\n");
                self.items(stmts);
                self.line_start();
                self.out.push_str("}\n");
            }
            Stmt::If(c, t, e) => {
                self.out.push_str("if (");
                write_expr(&mut self.out, c);
                self.out.push(')');
                let closed = self.body(t);
                if let Some(e) = e {
                    if closed {
                        self.out.push_str(" else");
                    } else {
                        self.line_start();
                        self.out.push_str("else");
                    }
                    if let Stmt::If(..) = **e {
                        self.out.push(' ');
                        self.stmt_inline(e);
                    } else if self.body(e) {
                        self.out.push('\n');
                    }
                } else if closed {
                    self.out.push('\n');
                }
            }
            Stmt::While(c, body) => {
                self.out.push_str("while (");
                write_expr(&mut self.out, c);
                self.out.push(')');
                if self.body(body) {
                    self.out.push('\n');
                }
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
            } => {
                self.out.push_str("for (");
                for (i, s) in init.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    match s {
                        Stmt::Decl(d) => write_decl(&mut self.out, d),
                        Stmt::Expr(e) => write_expr(&mut self.out, e),
                        // for-init only ever holds declarations or expressions
                        other => self.out.push_str(print_stmt(other).trim()),
                    }
                }
                self.out.push(';');
                if let Some(c) = cond {
                    self.out.push(' ');
                    write_expr(&mut self.out, c);
                }
                self.out.push(';');
                for (i, u) in update.iter().enumerate() {
                    self.out.push_str(if i == 0 { " " } else { ", " });
                    write_expr(&mut self.out, u);
                }
                self.out.push(')');
                if self.body(body) {
                    self.out.push('\n');
                }
            }
            Stmt::Foreach {
                is_final,
                ty,
                name,
                iterable,
                body,
            } => {
                self.out.push_str("for (");
                if *is_final {
                    self.out.push_str("final ");
                }
                self.out.push_str(&ty.to_string());
                self.out.push(' ');
                self.out.push_str(name);
                self.out.push_str(" : ");
                write_expr(&mut self.out, iterable);
                self.out.push(')');
                if self.body(body) {
                    self.out.push('\n');
                }
            }
            Stmt::Switch(scrutinee, cases) => {
                self.out.push_str("switch (");
                write_expr(&mut self.out, scrutinee);
                self.out.push_str(") {\n");
                self.indent += 1;
                for c in cases {
                    self.line_start();
                    match &c.label {
                        Some(l) => {
                            self.out.push_str("case ");
                            write_expr(&mut self.out, l);
                            self.out.push_str(":\n");
                        }
                        None => self.out.push_str("default:\n"),
                    }
                    self.items(&c.body);
                }
                self.indent -= 1;
                self.line_start();
                self.out.push_str("}\n");
            }
        }
    }

    fn items(&mut self, stmts: &[Stmt]) {
        self.indent += 1;
        for s in stmts {
            self.stmt(s);
        }
        self.indent -= 1;
    }

    /// Prints a branch or loop body. Returns true when the body was a block
    /// whose closing brace is left open on the current line.
    fn body(&mut self, s: &Stmt) -> bool {
        match s {
            Stmt::Block(stmts) => {
                self.out.push_str(" {\n");
                self.items(stmts);
                self.line_start();
                self.out.push('}');
                true
            }
            other => {
                self.out.push('\n');
                self.indent += 1;
                self.stmt(other);
                self.indent -= 1;
                false
            }
        }
    }
}

fn write_decl(out: &mut String, d: &LocalDecl) {
    if d.is_final {
        out.push_str("final ");
    }
    out.push_str(&d.ty.to_string());
    for (i, decl) in d.declarators.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        out.push_str(&decl.name);
        for _ in 0..decl.dims {
            out.push_str("[]");
        }
        if let Some(init) = &decl.init {
            out.push_str(" = ");
            write_expr(out, init);
        }
    }
}

fn starts_with_minus(e: &Expr) -> bool {
    match e {
        Expr::Unary(UnaryOp::Neg, _) | Expr::IncDec(IncDec::Dec, Fixity::Prefix, _) => true,
        Expr::Binary(_, l, _) | Expr::Assign(_, l, _) | Expr::Index(l, _) => starts_with_minus(l),
        Expr::Ternary(c, ..) => starts_with_minus(c),
        Expr::IncDec(_, Fixity::Postfix, e) | Expr::Length(e) => starts_with_minus(e),
        _ => false,
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Lit(l) => out.push_str(&l.lexeme),
        Expr::Var(n) => out.push_str(n),
        Expr::Paren(inner) => {
            out.push('(');
            write_expr(out, inner);
            out.push(')');
        }
        Expr::Unary(op, inner) => {
            out.push(match op {
                UnaryOp::Not => '!',
                UnaryOp::Neg => '-',
            });
            if *op == UnaryOp::Neg && starts_with_minus(inner) {
                out.push(' ');
            }
            write_expr(out, inner);
        }
        Expr::IncDec(op, fixity, inner) => {
            let sym = match op {
                IncDec::Inc => "++",
                IncDec::Dec => "--",
            };
            if *fixity == Fixity::Prefix {
                out.push_str(sym);
                write_expr(out, inner);
            } else {
                write_expr(out, inner);
                out.push_str(sym);
            }
        }
        Expr::Binary(op, l, r) => {
            write_expr(out, l);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(out, r);
        }
        Expr::Ternary(c, a, b) => {
            write_expr(out, c);
            out.push_str(" ? ");
            write_expr(out, a);
            out.push_str(" : ");
            write_expr(out, b);
        }
        Expr::Assign(op, t, v) => {
            write_expr(out, t);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(out, v);
        }
        Expr::Cast(ty, inner) => {
            out.push('(');
            out.push_str(&ty.to_string());
            out.push_str(") ");
            write_expr(out, inner);
        }
        Expr::NewArray(elem, size) => {
            out.push_str("new ");
            out.push_str(elem.base_name());
            out.push('[');
            write_expr(out, size);
            out.push(']');
            for _ in 0..elem.dims() {
                out.push_str("[]");
            }
        }
        Expr::ArrayInit(elem, items) => {
            out.push_str("new ");
            out.push_str(&elem.to_string());
            out.push_str("[]{");
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, item);
            }
            out.push('}');
        }
        Expr::Index(a, i) => {
            write_expr(out, a);
            out.push('[');
            write_expr(out, i);
            out.push(']');
        }
        Expr::Length(a) => {
            write_expr(out, a);
            out.push_str(".length");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_method, tokenize};

    #[test]
    fn round_trip_minimal() {
        let src = "int f(int x){return x+1;}";
        let m = parse_method(src).unwrap();
        let printed = print_method(&m);
        assert_eq!(printed, "int f(int x) {\n    return x + 1;\n}\n");
        assert_eq!(tokenize(&printed).unwrap(), tokenize(src).unwrap());
    }

    #[test]
    fn parentheses_survive() {
        let m = parse_method("int f(int x){return (x)+1;}").unwrap();
        assert!(print_method(&m).contains("(x) + 1"));
    }

    #[test]
    fn nested_negation_keeps_tokens_apart() {
        let m = parse_method("int f(int x){return - -x;}").unwrap();
        let printed = print_method(&m);
        assert_eq!(
            tokenize(&printed).unwrap(),
            tokenize("int f(int x){return - -x;}").unwrap()
        );
    }

    #[test]
    fn else_if_chain_layout() {
        let src = "int f(int x){if(x==1){return 1;}else if(x==2)return 2;else{return 3;}}";
        let m = parse_method(src).unwrap();
        let printed = print_method(&m);
        assert_eq!(tokenize(&printed).unwrap(), tokenize(src).unwrap());
        assert_eq!(parse_method(&printed).unwrap(), m);
    }
}
