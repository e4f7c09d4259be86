//! MiniJ: a method-level Java subset. Tokenizer, parser, type checker and
//! canonical printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod path;
pub mod printer;
pub mod typeck;

use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_expr, parse_method_untyped};
pub use path::{resolve_path, Node, NodeMut, NodePath};
pub use printer::{print_expr, print_method, print_stmt};
pub use typeck::{check_method, TypeInfo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: lexical error: {message}")]
    Lex {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: parse error: expected one of [{}], found '{found}'", expected.join(", "))]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("type error at {path}: {message}")]
    Type { path: NodePath, message: String },
    #[error("invalid path {path}")]
    InvalidPath { path: String },
}

/// Parses and type-checks one method.
pub fn parse_method(source: &str) -> Result<MethodAst, SyntaxError> {
    let m = parse_method_untyped(source)?;
    check_method(&m)?;
    Ok(m)
}

/// Tokens of the canonical rendering of `m`.
pub fn method_tokens(m: &MethodAst) -> Vec<Token> {
    tokenize(&print_method(m)).expect("printer output always tokenizes")
}
