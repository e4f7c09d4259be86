//! Tokenizer for MiniJ source text.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    IntLiteral,
    LongLiteral,
    DoubleLiteral,
    BoolLiteral,
    StringLiteral,
    Operator,
    Separator,
}

/// One lexical token. Equality is by kind and lexeme; positions are kept
/// separately so that token sequences compare by content only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
}

impl Token {
    pub fn new(kind: TokenKind, lexeme: impl Into<String>) -> Self {
        Token {
            kind,
            lexeme: lexeme.into(),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexeme)
    }
}

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub const KEYWORDS: &[&str] = &[
    "int", "long", "double", "boolean", "String", "final", "if", "else", "switch", "case",
    "default", "break", "for", "while", "return", "new",
];

const OPERATORS: &[&str] = &[
    "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "+", "-", "*",
    "/", "%", "!", "<", ">", "=", "?", ":",
];

const SEPARATORS: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.'];

/// Splits `source` into tokens, discarding whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    Ok(tokenize_with_positions(source, false)?
        .into_iter()
        .map(|(t, _)| t)
        .collect())
}

pub(crate) fn tokenize_with_positions(
    source: &str,
    allow_placeholders: bool,
) -> Result<Vec<(Token, Pos)>, SyntaxError> {
    Lexer {
        chars: source.chars().collect(),
        at: 0,
        line: 1,
        col: 1,
        allow_placeholders,
    }
    .run()
}

struct Lexer {
    chars: Vec<char>,
    at: usize,
    line: usize,
    col: usize,
    allow_placeholders: bool,
}

impl Lexer {
    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.at + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.at).copied()?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Lex {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    fn run(mut self) -> Result<Vec<(Token, Pos)>, SyntaxError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek(0) {
            let start = self.pos();
            if c.is_whitespace() {
                self.bump();
            } else if c == '/' && self.peek(1) == Some('/') {
                while let Some(c) = self.peek(0) {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c == '/' && self.peek(1) == Some('*') {
                self.bump();
                self.bump();
                loop {
                    match self.peek(0) {
                        None => return Err(self.error(start, "unterminated block comment")),
                        Some('*') if self.peek(1) == Some('/') => {
                            self.bump();
                            self.bump();
                            break;
                        }
                        Some(_) => {
                            self.bump();
                        }
                    }
                }
            } else if c.is_ascii_alphabetic() || c == '_' || (c == '$' && self.allow_placeholders)
            {
                let mut s = String::new();
                while let Some(c) = self.peek(0) {
                    if c.is_ascii_alphanumeric() || c == '_' || (c == '$' && self.allow_placeholders)
                    {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let kind = if s == "true" || s == "false" {
                    TokenKind::BoolLiteral
                } else if KEYWORDS.contains(&s.as_str()) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                out.push((Token::new(kind, s), start));
            } else if c.is_ascii_digit() {
                let tok = self.number(start)?;
                out.push((tok, start));
            } else if c == '"' {
                let tok = self.string(start)?;
                out.push((tok, start));
            } else if SEPARATORS.contains(&c) {
                self.bump();
                out.push((Token::new(TokenKind::Separator, c.to_string()), start));
            } else {
                let op = OPERATORS.iter().find(|op| {
                    op.chars()
                        .enumerate()
                        .all(|(i, oc)| self.peek(i) == Some(oc))
                });
                match op {
                    Some(op) => {
                        for _ in 0..op.len() {
                            self.bump();
                        }
                        out.push((Token::new(TokenKind::Operator, *op), start));
                    }
                    None => return Err(self.error(start, format!("illegal character '{c}'"))),
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self, start: Pos) -> Result<Token, SyntaxError> {
        let mut s = String::new();
        if self.peek(0) == Some('0') && matches!(self.peek(1), Some('x' | 'X')) {
            s.push(self.bump().unwrap());
            s.push(self.bump().unwrap());
            while let Some(c) = self.peek(0) {
                if c.is_ascii_hexdigit() || c == '_' {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if s.len() == 2 || s.ends_with('_') || s[2..].starts_with('_') {
                return Err(self.error(start, format!("malformed hex literal '{s}'")));
            }
        } else {
            self.digits(&mut s);
            let mut is_double = false;
            if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
                is_double = true;
                s.push(self.bump().unwrap());
                self.digits(&mut s);
            }
            if matches!(self.peek(0), Some('e' | 'E')) {
                let signed = matches!(self.peek(1), Some('+' | '-'));
                let digit_at = if signed { 2 } else { 1 };
                if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                    is_double = true;
                    for _ in 0..digit_at {
                        s.push(self.bump().unwrap());
                    }
                    self.digits(&mut s);
                }
            }
            if s.ends_with('_') {
                return Err(self.error(start, format!("malformed numeric literal '{s}'")));
            }
            if is_double {
                return Ok(Token::new(TokenKind::DoubleLiteral, s));
            }
        }
        if matches!(self.peek(0), Some('L' | 'l')) {
            s.push(self.bump().unwrap());
            return Ok(Token::new(TokenKind::LongLiteral, s));
        }
        if self.peek(0).is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(self.error(self.pos(), "malformed numeric literal"));
        }
        Ok(Token::new(TokenKind::IntLiteral, s))
    }

    fn digits(&mut self, s: &mut String) {
        while let Some(c) = self.peek(0) {
            if c.is_ascii_digit() || (c == '_' && !s.is_empty()) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
    }

    fn string(&mut self, start: Pos) -> Result<Token, SyntaxError> {
        let mut s = String::new();
        s.push(self.bump().unwrap());
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error(start, "unterminated string literal")),
                Some('"') => {
                    s.push('"');
                    break;
                }
                Some('\\') => {
                    let esc = self.peek(0);
                    match esc {
                        Some('n' | 't' | 'r' | '"' | '\\' | '0') => {
                            s.push('\\');
                            s.push(self.bump().unwrap());
                        }
                        _ => {
                            return Err(self.error(self.pos(), "invalid escape in string literal"))
                        }
                    }
                }
                Some(c) => s.push(c),
            }
        }
        Ok(Token::new(TokenKind::StringLiteral, s))
    }
}

/// Decodes the escapes of a string literal lexeme (including its quotes).
pub fn unescape(lexeme: &str) -> String {
    let inner = &lexeme[1..lexeme.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some('r') => out.push('\r'),
                Some('0') => out.push('\0'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Inverse of [`unescape`]: renders a string value as a literal lexeme.
pub fn escape(value: &str) -> String {
    let mut out = String::from("\"");
    for c in value.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexemes(src: &str) -> Vec<String> {
        tokenize(src).unwrap().into_iter().map(|t| t.lexeme).collect()
    }

    #[test]
    fn simple_return() {
        let toks = tokenize("return x+1;").unwrap();
        assert_eq!(toks.len(), 5);
        assert_eq!(lexemes("return x+1;"), ["return", "x", "+", "1", ";"]);
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[1].kind, TokenKind::Identifier);
        assert_eq!(toks[3].kind, TokenKind::IntLiteral);
    }

    #[test]
    fn hex_literal_is_one_token() {
        let toks = tokenize("0xA").unwrap();
        assert_eq!(toks, vec![Token::new(TokenKind::IntLiteral, "0xA")]);
    }

    #[test]
    fn comments_are_discarded() {
        assert_eq!(lexemes("int a = /*c*/ 1;"), ["int", "a", "=", "1", ";"]);
        assert_eq!(lexemes("int a; // trailing\nint b;").len(), 6);
    }

    #[test]
    fn numeric_forms() {
        let toks = tokenize("1_000 10L 1.5 2e3 0x1F_FF").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            [
                TokenKind::IntLiteral,
                TokenKind::LongLiteral,
                TokenKind::DoubleLiteral,
                TokenKind::DoubleLiteral,
                TokenKind::IntLiteral
            ]
        );
    }

    #[test]
    fn longest_operator_wins() {
        assert_eq!(lexemes("a<=b&&c++"), ["a", "<=", "b", "&&", "c", "++"]);
    }

    #[test]
    fn errors_carry_position() {
        match tokenize("int a;\n  #") {
            Err(SyntaxError::Lex { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(tokenize("\"abc"), Err(SyntaxError::Lex { .. })));
        assert!(matches!(tokenize("/* open"), Err(SyntaxError::Lex { .. })));
        assert!(tokenize("$x").is_err());
    }

    #[test]
    fn string_escapes_round_trip() {
        let lex = escape("a\"b\\c\n");
        assert_eq!(unescape(&lex), "a\"b\\c\n");
        assert_eq!(lexemes(&lex).len(), 1);
    }
}
