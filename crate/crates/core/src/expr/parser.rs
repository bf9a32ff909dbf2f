use num_complex::Complex64;
use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownIdentifier(String),
    MalformedLiteral(String),
    UnbalancedParens,
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    NonIntegerExponent,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
    message: String,
}

impl ParseError {
    fn new(offset: usize, kind: ParseErrorKind) -> Self {
        let message = match &kind {
            ParseErrorKind::UnknownIdentifier(name) => format!("unknown identifier '{name}'"),
            ParseErrorKind::MalformedLiteral(lit) => format!("malformed literal '{lit}'"),
            ParseErrorKind::UnbalancedParens => "unbalanced parentheses".to_string(),
            ParseErrorKind::UnexpectedChar(c) => format!("unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken(tok) => format!("unexpected '{tok}'"),
            ParseErrorKind::UnexpectedEnd => "unexpected end of input".to_string(),
            ParseErrorKind::NonIntegerExponent => "exponent must be an integer literal".to_string(),
        };
        Self {
            offset,
            kind,
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Real(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Real(v) => format!("{v}"),
            Tok::Imag(v) => format!("{v}i"),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'/' => out.push((start, Tok::Slash)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| {
                    ParseError::new(start, ParseErrorKind::MalformedLiteral(text.to_string()))
                })?;
                if !value.is_finite() {
                    return Err(ParseError::new(
                        start,
                        ParseErrorKind::MalformedLiteral(text.to_string()),
                    ));
                }
                let imaginary = i < bytes.len()
                    && bytes[i] == b'i'
                    && !bytes
                        .get(i + 1)
                        .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
                if imaginary {
                    i += 1;
                    out.push((start, Tok::Imag(value)));
                } else {
                    out.push((start, Tok::Real(value)));
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(start, ParseErrorKind::UnexpectedChar(ch)));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        tok
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            None => ParseError::new(self.end, ParseErrorKind::UnexpectedEnd),
            Some(Tok::RParen) => ParseError::new(self.offset(), ParseErrorKind::UnbalancedParens),
            Some(tok) => ParseError::new(
                self.offset(),
                ParseErrorKind::UnexpectedToken(tok.describe()),
            ),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            let at = self.offset();
            let negative = if self.peek() == Some(&Tok::Minus) {
                self.bump();
                true
            } else {
                false
            };
            let n = match self.bump() {
                Some(Tok::Real(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
                Some(_) => return Err(ParseError::new(at, ParseErrorKind::NonIntegerExponent)),
                None => return Err(ParseError::new(self.end, ParseErrorKind::UnexpectedEnd)),
            };
            base = Expr::Pow(Box::new(base), if negative { -n } else { n });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Real(v)) => {
                self.bump();
                Ok(Expr::Const(Complex64::new(v, 0.0)))
            }
            Some(Tok::Imag(v)) => {
                self.bump();
                Ok(Expr::Const(Complex64::new(0.0, v)))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    None => Err(ParseError::new(at, ParseErrorKind::UnbalancedParens)),
                    Some(_) => Err(self.unexpected()),
                }
            }
            Some(Tok::Ident(name)) => {
                self.bump();
                match name.as_str() {
                    "z" => Ok(Expr::Var(Var::Z)),
                    "r" => Ok(Expr::Var(Var::R)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                    other => match Func::from_name(other) {
                        Some(func) => {
                            if self.peek() != Some(&Tok::LParen) {
                                return Err(self.unexpected());
                            }
                            let arg = self.atom()?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        }
                        None => Err(ParseError::new(
                            at,
                            ParseErrorKind::UnknownIdentifier(other.to_string()),
                        )),
                    },
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses an expression; errors carry the byte offset of the offending token.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let expr = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(parser.unexpected());
    }
    Ok(expr)
}
