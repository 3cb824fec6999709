//! Recursive-descent parser.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' literal)*
//! literal := number | '-' literal | '(' literal ')'
//! primary := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Juxtaposition is never multiplication.

use std::fmt;

use thiserror::Error;

use super::ast::{BinOp, Expr, Func};
use crate::scalar::COORD_NAMES;

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
    pub message: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: ", self.offset)?;
        if let Some(m) = &self.message {
            write!(f, "{m}")
        } else {
            write!(f, "found {}, expected one of: {}", self.found, self.expected.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Tok::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
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
                let s = &text[start..i];
                let value: f64 = s.parse().map_err(|_| ParseError {
                    offset: start,
                    found: format!("'{s}'"),
                    expected: vec!["number"],
                    message: Some(format!("malformed number '{s}'")),
                })?;
                out.push((start, Tok::Num(value)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: i,
                    found: format!("'{ch}'"),
                    expected: vec!["number", "identifier", "operator", "'('", "')'"],
                    message: None,
                });
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            found: self.peek().describe(),
            expected: expected.to_vec(),
            message: None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.peek() == &Tok::Op('^') {
            self.bump();
            let e = self.literal()?;
            base = Expr::Pow(Box::new(base), e);
        }
        Ok(base)
    }

    fn literal(&mut self) -> Result<f64, ParseError> {
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(x)
            }
            Tok::Op('-') => {
                self.bump();
                Ok(-self.literal()?)
            }
            Tok::LParen => {
                self.bump();
                let x = self.literal()?;
                if self.peek() != &Tok::RParen {
                    return Err(self.error(&["')'"]));
                }
                self.bump();
                Ok(x)
            }
            _ => {
                let mut e = self.error(&["number", "'-'", "'('"]);
                e.message = Some(format!("exponent must be a constant number literal, found {}", e.found));
                Err(e)
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Num(x))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != &Tok::RParen {
                    return Err(self.error(&["')'", "operator"]));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.peek() == &Tok::LParen {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(ParseError {
                            offset,
                            found: format!("identifier '{name}'"),
                            expected: Func::ALL.iter().map(|f| f.name()).collect(),
                            message: Some(format!("unknown function '{name}'")),
                        });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    if self.peek() != &Tok::RParen {
                        return Err(self.error(&["')'", "operator"]));
                    }
                    self.bump();
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(i) = COORD_NAMES.iter().position(|c| *c == name) {
                    Ok(Expr::Var(i))
                } else if Func::from_name(&name).is_some() {
                    Err(ParseError {
                        offset,
                        found: format!("identifier '{name}'"),
                        expected: vec!["'('"],
                        message: Some(format!("function '{name}' must be called")),
                    })
                } else {
                    Ok(Expr::Param(name))
                }
            }
            _ => Err(self.error(&["number", "identifier", "'-'", "'('"])),
        }
    }
}

/// Parse expression text into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.error(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ast::BinOp::*;

    fn num(x: f64) -> Expr {
        Expr::Num(x)
    }
    fn var(i: usize) -> Expr {
        Expr::Var(i)
    }
    fn par(s: &str) -> Expr {
        Expr::Param(s.into())
    }
    fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    #[test]
    fn cahen_wallach_profile() {
        let e = parse("a*x^2+b*y^2").unwrap();
        assert_eq!(e.params().into_iter().collect::<Vec<_>>(), vec!["a", "b"]);
        assert_eq!(e.variables().into_iter().collect::<Vec<_>>(), vec![2, 3]);
        let expected = Expr::binary(
            Add,
            Expr::binary(Mul, par("a"), Expr::Pow(Box::new(var(2)), 2.0)),
            Expr::binary(Mul, par("b"), Expr::Pow(Box::new(var(3)), 2.0)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn juxtaposition_is_rejected() {
        let err = parse("2*u*d v").unwrap_err();
        assert_eq!(err.offset, 6);
        assert!(err.found.contains("'v'"));
        assert!(err.expected.contains(&"end of input"));
    }

    #[test]
    fn nested_density_matches_hand_built_tree() {
        let e = parse("exp(-v)*(c1*cosh(0.5*exp(2*v)*sqrt(a+b)))").unwrap();
        let inner = Expr::binary(
            Mul,
            Expr::binary(Mul, num(0.5), call(Func::Exp, Expr::binary(Mul, num(2.0), var(1)))),
            call(Func::Sqrt, Expr::binary(Add, par("a"), par("b"))),
        );
        let expected = Expr::binary(
            Mul,
            call(Func::Exp, Expr::Neg(Box::new(var(1)))),
            Expr::binary(Mul, par("c1"), call(Func::Cosh, inner)),
        );
        assert_eq!(e, expected);
        assert_eq!(e.depth(), expected.depth());
        assert_eq!(e.node_count(), 18);
        assert_eq!(e.depth(), 8);
    }

    #[test]
    fn precedence_and_associativity() {
        // unary minus binds looser than ^
        assert_eq!(
            parse("-x^2").unwrap(),
            Expr::Neg(Box::new(Expr::Pow(Box::new(var(2)), 2.0)))
        );
        // left associative
        assert_eq!(
            parse("x-y-u").unwrap(),
            Expr::binary(Sub, Expr::binary(Sub, var(2), var(3)), var(0))
        );
        assert_eq!(
            parse("x/y*u").unwrap(),
            Expr::binary(Mul, Expr::binary(Div, var(2), var(3)), var(0))
        );
        assert_eq!(
            parse("x^2^3").unwrap(),
            Expr::Pow(Box::new(Expr::Pow(Box::new(var(2)), 2.0)), 3.0)
        );
        assert_eq!(parse("x^-1").unwrap(), Expr::Pow(Box::new(var(2)), -1.0));
        assert_eq!(parse("x^(0.5)").unwrap(), Expr::Pow(Box::new(var(2)), 0.5));
        assert_eq!(parse(" 1.5e-3 * x ").unwrap(), Expr::binary(Mul, num(1.5e-3), var(2)));
    }

    #[test]
    fn rejects_malformed_input() {
        let e = parse("x^a").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.message.unwrap().contains("constant"));
        let e = parse("foo(x)").unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(e.message.unwrap().contains("unknown function"));
        assert!(parse("(x+1").is_err());
        assert!(parse("x+").is_err());
        assert!(parse("x $ y").unwrap_err().offset == 2);
        assert!(parse("exp + 1").is_err());
        assert!(parse("").is_err());
        assert!(parse("2e").is_err());
    }

    #[test]
    fn display_reparses() {
        for text in [
            "a*x^2+b*y^2",
            "-(x^2+y^2)",
            "x-(y-u)",
            "x/(y*u)",
            "(-x)^2",
            "x^-2",
            "--x",
            "a*(x^2-2*y^2)/(a/2*v^2+c1*v+c2)",
            "exp(-v)*(c1*cosh(0.5*exp(2*v)*sqrt(a+b))+c2*sinh(0.5*exp(2*v)*sqrt(a+b)))",
        ] {
            let e = parse(text).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{text} -> {printed}");
        }
    }
}
