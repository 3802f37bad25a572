//! Recursive-descent parser for the expression grammar.
//!
//! Precedence, loosest to tightest: `+` `-`, then `*` `/`, then unary minus,
//! then `^` (whose exponent is an integer literal, optionally signed). All
//! binary operators associate to the left. Errors carry the byte offset of
//! the offending token together with the set of token kinds that would have
//! been accepted there.

use num_complex::Complex64;

use crate::ast::Expr;
use crate::lexer::{tokenize, Spanned, Tok};

/// A syntax error: what was found, where, and what would have been accepted.
#[derive(Debug, Clone, thiserror::Error)]
#[error("syntax error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
pub struct ParseError {
    /// Byte offset into the source string.
    pub offset: usize,
    /// Description of the offending token.
    pub found: String,
    /// The token kinds that would have been accepted at this position.
    pub expected: Vec<&'static str>,
}

/// Parse a source string into an expression tree.
///
/// The inverse of [`Expr`]'s `Display`: for any expression `e` built through
/// the public constructors, `parse(&e.to_string()) == Ok(e)` structurally.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks: &toks, pos: 0 };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> &Spanned {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: Vec<&'static str>) -> ParseError {
        let here = self.peek();
        ParseError {
            offset: here.offset,
            found: here.tok.describe(),
            expected,
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::End => Ok(()),
            _ => Err(self.err(vec!["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"])),
        }
    }

    /// expr = term , { ("+" | "-") , term }
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// term = unary , { ("*" | "/") , unary }
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// unary = "-" , unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(inner.neg());
        }
        self.power()
    }

    /// power = atom , { "^" , integer }
    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.atom()?;
        while self.peek().tok == Tok::Caret {
            self.bump();
            let n = self.exponent()?;
            acc = acc.pow(n);
        }
        Ok(acc)
    }

    /// integer = [ "-" ] , digits — the digits must form an f64 that is
    /// exactly a 32-bit integer.
    fn exponent(&mut self) -> Result<i32, ParseError> {
        let negative = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let here = self.peek().clone();
        match here.tok {
            Tok::Number(x) if x.fract() == 0.0 && x.abs() < 2147483648.0 => {
                self.bump();
                let n = x as i64 as i32;
                Ok(if negative { -n } else { n })
            }
            _ => Err(ParseError {
                offset: here.offset,
                found: here.tok.describe(),
                expected: vec!["integer exponent"],
            }),
        }
    }

    /// atom = number | "i" | "z" | "zb" | func "(" expr ")" | "(" expr ")"
    fn atom(&mut self) -> Result<Expr, ParseError> {
        let here = self.peek().clone();
        match &here.tok {
            Tok::Number(x) => {
                self.bump();
                Ok(Expr::real(*x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "z" => Ok(Expr::z()),
                    "zb" => Ok(Expr::zb()),
                    "i" => Ok(Expr::constant(Complex64::new(0.0, 1.0))),
                    "exp" | "log" | "conj" => {
                        if self.peek().tok != Tok::LParen {
                            return Err(self.err(vec!["`(`"]));
                        }
                        self.bump();
                        let arg = self.expr()?;
                        self.close_paren()?;
                        Ok(match name.as_str() {
                            "exp" => arg.exp(),
                            "log" => arg.log(),
                            _ => arg.conj(),
                        })
                    }
                    _ => Err(ParseError {
                        offset: here.offset,
                        found: format!("unknown identifier `{name}`"),
                        expected: vec!["`z`", "`zb`", "`i`", "`exp`", "`log`", "`conj`"],
                    }),
                }
            }
            _ => Err(self.err(vec![
                "number",
                "`z`",
                "`zb`",
                "`i`",
                "`exp`",
                "`log`",
                "`conj`",
                "`-`",
                "`(`",
            ])),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.err(vec!["`)`"]))
        }
    }
}
