//! Closed-form complex expressions in the two independent variables `z` and
//! `zb`, with exact symbolic Wirtinger derivatives.
//!
//! The calculus here treats `z` and `zb` as *independent* symbols (Wirtinger
//! calculus): `∂z zb = 0`, `∂zb z = 0`, and conjugation exchanges the two
//! derivative directions, `∂z conj(e) = conj(∂zb e)`. That exchange rule is a
//! *slice* identity — it is the chain rule for the anti-holomorphic reflection
//! and is meant to be used where `zb` is evaluated at the complex conjugate of
//! `z`. Every consumer in this workspace binds `zb = conj(z)`; the evaluator
//! still accepts independent values so the symbolic rules themselves can be
//! tested in isolation.
//!
//! # Grammar
//!
//! Expressions are plain ASCII with standard precedence
//! (power > unary minus > `*` `/` > `+` `-`):
//!
//! ```ebnf
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { ("*" | "/") , unary } ;
//! unary   = "-" , unary | power ;
//! power   = atom , { "^" , integer } ;
//! atom    = number | "i" | "z" | "zb"
//!         | ("exp" | "log" | "conj") , "(" , expr , ")"
//!         | "(" , expr , ")" ;
//! integer = [ "-" ] , digits ;
//! number  = digits , [ "." , digits ] , [ ("e" | "E") , [ "+" | "-" ] , digits ] ;
//! ```
//!
//! `i` is the imaginary unit; exponents are integer literals only. `log` is
//! the principal branch (`log(-1) = iπ`); callers are expected to keep its
//! argument away from the branch cut and from zero.
//!
//! # Simplification policy
//!
//! Smart constructors perform constant folding plus the involution rules
//! `-(-e) = e` and `conj(conj(e)) = e`, and elide additive/multiplicative
//! identities. Nothing else: derivatives may be large trees, which is fine —
//! they are built once and evaluated on small grids. The payoff is that
//! parse → pretty-print → parse is the identity on ASTs.

mod ast;
mod eval;
mod field;
mod lexer;
mod parser;

pub use ast::Expr;
pub use eval::EvalError;
pub use field::CoeffField;
pub use parser::{parse, ParseError};

/// Derivative direction for [`Expr::wirtinger`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    /// `∂/∂z`, holding `zb` fixed.
    Dz,
    /// `∂/∂zb`, holding `z` fixed.
    Dzb,
}
