//! Expression trees and their construction rules.
//!
//! An [`Expr`] is an immutable reference-counted tree. All construction goes
//! through smart constructors that apply a small, fixed set of rewrites:
//! constant folding (guarded so that non-finite results are never baked into
//! the tree), the involutions `-(-e) = e` and `conj(conj(e)) = e`, and
//! identity elision (`0 + e = e`, `1 * e = e`, `e^1 = e`, …). Derivatives and
//! parsing both build through the same constructors, so every reachable tree
//! is in the same normal form — that is what makes the print/parse round trip
//! exact.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::Dir;

/// A closed-form expression in the independent variables `z` and `zb`.
///
/// Cloning is cheap (an atomic reference-count bump); subtrees are shared
/// freely, e.g. between an expression and its cached derivatives.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

#[derive(Clone, PartialEq)]
pub(crate) enum Node {
    Const(Complex64),
    Z,
    Zb,
    Neg(Expr),
    Conj(Expr),
    Exp(Expr),
    Log(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    /// Integer power of the base expression. The exponent is kept small by
    /// the parser (an `i32`), so repeated squaring in the evaluator is exact.
    Pow(Expr, i32),
}

/// Division folds only when the divisor is comfortably away from zero, so a
/// literal `1/0` stays a tree and surfaces as an evaluation error instead of
/// an `inf` constant.
const FOLD_DIV_FLOOR: f64 = 1e-300;

impl Expr {
    pub(crate) fn node(&self) -> &Node {
        &self.0
    }

    fn new(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    /// The variable `z`.
    pub fn z() -> Self {
        Expr::new(Node::Z)
    }

    /// The variable `zb`.
    pub fn zb() -> Self {
        Expr::new(Node::Zb)
    }

    /// A complex constant.
    pub fn constant(c: Complex64) -> Self {
        Expr::new(Node::Const(c))
    }

    /// A real constant.
    pub fn real(x: f64) -> Self {
        Expr::constant(Complex64::new(x, 0.0))
    }

    /// The constant zero.
    pub fn zero() -> Self {
        Expr::real(0.0)
    }

    /// The constant one.
    pub fn one() -> Self {
        Expr::real(1.0)
    }

    fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(Complex64::new(v, 0.0))
    }

    /// Negation. Folds constants and collapses double negation.
    pub fn neg(&self) -> Self {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(e) => e.clone(),
            _ => Expr::new(Node::Neg(self.clone())),
        }
    }

    /// Complex conjugation as a tree node. Folds constants and collapses
    /// `conj(conj(e))` to `e`.
    pub fn conj(&self) -> Self {
        match self.node() {
            Node::Const(c) => Expr::constant(c.conj()),
            Node::Conj(e) => e.clone(),
            _ => Expr::new(Node::Conj(self.clone())),
        }
    }

    /// The exponential `exp(self)`. Never folded: the evaluator is the single
    /// authority for transcendental arithmetic.
    pub fn exp(&self) -> Self {
        Expr::new(Node::Exp(self.clone()))
    }

    /// The principal-branch logarithm `log(self)`.
    pub fn log(&self) -> Self {
        Expr::new(Node::Log(self.clone()))
    }

    /// Sum. Folds constants (when finite) and drops zero operands.
    pub fn add(&self, rhs: &Expr) -> Self {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            let c = a + b;
            if c.is_finite() {
                return Expr::constant(c);
            }
        }
        if self.is_const(0.0) {
            return rhs.clone();
        }
        if rhs.is_const(0.0) {
            return self.clone();
        }
        Expr::new(Node::Add(self.clone(), rhs.clone()))
    }

    /// Difference. Folds constants (when finite) and drops zero operands.
    pub fn sub(&self, rhs: &Expr) -> Self {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            let c = a - b;
            if c.is_finite() {
                return Expr::constant(c);
            }
        }
        if rhs.is_const(0.0) {
            return self.clone();
        }
        if self.is_const(0.0) {
            return rhs.neg();
        }
        Expr::new(Node::Sub(self.clone(), rhs.clone()))
    }

    /// Product. Folds constants (when finite), annihilates on a literal zero
    /// and drops unit factors.
    pub fn mul(&self, rhs: &Expr) -> Self {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            let c = a * b;
            if c.is_finite() {
                return Expr::constant(c);
            }
        }
        if self.is_const(0.0) || rhs.is_const(0.0) {
            return Expr::zero();
        }
        if self.is_const(1.0) {
            return rhs.clone();
        }
        if rhs.is_const(1.0) {
            return self.clone();
        }
        Expr::new(Node::Mul(self.clone(), rhs.clone()))
    }

    /// Quotient. Folds constants only when the divisor has modulus at least
    /// `1e-300` and the result is finite; drops a unit divisor.
    pub fn div(&self, rhs: &Expr) -> Self {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            if b.norm() >= FOLD_DIV_FLOOR {
                let c = a / b;
                if c.is_finite() {
                    return Expr::constant(c);
                }
            }
        }
        if rhs.is_const(1.0) {
            return self.clone();
        }
        Expr::new(Node::Div(self.clone(), rhs.clone()))
    }

    /// Integer power. `e^0` folds to `1`, `e^1` to `e`; constant bases fold
    /// when the result is finite.
    pub fn pow(&self, n: i32) -> Self {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            let v = crate::eval::const_powi(c, n);
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        Expr::new(Node::Pow(self.clone(), n))
    }

    /// The exact Wirtinger derivative in direction `dir`, as a new tree.
    ///
    /// `z` and `zb` are independent: `∂z zb = 0` and `∂zb z = 0`. Conjugation
    /// swaps the directions, `∂z conj(e) = conj(∂zb e)` — the chain rule for
    /// the anti-holomorphic reflection, valid on the slice `zb = conj(z)`
    /// where all field data in this workspace lives.
    pub fn wirtinger(&self, dir: Dir) -> Self {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Z => match dir {
                Dir::Dz => Expr::one(),
                Dir::Dzb => Expr::zero(),
            },
            Node::Zb => match dir {
                Dir::Dz => Expr::zero(),
                Dir::Dzb => Expr::one(),
            },
            Node::Neg(e) => e.wirtinger(dir).neg(),
            Node::Conj(e) => {
                let flipped = match dir {
                    Dir::Dz => Dir::Dzb,
                    Dir::Dzb => Dir::Dz,
                };
                e.wirtinger(flipped).conj()
            }
            Node::Exp(e) => self.mul(&e.wirtinger(dir)),
            Node::Log(e) => e.wirtinger(dir).div(e),
            Node::Add(a, b) => a.wirtinger(dir).add(&b.wirtinger(dir)),
            Node::Sub(a, b) => a.wirtinger(dir).sub(&b.wirtinger(dir)),
            Node::Mul(a, b) => {
                let da = a.wirtinger(dir).mul(b);
                let db = a.mul(&b.wirtinger(dir));
                da.add(&db)
            }
            Node::Div(a, b) => {
                // (a/b)' = (a' b - a b') / b^2
                let num = a.wirtinger(dir).mul(b).sub(&a.mul(&b.wirtinger(dir)));
                num.div(&b.pow(2))
            }
            Node::Pow(e, n) => {
                // (e^n)' = n e^(n-1) e'; the parser keeps |n| < 2^31 so the
                // exponent arithmetic cannot overflow.
                let coeff = Expr::real(f64::from(*n)).mul(&e.pow(n - 1));
                coeff.mul(&e.wirtinger(dir))
            }
        }
    }
}

impl PartialEq for Expr {
    /// Structural equality, with a pointer fast path for shared subtrees.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

/// Binding strength used by the printer: addition level 1, multiplication 2,
/// unary minus 3, power 4, atoms 5. A child is parenthesized when its own
/// level is below what its slot requires; right-hand operands of `-`, `/`
/// (and, for symmetry, `+`, `*`) require strictly more than the operator
/// level so that left-associated re-parsing reproduces the tree exactly.
fn level(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(..) => 3,
        Node::Pow(..) => 4,
        Node::Const(c) => {
            if c.im == 0.0 {
                // Negative reals print with a leading '-': bind like unary minus.
                if c.re < 0.0 {
                    3
                } else {
                    5
                }
            } else if c.re == 0.0 {
                // `i` and `-i` are atoms; other pure-imaginary constants print
                // as `im*i`, a product, and must bind like one.
                if c.im == 1.0 {
                    5
                } else if c.im == -1.0 {
                    3
                } else {
                    2
                }
            } else {
                // General complex constants print inside their own parentheses.
                5
            }
        }
        _ => 5,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_level: u8) -> fmt::Result {
    if level(e.node()) < min_level {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn fmt_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    // `{:?}` on f64 prints the shortest digit string that round-trips, which
    // keeps printed constants exact under re-parsing.
    if c.im == 0.0 {
        write!(f, "{:?}", c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            write!(f, "i")
        } else if c.im == -1.0 {
            write!(f, "-i")
        } else {
            write!(f, "{:?}*i", c.im)
        }
    } else if c.im < 0.0 {
        write!(f, "({:?}-{:?}*i)", c.re, -c.im)
    } else {
        write!(f, "({:?}+{:?}*i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => fmt_const(f, *c),
            Node::Z => write!(f, "z"),
            Node::Zb => write!(f, "zb"),
            Node::Neg(e) => {
                write!(f, "-")?;
                fmt_child(f, e, 3)
            }
            Node::Conj(e) => write!(f, "conj({e})"),
            Node::Exp(e) => write!(f, "exp({e})"),
            Node::Log(e) => write!(f, "log({e})"),
            Node::Add(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " + ")?;
                fmt_child(f, b, 2)
            }
            Node::Sub(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " - ")?;
                fmt_child(f, b, 2)
            }
            Node::Mul(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, " * ")?;
                fmt_child(f, b, 3)
            }
            Node::Div(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, " / ")?;
                fmt_child(f, b, 3)
            }
            Node::Pow(e, n) => {
                fmt_child(f, e, 5)?;
                write!(f, "^{n}")
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}
