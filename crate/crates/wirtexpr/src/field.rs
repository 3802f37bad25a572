//! A coefficient field: an expression bundled with its cached Wirtinger
//! derivatives through total order three.
//!
//! Derivatives are taken in the canonical order "all `∂z` first, then all
//! `∂zb`". Mixed partials commute for these expression trees (verified
//! numerically in the test suite), so the order is a caching convention, not
//! a semantic choice.

use num_complex::Complex64;

use crate::{Dir, EvalError, Expr};

/// Highest cached total derivative order.
pub const MAX_ORDER: usize = 3;

/// An expression together with every Wirtinger derivative `∂z^a ∂zb^b` of it
/// with `a + b <= 3`, built eagerly at construction.
#[derive(Clone)]
pub struct CoeffField {
    /// `derivs[a][b]` is `∂z^a ∂zb^b` of the base expression; populated for
    /// `a + b <= MAX_ORDER`, `None` above that.
    derivs: [[Option<Expr>; 4]; 4],
}

impl CoeffField {
    /// Build the cache for `value`. Construction is pure tree building —
    /// reference-counted sharing keeps even third-order derivatives cheap.
    #[allow(clippy::needless_range_loop)] // triangular fill over two indices
    pub fn new(value: Expr) -> Self {
        let mut derivs: [[Option<Expr>; 4]; 4] = Default::default();
        // First the pure-z column, then extend each entry in zb.
        derivs[0][0] = Some(value);
        for a in 1..=MAX_ORDER {
            let prev = derivs[a - 1][0].as_ref().unwrap().wirtinger(Dir::Dz);
            derivs[a][0] = Some(prev);
        }
        for a in 0..=MAX_ORDER {
            for b in 1..=(MAX_ORDER - a) {
                let prev = derivs[a][b - 1].as_ref().unwrap().wirtinger(Dir::Dzb);
                derivs[a][b] = Some(prev);
            }
        }
        CoeffField { derivs }
    }

    /// The underlying expression.
    pub fn expr(&self) -> &Expr {
        self.deriv(0, 0)
    }

    /// The cached derivative `∂z^a ∂zb^b`.
    ///
    /// # Panics
    /// If `a + b > 3`; requesting a derivative beyond the cache is a
    /// programming error, not a runtime condition.
    pub fn deriv(&self, a: usize, b: usize) -> &Expr {
        self.derivs
            .get(a)
            .and_then(|row| row.get(b))
            .and_then(|slot| slot.as_ref())
            .unwrap_or_else(|| {
                panic!("derivative order ({a},{b}) exceeds the cached maximum {MAX_ORDER}")
            })
    }

    /// Evaluate `∂z^a ∂zb^b` on the slice `zb = conj(z)`.
    pub fn eval(&self, a: usize, b: usize, z: Complex64) -> Result<Complex64, EvalError> {
        self.deriv(a, b).eval(z)
    }

    /// Evaluate `∂z^a ∂zb^b` with independent `z`, `zb`.
    pub fn eval_at(
        &self,
        a: usize,
        b: usize,
        z: Complex64,
        zb: Complex64,
    ) -> Result<Complex64, EvalError> {
        self.deriv(a, b).eval_at(z, zb)
    }
}

impl std::fmt::Debug for CoeffField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoeffField({})", self.expr())
    }
}
