//! Finite sums `Σ c·x^a / D(x)^b` closed under differentiation.
//!
//! Two denominators are used: `D(x) = 1 + x²` ([`RatFamilyExpr`]), which is
//! the shape of every summand of the `V_n` series after the substitution
//! `x = t/(2πk)`, and `D(x) = 1 + x` ([`RatHalfExpr`]) for the helper
//! functions `ξ_n` and `h_n`.

use std::marker::PhantomData;

/// Denominator base of a rational family.
pub trait Denominator: Clone + std::fmt::Debug {
    fn base(x: f64) -> f64;

    /// Derivative of `(1/D)^b` contributes `coeff·x^{a'}/D^{b+1}`; returns
    /// `(coeff, a')` given `b` and `a`.
    fn denominator_derivative(a: u32, b: u32) -> (f64, u32);
}

/// `D(x) = 1 + x²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnePlusSquare;

/// `D(x) = 1 + x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnePlusLinear;

impl Denominator for OnePlusSquare {
    fn base(x: f64) -> f64 {
        1.0 + x * x
    }

    fn denominator_derivative(a: u32, b: u32) -> (f64, u32) {
        (-2.0 * b as f64, a + 1)
    }
}

impl Denominator for OnePlusLinear {
    fn base(x: f64) -> f64 {
        1.0 + x
    }

    fn denominator_derivative(a: u32, b: u32) -> (f64, u32) {
        (-(b as f64), a)
    }
}

/// One summand `coeff·x^a/D(x)^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub a: u32,
    pub b: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatExpr<D> {
    terms: Vec<Term>,
    _denominator: PhantomData<D>,
}

pub type RatFamilyExpr = RatExpr<OnePlusSquare>;
pub type RatHalfExpr = RatExpr<OnePlusLinear>;

impl<D: Denominator> Default for RatExpr<D> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<D: Denominator> RatExpr<D> {
    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            _denominator: PhantomData,
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut e = Self {
            terms: terms.into_iter().collect(),
            _denominator: PhantomData,
        };
        e.merge();
        e
    }

    /// Single term `coeff·x^a/D^b`.
    pub fn monomial(coeff: f64, a: u32, b: u32) -> Self {
        Self::from_terms([Term { coeff, a, b }])
    }

    /// Terms sorted by `(a, b)`, one per key, zero coefficients dropped.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn merge(&mut self) {
        self.terms.sort_by_key(|t| (t.a, t.b));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.a == t.a && last.b == t.b => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        self.terms = merged;
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| Term {
            coeff: t.coeff * factor,
            ..*t
        }))
    }

    /// Multiplies by `x^p`.
    pub fn shift_power(&self, p: u32) -> Self {
        Self::from_terms(self.terms.iter().map(|t| Term { a: t.a + p, ..*t }))
    }

    /// `d/dx[x^a/D^b] = a·x^{a-1}/D^b + x^a·(1/D^b)'`.
    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.a > 0 {
                out.push(Term {
                    coeff: t.coeff * t.a as f64,
                    a: t.a - 1,
                    b: t.b,
                });
            }
            if t.b > 0 {
                let (c, a) = D::denominator_derivative(t.a, t.b);
                out.push(Term {
                    coeff: t.coeff * c,
                    a,
                    b: t.b + 1,
                });
            }
        }
        Self::from_terms(out)
    }

    pub fn nth_derivative(&self, order: u32) -> Self {
        (0..order).fold(self.clone(), |e, _| e.derivative())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let inv = 1.0 / D::base(x);
        self.terms
            .iter()
            .map(|t| t.coeff * x.powi(t.a as i32) * inv.powi(t.b as i32))
            .sum()
    }

    pub fn max_a(&self) -> u32 {
        self.terms.iter().map(|t| t.a).max().unwrap_or(0)
    }

    pub fn max_b(&self) -> u32 {
        self.terms.iter().map(|t| t.b).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn derivative_of_one_over_one_plus_square() {
        let f = RatFamilyExpr::monomial(1.0, 0, 1);
        let d = f.derivative();
        assert_eq!(
            d.terms(),
            &[Term {
                coeff: -2.0,
                a: 1,
                b: 2
            }]
        );
        // (1/(1+x^2))'' = -2/(1+x^2)^2 + 8x^2/(1+x^2)^3, equal to -2 at 0
        assert_eq!(f.nth_derivative(2).eval(0.0), -2.0);
    }

    #[test]
    fn merge_on_keys() {
        let e = RatHalfExpr::from_terms([
            Term {
                coeff: 1.0,
                a: 2,
                b: 1,
            },
            Term {
                coeff: 2.0,
                a: 2,
                b: 1,
            },
            Term {
                coeff: -1.0,
                a: 0,
                b: 3,
            },
            Term {
                coeff: 1.0,
                a: 0,
                b: 3,
            },
        ]);
        assert_eq!(
            e.terms(),
            &[Term {
                coeff: 3.0,
                a: 2,
                b: 1
            }]
        );
    }

    #[test]
    fn xi_top_derivative_is_factorial_over_power() {
        // ξ_n^{(n)}(x) = n!/(1+x)^{n+1}
        for n in 1..=6u32 {
            let xi = RatHalfExpr::monomial(1.0, n, 1);
            let d = xi.nth_derivative(n);
            let fact: f64 = (1..=n).map(f64::from).product();
            // the expanded terms cancel for large x, so stay near the origin
            for &x in &[0.0_f64, 0.3, 2.0] {
                let want = fact / (1.0 + x).powi(n as i32 + 1);
                assert!((d.eval(x) - want).abs() <= 1e-9 * want, "n={n} x={x}");
            }
        }
    }

    proptest! {
        // Central differences of the expression agree with its exact derivative.
        #[test]
        fn derivative_matches_central_difference(
            a in 0u32..6, b in 1u32..4, c in -3.0f64..3.0, x in 0.05f64..4.0
        ) {
            let f = RatFamilyExpr::monomial(c, a, b).add(&RatFamilyExpr::monomial(0.5, a + 1, b + 1));
            let h = 1e-5;
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            let exact = f.derivative().eval(x);
            prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()));

            let g = RatHalfExpr::monomial(c, a, b);
            let fd = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
            let exact = g.derivative().eval(x);
            prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()));
        }
    }
}
