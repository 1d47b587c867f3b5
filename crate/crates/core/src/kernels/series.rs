//! Series kernels `f(t) = Σ_{k≥1} Σ_parts (2πk)^E · F(t/(2πk))` with each `F`
//! a [`RatFamilyExpr`].
//!
//! `t^a V_n(t)` has exactly this shape with `E = a - 2n - 2` and
//! `F(x) = 2x^a/(1+x²)`. Differentiating in `t` lowers `E` by one and
//! differentiates `F`, so every derivative of every kernel stays in the class
//! and is evaluated exactly, without numeric differentiation.
//!
//! Evaluation sums the head `k ≤ K` directly, with `K ≥ t/π`. On the tail
//! `x = t/(2πk) ≤ 1/2`, so each summand `c·x^a/(1+x²)^b` is expanded as
//! `c·Σ_j (-1)^j C(b+j-1, j) x^{a+2j}` and the sum over `k` collapses onto the
//! normalized zeta tails of [`super::zeta`]. The successive terms of that
//! expansion shrink at least by `ρ_j = (b+j)/(j+1) · x_max²`, which gives a
//! rigorous bound on what is left out.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ratfamily::RatFamilyExpr;

use super::zeta::normalized_tail;
use super::KernelEval;

const TWO_PI: f64 = 2.0 * PI;
const MAX_TAIL_TERMS: u32 = 2000;
const TAIL_REL_TARGET: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq)]
struct Part {
    exponent: i32,
    family: RatFamilyExpr,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelSeries {
    parts: Vec<Part>,
}

impl KernelSeries {
    /// `t^a V_n(t)`.
    pub fn power_times_v(a: u32, n: u32) -> Self {
        Self::from_part(
            a as i32 - 2 * n as i32 - 2,
            RatFamilyExpr::monomial(2.0, a, 1),
        )
    }

    /// `Σ_k (2πk)^exponent · family(t/(2πk))`.
    pub fn from_part(exponent: i32, family: RatFamilyExpr) -> Self {
        Self {
            parts: vec![Part { exponent, family }],
        }
    }

    /// Sum of two series; parts with equal exponents are combined.
    pub fn merge(mut self, other: Self) -> Self {
        for p in other.parts {
            match self.parts.iter_mut().find(|q| q.exponent == p.exponent) {
                Some(q) => q.family = q.family.add(&p.family),
                None => self.parts.push(p),
            }
        }
        self.parts.retain(|p| !p.family.is_zero());
        self.parts.sort_by_key(|p| p.exponent);
        self
    }

    /// Keeps parts separate even when exponents coincide. Used where two
    /// algebraic forms of the same kernel must be evaluated independently.
    pub fn add_unmerged(mut self, other: Self) -> Self {
        self.parts.extend(other.parts);
        self
    }

    /// Multiplies by `t^p`.
    pub fn times_power(&self, p: u32) -> Self {
        Self {
            parts: self
                .parts
                .iter()
                .map(|q| Part {
                    exponent: q.exponent + p as i32,
                    family: q.family.shift_power(p),
                })
                .collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|q| Part {
                exponent: q.exponent - 1,
                family: q.family.derivative(),
            })
            .filter(|q| !q.family.is_zero())
            .collect();
        Self { parts }
    }

    pub fn nth_derivative(&self, order: u32) -> Self {
        (0..order).fold(self.clone(), |s, _| s.derivative())
    }

    fn head_size(t: f64) -> usize {
        (t / PI).ceil() as usize
    }

    /// Value with a rigorous bound on the truncation of the tail expansion.
    /// Fails only if that bound exceeds `tol`.
    pub fn eval(&self, t: f64, tol: f64) -> Result<KernelEval> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "kernel argument must be finite and ≥ 0, got {t}"
            )));
        }
        let k_head = Self::head_size(t);

        let mut head = 0.0;
        for k in (1..=k_head).rev() {
            let scale = TWO_PI * k as f64;
            let x = t / scale;
            for p in &self.parts {
                head += scale.powi(p.exponent) * p.family.eval(x);
            }
        }

        let first = TWO_PI * (k_head as f64 + 1.0);
        let x_max = t / first;
        let x2 = x_max * x_max;
        let mut tail = 0.0;
        let mut bound = 0.0;
        let mut tail_terms = 0usize;
        for p in &self.parts {
            let base = first.powi(p.exponent);
            for term in p.family.terms() {
                let (value, rest, used) =
                    expand_tail(term.coeff, term.a, term.b, p.exponent, k_head, x_max, x2)?;
                tail += base * value;
                bound += base.abs() * rest;
                tail_terms += used;
            }
        }

        if bound > tol {
            return Err(Error::Convergence {
                what: "kernel tail expansion",
                terms: k_head + tail_terms,
                bound,
            });
        }
        Ok(KernelEval {
            value: head + tail,
            error_bound: bound,
            terms_used: k_head + tail_terms,
        })
    }

    /// Value only; the truncation bound is at the 1e-18 relative level.
    pub fn value(&self, t: f64) -> f64 {
        self.eval(t, f64::INFINITY)
            .map(|e| e.value)
            .unwrap_or(f64::NAN)
    }
}

/// `Σ_j c (-1)^j C(b+j-1, j) x_max^{a+2j} Ẑ_K(a+2j-E)`; returns the sum, the
/// bound on the omitted terms, and the number of terms used.
fn expand_tail(
    c: f64,
    a: u32,
    b: u32,
    exponent: i32,
    k_head: usize,
    x_max: f64,
    x2: f64,
) -> Result<(f64, f64, usize)> {
    let s0 = a as i32 - exponent;
    if s0 < 2 {
        return Err(Error::Domain(format!(
            "series term x^{a}/(1+x²)^{b} with (2πk)^{exponent} does not converge"
        )));
    }
    if x_max == 0.0 {
        // Only the constant term of the expansion survives.
        let v = if a == 0 {
            c * normalized_tail(k_head, s0 as u32)
        } else {
            0.0
        };
        return Ok((v, 0.0, 1));
    }

    let mut sum = 0.0;
    let mut scale = 0.0;
    let mut binom = 1.0; // C(b+j-1, j), exact for the sizes reached here
    let mut xp = x_max.powi(a as i32);
    for j in 0..MAX_TAIL_TERMS {
        let s = (s0 + 2 * j as i32) as u32;
        let mag = c.abs() * binom * xp * normalized_tail(k_head, s);
        sum += if j % 2 == 0 { mag } else { -mag };
        scale += mag;

        let rho = (b + j) as f64 / (j + 1) as f64 * x2;
        if rho < 1.0 {
            let rest = mag * rho / (1.0 - rho);
            if rest <= TAIL_REL_TARGET * scale || rest == 0.0 {
                return Ok((if c < 0.0 { -sum } else { sum }, rest, j as usize + 1));
            }
        }
        binom *= (b + j) as f64 / (j + 1) as f64;
        xp *= x2;
    }
    Err(Error::Convergence {
        what: "kernel tail expansion",
        terms: MAX_TAIL_TERMS as usize,
        bound: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Plain partial sums with an integral tail estimate, for n ≥ 1 only.
    fn brute_power_v(a: u32, n: u32, t: f64) -> f64 {
        let mut s = 0.0;
        let kmax = 200_000;
        for k in (1..=kmax).rev() {
            let w = TWO_PI * k as f64;
            s += 2.0 * t.powi(a as i32) / ((t * t + w * w) * w.powi(2 * n as i32));
        }
        // Σ_{k>K} ≈ ∫_{K+1/2}^∞ 2t^a/(2πk)^{2n+2} dk
        let kk = kmax as f64 + 0.5;
        s + 2.0 * t.powi(a as i32)
            / (TWO_PI.powi(2 * n as i32 + 2) * (2 * n + 1) as f64 * kk.powi(2 * n as i32 + 1))
    }

    #[test]
    fn matches_brute_force_partial_sums() {
        for n in 1..=3u32 {
            for &t in &[0.0, 0.01, 0.7, 3.0, 9.5, 40.0] {
                let v = KernelSeries::power_times_v(0, n).eval(t, 1e-15).unwrap();
                let b = brute_power_v(0, n, t);
                assert!(
                    (v.value - b).abs() <= 1e-14 * b,
                    "n={n} t={t}: {} vs {b}",
                    v.value
                );
            }
        }
    }

    #[test]
    fn v0_matches_closed_form() {
        let s = KernelSeries::power_times_v(0, 0);
        for &t in &[0.0_f64, 1e-3, 0.5, 1.0, 2.0, 7.0, 30.0, 250.0] {
            let closed = crate::kernels::v_closed0(t);
            let got = s.value(t);
            assert!(
                (got - closed).abs() <= 2e-15 * closed,
                "t={t}: {got} vs {closed}"
            );
        }
    }

    #[test]
    fn derivative_of_v0_at_zero() {
        // V_0''(0) = -2 V_1(0) = -1/360
        let d2 = KernelSeries::power_times_v(0, 0).nth_derivative(2);
        assert!((d2.value(0.0) + 1.0 / 360.0).abs() < 1e-17);
    }

    #[test]
    fn derivative_agrees_with_central_differences() {
        let s = KernelSeries::power_times_v(3, 2);
        let d = s.derivative();
        for &t in &[0.4, 2.0, 11.0] {
            let h = 1e-4 * t;
            let fd = (s.value(t + h) - s.value(t - h)) / (2.0 * h);
            assert!((d.value(t) - fd).abs() <= 1e-7 * fd.abs());
        }
    }

    #[test]
    fn rejects_divergent_series() {
        // Σ_k 1/(1+x²) with x = t/(2πk) diverges
        let s = KernelSeries::from_part(0, RatFamilyExpr::monomial(1.0, 0, 1));
        assert!(matches!(s.eval(1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn bound_is_reported_and_checked() {
        let s = KernelSeries::power_times_v(2, 1);
        let e = s.eval(5.0, 1e-12).unwrap();
        assert!(e.error_bound <= 1e-18 * e.value.abs() * 10.0);
        assert!(e.terms_used > 2);
    }
}
