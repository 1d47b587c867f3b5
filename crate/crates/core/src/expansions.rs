//! Asymptotic expansions of `log Γ` and `log Γ₂` and the remainders whose
//! complete monotonicity is being checked.
//!
//! The remainder `R_n` of the Stirling series is positive, so two consecutive
//! partial sums enclose `log Γ(x)`. [`loggamma`] returns that enclosure.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::bernoulli::{rational_to_f64, Rational, RationalTable};
use crate::error::{Error, Result};
use crate::kernels::{KernelId, KernelKind};
use crate::quadrature::{binet_residual, laplace, laplace_with, QuadOptions};

/// Arguments are shifted up to at least this before the series is used.
pub const REDUCTION_TARGET: f64 = 8.0;
/// Largest shift tried by [`loggamma`].
pub const MAX_SHIFT: u32 = 64;
/// Largest number of correction terms tried by [`loggamma`].
pub const MAX_TERMS: u32 = 12;
/// Smallest tolerance accepted by [`loggamma`].
pub const MIN_TOL: f64 = 1e-13;

/// `B_{2k}/((2k-1)2k)` as a float.
fn stirling_coefficient(k: u32) -> Result<f64> {
    let b = RationalTable::shared().bernoulli_number(2 * k as usize)?;
    let d = Rational::from_integer(((2 * k - 1) * 2 * k).into());
    Ok(rational_to_f64(&(b / d)))
}

/// `(x - 1/2) log x - x + log(2π)/2 + Σ_{k=1}^n B_{2k}/((2k-1)2k) x^{1-2k}`.
pub fn loggamma_partial(x: f64, n: u32) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log Γ needs finite x > 0, got {x}")));
    }
    let mut corr = 0.0;
    let x2 = x * x;
    let mut pow = x;
    let mut terms = Vec::with_capacity(n as usize);
    for k in 1..=n {
        terms.push(stirling_coefficient(k)? / pow);
        pow *= x2;
    }
    // smallest first
    for t in terms.iter().rev() {
        corr += t;
    }
    Ok((x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + corr)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketedValue {
    pub lower: f64,
    pub upper: f64,
    pub n_used: u32,
    pub reduction_shift: u32,
}

impl BracketedValue {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Encloses `log Γ(x)` between the partial sums with `n` and `n + 1` terms,
/// after shifting `x` up by `m` and subtracting `Σ_{j<m} log(x + j)`. The
/// enclosure is widened by a rounding allowance of a few ulps of the
/// quantities involved.
pub fn loggamma(x: f64, tol: f64) -> Result<BracketedValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log Γ needs finite x > 0, got {x}")));
    }
    if !(tol >= MIN_TOL) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be at least {MIN_TOL:e}, got {tol:e}"
        )));
    }
    let mut best: Option<BracketedValue> = None;
    let mut shift_sum = 0.0;
    let mut comp = 0.0;
    for m in 0..=MAX_SHIFT {
        if m > 0 {
            let term = (x + (m - 1) as f64).ln();
            // Neumaier step
            let t = shift_sum + term;
            comp += if shift_sum.abs() >= term.abs() {
                (shift_sum - t) + term
            } else {
                (term - t) + shift_sum
            };
            shift_sum = t;
        }
        let y = x + m as f64;
        if y < REDUCTION_TARGET && m < MAX_SHIFT {
            continue;
        }
        let shift = shift_sum + comp;
        let mut prev = loggamma_partial(y, 0)?;
        for n in 0..MAX_TERMS {
            let next = loggamma_partial(y, n + 1)?;
            let allowance = 8.0 * f64::EPSILON * (prev.abs() + shift.abs() + y.ln().abs() * y);
            let b = BracketedValue {
                lower: prev.min(next) - shift - allowance,
                upper: prev.max(next) - shift + allowance,
                n_used: n,
                reduction_shift: m,
            };
            if best.is_none_or(|c| b.width() < c.width()) {
                best = Some(b);
            }
            prev = next;
        }
        if let Some(b) = best {
            if b.width() <= tol {
                return Ok(b);
            }
        }
    }
    let b = best.expect("at least one bracket is formed");
    Err(Error::Accuracy {
        value: b.midpoint(),
        error_bound: 0.5 * b.width(),
    })
}

/// `log Γ(x)` as the midpoint of the tightest bracket.
pub fn lgamma(x: f64) -> Result<f64> {
    Ok(loggamma(x, 1e-12)?.midpoint())
}

/// `P_n(x) = (-1)^n ∫_0^∞ e^{-xt} t^{2n-1} V_n(t) dt`, the remainder of the
/// Barnes G expansion.
pub fn barnesg_remainder(n: u32, x: f64, tol: f64) -> Result<f64> {
    let id = KernelId::new(KernelKind::Lambda, n, 0)?;
    let v = laplace(id, x, tol)?.value;
    Ok(if n.is_multiple_of(2) { v } else { -v })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gamma2Expansion {
    pub main: f64,
    pub remainder: f64,
    #[serde(rename = "M")]
    pub m: u32,
    /// `(-1)^{n-1} R_{2,2n} > 0` for even `M = 2n`; always false for odd `M`,
    /// where no sign is claimed.
    pub sign_check: bool,
}

impl Gamma2Expansion {
    pub fn total(&self) -> f64 {
        self.main + self.remainder
    }
}

/// The main terms of the `log Γ₂` expansion with `M` terms.
pub fn loggamma2_main(w: f64, m: u32) -> Result<f64> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Domain(format!("log Γ₂ needs finite w > 0, got {w}")));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "M must be at least 2, got {m}"
        )));
    }
    let table = RationalTable::shared();
    let b22 = table.double_bernoulli_poly(2)?.eval_f64(w);
    let b20 = rational_to_f64(&table.double_bernoulli_number(0)?);
    let b21 = rational_to_f64(&table.double_bernoulli_number(1)?);
    let mut sum = 0.0;
    for k in (3..=m as usize).rev() {
        // (-1)^k (k-3)!/k! = (-1)^k / (k(k-1)(k-2))
        let c = table.double_bernoulli_number(k)?
            / Rational::from_integer((k * (k - 1) * (k - 2)).into());
        let c = rational_to_f64(&c);
        let term = c * w.powi(2 - k as i32);
        sum += if k % 2 == 0 { term } else { -term };
    }
    Ok(-0.5 * b22 * w.ln() + 0.75 * b20 * w * w + b21 * w + sum)
}

/// `R_{2,M}(w)` for even `M = 2n` is `(-1)^{n-1} ∫_0^∞ e^{-wt} p_n(t) dt`,
/// with `p_n = U_n/t³` evaluated through its kernel series. For odd
/// `M = 2n+1` the extra subtracted term integrates in closed form:
/// `R_{2,2n+1} = R_{2,2n} + B_{2,2n+1}(2n-2)!/((2n+1)! w^{2n-1})`.
pub fn loggamma2_remainder(w: f64, m: u32, tol: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "M must be at least 2, got {m}"
        )));
    }
    let n = m / 2;
    let id = KernelId::new(KernelKind::P, n, 0)?;
    let q = laplace(id, w, tol)?.value;
    let even = if n % 2 == 1 { q } else { -q };
    if m.is_multiple_of(2) {
        return Ok(even);
    }
    let table = RationalTable::shared();
    let b = table.double_bernoulli_number(m as usize)?;
    // (2n-2)!/(2n+1)! = 1/((2n+1)(2n)(2n-1))
    let k = m as usize;
    let c = rational_to_f64(&(b / Rational::from_integer((k * (k - 1) * (k - 2)).into())));
    Ok(even + c / w.powi(2 * n as i32 - 1))
}

pub fn loggamma2(w: f64, m: u32, tol: f64) -> Result<Gamma2Expansion> {
    let main = loggamma2_main(w, m)?;
    let remainder = loggamma2_remainder(w, m, tol)?;
    let sign_check = if m.is_multiple_of(2) {
        let n = m / 2;
        let signed = if n % 2 == 1 { remainder } else { -remainder };
        signed > 0.0
    } else {
        false
    };
    Ok(Gamma2Expansion {
        main,
        remainder,
        m,
        sign_check,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FixtureName {
    /// `R_n(x)`
    RN,
    /// `(-1)^n P_n(x)`
    PN,
    /// `(-1)^{n-1} R_{2,2n}(x)`
    R22N,
    /// `F_n(x) = (-1)^n x^n (log Γ(x) - partial_n(x)) = x^n R_n(x)`
    FN,
}

/// A positive function of `x` whose complete monotonicity (of some order)
/// is claimed.
pub type Fixture = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Relative accuracy of fixture evaluations.
pub const FIXTURE_REL_TOL: f64 = 1e-14;

/// The remainder functions used by the complete monotonicity checks, each
/// oriented to be positive. Values are computed to relative accuracy
/// [`FIXTURE_REL_TOL`], since their finite differences are many orders of
/// magnitude below the values themselves.
///
/// `F_n` is assembled from Binet's integrand and the Taylor coefficients of
/// `V_0`, not from the kernel series behind `R_n`.
pub fn cm_fixture(name: FixtureName, n: u32) -> Result<Fixture> {
    let opts = QuadOptions::relative(FIXTURE_REL_TOL);
    let f: Fixture = match name {
        FixtureName::RN => {
            let id = KernelId::new(KernelKind::R, n, 0)?;
            Arc::new(move |x| Ok(laplace_with(id, x, opts)?.value))
        }
        FixtureName::PN => {
            let id = KernelId::new(KernelKind::Lambda, n, 0)?;
            Arc::new(move |x| Ok(laplace_with(id, x, opts)?.value))
        }
        FixtureName::R22N => {
            let id = KernelId::new(KernelKind::P, n, 0)?;
            Arc::new(move |x| Ok(laplace_with(id, x, opts)?.value))
        }
        FixtureName::FN => {
            if n == 0 {
                return Err(Error::InvalidArgument("F_n is defined for n ≥ 1".into()));
            }
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            Arc::new(move |x| Ok(sign * x.powi(n as i32) * binet_residual(n, x, opts)?.value))
        }
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_examples() {
        let p = loggamma_partial(1.0, 0).unwrap();
        assert!((p - (-1.0 + 0.5 * (2.0 * PI).ln())).abs() < 1e-15);
        let main = loggamma_partial(10.0, 0).unwrap();
        let p = loggamma_partial(10.0, 1).unwrap();
        assert!((p - main - 1.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn loggamma_examples() {
        let b = loggamma(1.0, 1e-12).unwrap();
        assert!(b.contains(0.0) && b.width() <= 1e-12);
        let b = loggamma(0.5, 1e-12).unwrap();
        assert!(b.contains(0.5 * PI.ln()), "{b:?}");
        let b = loggamma(6.0, 1e-12).unwrap();
        assert!(b.contains(120f64.ln()));
        assert!(b.reduction_shift >= 2);
    }

    #[test]
    fn loggamma_rejects_bad_input() {
        assert!(matches!(
            loggamma(1.0, 1e-15),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(loggamma(-1.0, 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn loggamma_functional_equation() {
        for &x in &[2.5, 7.3] {
            let b = loggamma(x, 1e-12).unwrap();
            let prev = loggamma(x - 1.0, 1e-12).unwrap();
            let want = (x - 1.0f64).ln() + prev.midpoint();
            assert!((b.midpoint() - want).abs() <= 0.5 * (b.width() + prev.width()));
        }
    }

    #[test]
    fn gamma2_main_has_exact_low_coefficients() {
        // B_{2,2}(w) = w² - 2w + 5/6, B_{2,1} = -1, B_{2,3} = -1/2
        let w: f64 = 3.0;
        let b22 = w * w - 2.0 * w + 5.0 / 6.0;
        let want = -0.5 * b22 * w.ln() + 0.75 * w * w - w + (-1.0) * (-0.5) / 6.0 / w;
        assert!((loggamma2_main(w, 3).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn barnesg_examples() {
        let p5 = barnesg_remainder(1, 5.0, 1e-12).unwrap();
        assert!(-p5 > 0.0);
        let p1 = barnesg_remainder(1, 1.0, 1e-12).unwrap();
        let p2 = barnesg_remainder(1, 2.0, 1e-12).unwrap();
        assert!(p1.abs() > p2.abs());
    }
}
