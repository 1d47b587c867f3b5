//! The kernels `V_n`, `r_n = t^{2n}V_n`, `λ_n = t^{2n-1}V_n`, `U_n`, `p_n = U_n/t³`
//! and the helper functions `ξ_n`, `s_n`, `g_n`, `h_n`, with exact derivatives.

mod series;
mod vn;
mod zeta;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfamily::{RatFamilyExpr, RatHalfExpr};

pub use series::KernelSeries;
pub use vn::{
    v_closed0, v_integral, v_integral_zero_exact, v_recursion, v_series, v_zero, v_zero_f64,
    SERIES_TERM_CAP, T_REC_MIN, T_SMALL,
};

/// A kernel value with a rigorous bound on the series truncation error.
/// Floating-point rounding is not included in the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub value: f64,
    pub error_bound: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelKind {
    /// `V_n`
    V,
    /// `r_n = t^{2n} V_n`
    R,
    /// `λ_n = t^{2n-1} V_n`
    Lambda,
    /// `U_n = t^{2n+1}V_{n-1} + t²(t^{2n+1}V_n)'`
    U,
    /// `p_n = U_n/t³`
    P,
    /// `V_n^{(l)}`, the same as `V` with a derivative order
    DvDeriv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KernelId {
    pub kind: KernelKind,
    pub n: u32,
    pub deriv_order: u32,
}

impl KernelId {
    pub fn new(kind: KernelKind, n: u32, deriv_order: u32) -> Result<Self> {
        let id = Self {
            kind,
            n,
            deriv_order,
        };
        id.validate()?;
        Ok(id)
    }

    pub fn validate(&self) -> Result<()> {
        if matches!(
            self.kind,
            KernelKind::U | KernelKind::P | KernelKind::Lambda
        ) && self.n == 0
        {
            return Err(Error::InvalidArgument(format!(
                "{:?} kernel needs n ≥ 1",
                self.kind
            )));
        }
        Ok(())
    }

    /// The kernel written as a series in `x = t/(2πk)`, differentiated
    /// `deriv_order` times.
    pub fn series(&self) -> Result<KernelSeries> {
        self.validate()?;
        let n = self.n;
        let base = match self.kind {
            KernelKind::V | KernelKind::DvDeriv => KernelSeries::power_times_v(0, n),
            KernelKind::R => KernelSeries::power_times_v(2 * n, n),
            KernelKind::Lambda => KernelSeries::power_times_v(2 * n - 1, n),
            KernelKind::U => KernelSeries::power_times_v(2 * n + 1, n - 1).merge(
                KernelSeries::power_times_v(2 * n + 1, n)
                    .derivative()
                    .times_power(2),
            ),
            KernelKind::P => p_decomposition(n),
        };
        Ok(base.nth_derivative(self.deriv_order))
    }
}

// r_{n-1} + λ_n + r_n'
fn p_decomposition(n: u32) -> KernelSeries {
    KernelSeries::power_times_v(2 * n - 2, n - 1)
        .merge(KernelSeries::power_times_v(2 * n - 1, n))
        .merge(KernelSeries::power_times_v(2 * n, n).derivative())
}

/// Evaluates a kernel or one of its derivatives by termwise exact
/// differentiation of the `V_n` series.
pub fn kernel_eval(id: KernelId, t: f64, tol: f64) -> Result<KernelEval> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    id.series()?.eval(t, tol)
}

/// `p_n` from its three-part series
/// `Σ_k [2/(2πk)² · s_{n-1}(x) + 4t/(2πk)⁴ · x^{2n-2}/(1+x²)² + 2(2n-1)t/(2πk)⁴ · s_{n-1}(x)]`,
/// `x = t/(2πk)`, independent of the `r_{n-1} + λ_n + r_n'` form used by
/// [`kernel_eval`].
pub fn p_series(n: u32, t: f64, tol: f64) -> Result<KernelEval> {
    if n == 0 {
        return Err(Error::InvalidArgument("p_n needs n ≥ 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    p_series_expr(n).eval(t, tol)
}

fn p_series_expr(n: u32) -> KernelSeries {
    let a = 2 * n - 2;
    // t/(2πk)⁴ = (2πk)^{-3} x
    KernelSeries::from_part(-2, RatFamilyExpr::monomial(2.0, a, 1))
        .add_unmerged(KernelSeries::from_part(
            -3,
            RatFamilyExpr::monomial(4.0, a + 1, 2),
        ))
        .add_unmerged(KernelSeries::from_part(
            -3,
            RatFamilyExpr::monomial(2.0 * (2 * n - 1) as f64, a + 1, 1),
        ))
}

/// `V_n(t)` by the cheapest adequate representation: the closed form for
/// `n = 0`, the recursion for `t ≥ T_REC_MIN`, the accelerated series
/// otherwise.
pub fn v_value(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("V_n needs t ≥ 0, got {t}")));
        }
        return Ok(v_closed0(t));
    }
    if t >= T_REC_MIN && (n as usize) < 60 {
        return v_recursion(n, t);
    }
    KernelSeries::power_times_v(0, n)
        .eval(t, f64::INFINITY)
        .map(|e| e.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HelperKind {
    /// `ξ_n(x) = x^n/(1+x)`
    Xi,
    /// `s_n(x) = x^{2n}/(1+x²)`
    S,
    /// `g_n(x) = (n+1/2) x^{2n}/(1+x²) + x^{2n}/(1+x²)²`
    G,
    /// `h_n(x) = n x^n/(1+x) + x^n/(1+x)²`
    H,
}

/// Exact `deriv_order`-th derivative of a helper function at `x`.
pub fn helper_eval(which: HelperKind, n: u32, deriv_order: u32, x: f64) -> f64 {
    match which {
        HelperKind::Xi => RatHalfExpr::monomial(1.0, n, 1)
            .nth_derivative(deriv_order)
            .eval(x),
        HelperKind::H => RatHalfExpr::monomial(n as f64, n, 1)
            .add(&RatHalfExpr::monomial(1.0, n, 2))
            .nth_derivative(deriv_order)
            .eval(x),
        HelperKind::S => RatFamilyExpr::monomial(1.0, 2 * n, 1)
            .nth_derivative(deriv_order)
            .eval(x),
        HelperKind::G => RatFamilyExpr::monomial(n as f64 + 0.5, 2 * n, 1)
            .add(&RatFamilyExpr::monomial(1.0, 2 * n, 2))
            .nth_derivative(deriv_order)
            .eval(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(kind: KernelKind, n: u32, d: u32) -> KernelId {
        KernelId::new(kind, n, d).unwrap()
    }

    #[test]
    fn id_validation() {
        assert!(KernelId::new(KernelKind::P, 0, 0).is_err());
        assert!(KernelId::new(KernelKind::U, 0, 0).is_err());
        assert!(KernelId::new(KernelKind::Lambda, 0, 0).is_err());
        assert!(KernelId::new(KernelKind::R, 0, 0).is_ok());
    }

    #[test]
    fn kernel_examples() {
        let p = kernel_eval(id(KernelKind::P, 1, 0), 0.0, 1e-14).unwrap();
        assert!((p.value - 1.0 / 12.0).abs() < 1e-15);
        let r = kernel_eval(id(KernelKind::R, 1, 0), 1.0, 1e-14).unwrap();
        assert!((r.value - 0.001_356_626_464_006_9).abs() < 1e-15);
    }

    #[test]
    fn u_matches_its_definition_away_from_zero() {
        // U_1(t) = t²/(1-e^{-t})² - (1 + t + 5t²/12)
        for &t in &[0.7f64, 2.0, 9.0] {
            let direct = t * t / (-(-t).exp_m1()).powi(2) - (1.0 + t + 5.0 * t * t / 12.0);
            let u = kernel_eval(id(KernelKind::U, 1, 0), t, 1e-14).unwrap();
            assert!(
                (u.value - direct).abs() < 1e-12 * direct.abs().max(1.0),
                "t={t}"
            );
        }
        let t = 0.1;
        let u = kernel_eval(id(KernelKind::U, 1, 0), t, 1e-14)
            .unwrap()
            .value;
        assert!((u / (t * t * t) - 1.0 / 12.0).abs() < 1e-2);
    }

    #[test]
    fn p_forms_agree() {
        for n in 1..=3 {
            for &t in &[0.0, 0.5, 1.0, 5.0, 20.0] {
                let a = p_series(n, t, 1e-14).unwrap();
                let b = kernel_eval(id(KernelKind::P, n, 0), t, 1e-14).unwrap();
                assert!(
                    (a.value - b.value).abs() < 1e-14 * a.value.abs().max(1e-3),
                    "n={n} t={t}"
                );
            }
        }
        assert!((p_series(1, 0.0, 1e-14).unwrap().value - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn u_is_t_cubed_times_p() {
        for &t in &[0.3, 4.0] {
            let u = kernel_eval(id(KernelKind::U, 2, 0), t, 1e-14)
                .unwrap()
                .value;
            let p = p_series(2, t, 1e-14).unwrap().value;
            assert!((u - t * t * t * p).abs() < 1e-14 * u.abs());
        }
    }

    #[test]
    fn helper_examples() {
        assert_eq!(helper_eval(HelperKind::Xi, 2, 0, 1.0), 0.5);
        assert!((helper_eval(HelperKind::Xi, 3, 3, 0.0) - 6.0).abs() < 1e-12);
        assert!((helper_eval(HelperKind::H, 2, 2, 0.0) - 6.0).abs() < 1e-12);
        // g_n(x) = s_n(x)/2 + h_n(x²)
        for &x in &[0.2_f64, 1.3, 4.0] {
            for n in 1..=3 {
                let g = helper_eval(HelperKind::G, n, 0, x);
                let s = helper_eval(HelperKind::S, n, 0, x);
                let h = helper_eval(HelperKind::H, n, 0, x * x);
                assert!((g - (s / 2.0 + h)).abs() < 1e-14 * g);
            }
        }
    }

    #[test]
    fn policy_matches_series() {
        for n in 0..=3 {
            for &t in &[0.0, 0.005, 0.5, 12.0] {
                let s = KernelSeries::power_times_v(0, n).value(t);
                let v = v_value(n, t).unwrap();
                assert!((s - v).abs() < 1e-15, "n={n} t={t}");
            }
        }
    }
}
