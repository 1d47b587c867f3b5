//! Four representations of `V_n(t)`: the partial-fraction series, the closed
//! form of `V_0`, the downward recursion `t²V_n(t) = V_{n-1}(0) - V_{n-1}(t)`
//! and the Bernoulli-polynomial integral.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use twofloat::TwoFloat;

use crate::bernoulli::{factorial, rational_to_f64, rational_to_twofloat, Rational, RationalTable};
use crate::error::{Error, Result};

use super::KernelEval;

/// Smallest `t` accepted by [`v_recursion`].
pub const T_REC_MIN: f64 = 1e-2;

/// Below this the closed form of `V_0` is replaced by its Taylor series.
pub const T_SMALL: f64 = 1.0;

/// Cap on the number of terms summed by [`v_series`].
pub const SERIES_TERM_CAP: usize = 10_000_000;

const TWO_PI: f64 = 2.0 * PI;

/// Exact `V_n(0) = (-1)^n B_{2n+2}/(2n+2)!`.
pub fn v_zero(n: u32) -> Result<Rational> {
    let table = RationalTable::shared();
    let m = 2 * n as usize + 2;
    let b = table.bernoulli_number(m)?;
    let v = b / BigRational::from_integer(factorial(m));
    Ok(if n.is_multiple_of(2) { v } else { -v })
}

pub fn v_zero_f64(n: u32) -> Result<f64> {
    v_zero_table()
        .get(n as usize)
        .map(|c| c.hi())
        .map_or_else(|| v_zero(n).map(|r| rational_to_f64(&r)), Ok)
}

// V_j(0) for every j the shared table reaches, in double-double.
fn v_zero_table() -> &'static [TwoFloat] {
    static TABLE: OnceLock<Vec<TwoFloat>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let max = (RationalTable::shared().max_index() - 2) / 2;
        (0..=max as u32)
            .map(|j| rational_to_twofloat(&v_zero(j).expect("within shared table")))
            .collect()
    })
}

/// Partial sum of `Σ_k 2/((t²+4π²k²)(2πk)^{2n})` with the number of terms
/// chosen so that the comparison tail bound is at most `tol`.
///
/// For `n ≥ 1` the tail is bounded by `2/((2π)^{2n+2}(2n+1)K^{2n+1})`; for
/// `n = 0` by `∫_K^∞ 2/(2πk)² dk = 1/(2π²K)`, which makes small tolerances
/// unreachable.
pub fn v_series(n: u32, t: f64, tol: f64) -> Result<KernelEval> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("V_n needs finite t ≥ 0, got {t}")));
    }
    let tail_bound = |k: f64| -> f64 {
        if n == 0 {
            1.0 / (2.0 * PI * PI * k)
        } else {
            let p = 2 * n + 1;
            2.0 / (TWO_PI.powi(2 * n as i32 + 2) * p as f64 * k.powi(p as i32))
        }
    };
    let needed = if n == 0 {
        1.0 / (2.0 * PI * PI * tol)
    } else {
        let p = (2 * n + 1) as f64;
        (2.0 / (TWO_PI.powi(2 * n as i32 + 2) * p * tol)).powf(1.0 / p)
    };
    let mut k_max = needed.ceil().max(1.0);
    // guard against powf rounding just short of the target
    while tail_bound(k_max) > tol && k_max <= SERIES_TERM_CAP as f64 {
        k_max += 1.0;
    }
    if k_max > SERIES_TERM_CAP as f64 {
        return Err(Error::Convergence {
            what: "V_n series",
            terms: SERIES_TERM_CAP,
            bound: tail_bound(SERIES_TERM_CAP as f64),
        });
    }
    let k_max = k_max as usize;
    let t2 = t * t;
    let mut sum = 0.0;
    for k in (1..=k_max).rev() {
        let w = TWO_PI * k as f64;
        sum += 2.0 / ((t2 + w * w) * w.powi(2 * n as i32));
    }
    Ok(KernelEval {
        value: sum,
        error_bound: tail_bound(k_max as f64),
        terms_used: k_max,
    })
}

/// `V_0(t) = ((t/2)coth(t/2) - 1)/t²`, with `V_0(0) = 1/12`.
///
/// The closed form loses about `log10(12/t²)` digits to cancellation, so for
/// `t < T_SMALL` the Taylor series `Σ_j (-1)^j V_j(0) t^{2j}` is summed
/// instead (ratio `(t/2π)²`, convergent for `t < 2π`).
pub fn v_closed0(t: f64) -> f64 {
    let t = t.abs();
    if t < T_SMALL {
        let t2 = t * t;
        let coeffs = v_zero_table();
        let mut sum = 0.0;
        let mut pow = 1.0;
        for (j, c) in coeffs.iter().enumerate() {
            let term = c.hi() * pow;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && j > 0 {
                break;
            }
            pow *= -t2;
        }
        sum
    } else {
        let h = 0.5 * t;
        (h / h.tanh() - 1.0) / (t * t)
    }
}

// Below this the double-double V_0 is the Taylor series: 64 coefficients at
// ratio (t/2π)² ≤ 0.31 reach 1e-32. Above it the recursion divides by
// t² ≥ 12, which damps the f64 error of the closed form.
const T_TAYLOR_DD: f64 = 3.5;

// Double-double V_0 for the recursion.
fn v_closed0_dd(t: f64) -> TwoFloat {
    if t < T_TAYLOR_DD {
        let t2 = TwoFloat::new_mul(t, t);
        let mut sum = TwoFloat::from(0.0);
        let mut pow = TwoFloat::from(1.0);
        for (j, c) in v_zero_table().iter().enumerate() {
            let term = *c * pow;
            sum = if j % 2 == 0 { sum + term } else { sum - term };
            if term.hi().abs() < 1e-34 * sum.hi().abs() {
                break;
            }
            pow *= t2;
        }
        sum
    } else {
        TwoFloat::from(v_closed0(t))
    }
}

// twofloat 0.7 rounds quotients to plain f64 accuracy, so the quotient is
// refined with two correction steps that only use its exact products.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q0 = a.hi() / b.hi();
    let r = a - b * q0;
    let q1 = r.hi() / b.hi();
    let r = r - b * q1;
    let q2 = r.hi() / b.hi();
    TwoFloat::new_add(q0, q1) + q2
}

/// `V_n(t)` by `n` steps of `V_k(t) = (V_{k-1}(0) - V_{k-1}(t))/t²` from
/// `V_0`. Each step divides a difference of nearly equal numbers by `t²`, so
/// the recursion is carried in double-double arithmetic and refused below
/// [`T_REC_MIN`]. Each step costs about `log10(1/t²)` digits, so at the
/// threshold itself only `n ≤ 3` keeps full double precision.
pub fn v_recursion(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "recursion starts at n = 1; use v_closed0".into(),
        ));
    }
    if !(t >= T_REC_MIN) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "v_recursion needs t ≥ {T_REC_MIN} (got {t}); use v_series near zero"
        )));
    }
    let zeros = v_zero_table();
    if n as usize >= zeros.len() {
        return Err(Error::TableLimit {
            index: 2 * n as usize,
            max: RationalTable::shared().max_index(),
        });
    }
    let t2 = TwoFloat::new_mul(t, t);
    let mut v = v_closed0_dd(t);
    for k in 1..=n as usize {
        v = dd_div(zeros[k - 1] - v, t2);
    }
    Ok(v.hi() + v.lo())
}

/// `V_n(0)` from the integral representation: the `t → 0` limit of
/// `t/(e^t - 1) · ∫_0^1 e^{tu} B_{2n+1}(u) du / t` is `∫_0^1 u B_{2n+1}(u) du`,
/// because `B_{2n+1}` integrates to zero. Exact, and independent of the
/// Bernoulli-number formula of [`v_zero`].
pub fn v_integral_zero_exact(n: u32) -> Result<Rational> {
    let poly = RationalTable::shared().bernoulli_poly(2 * n as usize + 1)?;
    let v = poly.moment(1) / Rational::from_integer(factorial(2 * n as usize + 1));
    Ok(if n.is_multiple_of(2) { v } else { -v })
}

/// `V_n(t) = (-1)^n/(2n+1)! · 1/(e^t - 1) · ∫_0^1 e^{tu} B_{2n+1}(u) du`.
///
/// The integrand is a polynomial times an exponential and is integrated in
/// closed form: by repeated integration by parts for `t ≥ 10`, and through
/// the exact moments `∫_0^1 u^j B_{2n+1}(u) du` for smaller `t`, where the
/// by-parts terms would cancel. `∫_0^1 B_{2n+1} = 0` makes the `t → 0` limit
/// finite.
pub fn v_integral(n: u32, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("V_n needs finite t ≥ 0, got {t}")));
    }
    let table = RationalTable::shared();
    let poly = table.bernoulli_poly(2 * n as usize + 1)?;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let fact = rational_to_f64(&Rational::from_integer(factorial(2 * n as usize + 1)));

    if t < 10.0 {
        // ∫ e^{tu} P = Σ_{j≥1} t^j M_j / j!   (M_0 = 0)
        // V_n = sign/fact · t/(e^t-1) · Σ_{j≥1} t^{j-1} M_j / j!
        let mut sum = 0.0;
        let mut coef = 1.0; // t^{j-1}/j!
        let mut j = 1usize;
        loop {
            let m = rational_to_f64(&poly.moment(j));
            let term = coef * m;
            sum += term;
            if (j as f64) > 3.0 * t + 10.0 && term.abs() <= 1e-19 * sum.abs() {
                break;
            }
            if j > 400 {
                return Err(Error::Convergence {
                    what: "Bernoulli-polynomial moment series",
                    terms: j,
                    bound: term.abs(),
                });
            }
            coef *= t / (j as f64 + 1.0);
            j += 1;
        }
        let damp = if t == 0.0 { 1.0 } else { t / t.exp_m1() };
        Ok(sign / fact * damp * sum)
    } else {
        let e = (-t).exp();
        let mut sum = 0.0;
        let mut d = poly;
        let mut tp = t;
        let mut i = 0;
        while !d.is_zero() {
            let one = d.eval(&Rational::from_integer(BigInt::from(1)));
            let zero = d.coefficients()[0].clone();
            let term = (rational_to_f64(&one) - e * rational_to_f64(&zero)) / tp;
            sum += if i % 2 == 0 { term } else { -term };
            d = d.derivative();
            tp *= t;
            i += 1;
        }
        Ok(sign / fact * sum / (-(-t).exp_m1()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSeries;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(v_zero(0).unwrap(), q(1, 12));
        assert_eq!(v_zero(1).unwrap(), q(1, 720));
        assert_eq!(v_zero(2).unwrap(), q(1, 30240));
        assert!(v_zero(70).is_err());
        assert_eq!(v_zero_f64(1).unwrap(), 1.0 / 720.0);
    }

    #[test]
    fn integral_limit_at_zero_is_exact() {
        for n in 0..=8 {
            assert_eq!(v_integral_zero_exact(n).unwrap(), v_zero(n).unwrap());
        }
    }

    #[test]
    fn series_examples() {
        let e = v_series(0, 0.0, 1e-6).unwrap();
        assert!(e.error_bound <= 1e-6);
        assert!((e.value - 1.0 / 12.0).abs() <= e.error_bound);
        assert!(e.value <= 1.0 / 12.0);

        let e = v_series(1, 0.0, 1e-14).unwrap();
        assert!((e.value - 1.0 / 720.0).abs() <= e.error_bound + 1e-18);

        let e = v_series(0, 1.0, 1e-6).unwrap();
        assert!((e.value - 0.081_976_706_869_326_4).abs() <= e.error_bound + 1e-15);
    }

    #[test]
    fn series_refuses_unreachable_tolerance() {
        assert!(matches!(
            v_series(0, 1.0, 1e-12),
            Err(Error::Convergence { .. })
        ));
        assert!(matches!(
            v_series(1, 1.0, 0.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(v_series(1, -1.0, 1e-8), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(v_closed0(0.0), 1.0 / 12.0);
        assert!((v_closed0(1.0) - 0.081_976_706_869_326_4).abs() < 1e-15);
        let t = 60.0;
        assert!((t * t * v_closed0(t) - (t / 2.0 - 1.0)).abs() < 1e-10);
        // continuity across the switch to the Taylor series
        let below = v_closed0(f64::from_bits(T_SMALL.to_bits() - 1));
        let above = v_closed0(T_SMALL);
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn recursion_examples() {
        let v = v_recursion(1, 1.0).unwrap();
        assert!((v - 0.001_356_626_464_006_9).abs() < 1e-15);
        let s = v_series(2, 2.0, 1e-14).unwrap();
        assert!((v_recursion(2, 2.0).unwrap() - s.value).abs() < 1e-11);
        assert!(matches!(v_recursion(1, 1e-3), Err(Error::Domain(_))));
        assert!(v_recursion(0, 1.0).is_err());
    }

    #[test]
    fn recursion_keeps_accuracy_near_its_threshold() {
        for n in 1..=3 {
            let s = v_series(n, T_REC_MIN, 1e-16).unwrap();
            let r = v_recursion(n, T_REC_MIN).unwrap();
            assert!(
                (r - s.value).abs() <= s.error_bound + 1e-14 * s.value,
                "n={n}: {r} vs {}",
                s.value
            );
        }
    }

    #[test]
    fn double_double_quotient() {
        let q = dd_div(TwoFloat::from(1.0), TwoFloat::from(3.0));
        let r = q * 3.0 - 1.0;
        assert!(r.hi().abs() < 1e-31);
    }

    #[test]
    fn integral_examples() {
        assert!((v_integral(0, 1.0).unwrap() - v_closed0(1.0)).abs() < 1e-15);
        assert!((v_integral(1, 0.0).unwrap() - 1.0 / 720.0).abs() < 1e-18);
        assert!((v_integral(0, 0.0).unwrap() - 1.0 / 12.0).abs() < 1e-17);
        let s = v_series(2, 3.0, 1e-15).unwrap();
        assert!((v_integral(2, 3.0).unwrap() - s.value).abs() < 1e-12);
    }

    #[test]
    fn integral_branches_meet() {
        for n in 0..=4 {
            let series = KernelSeries::power_times_v(0, n);
            for t in [f64::from_bits(10.0_f64.to_bits() - 1), 10.0] {
                let v = v_integral(n, t).unwrap();
                let s = series.value(t);
                assert!((v - s).abs() < 1e-14 * s, "n={n} t={t}: {v} vs {s}");
            }
        }
    }
}
