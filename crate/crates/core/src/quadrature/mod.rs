//! Laplace transforms `∫_0^∞ e^{-xt} q(t) dt` of the kernels, Binet's
//! integral, and the Riemann–Liouville fractional integral.
//!
//! The infinite range is cut at a `T` where a certified growth envelope
//! `|q(t)| ≤ C t^m` (for `t ≥ T0`) bounds the neglected tail; `[0, T]` is
//! integrated adaptively. Half of the tolerance goes to each part.

mod adaptive;

use serde::Serialize;

use crate::bernoulli::RationalTable;
use crate::error::{Error, Result};
use crate::expansions::lgamma;
use crate::kernels::{v_closed0, v_zero_f64, KernelId, KernelKind};

pub use adaptive::{integrate, Integral, QuadOptions, MAX_PANELS};

/// Default absolute tolerance of [`laplace`].
pub const DEFAULT_TOL: f64 = 1e-10;

// Largest cut-off tried before giving up on the tail.
const T_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub tail_bound: f64,
    pub panels: usize,
}

/// Certifies `|q(t)| ≤ c·t^m` for `t ≥ t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthEnvelope {
    pub c: f64,
    pub m: i32,
    pub t0: f64,
}

impl GrowthEnvelope {
    /// Bound on `∫_T^∞ e^{-xt} |q(t)| dt` for `T ≥ t0`.
    pub fn tail(&self, x: f64, t: f64) -> f64 {
        debug_assert!(t >= self.t0);
        let e = (-x * t).exp();
        if self.m < 0 {
            // t^m ≤ T^m on [T, ∞)
            return self.c * t.powi(self.m) * e / x;
        }
        // ∫_T^∞ t^m e^{-xt} dt = e^{-xT} Σ_i m!/(m-i)! T^{m-i}/x^{i+1}
        let mut sum = 0.0;
        let mut falling = 1.0;
        for i in 0..=self.m {
            sum += falling * t.powi(self.m - i) / x.powi(i + 1);
            falling *= (self.m - i) as f64;
        }
        self.c * e * sum
    }

    /// Smallest cut-off on a geometric grid from `t0` whose tail is below
    /// `target`.
    pub fn cutoff(&self, x: f64, target: f64) -> Result<f64> {
        let mut t = self.t0.max(1.0);
        while self.tail(x, t) > target {
            t *= 1.125;
            if t > T_LIMIT {
                return Err(Error::Accuracy {
                    value: f64::NAN,
                    error_bound: self.tail(x, T_LIMIT),
                });
            }
        }
        Ok(t)
    }

    /// Envelope of the Laplace integrand of a kernel. `V_n ≤ c_n/t²` with
    /// `c_n = 2ζ(2n)/(2π)^{2n} = |B_{2n}|/(2n)!` for `n ≥ 1`, and
    /// `V_0(t) ≤ 1/(2t)` for `t ≥ 4`. For `p_n = r_{n-1} + λ_n + r_n'` the
    /// term `t^{2n}V_n'` is negative, so `p_n ≤ r_{n-1} + (2n+1)λ_n`.
    pub fn for_kernel(id: KernelId) -> Result<Self> {
        id.validate()?;
        if id.deriv_order != 0 {
            return Err(Error::InvalidArgument(format!(
                "no growth envelope registered for derivatives ({id:?})"
            )));
        }
        let n = id.n;
        let c = |k: u32| -> Result<f64> {
            Ok(RationalTable::shared().bernoulli_f64(2 * k as usize)?.abs() / factorial_f64(2 * k))
        };
        let v0 = Self {
            c: 0.5,
            m: -1,
            t0: 4.0,
        };
        Ok(match id.kind {
            KernelKind::V | KernelKind::DvDeriv | KernelKind::R if n == 0 => v0,
            KernelKind::V | KernelKind::DvDeriv => Self {
                c: c(n)?,
                m: -2,
                t0: 1.0,
            },
            KernelKind::R => Self {
                c: c(n)?,
                m: 2 * n as i32 - 2,
                t0: 1.0,
            },
            KernelKind::Lambda => Self {
                c: c(n)?,
                m: 2 * n as i32 - 3,
                t0: 1.0,
            },
            KernelKind::P | KernelKind::U if n == 1 => Self {
                c: 0.75,
                m: -1,
                t0: 4.0,
            },
            KernelKind::P | KernelKind::U => Self {
                c: c(n - 1)? + (2 * n + 1) as f64 * c(n)?,
                m: 2 * n as i32 - 3,
                t0: 1.0,
            },
        })
    }
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `∫_0^∞ e^{-xt} f(t) dt` for an integrand bounded by `envelope`.
pub fn laplace_fn<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    envelope: GrowthEnvelope,
    opts: QuadOptions,
) -> Result<QuadratureResult> {
    opts.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Laplace variable must be positive, got {x}"
        )));
    }
    let integrand = |t: f64| {
        let e = (-x * t).exp();
        if e == 0.0 {
            0.0
        } else {
            e * f(t)
        }
    };
    let mut integrator = adaptive::Integrator::new(integrand, opts.max_panels);

    // An absolute target fixes the cut-off up front; a relative one needs
    // the size of the integral, so the cut-off is pushed out as it settles.
    let mut cut = if opts.abs_tol > 0.0 {
        envelope.cutoff(x, 0.5 * opts.abs_tol)?
    } else {
        envelope.t0.max(1.0).max(40.0 / x).min(T_LIMIT)
    };
    add_initial_panels(&mut integrator, cut);
    loop {
        let interior = integrator.refine(|v| 0.5 * opts.target(v))?;
        let goal = 0.5 * opts.target(interior.value);
        let tail = envelope.tail(x, cut);
        if tail <= goal {
            return Ok(QuadratureResult {
                value: interior.value,
                abs_error_estimate: interior.error + tail,
                tail_bound: tail,
                panels: interior.panels,
            });
        }
        let next = envelope.cutoff(x, goal)?;
        let mut a = cut;
        while a < next {
            let b = (2.0 * a).min(next);
            integrator.add_interval(a, b);
            a = b;
        }
        cut = next;
    }
}

// [0, 1], [1, 2], [2, 4], ... up to the cut-off.
fn add_initial_panels<F: Fn(f64) -> f64>(integrator: &mut adaptive::Integrator<F>, cut: f64) {
    let mut a = 0.0;
    let mut b = cut.min(1.0);
    loop {
        integrator.add_interval(a, b);
        if b >= cut {
            break;
        }
        a = b;
        b = (2.0 * b).min(cut);
    }
}

/// `∫_0^∞ e^{-xt} q(t) dt` for the kernel `q` named by `id`, to absolute
/// tolerance `tol`. For `U` the integrand is `U_n(t)/t³ = p_n(t)`, the
/// kernel of the double gamma remainder.
pub fn laplace(id: KernelId, x: f64, tol: f64) -> Result<QuadratureResult> {
    laplace_with(id, x, QuadOptions::absolute(tol))
}

pub fn laplace_with(id: KernelId, x: f64, opts: QuadOptions) -> Result<QuadratureResult> {
    let envelope = GrowthEnvelope::for_kernel(id)?;
    let series = match id.kind {
        KernelKind::U => KernelId {
            kind: KernelKind::P,
            ..id
        }
        .series()?,
        _ => id.series()?,
    };
    laplace_fn(|t| series.value(t), x, envelope, opts)
}

/// `∫_0^∞ e^{-xt} (V_0(t) - Σ_{j<n} (-1)^j V_j(0) t^{2j}) dt`, which equals
/// `(-1)^n R_n(x)` and is `log Γ(x)` minus its Stirling partial sum with `n`
/// correction terms.
///
/// The integrand is built from Binet's integrand and the Taylor coefficients
/// of `V_0` rather than from the kernel series. Up to `t = 4` it is the
/// Taylor remainder itself, so no cancellation occurs near the origin.
pub fn binet_residual(n: u32, x: f64, opts: QuadOptions) -> Result<QuadratureResult> {
    let max_j = (RationalTable::shared().max_index() - 2) / 2;
    if n as usize > max_j {
        return Err(Error::TableLimit {
            index: 2 * n as usize,
            max: RationalTable::shared().max_index(),
        });
    }
    let coeffs: Vec<f64> = (0..=max_j as u32)
        .map(|j| {
            let c = v_zero_f64(j).expect("within shared table");
            if j % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    let n = n as usize;
    let integrand = |t: f64| {
        let t2 = t * t;
        if t <= 4.0 {
            let mut sum = 0.0;
            let mut pow = t2.powi(n as i32);
            for (j, c) in coeffs.iter().enumerate().skip(n) {
                let term = c * pow;
                sum += term;
                if j > n + 2 && term.abs() <= 1e-18 * sum.abs() {
                    break;
                }
                pow *= t2;
            }
            sum
        } else {
            // (t/2 - 1 + t/(e^t - 1))/t² minus the Taylor polynomial
            let mut poly = 0.0;
            for c in coeffs[..n].iter().rev() {
                poly = poly * t2 + c;
            }
            v_closed0(t) - poly
        }
    };
    let envelope = GrowthEnvelope::for_kernel(KernelId {
        kind: KernelKind::R,
        n: n as u32,
        deriv_order: 0,
    })?;
    laplace_fn(integrand, x, envelope, opts)
}

/// Binet's integral `∫_0^∞ (t/2 - 1 + t/(e^t-1)) e^{-xt}/t² dt
/// = log Γ(x) - (x - 1/2) log x + x - log(2π)/2`.
pub fn binet_integral(x: f64, tol: f64) -> Result<QuadratureResult> {
    binet_residual(0, x, QuadOptions::absolute(tol))
}

/// `(1/Γ(α)) ∫_0^t (t-s)^{α-1} density(s) ds`. For `α < 1` the endpoint
/// singularity is removed by `s = t - u^{1/α}`, which turns the integral
/// into `(1/α) ∫_0^{t^α} density(t - u^{1/α}) du`.
pub fn fractional_integral<F: Fn(f64) -> f64>(
    density: F,
    alpha: f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "order must be positive, got {alpha}"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("need finite t ≥ 0, got {t}")));
    }
    let gamma = lgamma(alpha)?.exp();
    let opts = QuadOptions::absolute(tol * gamma);
    let r = if alpha < 1.0 {
        let upper = t.powf(alpha);
        integrate(
            |u| density(t - u.powf(1.0 / alpha)) / alpha,
            0.0,
            upper,
            opts,
        )?
    } else {
        integrate(|s| (t - s).powf(alpha - 1.0) * density(s), 0.0, t, opts)?
    };
    Ok(r.value / gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(kind: KernelKind, n: u32) -> KernelId {
        KernelId::new(kind, n, 0).unwrap()
    }

    #[test]
    fn envelope_tail_matches_closed_forms() {
        let e = GrowthEnvelope {
            c: 1.0,
            m: 0,
            t0: 1.0,
        };
        assert!((e.tail(2.0, 3.0) - (-6.0f64).exp() / 2.0).abs() < 1e-16);
        let e = GrowthEnvelope {
            c: 1.0,
            m: 2,
            t0: 1.0,
        };
        // ∫_T^∞ t² e^{-t} = e^{-T}(T² + 2T + 2)
        assert!((e.tail(1.0, 2.0) - (-2.0f64).exp() * 10.0).abs() < 1e-15);
    }

    #[test]
    fn envelopes_dominate_kernels() {
        for kind in [
            KernelKind::V,
            KernelKind::R,
            KernelKind::Lambda,
            KernelKind::P,
        ] {
            for n in 1..=4 {
                let k = id(kind, n);
                let env = GrowthEnvelope::for_kernel(k).unwrap();
                let s = k.series().unwrap();
                for &t in &[env.t0, 5.0, 17.0, 60.0, 300.0] {
                    let q = s.value(t);
                    assert!(
                        q.abs() <= env.c * t.powi(env.m) * (1.0 + 1e-12),
                        "{kind:?} n={n} t={t}"
                    );
                }
            }
        }
        let s = id(KernelKind::R, 0).series().unwrap();
        for &t in &[4.0, 9.0, 100.0] {
            assert!(s.value(t) <= 0.5 / t);
        }
        let s = id(KernelKind::P, 1).series().unwrap();
        for &t in &[4.0, 9.0, 100.0] {
            assert!(s.value(t) <= 0.75 / t);
        }
    }

    #[test]
    fn r0_at_one() {
        let r = laplace(id(KernelKind::R, 0), 1.0, 1e-10).unwrap();
        let want = 1.0 - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((r.value - want).abs() < 1e-10);
        assert!(r.tail_bound <= 0.5e-10);
    }

    #[test]
    fn binet_examples() {
        let b = binet_integral(1.0, 1e-12).unwrap();
        assert!((b.value - 0.081_061_466_795_327_26).abs() < 1e-12);
        let b = binet_integral(0.5, 1e-12).unwrap();
        assert!((b.value - 0.153_426_409_720_027_3).abs() < 1e-12);
        let b = binet_integral(100.0, 1e-14).unwrap();
        assert!(b.value < 1.0 / 1200.0);
    }

    #[test]
    fn relative_mode_resolves_tiny_values() {
        // R_3(10) from the reference table
        let r = laplace_with(id(KernelKind::R, 3), 10.0, QuadOptions::relative(1e-13)).unwrap();
        let want = 5.870_062_080_702_274e-11;
        assert!((r.value - want).abs() < 1e-12 * want, "{}", r.value);
    }

    #[test]
    fn fractional_examples() {
        assert!((fractional_integral(|_| 1.0, 1.0, 3.0, 1e-12).unwrap() - 3.0).abs() < 1e-12);
        assert!((fractional_integral(|_| 1.0, 2.0, 2.0, 1e-12).unwrap() - 2.0).abs() < 1e-12);
        assert!((fractional_integral(|s| s, 1.0, 2.0, 1e-12).unwrap() - 2.0).abs() < 1e-12);
        // I_{1/2}(1)(t) = t^{1/2}/Γ(3/2)
        let v = fractional_integral(|_| 1.0, 0.5, 4.0, 1e-12).unwrap();
        let want = 2.0 / (0.5 * std::f64::consts::PI.sqrt());
        assert!((v - want).abs() < 1e-11);
        assert!(fractional_integral(|_| 1.0, 0.0, 1.0, 1e-8).is_err());
    }
}
