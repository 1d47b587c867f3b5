//! Numerical checks of complete monotonicity of order `r`: `x^r f(x)` must
//! have nonnegative alternating forward differences `(-1)^m Δ_h^m`. On the
//! kernel side, the exact derivatives that the proofs rely on must be
//! positive.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernels::{helper_eval, HelperKind, KernelId, KernelKind};

/// Margins of `(-1)^m Δ_h^m g` are divided by `max|g|` on the stencil and by
/// `2^m`, the worst-case growth of rounding errors in an `m`-th difference.
/// A check passes if every scaled margin is at least `-DEFAULT_REL_TOL`.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Kernel derivatives below the vanishing order must be this small at `t = 0`.
pub const VANISHING_TOL: f64 = 1e-13;

pub type Function<'a> = dyn Fn(f64) -> Result<f64> + Sync + 'a;

/// `Δ_h^m f(x) = Σ_j (-1)^{m-j} C(m, j) f(x + jh)`.
pub fn finite_difference(f: &Function, x: f64, h: f64, m: u32) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let values = (0..=m)
        .map(|j| f(x + j as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    Ok(difference_of(&values))
}

fn difference_of(values: &[f64]) -> f64 {
    let m = values.len() as u64 - 1;
    let mut sum = 0.0;
    for (j, v) in values.iter().enumerate() {
        let c = num_integer::binomial(m, j as u64) as f64;
        sum += if (m - j as u64).is_multiple_of(2) {
            c * v
        } else {
            -c * v
        };
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CMOrderSpec {
    pub r: f64,
    pub max_diff_order: u32,
    pub grid: Vec<f64>,
    pub steps: Vec<f64>,
    pub rel_tol: f64,
}

impl Default for CMOrderSpec {
    fn default() -> Self {
        Self::with_order(0.0)
    }
}

impl CMOrderSpec {
    /// Default grid: 12 log-spaced points in `[0.25, 40]`, steps
    /// `0.125, 0.5, 2`, differences up to order 8.
    pub fn with_order(r: f64) -> Self {
        Self {
            r,
            max_diff_order: 8,
            grid: log_grid(0.25, 40.0, 12),
            steps: vec![0.125, 0.5, 2.0],
            rel_tol: DEFAULT_REL_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sorted = self.grid.windows(2).all(|w| w[0] < w[1]);
        if self.grid.is_empty() || !sorted || self.grid[0] <= 0.0 {
            return Err(Error::InvalidArgument(
                "grid must be positive and strictly ascending".into(),
            ));
        }
        if self.steps.is_empty() || self.steps.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::InvalidArgument("steps must be positive".into()));
        }
        if !(self.r >= 0.0) || !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidArgument(
                "order and tolerance must be nonnegative".into(),
            ));
        }
        let far = self.grid[self.grid.len() - 1]
            + self.max_diff_order as f64 * self.steps.iter().cloned().fold(0.0, f64::max);
        if !far.is_finite() {
            return Err(Error::InvalidArgument(
                "stencil leaves the finite range".into(),
            ));
        }
        Ok(())
    }
}

/// `count` points from `a` to `b`, equally spaced in `log`.
pub fn log_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| match i {
            0 => a,
            i if i == count - 1 => b,
            i => (la + (lb - la) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// One checked quantity: `(-1)^m Δ_h^m g(x)` in a difference check
/// (`step > 0`), or the `order`-th derivative at `x` in a positivity check
/// (`step = 0`). Serialized as `[order, x, step, margin]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub order: u32,
    pub x: f64,
    pub step: f64,
    pub margin: f64,
    pub scaled: f64,
}

impl Serialize for Margin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.order, self.x, self.step, self.margin).serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Derivative at `t = 0` that must vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vanishing {
    pub order: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// What was checked.
    pub spec: serde_json::Value,
    pub margins: Vec<Margin>,
    /// Smallest scaled margin (difference checks) or smallest value
    /// (positivity checks).
    pub min_margin: f64,
    /// `[order, x, step]` where `min_margin` occurs.
    pub worst: Option<(u32, f64, f64)>,
    pub verdict: Verdict,
    pub tolerance_used: f64,
    /// How margins are compared with the tolerance.
    pub tolerance_model: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vanishing: Vec<Vanishing>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

const DIFFERENCE_MODEL: &str = "(-1)^m Δ_h^m g / (max|g| on stencil · 2^m) ≥ -tolerance";
const POSITIVITY_MODEL: &str = "value > 0; |value at t=0| < tolerance below the vanishing order";

/// Checks `(-1)^m Δ_h^m [x^r f(x)] ≥ 0` for `m ≤ max_diff_order` on the
/// grid, up to rounding (see [`DEFAULT_REL_TOL`]). Each distinct abscissa is
/// evaluated once; evaluations run in parallel, assembly is sequential.
pub fn cm_order_check(f: &Function, spec: &CMOrderSpec) -> Result<MonotonicityReport> {
    spec.validate()?;
    let m_max = spec.max_diff_order;

    let mut points: BTreeMap<u64, f64> = BTreeMap::new();
    for &x in &spec.grid {
        for &h in &spec.steps {
            for j in 0..=m_max {
                let p = x + j as f64 * h;
                points.insert(p.to_bits(), p);
            }
        }
    }
    let values: Vec<(u64, Result<f64>)> = points
        .par_iter()
        .map(|(&bits, &p)| (bits, f(p).map(|v| p.powf(spec.r) * v)))
        .collect();
    let mut g: BTreeMap<u64, f64> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (bits, v) in values {
        let v = v?;
        if !(v > 0.0) {
            let msg = format!(
                "x^r f(x) = {v:e} is not positive at x = {}",
                f64::from_bits(bits)
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        g.insert(bits, v);
    }

    let mut margins = Vec::new();
    for m in 0..=m_max {
        for &x in &spec.grid {
            for &h in &spec.steps {
                let stencil: Vec<f64> = (0..=m).map(|j| g[&(x + j as f64 * h).to_bits()]).collect();
                let diff = difference_of(&stencil);
                let margin = if m % 2 == 0 { diff } else { -diff };
                let scale =
                    stencil.iter().fold(0.0f64, |a, v| a.max(v.abs())) * 2f64.powi(m as i32);
                let scaled = if scale > 0.0 { margin / scale } else { margin };
                margins.push(Margin {
                    order: m,
                    x,
                    step: h,
                    margin,
                    scaled,
                });
            }
        }
    }
    let worst = margins
        .iter()
        .min_by(|a, b| a.scaled.total_cmp(&b.scaled))
        .copied();
    let min_margin = worst.map_or(f64::INFINITY, |w| w.scaled);
    let verdict = if min_margin >= -spec.rel_tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(MonotonicityReport {
        spec: serde_json::to_value(spec).expect("spec is serializable"),
        margins,
        min_margin,
        worst: worst.map(|w| (w.order, w.x, w.step)),
        verdict,
        tolerance_used: spec.rel_tol,
        tolerance_model: DIFFERENCE_MODEL,
        vanishing: Vec::new(),
        warnings,
    })
}

/// Derivative orders with a positivity claim, and those among them that also
/// vanish at `t = 0`.
fn claimed_orders(kind: KernelKind, n: u32) -> Result<(Option<u32>, Option<u32>)> {
    // (largest positive order, largest vanishing order)
    let dec = |k: u32| k.checked_sub(1);
    Ok(match kind {
        KernelKind::R => (Some(n), dec(n)),
        KernelKind::Lambda if n >= 1 => (Some(n - 1), Some(n - 1)),
        KernelKind::P if n >= 1 => (Some(n - 1), n.checked_sub(2)),
        KernelKind::U if n >= 1 => (Some(0), Some(0)),
        KernelKind::V | KernelKind::DvDeriv => (Some(0), None),
        _ => return Err(Error::Contract(format!("{kind:?} kernel needs n ≥ 1"))),
    })
}

/// Positivity of the exact derivatives of a kernel on `t_grid`, for the
/// orders the theory claims: `r_n^{(l)}` for `l ≤ n`, `λ_n^{(l)}` and
/// `p_n^{(l)}` for `l ≤ n-1`, and `U_n`, `V_n` themselves. Derivatives
/// below the vanishing order are also checked to vanish at `t = 0`.
/// Orders outside the claim are a contract error.
pub fn kernel_positivity_check(
    kind: KernelKind,
    n: u32,
    orders: &[u32],
    t_grid: &[f64],
) -> Result<MonotonicityReport> {
    let (max_order, vanish) = claimed_orders(kind, n)?;
    for &l in orders {
        if max_order.is_none_or(|m| l > m) {
            return Err(Error::Contract(format!(
                "no positivity claim for derivative order {l} of {kind:?} with n = {n}"
            )));
        }
    }
    let eval = |l: u32, t: f64| -> Result<f64> {
        let id = KernelId::new(kind, n, l)?;
        Ok(id.series()?.eval(t, 1e-12)?.value)
    };
    positivity_report(
        serde_json::json!({ "kernel": kind, "n": n, "orders": orders, "t_grid": t_grid }),
        orders,
        t_grid,
        vanish,
        eval,
    )
}

/// Positivity of `ξ_n^{(k)}` or `h_n^{(k)}` for `k ≤ n` on `x_grid`, and
/// their vanishing at `0` for `k ≤ n-1`.
pub fn helper_positivity_check(
    which: HelperKind,
    n: u32,
    orders: &[u32],
    x_grid: &[f64],
) -> Result<MonotonicityReport> {
    if !matches!(which, HelperKind::Xi | HelperKind::H) {
        return Err(Error::Contract(format!(
            "no positivity claim for {which:?}"
        )));
    }
    if let Some(&l) = orders.iter().find(|&&l| l > n) {
        return Err(Error::Contract(format!(
            "no positivity claim for order {l} of {which:?} with n = {n}"
        )));
    }
    positivity_report(
        serde_json::json!({ "helper": which, "n": n, "orders": orders, "x_grid": x_grid }),
        orders,
        x_grid,
        n.checked_sub(1),
        |l, x| Ok(helper_eval(which, n, l, x)),
    )
}

fn positivity_report(
    spec: serde_json::Value,
    orders: &[u32],
    grid: &[f64],
    vanish: Option<u32>,
    eval: impl Fn(u32, f64) -> Result<f64> + Sync,
) -> Result<MonotonicityReport> {
    let vanishes = |l: u32| vanish.is_some_and(|v| l <= v);
    let jobs: Vec<(u32, f64)> = orders
        .iter()
        .flat_map(|&l| grid.iter().map(move |&t| (l, t)))
        .filter(|&(l, t)| !(t == 0.0 && vanishes(l)))
        .collect();
    let values = jobs
        .par_iter()
        .map(|&(l, t)| eval(l, t))
        .collect::<Result<Vec<f64>>>()?;
    let margins: Vec<Margin> = jobs
        .iter()
        .zip(&values)
        .map(|(&(order, x), &v)| Margin {
            order,
            x,
            step: 0.0,
            margin: v,
            scaled: v,
        })
        .collect();
    let vanishing = orders
        .iter()
        .filter(|&&l| vanishes(l))
        .map(|&l| {
            Ok(Vanishing {
                order: l,
                value: eval(l, 0.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = margins
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .copied();
    let min_margin = worst.map_or(f64::INFINITY, |w| w.margin);
    let ok = min_margin > 0.0 && vanishing.iter().all(|v| v.value.abs() < VANISHING_TOL);
    Ok(MonotonicityReport {
        spec,
        margins,
        min_margin,
        worst: worst.map(|w| (w.order, w.x, w.step)),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        tolerance_used: VANISHING_TOL,
        tolerance_model: POSITIVITY_MODEL,
        vanishing,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_examples() {
        let sq = |x: f64| Ok(x * x);
        assert_eq!(finite_difference(&sq, 0.0, 1.0, 1).unwrap(), 1.0);
        assert_eq!(finite_difference(&sq, 0.0, 1.0, 3).unwrap(), 0.0);
        let e = |x: f64| Ok((-x).exp());
        let d = finite_difference(&e, 1.0, 0.5, 2).unwrap();
        let want = (-1.0f64).exp() * (1.0 - (-0.5f64).exp()).powi(2);
        assert!((d - want).abs() < 1e-16);
    }

    #[test]
    fn prototypes() {
        let e = |x: f64| Ok((-x).exp());
        assert!(cm_order_check(&e, &CMOrderSpec::default())
            .unwrap()
            .passed());
        let inv = |x: f64| Ok(1.0 / x);
        assert!(cm_order_check(&inv, &CMOrderSpec::with_order(1.0))
            .unwrap()
            .passed());
        let wave = |x: f64| Ok(x.sin() + 2.0);
        let spec = CMOrderSpec {
            grid: log_grid(1.0, 10.0, 12),
            max_diff_order: 4,
            ..CMOrderSpec::default()
        };
        assert!(!cm_order_check(&wave, &spec).unwrap().passed());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 50.0, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[19], 50.0);
    }

    #[test]
    fn contract_errors() {
        assert!(matches!(
            kernel_positivity_check(KernelKind::Lambda, 2, &[2], &[1.0]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            kernel_positivity_check(KernelKind::P, 0, &[0], &[1.0]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            helper_positivity_check(HelperKind::G, 2, &[0], &[1.0]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn kernel_examples() {
        let r = kernel_positivity_check(KernelKind::Lambda, 3, &[2], &[1.0]).unwrap();
        assert!(r.passed());
        let r = kernel_positivity_check(KernelKind::P, 1, &[0], &[0.0]).unwrap();
        assert!((r.min_margin - 1.0 / 12.0).abs() < 1e-15);
        assert!(r.passed());
    }

    #[test]
    fn report_json_shape() {
        let e = |x: f64| Ok((-x).exp());
        let spec = CMOrderSpec {
            grid: vec![1.0],
            steps: vec![0.5],
            max_diff_order: 1,
            ..CMOrderSpec::default()
        };
        let r = cm_order_check(&e, &spec).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["margins"].as_array().unwrap().len(), 2);
        assert_eq!(v["margins"][1][0], 1);
    }
}
