//! Adaptive Gauss–Kronrod (10/21 points) on finite intervals.
//!
//! The panel with the largest error estimate is bisected until the sum of
//! estimates meets the target. Panels are summed in order of their left
//! endpoint with compensated summation, so the result does not depend on the
//! order in which they were refined.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Nodes of the 21-point Kronrod rule on [-1, 1], from the outside in; odd
// indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_340,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Default cap on the number of panels.
pub const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            max_panels: MAX_PANELS,
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: tol,
            max_panels: MAX_PANELS,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = self.abs_tol >= 0.0
            && self.rel_tol >= 0.0
            && (self.abs_tol > 0.0 || self.rel_tol > 0.0);
        if !ok || self.max_panels == 0 {
            return Err(Error::InvalidArgument(format!(
                "invalid quadrature options {self:?}"
            )));
        }
        Ok(())
    }

    /// Allowed total error for an integral of the given size.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // error that cannot be resolved in double precision
    floor: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Self {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let fc = f(center);
        let mut kronrod = WGK[10] * fc;
        let mut gauss = 0.0;
        let mut abs_sum = WGK[10] * fc.abs();
        for i in 0..10 {
            let dx = half * XGK[i];
            let s = f(center - dx) + f(center + dx);
            kronrod += WGK[i] * s;
            abs_sum += WGK[i] * s.abs();
            if i % 2 == 1 {
                gauss += WG[i / 2] * s;
            }
        }
        Panel {
            a,
            b,
            value: kronrod * half,
            error: ((kronrod - gauss) * half).abs(),
            floor: 50.0 * f64::EPSILON * abs_sum * half,
        }
    }

    fn splittable(&self) -> bool {
        let mid = 0.5 * (self.a + self.b);
        self.error > self.floor && mid > self.a && mid < self.b
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Panel set that can be refined and extended by further intervals.
pub(crate) struct Integrator<F> {
    f: F,
    open: BinaryHeap<Panel>,
    done: Vec<Panel>,
    max_panels: usize,
}

impl<F: Fn(f64) -> f64> Integrator<F> {
    pub(crate) fn new(f: F, max_panels: usize) -> Self {
        Self {
            f,
            open: BinaryHeap::new(),
            done: Vec::new(),
            max_panels,
        }
    }

    pub(crate) fn add_interval(&mut self, a: f64, b: f64) {
        if b > a {
            self.open.push(Panel::new(&self.f, a, b));
        }
    }

    fn count(&self) -> usize {
        self.open.len() + self.done.len()
    }

    fn totals(&self) -> (f64, f64, f64) {
        let mut panels: Vec<&Panel> = self.open.iter().chain(self.done.iter()).collect();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = neumaier(panels.iter().map(|p| p.value));
        let error = neumaier(panels.iter().map(|p| p.error));
        let floor = neumaier(panels.iter().map(|p| p.floor));
        (value, error, floor)
    }

    /// Bisects until the summed error estimate is within `target(value)`.
    /// When only roundoff-limited panels remain, the roundoff level is
    /// accepted in place of the target.
    pub(crate) fn refine(&mut self, target: impl Fn(f64) -> f64) -> Result<Integral> {
        // running sums steer the loop; exact ordered sums decide termination
        let (mut value, mut error, _) = self.totals();
        loop {
            if error <= target(value) {
                let (v, e, _) = self.totals();
                (value, error) = (v, e);
                if error <= target(value) {
                    return Ok(self.finish(value, error));
                }
            }
            let Some(worst) = self.open.pop() else {
                let (value, error, floor) = self.totals();
                if error <= target(value) + floor {
                    return Ok(self.finish(value, error));
                }
                return Err(Error::Accuracy {
                    value,
                    error_bound: error,
                });
            };
            if !worst.splittable() {
                self.done.push(worst);
                continue;
            }
            if self.count() + 1 > self.max_panels {
                self.open.push(worst);
                let (value, error, _) = self.totals();
                return Err(Error::Accuracy {
                    value,
                    error_bound: error,
                });
            }
            let mid = 0.5 * (worst.a + worst.b);
            let left = Panel::new(&self.f, worst.a, mid);
            let right = Panel::new(&self.f, mid, worst.b);
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            self.open.push(left);
            self.open.push(right);
        }
    }

    fn finish(&self, value: f64, error: f64) -> Integral {
        Integral {
            value,
            error,
            panels: self.count(),
        }
    }
}

/// Neumaier's compensated sum.
pub(crate) fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `∫_a^b f` to the tolerance in `opts`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    opts.validate()?;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidArgument(format!(
            "need a finite interval a ≤ b, got [{a}, {b}]"
        )));
    }
    let mut integrator = Integrator::new(f, opts.max_panels);
    integrator.add_interval(a, b);
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    integrator.refine(|v| opts.target(v))
}
