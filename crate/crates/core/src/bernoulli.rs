//! Exact Bernoulli numbers, Bernoulli polynomials and their order-two
//! ("double") counterparts.
//!
//! Everything here is kept in arbitrary-precision rationals. Floats appear only
//! when a caller asks for them through the `*_f64` accessors, which round the
//! exact value once.

use std::io::Write;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Table limit used when no other is requested.
pub const DEFAULT_MAX_INDEX: usize = 60;

/// Limit of the process-wide table used by the kernel evaluators. The Taylor
/// expansions of `V_0` carried out to double-double accuracy reach indices
/// near 100.
pub const SHARED_MAX_INDEX: usize = 128;

/// Polynomial with exact rational coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRational {
    coefficients: Vec<Rational>,
}

impl PolyRational {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self {
            coefficients: Vec::new(),
        }
    }

    /// Coefficients, constant term first. Empty for the zero polynomial.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coefficients_f64()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.coefficients.iter().map(rational_to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Exact `∫_0^1 u^j p(u) du`.
    pub fn moment(&self, j: usize) -> Rational {
        self.coefficients
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, c)| {
                acc + c / Rational::from_integer(BigInt::from(i + j + 1))
            })
    }

    /// Exact `∫_0^1 p(u) du`.
    pub fn integral_unit(&self) -> Rational {
        self.moment(0)
    }
}

/// Immutable table of `B_0..B_max` and `B_{2,0}..B_{2,max}`.
///
/// The table is filled eagerly on construction and never mutated, so a shared
/// reference can be read from any number of threads.
#[derive(Debug, Clone)]
pub struct RationalTable {
    max_index: usize,
    binomials: Vec<Vec<BigInt>>,
    bernoulli: Vec<Rational>,
    double_bernoulli: Vec<Rational>,
    bernoulli_f64: Vec<f64>,
}

impl Default for RationalTable {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_INDEX)
    }
}

impl RationalTable {
    pub fn new(max_index: usize) -> Self {
        // Pascal rows 0..=max_index+1; the Bernoulli recurrence needs C(k+1, j).
        let mut binomials: Vec<Vec<BigInt>> = Vec::with_capacity(max_index + 2);
        binomials.push(vec![BigInt::one()]);
        for n in 1..=max_index + 1 {
            let prev = &binomials[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigInt::one());
            for j in 1..n {
                row.push(&prev[j - 1] + &prev[j]);
            }
            row.push(BigInt::one());
            binomials.push(row);
        }

        // sum_{j=0}^{k} C(k+1, j) B_j = 0
        let mut bernoulli: Vec<Rational> = Vec::with_capacity(max_index + 1);
        bernoulli.push(Rational::one());
        for k in 1..=max_index {
            if k >= 3 && k % 2 == 1 {
                bernoulli.push(Rational::zero());
                continue;
            }
            let row = &binomials[k + 1];
            let s = bernoulli
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_zero())
                .fold(Rational::zero(), |acc, (j, b)| {
                    acc + b * Rational::from_integer(row[j].clone())
                });
            bernoulli.push(-s / Rational::from_integer(BigInt::from(k + 1)));
        }

        // Cauchy square of t/(e^t - 1): B_{2,k} = sum_j C(k, j) B_j B_{k-j}.
        let double_bernoulli = (0..=max_index)
            .map(|k| {
                (0..=k)
                    .filter(|&j| !bernoulli[j].is_zero() && !bernoulli[k - j].is_zero())
                    .fold(Rational::zero(), |acc, j| {
                        acc + Rational::from_integer(binomials[k][j].clone())
                            * &bernoulli[j]
                            * &bernoulli[k - j]
                    })
            })
            .collect();

        let bernoulli_f64 = bernoulli.iter().map(rational_to_f64).collect();

        Self {
            max_index,
            binomials,
            bernoulli,
            double_bernoulli,
            bernoulli_f64,
        }
    }

    /// Process-wide table with limit [`SHARED_MAX_INDEX`], built on first use.
    pub fn shared() -> &'static RationalTable {
        static TABLE: OnceLock<RationalTable> = OnceLock::new();
        TABLE.get_or_init(|| RationalTable::new(SHARED_MAX_INDEX))
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    fn check(&self, index: usize) -> Result<()> {
        if index > self.max_index {
            Err(Error::TableLimit {
                index,
                max: self.max_index,
            })
        } else {
            Ok(())
        }
    }

    /// Exact binomial coefficient `C(n, k)` for `n ≤ max_index + 1`.
    pub fn binomial(&self, n: usize, k: usize) -> Result<BigInt> {
        if n > self.max_index + 1 {
            return Err(Error::TableLimit {
                index: n,
                max: self.max_index + 1,
            });
        }
        Ok(if k > n {
            BigInt::zero()
        } else {
            self.binomials[n][k].clone()
        })
    }

    pub fn bernoulli_number(&self, k: usize) -> Result<Rational> {
        self.check(k)?;
        Ok(self.bernoulli[k].clone())
    }

    pub fn bernoulli_f64(&self, k: usize) -> Result<f64> {
        self.check(k)?;
        Ok(self.bernoulli_f64[k])
    }

    /// `B_m(u) = sum_j C(m, j) B_j u^{m-j}`.
    pub fn bernoulli_poly(&self, m: usize) -> Result<PolyRational> {
        self.check(m)?;
        let mut coeffs = vec![Rational::zero(); m + 1];
        for j in 0..=m {
            coeffs[m - j] =
                Rational::from_integer(self.binomials[m][j].clone()) * &self.bernoulli[j];
        }
        Ok(PolyRational::new(coeffs))
    }

    pub fn double_bernoulli_number(&self, k: usize) -> Result<Rational> {
        self.check(k)?;
        Ok(self.double_bernoulli[k].clone())
    }

    /// `B_{2,k}(x) = sum_j C(k, j) B_{2,j} x^{k-j}`.
    pub fn double_bernoulli_poly(&self, k: usize) -> Result<PolyRational> {
        self.check(k)?;
        let mut coeffs = vec![Rational::zero(); k + 1];
        for j in 0..=k {
            coeffs[k - j] =
                Rational::from_integer(self.binomials[k][j].clone()) * &self.double_bernoulli[j];
        }
        Ok(PolyRational::new(coeffs))
    }

    /// Writes `index,numerator,denominator` rows for `0..=max` as CSV.
    pub fn write_csv<W: Write>(&self, writer: W, max: usize, double: bool) -> Result<()> {
        self.check(max)?;
        let source = if double {
            &self.double_bernoulli
        } else {
            &self.bernoulli
        };
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv output failed: {e}"));
        w.write_record(["index", "numerator", "denominator"])
            .map_err(io)?;
        for (k, b) in source.iter().enumerate().take(max + 1) {
            w.write_record([k.to_string(), b.numer().to_string(), b.denom().to_string()])
                .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

/// Correctly rounded conversion of an exact rational.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Double-double approximation of an exact rational (about 32 digits).
pub fn rational_to_twofloat(r: &Rational) -> TwoFloat {
    let hi = rational_to_f64(r);
    match Rational::from_float(hi) {
        Some(h) => {
            let lo = rational_to_f64(&(r - h));
            TwoFloat::new_add(hi, lo)
        }
        None => TwoFloat::from(hi),
    }
}

/// `k!` as an exact integer.
pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}
