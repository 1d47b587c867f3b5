use std::sync::OnceLock;

use cmgamma::bernoulli::{Rational, RationalTable};
use cmgamma::expansions::loggamma;
use cmgamma::monotonicity::finite_difference;
use proptest::prelude::*;

fn table() -> &'static RationalTable {
    static T: OnceLock<RationalTable> = OnceLock::new();
    T.get_or_init(|| RationalTable::new(24))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bernoulli_polynomials_reflect(m in 0usize..20, num in 0i64..100) {
        let x = Rational::new(num.into(), 100.into());
        let one = Rational::from_integer(1.into());
        let p = table().bernoulli_poly(m).unwrap();
        let reflected = p.eval(&(one - &x));
        let expected = if m % 2 == 0 { p.eval(&x) } else { -p.eval(&x) };
        prop_assert_eq!(reflected, expected);
    }

    #[test]
    fn loggamma_recurrence(x in 0.1f64..50.0) {
        // an absolute width of 1e-12 is below the rounding floor once log Γ(x) is large
        let tol = |y: f64| 1e-12f64.max(2e-14 * y * y.ln());
        let a = loggamma(x, tol(x)).unwrap();
        let b = loggamma(x + 1.0, tol(x + 1.0)).unwrap();
        let d = b.midpoint() - a.midpoint() - x.ln();
        prop_assert!(d.abs() <= a.width() + b.width() + 4.0 * f64::EPSILON * b.midpoint().abs().max(1.0));
    }

    #[test]
    fn differences_annihilate_low_degree(c in prop::collection::vec(-2.0f64..2.0, 1..6), x in 0.1f64..3.0, h in 0.05f64..0.5) {
        let deg = c.len() - 1;
        let poly = move |t: f64| Ok(c.iter().rev().fold(0.0, |acc, k| acc * t + k));
        let d = finite_difference(&poly, x, h, deg as u32 + 1).unwrap();
        prop_assert!(d.abs() < 1e-11);
    }
}
