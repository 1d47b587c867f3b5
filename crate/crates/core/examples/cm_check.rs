//! Complete monotonicity of order r checked through alternating forward
//! differences of x^r f(x).

use cmgamma::expansions::{cm_fixture, FixtureName};
use cmgamma::monotonicity::{cm_order_check, log_grid, CMOrderSpec};

fn main() -> cmgamma::Result<()> {
    // claimed: R_n is CM of order k for k ≤ n
    for (n, r) in [(2, 2.0), (2, 1.5), (1, 2.0)] {
        let f = cm_fixture(FixtureName::RN, n)?;
        let report = cm_order_check(&*f, &CMOrderSpec::with_order(r))?;
        println!(
            "R_{n}, order {r}: {:?}, min scaled margin {:.3e} at {:?}",
            report.verdict, report.min_margin, report.worst
        );
    }

    // 1/(1+x²) is not CM: its second derivative changes sign
    let control = |x: f64| Ok(1.0 / (1.0 + x * x));
    let spec = CMOrderSpec {
        grid: log_grid(0.1, 5.0, 12),
        max_diff_order: 4,
        ..CMOrderSpec::with_order(0.0)
    };
    let report = cm_order_check(&control, &spec)?;
    println!(
        "1/(1+x^2): {:?}, min scaled margin {:.3e}",
        report.verdict, report.min_margin
    );
    Ok(())
}
