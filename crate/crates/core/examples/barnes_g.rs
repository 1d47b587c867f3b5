//! Remainders P_n(x) of the Barnes G expansion. (-1)^n P_n is completely
//! monotonic of order n - 1, so its sign alternates with n.

use cmgamma::expansions::barnesg_remainder;

fn main() -> cmgamma::Result<()> {
    for x in [1.0, 2.0, 5.0, 10.0] {
        let row: Vec<String> = (1..=4)
            .map(|n| barnesg_remainder(n, x, 1e-16).map(|v| format!("{v:+.6e}")))
            .collect::<cmgamma::Result<_>>()?;
        println!("x = {x:>4}: P_1..P_4 = {}", row.join("  "));
    }
    Ok(())
}
