//! The fractional integral I_α of a density, which characterizes complete
//! monotonicity of non-integer order.

use cmgamma::expansions::lgamma;
use cmgamma::quadrature::fractional_integral;

fn main() -> cmgamma::Result<()> {
    // I_α(1)(t) = t^α / Γ(α + 1)
    for alpha in [0.25, 0.5, 1.5, 2.0] {
        let t = 2.0;
        let v = fractional_integral(|_| 1.0, alpha, t, 1e-13)?;
        let exact = t.powf(alpha) / lgamma(alpha + 1.0)?.exp();
        println!("α = {alpha}: I_α(1)(2) = {v:.15} (exact {exact:.15})");
    }
    let v = fractional_integral(|s: f64| (-s).exp(), 0.5, 1.0, 1e-13)?;
    println!("I_0.5(e^(-s))(1) = {v:.15}");
    Ok(())
}
