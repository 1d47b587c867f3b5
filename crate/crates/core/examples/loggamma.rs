//! log Γ(x) enclosed by consecutive Stirling partial sums, and the Euler
//! remainder R_n(x) as a Laplace transform.

use cmgamma::expansions::{loggamma, loggamma_partial};
use cmgamma::kernels::{KernelId, KernelKind};
use cmgamma::quadrature::{binet_integral, laplace};

fn main() -> cmgamma::Result<()> {
    for x in [0.5, 1.0, 6.0, 30.5] {
        let b = loggamma(x, 1e-12)?;
        println!(
            "log Γ({x}) ∈ [{:.15}, {:.15}]  n = {}, shift = {}",
            b.lower, b.upper, b.n_used, b.reduction_shift
        );
    }

    // partial sums alternate around the truth
    let x = 5.0;
    let truth = loggamma_partial(x, 0)? + binet_integral(x, 1e-14)?.value;
    for n in 0..=4 {
        let r = laplace(KernelId::new(KernelKind::R, n, 0)?, x, 1e-15)?;
        println!(
            "n = {n}: partial - log Γ = {:+.3e}, R_n(5) = {:.6e} ± {:.0e}",
            loggamma_partial(x, n)? - truth,
            r.value,
            r.abs_error_estimate + r.tail_bound
        );
    }
    Ok(())
}
