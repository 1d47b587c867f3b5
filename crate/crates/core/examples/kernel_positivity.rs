//! Positivity of kernel derivatives, the t-side counterpart of the
//! complete monotonicity checks.

use cmgamma::kernels::{HelperKind, KernelKind};
use cmgamma::monotonicity::{helper_positivity_check, kernel_positivity_check, log_grid};

fn main() -> cmgamma::Result<()> {
    let grid = log_grid(1e-3, 50.0, 20);
    for (kind, n, orders) in [
        (KernelKind::R, 2, vec![0, 1, 2]),
        (KernelKind::Lambda, 3, vec![0, 1, 2]),
        (KernelKind::P, 3, vec![0, 1, 2]),
    ] {
        let report = kernel_positivity_check(kind, n, &orders, &grid)?;
        println!(
            "{kind:?}_{n} orders {orders:?}: {:?}, smallest value {:.3e}",
            report.verdict, report.min_margin
        );
        for v in &report.vanishing {
            println!("    derivative {} at t = 0: {:e}", v.order, v.value);
        }
    }
    let report = helper_positivity_check(HelperKind::H, 3, &[0, 1, 2, 3], &grid)?;
    println!("h_3 orders 0..=3: {:?}", report.verdict);

    // beyond the claimed order the check refuses to run
    match kernel_positivity_check(KernelKind::R, 1, &[3], &grid) {
        Err(e) => println!("r_1 order 3: {e}"),
        Ok(r) => println!("r_1 order 3: {:?}", r.verdict),
    }
    Ok(())
}
