//! The kernel V_n(t) through its three representations, and derived
//! kernels r_n, λ_n, p_n with exact derivatives.

use cmgamma::kernels::{
    kernel_eval, p_series, v_integral, v_recursion, v_series, KernelId, KernelKind,
};

fn main() -> cmgamma::Result<()> {
    println!(
        "{:>3} {:>6} {:>24} {:>24} {:>24}",
        "n", "t", "series", "recursion", "integral"
    );
    for n in 1..=3 {
        for t in [0.01, 1.0, 20.0] {
            let s = v_series(n, t, 1e-13)?.value;
            println!(
                "{n:>3} {t:>6} {s:>24.16e} {:>24.16e} {:>24.16e}",
                v_recursion(n, t)?,
                v_integral(n, t)?
            );
        }
    }

    let t = 2.0;
    for kind in [
        KernelKind::R,
        KernelKind::Lambda,
        KernelKind::P,
        KernelKind::U,
    ] {
        let id = KernelId::new(kind, 2, 1)?;
        let e = kernel_eval(id, t, 1e-14)?;
        println!(
            "{kind:?}_2'({t}) = {:.16e} (bound {:.1e}, {} terms)",
            e.value, e.error_bound, e.terms_used
        );
    }
    println!(
        "p_1(0) = {} (1/12 = {})",
        p_series(1, 0.0, 1e-14)?.value,
        1.0 / 12.0
    );
    Ok(())
}
