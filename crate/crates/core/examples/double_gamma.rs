//! log Γ₂(w) split into expansion terms and remainder for several M. The
//! total does not depend on M.

use cmgamma::expansions::loggamma2;

fn main() -> cmgamma::Result<()> {
    for w in [1.0, 3.0, 10.0] {
        for m in [2, 3, 4, 6, 8] {
            let e = loggamma2(w, m, 1e-14)?;
            println!(
                "w = {w:>4} M = {m}: main {:+.15e} remainder {:+.6e} total {:+.15e} sign_check {}",
                e.main,
                e.remainder,
                e.total(),
                e.sign_check
            );
        }
    }
    Ok(())
}
