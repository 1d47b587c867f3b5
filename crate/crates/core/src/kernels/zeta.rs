//! Normalized Hurwitz tails `Ẑ_K(s) = Σ_{k>K} ((K+1)/k)^s`.
//!
//! The kernel series split `Σ_k` into an explicit head `k ≤ K` and a tail that
//! is re-expanded in powers of `t/(2πk)`; every tail coefficient is one of
//! these sums. Normalizing by `(K+1)^s` keeps them in `[1, 1 + (K+1)/(s-1)]`,
//! so no under- or overflow occurs however large `s` gets.

use std::sync::OnceLock;

use crate::bernoulli::RationalTable;

const K_MAX: usize = 1024;
const S_MIN: u32 = 2;
const S_MAX: u32 = 256;
const S_COUNT: usize = (S_MAX - S_MIN + 1) as usize;

struct Table {
    // row-major in K, then s
    data: Vec<f64>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut data = vec![0.0; (K_MAX + 1) * S_COUNT];
        for s in S_MIN..=S_MAX {
            let col = (s - S_MIN) as usize;
            let mut z = normalized_tail_direct(K_MAX, s);
            data[K_MAX * S_COUNT + col] = z;
            // Ẑ_K = 1 + ((K+1)/(K+2))^s Ẑ_{K+1}; only positive additions.
            for k in (0..K_MAX).rev() {
                z = 1.0 + ratio_pow(k + 1, k + 2, s) * z;
                data[k * S_COUNT + col] = z;
            }
        }
        Table { data }
    })
}

/// `Σ_{k>K} ((K+1)/k)^s` for integer `s ≥ 2`.
pub fn normalized_tail(k_head: usize, s: u32) -> f64 {
    debug_assert!(s >= S_MIN, "zeta tail diverges for s = {s}");
    if k_head <= K_MAX && s <= S_MAX {
        table().data[k_head * S_COUNT + (s - S_MIN) as usize]
    } else {
        normalized_tail_direct(k_head, s)
    }
}

/// `(a/b)^s` for integers `0 < a ≤ b`. Rounding `a/b` first and raising it to
/// a high power would multiply its relative error by `s`.
fn ratio_pow(a: usize, b: usize, s: u32) -> f64 {
    (-(s as f64) * ((b - a) as f64 / a as f64).ln_1p()).exp()
}

/// Direct summation up to `N - 1`, then Euler–Maclaurin from `N`.
fn normalized_tail_direct(k_head: usize, s: u32) -> f64 {
    let s_f = s as f64;
    let n = (k_head + 1).max(s as usize + 16);

    let mut head = 0.0;
    for k in (k_head + 1..n).rev() {
        head += ratio_pow(k_head + 1, k, s);
    }

    // Σ_{k≥N} k^{-s} = N^{1-s}/(s-1) + N^{-s}/2
    //                 + Σ_m B_{2m}/(2m)! · s(s+1)···(s+2m-2) · N^{-s-2m+1}
    let nf = n as f64;
    let bern = RationalTable::shared();
    let mut em = nf / (s_f - 1.0) + 0.5;
    let mut rising = s_f; // s(s+1)...(s+2m-2)
    let mut fact = 2.0; // (2m)!
    let mut npow = 1.0 / nf; // N^{1-2m}
    for m in 1..=12usize {
        let b = bern
            .bernoulli_f64(2 * m)
            .expect("shared table covers index 24");
        let term = b / fact * rising * npow;
        em += term;
        if term.abs() < 1e-20 * em {
            break;
        }
        rising *= (s_f + 2.0 * m as f64 - 1.0) * (s_f + 2.0 * m as f64);
        fact *= (2 * m + 1) as f64 * (2 * m + 2) as f64;
        npow /= nf * nf;
    }
    head + ratio_pow(k_head + 1, n, s) * em
}
