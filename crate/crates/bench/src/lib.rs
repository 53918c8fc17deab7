//! Fixtures shared by the benchmarks.

use lrsum_core::{LinRecSeq, PolyFp};

/// An order-`r` sequence modulo `p` whose characteristic polynomial is
/// `x^r − x − 1`, started from `0, …, 0, 1`.
pub fn trinomial_seq(p: u64, r: usize) -> LinRecSeq {
    let mut coeffs = vec![0u64; r];
    coeffs[0] = 1;
    coeffs[1 % r] = (coeffs[1 % r] + 1) % p;
    let mut init = vec![0u64; r];
    init[r - 1] = 1;
    LinRecSeq::new(p, &coeffs, &init).expect("valid recurrence")
}

/// `x^n − x − 1` modulo `p`.
pub fn trinomial(p: u64, n: usize) -> PolyFp {
    let mut c = vec![0i64; n + 1];
    c[0] = -1;
    c[1] -= 1;
    c[n] += 1;
    PolyFp::from_i64s(p, &c)
}
