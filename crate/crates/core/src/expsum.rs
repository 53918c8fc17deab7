//! Exponential sums `S(ξ) = Σ_{n≤τ} e_p(ξ s_n)` over one least period.
//!
//! Everything is evaluated from the value histogram of a period:
//! `S(ξ) = Σ_c hist[c] · e_p(ξ c)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::ff::{ExtElem, ExtField, FiniteField};
use crate::guard;
use crate::lrs::{LinRecSeq, Period};

/// `e_m(j) = exp(2πi j / m)`.
pub fn e(j: u64, m: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (j % m) as f64 / m as f64)
}

/// Lookup table `e_m(0), …, e_m(m−1)`.
pub fn phase_table(m: u64) -> Vec<Complex64> {
    (0..m).map(|j| e(j, m)).collect()
}

/// Counts of `s_n = c` for `n ∈ [1, τ]`.
pub fn histogram(seq: &LinRecSeq, tau: u64) -> Vec<u64> {
    let mut hist = vec![0u64; seq.p() as usize];
    for v in seq.iter().skip(1).take(tau as usize) {
        hist[v as usize] += 1;
    }
    hist
}

/// `Σ_c hist[c] e_p(ξc)` using a precomputed phase table of length `p`.
pub fn eval_histogram(hist: &[u64], table: &[Complex64], xi: u64) -> Complex64 {
    let p = table.len() as u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, &h) in hist.iter().enumerate() {
        if h != 0 {
            acc += table[arith::mul_mod(xi % p, c as u64, p) as usize] * h as f64;
        }
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct SumProfile {
    pub p: u64,
    pub tau: u64,
    pub degenerate: bool,
    pub histogram: Vec<u64>,
    /// `S(ξ)` for `ξ = 0, …, p−1`.
    pub sums: Vec<Complex64>,
    pub max_xi: u64,
    pub max_abs: f64,
    /// `S(1)`.
    pub s1: Complex64,
    /// `−log_p(max_abs/τ)`, clamped at 0; `None` when every nontrivial sum vanishes.
    pub empirical_delta: Option<f64>,
}

impl SumProfile {
    /// `Σ_ξ |S(ξ)|²` and `p Σ_c hist[c]²`.
    pub fn parseval(&self) -> (f64, f64) {
        let lhs = self.sums.iter().map(|s| s.norm_sqr()).sum();
        let rhs = self.p as f64 * self.histogram.iter().map(|&h| (h as f64) * (h as f64)).sum::<f64>();
        (lhs, rhs)
    }
}

/// Profile over the least period of `seq`.
pub fn profile(seq: &LinRecSeq) -> Result<SumProfile> {
    let period = seq.least_period()?;
    profile_with_period(seq, period)
}

/// Profile over a period already known to the caller.
pub fn profile_with_period(seq: &LinRecSeq, period: Period) -> Result<SumProfile> {
    let limit = guard::max_iterations();
    if period.tau > limit {
        return Err(Error::guard("period length", period.tau, limit));
    }
    let hist = histogram(seq, period.tau);
    Ok(profile_from_histogram(seq.p(), period, hist))
}

/// Builds the profile of an arbitrary F_p-valued histogram summing to `period.tau`.
pub fn profile_from_histogram(p: u64, period: Period, hist: Vec<u64>) -> SumProfile {
    let table = phase_table(p);
    let sums: Vec<Complex64> = (0..p)
        .into_par_iter()
        .map(|xi| eval_histogram(&hist, &table, xi))
        .collect();
    let (max_xi, max_abs) = max_nontrivial(&sums);
    let tau = period.tau;
    let empirical_delta = if max_abs <= 0.0 {
        None
    } else if max_abs >= tau as f64 {
        Some(0.0)
    } else {
        Some(-(max_abs / tau as f64).ln() / (p as f64).ln())
    };
    SumProfile {
        p,
        tau,
        degenerate: period.degenerate,
        s1: sums.get(1).copied().unwrap_or_default(),
        histogram: hist,
        sums,
        max_xi,
        max_abs,
        empirical_delta,
    }
}

/// Largest `|S(ξ)|` over `ξ ≠ 0`, smallest ξ on ties.
fn max_nontrivial(sums: &[Complex64]) -> (u64, f64) {
    let mut best = (1u64, f64::NEG_INFINITY);
    for (xi, s) in sums.iter().enumerate().skip(1) {
        let a = s.norm();
        if a > best.1 {
            best = (xi as u64, a);
        }
    }
    (best.0, best.1.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KorobovReport {
    pub bound: f64,
    pub max_abs: f64,
    pub satisfied: bool,
    pub ratio: f64,
}

/// Compares `max_abs` with `p^{r/2}`.
pub fn korobov_check(profile: &SumProfile, r: usize) -> KorobovReport {
    let bound = (profile.p as f64).powf(r as f64 / 2.0);
    KorobovReport {
        bound,
        max_abs: profile.max_abs,
        satisfied: profile.max_abs <= bound + 1e-6,
        ratio: profile.max_abs / bound,
    }
}

/// Largest `N` with `p^N ≤ x`.
pub fn log_floor(p: u64, x: u128) -> u32 {
    let mut n = 0;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(p as u128) {
        if next > x {
            break;
        }
        acc = next;
        n += 1;
    }
    n
}

/// `Σ_{1≤n≤N} e_p(ξ s_n)` with `N = ⌊log x / log p⌋`, as whole periods plus a tail.
pub fn ranged_sum(seq: &LinRecSeq, x_bound: u128, xi: u64) -> Result<Complex64> {
    let p = seq.p();
    if x_bound < p as u128 {
        return Err(Error::invalid(format!("x = {x_bound} is below p = {p}")));
    }
    let n = log_floor(p, x_bound) as u64;
    let tau = seq.least_period()?.tau;
    let (q, rest) = (n / tau, n % tau);
    let table = phase_table(p);
    let mut acc = Complex64::new(0.0, 0.0);
    if q > 0 {
        let hist = histogram(seq, tau);
        acc += eval_histogram(&hist, &table, xi) * q as f64;
    }
    for v in seq.iter().skip(1).take(rest as usize) {
        acc += table[arith::mul_mod(xi % p, v, p) as usize];
    }
    Ok(acc)
}

/// `⟨b, n⟩ = Σ_j b_j n_j` over the base-`l` digits of `b` and `n`.
pub fn digit_inner(b: u64, n: u64, l: u64) -> u64 {
    let (mut b, mut n, mut acc) = (b, n, 0u64);
    while b > 0 && n > 0 {
        acc = arith::add_mod(acc, arith::mul_mod(b % l, n % l, l), l);
        b /= l;
        n /= l;
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct NonlinearityReport {
    pub ell: u64,
    pub r: usize,
    pub tau: u64,
    /// `W(b)` for `b = 0, …, ℓ^r − 1`.
    pub values: Vec<Complex64>,
    pub max_b: u64,
    pub max_abs: f64,
    /// `τ^{3/4} r^{1/4} ℓ^{r/8}`.
    pub sw_bound: f64,
}

/// `W(b) = Σ_{n≤τ} e_ℓ(s_n + ⟨b, n⟩)` for every `b < ℓ^r`, by an
/// `r`-dimensional DFT over digit vectors.
pub fn nonlinearity(seq: &LinRecSeq) -> Result<NonlinearityReport> {
    let l = seq.p();
    let r = seq.order();
    let size = arith::checked_pow(l, r as u32)
        .filter(|&s| s <= guard::NONLINEARITY_MAX)
        .ok_or_else(|| {
            Error::guard(
                "ℓ^r",
                (l as u128).saturating_pow(r as u32),
                guard::NONLINEARITY_MAX as u128,
            )
        })?;
    let tau = seq.least_period()?.tau;
    let table = phase_table(l);

    let mut data = vec![Complex64::new(0.0, 0.0); size as usize];
    for (n, v) in seq.iter().enumerate().skip(1).take(tau as usize) {
        data[n] = table[v as usize];
    }

    // Digit j of the flat index has stride ℓ^j; the transform along each
    // axis uses the positive-sign kernel e_ℓ(b_j n_j).
    let mut planner = rustfft::FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(l as usize);
    let l = l as usize;
    let mut line = vec![Complex64::new(0.0, 0.0); l];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut stride = 1usize;
    for _ in 0..r {
        let block = stride * l;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + off + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + off + k * stride] = *v;
                }
            }
        }
        stride = block;
    }

    let (max_b, max_abs) = data
        .iter()
        .enumerate()
        .fold((0u64, f64::NEG_INFINITY), |best, (b, w)| {
            let a = w.norm();
            if a > best.1 {
                (b as u64, a)
            } else {
                best
            }
        });
    let sw_bound = (tau as f64).powf(0.75) * (r as f64).powf(0.25) * (l as f64).powf(r as f64 / 8.0);
    Ok(NonlinearityReport {
        ell: l as u64,
        r,
        tau,
        values: data,
        max_b,
        max_abs,
        sw_bound,
    })
}

/// `Σ_{1≤n≤t} e_p(Tr(c · αⁿ))` with `t = ord(α)`.
pub fn gauss_subgroup_sum(ext: &ExtField, alpha: &ExtElem, c: &ExtElem) -> Result<Complex64> {
    if ext.is_zero(alpha) || ext.is_zero(c) {
        return Err(Error::ZeroElement);
    }
    let t = ext.mult_order(alpha)?;
    let limit = guard::max_iterations();
    if t > limit {
        return Err(Error::guard("multiplicative order", t, limit));
    }
    let p = ext.p();
    let table = phase_table(p);
    let mut z = c.clone();
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..t {
        z = ext.mul(&z, alpha);
        acc += table[ext.trace(&z) as usize];
    }
    Ok(acc)
}
