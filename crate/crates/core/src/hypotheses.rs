//! Order and gcd hypotheses on the roots of a characteristic polynomial, and
//! resultant certificates listing the primes where small-order roots can occur.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{self, Exponent};
use crate::error::{Error, Result};
use crate::guard;
use crate::lrs::SpectralData;

fn big(v: impl Into<BigInt>) -> BigInt {
    v.into()
}

/// `x^k · p^m < y^k` for `ε = m/k`, i.e. `x · p^ε < y`.
fn scaled_below(x: u64, eps: &Exponent, p: u64, y: u64) -> bool {
    let k = eps.den as u32;
    big(x).pow(k) * BigInt::from(arith::big_pow(p, eps.num)) < big(y).pow(k)
}

#[derive(Debug, Clone, Serialize)]
pub struct RootData {
    pub degree: usize,
    pub tau: u64,
    /// `max_{d | r, d < r} gcd(τ_i, p^d − 1)` with the maximizing `d`.
    pub worst_gcd: Option<u64>,
    pub worst_d: Option<u32>,
    pub condition_a: Option<bool>,
    pub condition_a_conservative: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub p: u64,
    /// Common degree of the irreducible factors, when they agree.
    pub r: Option<usize>,
    pub order: usize,
    pub period: u64,
    pub eps: Exponent,
    pub eps2: Exponent,
    pub roots: Vec<RootData>,
    pub condition_a: Option<bool>,
    pub condition_a_conservative: Option<bool>,
    pub condition_b: Option<bool>,
    pub condition_b_conservative: Option<bool>,
    /// Pair `(i, j, gcd(τ_i, τ_j))` with the smallest gcd.
    pub best_pair: Option<(usize, usize, u64)>,
    /// Irreducible case: `max_{d|r,d<r} gcd(τ, p^d − 1) < τ p^{−ε}` for the period.
    pub shparlinski: Option<bool>,
    /// `τ > p^{R/2}` with `R` the order.
    pub korobov_range: bool,
    /// `τ > p^{r/p(r)+ε}`.
    pub improvement_range: Option<bool>,
    pub notes: Vec<String>,
}

/// Largest `gcd(t, p^d − 1)` over proper divisors `d` of `r`.
pub fn worst_proper_gcd(t: u64, p: u64, r: usize) -> Option<(u64, u32)> {
    (1..r as u32)
        .filter(|d| r as u32 % d == 0)
        .map(|d| {
            let m = arith::big_pow(p, d as u64) - 1u32;
            let g = (m % t).to_u64().unwrap();
            (arith::gcd(t, g), d)
        })
        .max_by_key(|&(g, d)| (g, std::cmp::Reverse(d)))
}

/// Evaluates every hypothesis from the root orders and degrees.
pub fn check_orders(
    p: u64,
    degrees: &[usize],
    taus: &[u64],
    period: u64,
    eps: Exponent,
    eps2: Exponent,
) -> Result<ConditionReport> {
    if degrees.len() != taus.len() || degrees.is_empty() {
        return Err(Error::invalid("one degree per root order is required"));
    }
    let order: usize = degrees.iter().sum();
    let common = degrees.iter().all(|&d| d == degrees[0]).then_some(degrees[0]);
    let applicable = common.filter(|&r| r > 1);
    let ceil_eps = eps.ceil_pow(p);
    let mut notes = Vec::new();

    let roots: Vec<RootData> = degrees
        .iter()
        .zip(taus)
        .map(|(&deg, &tau)| {
            let worst = worst_proper_gcd(tau, p, deg);
            let (a, ac) = match (applicable, worst) {
                (Some(_), Some((g, _))) => (
                    Some(scaled_below(g, &eps, p, tau)),
                    Some((g as u128) * (ceil_eps as u128) < tau as u128),
                ),
                _ => (None, None),
            };
            RootData {
                degree: deg,
                tau,
                worst_gcd: worst.map(|w| w.0),
                worst_d: worst.map(|w| w.1),
                condition_a: a,
                condition_a_conservative: ac,
            }
        })
        .collect();

    let any = |f: fn(&RootData) -> Option<bool>| applicable.map(|_| roots.iter().any(|r| f(r) == Some(true)));
    let condition_a = any(|r| r.condition_a);
    let condition_a_conservative = any(|r| r.condition_a_conservative);

    let mut best_pair = None;
    for i in 0..taus.len() {
        for j in i + 1..taus.len() {
            let g = arith::gcd(taus[i], taus[j]);
            if best_pair.map_or(true, |(_, _, b)| g < b) {
                best_pair = Some((i, j, g));
            }
        }
    }
    let (condition_b, condition_b_conservative) = match (applicable, best_pair) {
        (Some(_), Some((_, _, g))) => (
            Some(eps2.exceeds(g, p)),
            Some(g < eps2.floor_pow(p)),
        ),
        _ => (None, None),
    };

    match common {
        None => notes.push("factors have mixed degrees; (a) and (b) are not applicable".into()),
        Some(1) => notes.push("all factors are linear (r = 1); (a) and (b) are not applicable".into()),
        _ => {}
    }
    if applicable.is_some() && taus.len() == 1 {
        notes.push("single irreducible factor; (b) has no pair to test".into());
    }

    let shparlinski = match (taus.len(), degrees[0]) {
        (1, r) if r > 1 => {
            let (g, _) = worst_proper_gcd(period, p, r).unwrap();
            Some(scaled_below(g, &eps, p, period))
        }
        _ => None,
    };
    let korobov_range = Exponent::new(order as u64, 2)?.exceeded_by(period, p);
    let improvement_range = applicable
        .map(|r| improvement_range(p, r, period, eps))
        .transpose()?
        .map(|rep| rep.main_range);

    Ok(ConditionReport {
        p,
        r: common,
        order,
        period,
        eps,
        eps2,
        roots,
        condition_a,
        condition_a_conservative,
        condition_b,
        condition_b_conservative,
        best_pair,
        shparlinski,
        korobov_range,
        improvement_range,
        notes,
    })
}

/// Hypothesis report for a decomposed sequence.
pub fn check_conditions(data: &SpectralData, eps: Exponent, eps2: Exponent) -> Result<ConditionReport> {
    check_orders(
        data.p,
        &data.degrees(),
        &data.root_orders(),
        data.period.tau,
        eps,
        eps2,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeReport {
    pub p: u64,
    pub r: usize,
    pub tau: u64,
    pub p_of_r: u64,
    /// `r/p(r) + ε`.
    pub main_exponent: Exponent,
    /// `r/2 − 1/6 + ε`.
    pub shparlinski_exponent: Exponent,
    pub main_range: bool,
    pub shparlinski_range: bool,
    pub improvement: bool,
}

/// Compares `τ` with `p^{r/p(r)+ε}` and `p^{r/2−1/6+ε}`.
pub fn improvement_range(p: u64, r: usize, tau: u64, eps: Exponent) -> Result<RangeReport> {
    if r < 2 {
        return Err(Error::invalid("r must be at least 2"));
    }
    let pr = arith::least_prime_divisor(r as u64).unwrap();
    let main_exponent = Exponent::new(r as u64, pr)?.add(&eps);
    let shparlinski_exponent = Exponent::new(3 * r as u64 - 1, 6)?.add(&eps);
    Ok(RangeReport {
        p,
        r,
        tau,
        p_of_r: pr,
        main_exponent,
        shparlinski_exponent,
        main_range: main_exponent.exceeded_by(tau, p),
        shparlinski_range: shparlinski_exponent.exceeded_by(tau, p),
        improvement: pr > 2,
    })
}

/// Multiplicative orders of `α`, `β` and `αβ^{−1}` for the roots of
/// `x² + ax + b`, when they are roots of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootOfUnityReport {
    pub alpha: Option<u64>,
    pub beta: Option<u64>,
    pub ratio: Option<u64>,
}

impl RootOfUnityReport {
    pub fn any(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some() || self.ratio.is_some()
    }

    /// Smallest order among the three, if any.
    pub fn min_order(&self) -> Option<u64> {
        [self.alpha, self.beta, self.ratio].into_iter().flatten().min()
    }
}

const ROOT_OF_UNITY_SCAN: u64 = 420;

/// Least `t ≤ 420` with `x^t ≡ 1 mod (x² + ax + b)` over ℤ.
fn cyclotomic_order(a: i64, b: i64) -> Option<u64> {
    let (a, b) = (a as i128, b as i128);
    // x^t = c0 + c1 x
    let (mut c0, mut c1) = (1i128, 0i128);
    for t in 1..=ROOT_OF_UNITY_SCAN {
        let n0 = c1.checked_mul(-b)?;
        let n1 = c0.checked_sub(c1.checked_mul(a)?)?;
        (c0, c1) = (n0, n1);
        if c0 == 1 && c1 == 0 {
            return Some(t);
        }
    }
    None
}

/// Order of the root of unity with minimal polynomial `x² − s x + 1`, `|s| ≤ 2`.
fn trace_order(s: i64) -> Option<u64> {
    match s {
        2 => Some(1),
        -2 => Some(2),
        -1 => Some(3),
        0 => Some(4),
        1 => Some(6),
        _ => None,
    }
}

fn integer_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

pub fn root_of_unity_test(a: i64, b: i64) -> Result<RootOfUnityReport> {
    if b == 0 {
        return Err(Error::invalid("b = 0"));
    }
    let disc = big(a) * big(a) - big(b) * 4i64;
    let unit_order = |r: &BigInt| -> Option<u64> {
        if r.is_one() {
            Some(1)
        } else if *r == big(-1) {
            Some(2)
        } else {
            None
        }
    };
    let (alpha, beta) = match integer_sqrt(&disc) {
        Some(s) => {
            let r1 = (big(-a) + &s) / 2;
            let r2 = (big(-a) - &s) / 2;
            (unit_order(&r1), unit_order(&r2))
        }
        None => {
            let o = if b == 1 && a.abs() <= 2 { cyclotomic_order(a, b) } else { None };
            (o, o)
        }
    };
    // αβ^{−1} + βα^{−1} = (a² − 2b)/b.
    let num = big(a) * big(a) - big(b) * 2i64;
    let ratio = if num.is_multiple_of(&big(b)) {
        (num / big(b)).to_i64().and_then(trace_order)
    } else {
        None
    };
    Ok(RootOfUnityReport { alpha, beta, ratio })
}

fn as_decimal<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExclusionCertificate {
    pub a: i64,
    pub b: i64,
    pub t: u32,
    pub degree_g: u64,
    #[serde(serialize_with = "as_decimal")]
    pub resultant: BigInt,
    pub crt_primes: usize,
    pub bound_bits: u64,
    /// Prime factors of `|Res|` found by trial division up to the scan bound.
    pub factors: Vec<(u64, u32)>,
    #[serde(serialize_with = "as_decimal")]
    pub cofactor: BigInt,
    pub scan_bound: u64,
    /// Primes `ℓ ≤ scan_bound` dividing `Res · (a² − 4b) · b`.
    pub excluded_primes: Vec<u64>,
    pub root_of_unity: Option<RootOfUnityReport>,
}

/// `deg G_T = Σ_{t≤T} 3t`.
pub fn g_degree(t: u32) -> u64 {
    3 * (t as u64) * (t as u64 + 1) / 2
}

/// `Res(x² + ax + b, G_T) mod q`, evaluated as the norm of `G_T(x) mod ω`.
fn resultant_mod(a: i64, b: i64, t: u32, q: u64) -> u64 {
    let am = arith::reduce_i128(a as i128, q);
    let bm = arith::reduce_i128(b as i128, q);
    let mul = |u: (u64, u64), v: (u64, u64)| -> (u64, u64) {
        let hh = arith::mul_mod(u.1, v.1, q);
        let c0 = arith::sub_mod(arith::mul_mod(u.0, v.0, q), arith::mul_mod(bm, hh, q), q);
        let cross = arith::add_mod(arith::mul_mod(u.0, v.1, q), arith::mul_mod(u.1, v.0, q), q);
        (c0, arith::sub_mod(cross, arith::mul_mod(am, hh, q), q))
    };
    let pow_x = |mut e: u64| {
        let (mut acc, mut base) = ((1u64, 0u64), (0u64, 1u64));
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let mut g = (1u64, 0u64);
    for s in 1..=t as u64 {
        let xs = pow_x(s);
        g = mul(g, (arith::sub_mod(xs.0, 1, q), xs.1));
        let x2s = pow_x(2 * s);
        g = mul(g, (arith::sub_mod(x2s.0, arith::pow_mod(bm, s, q), q), x2s.1));
    }
    let (c0, c1) = g;
    let n = arith::mul_mod(c0, c0, q);
    let n = arith::sub_mod(n, arith::mul_mod(am, arith::mul_mod(c0, c1, q), q), q);
    arith::add_mod(n, arith::mul_mod(bm, arith::mul_mod(c1, c1, q), q), q)
}

/// Bit bound on `|Res|` from Hadamard's inequality on the Sylvester matrix,
/// with `‖G_T‖₂ ≤ ∏ ‖x^t − 1‖₁ ‖x^{2t} − b^t‖₁`.
fn hadamard_bits(a: i64, b: i64, t: u32) -> u64 {
    let omega = (1.0 + (a as f64).powi(2) + (b as f64).powi(2)).sqrt().log2();
    let g: f64 = (1..=t)
        .map(|s| 1.0 + (1.0 + (b.unsigned_abs() as f64).powi(s as i32)).log2())
        .sum();
    (g_degree(t) as f64 * omega + 2.0 * g).ceil() as u64 + 2
}

/// Word-sized primes used for CRT, largest first.
fn crt_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut q = (1u64 << 62) - 1;
    while out.len() < count {
        if arith::is_prime(q) {
            out.push(q);
        }
        q -= 2;
    }
    out
}

/// Exact `Res(x² + ax + b, G_T)` by CRT over enough word-sized primes.
pub fn resultant(a: i64, b: i64, t: u32) -> Result<(BigInt, usize, u64)> {
    if b == 0 {
        return Err(Error::invalid("b = 0"));
    }
    if t == 0 || t > guard::RESULTANT_T_MAX {
        return Err(Error::guard("T", t as u64, guard::RESULTANT_T_MAX as u64));
    }
    let bits = hadamard_bits(a, b, t);
    let count = (bits + 1) as usize / 61 + 1;
    let primes = crt_primes(count);
    let residues: Vec<u64> = primes.par_iter().map(|&q| resultant_mod(a, b, t, q)).collect();

    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&q, &r) in primes.iter().zip(&residues) {
        let xm = x.mod_floor(&big(q)).to_u64().unwrap();
        let mm = m.mod_floor(&big(q)).to_u64().unwrap();
        let k = arith::mul_mod(arith::sub_mod(r, xm, q), arith::inv_mod_prime(mm, q).unwrap(), q);
        x += &m * big(k);
        m *= big(q);
    }
    let half = &m >> 1;
    if x > half {
        x -= &m;
    }
    Ok((x, count, bits))
}

/// Exact resultant certificate with excluded primes up to `scan_bound`.
pub fn resultant_exclusion(a: i64, b: i64, t: u32, scan_bound: u64) -> Result<ExclusionCertificate> {
    let (res, crt_count, bound_bits) = resultant(a, b, t)?;
    let disc = big(a) * big(a) - big(b) * 4i64;
    let primes = arith::primes_up_to(scan_bound);
    let divides = |n: &BigInt, l: u64| n.mod_floor(&big(l)).is_zero();

    let mut factors = Vec::new();
    let mut cofactor = res.abs();
    if !res.is_zero() {
        for &l in &primes {
            let mut e = 0;
            while divides(&cofactor, l) {
                cofactor /= big(l);
                e += 1;
            }
            if e > 0 {
                factors.push((l, e));
            }
        }
    }
    let excluded_primes = if res.is_zero() {
        Vec::new()
    } else {
        primes
            .iter()
            .copied()
            .filter(|&l| divides(&res, l) || divides(&disc, l) || b.unsigned_abs() % l == 0)
            .collect()
    };
    let root_of_unity = if res.is_zero() {
        Some(root_of_unity_test(a, b)?)
    } else {
        None
    };
    Ok(ExclusionCertificate {
        a,
        b,
        t,
        degree_g: g_degree(t),
        resultant: res,
        crt_primes: crt_count,
        bound_bits,
        factors,
        cofactor,
        scan_bound,
        excluded_primes,
        root_of_unity,
    })
}

impl ExclusionCertificate {
    pub fn resultant_sign(&self) -> Sign {
        self.resultant.sign()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_a_primitive_quadratic() {
        let eps = Exponent::new(1, 2).unwrap();
        let rep = check_orders(101, &[2], &[10200], 10200, eps, Exponent::new(1, 4).unwrap()).unwrap();
        assert_eq!(rep.roots[0].worst_gcd, Some(100));
        assert_eq!(rep.condition_a, Some(true));
        assert_eq!(rep.condition_b, None);
        assert_eq!(rep.shparlinski, Some(true));
    }

    #[test]
    fn linear_factors_are_inapplicable() {
        let e = Exponent::new(1, 10).unwrap();
        let rep = check_orders(13, &[1, 1], &[12, 4], 12, e, e).unwrap();
        assert_eq!(rep.condition_a, None);
        assert_eq!(rep.condition_b, None);
        assert!(!rep.notes.is_empty());
    }

    #[test]
    fn root_of_unity_cases() {
        let i = root_of_unity_test(0, 1).unwrap();
        assert_eq!((i.alpha, i.ratio), (Some(4), Some(2)));
        let fib = root_of_unity_test(-1, -1).unwrap();
        assert!(!fib.any());
        assert_eq!(root_of_unity_test(-1, 1).unwrap().alpha, Some(6));
        let split = root_of_unity_test(-6, 5).unwrap(); // α = 5, β = 1
        assert_eq!((split.alpha, split.beta, split.ratio), (None, Some(1), None));
        assert!(root_of_unity_test(1, 0).is_err());
    }

    #[test]
    fn fibonacci_resultant() {
        let (r, _, _) = resultant(-1, -1, 1).unwrap();
        assert_eq!(r.abs(), big(5));
    }

    #[test]
    fn gaussian_resultant_vanishes() {
        let c = resultant_exclusion(0, 1, 4, 100).unwrap();
        assert!(c.resultant.is_zero());
        assert!(c.root_of_unity.unwrap().any());
    }

    #[test]
    fn guards() {
        assert!(resultant(1, 1, guard::RESULTANT_T_MAX + 1).unwrap_err().is_guard());
        assert!(resultant(1, 0, 2).is_err());
    }

    #[test]
    fn range_examples() {
        let e = Exponent::new(1, 100).unwrap();
        let r3 = improvement_range(101, 3, 101 * 101 * 101 - 1, e).unwrap();
        assert!(r3.improvement && r3.main_range && r3.shparlinski_range);
        assert_eq!(r3.main_exponent, Exponent::new(101, 100).unwrap());
        let r2 = improvement_range(101, 2, 200, e).unwrap();
        assert!(!r2.improvement);
        assert!(improvement_range(5, 1, 4, e).is_err());
    }
}
