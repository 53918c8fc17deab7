//! Hecke eigenvalue sequences at prime powers.
//!
//! For an eigenform of weight `k` and a prime `p ∤ N`,
//! `a(p^{n+2}) = a(p) a(p^{n+1}) − p^{k−1} a(p^n)` with `a(1) = 1`, so
//! `n ↦ a(p^n) mod ℓ` is an order-2 recurrence with characteristic polynomial
//! `x² − a(p) x + p^{k−1}`. For `p | N` the sequence is `a(p)^n`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::expsum;
use crate::ff::{self, ExtField, FiniteField, PrimeField};
use crate::guard;
use crate::lrs::LinRecSeq;

pub const DELTA_WEIGHT: u32 = 12;

/// Exact value of `∏_{n≥1}(1 − qⁿ)^{24}` coefficients shifted by one: `τ(1), …, τ(n_max)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauTable {
    values: Vec<i128>,
}

impl TauTable {
    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    /// `τ(n)` for `1 ≤ n ≤ n_max`.
    pub fn get(&self, n: usize) -> Option<i128> {
        n.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    pub fn values(&self) -> &[i128] {
        &self.values
    }
}

/// Ramanujan τ up to `n_max`, by multiplying the pentagonal expansion of
/// `∏(1 − qⁿ)` into the series 24 times.
pub fn tau_table(n_max: usize) -> Result<TauTable> {
    if n_max > guard::TAU_TABLE_MAX {
        return Err(Error::guard("n_max", n_max as u64, guard::TAU_TABLE_MAX as u64));
    }
    if n_max == 0 {
        return Ok(TauTable { values: Vec::new() });
    }
    let len = n_max; // coefficients of q^0..q^{n_max-1}
    let mut pent: Vec<(usize, bool)> = Vec::new(); // (exponent, negative)
    for j in 1.. {
        let j = j as usize;
        let a = j * (3 * j - 1) / 2;
        if a >= len {
            break;
        }
        pent.push((a, j % 2 == 1));
        let b = j * (3 * j + 1) / 2;
        if b < len {
            pent.push((b, j % 2 == 1));
        }
    }
    let mut f = vec![0i128; len];
    f[0] = 1;
    for _ in 0..24 {
        for n in (0..len).rev() {
            let mut acc = f[n];
            for &(a, neg) in &pent {
                if a > n {
                    break;
                }
                let v = f[n - a];
                acc = if neg { acc.checked_sub(v) } else { acc.checked_add(v) }
                    .ok_or(Error::Overflow("τ table"))?;
            }
            f[n] = acc;
        }
    }
    Ok(TauTable { values: f })
}

/// Eigenform data at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HeckeWire", into = "HeckeWire")]
pub struct HeckeParams {
    pub p: u64,
    pub k: u32,
    pub a_p: BigRational,
    pub level_divides: bool,
}

/// `a_p` is accepted as a JSON integer or as a string `"m"` / `"m/n"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ApWire {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HeckeWire {
    p: u64,
    k: u32,
    a_p: ApWire,
    #[serde(default)]
    level_divides: bool,
}

impl TryFrom<HeckeWire> for HeckeParams {
    type Error = Error;
    fn try_from(w: HeckeWire) -> Result<Self> {
        let a_p = match w.a_p {
            ApWire::Int(v) => BigRational::from_integer(v.into()),
            ApWire::Text(s) => parse_rational(&s)?,
        };
        HeckeParams::new(w.p, w.k, a_p, w.level_divides)
    }
}

impl From<HeckeParams> for HeckeWire {
    fn from(h: HeckeParams) -> Self {
        let a_p = match (h.a_p.is_integer(), h.a_p.to_integer().to_i64()) {
            (true, Some(v)) => ApWire::Int(v),
            _ => ApWire::Text(h.a_p.to_string()),
        };
        HeckeWire {
            p: h.p,
            k: h.k,
            a_p,
            level_divides: h.level_divides,
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|_| Error::invalid(format!("not a rational number: {s:?}")))
}

impl HeckeParams {
    pub fn new(p: u64, k: u32, a_p: BigRational, level_divides: bool) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 2 || k % 2 == 1 {
            return Err(Error::invalid(format!("weight must be even and at least 2, got {k}")));
        }
        let h = HeckeParams {
            p,
            k,
            a_p,
            level_divides,
        };
        if !level_divides && h.discriminant().is_zero() {
            return Err(Error::invalid("a_p² = 4p^{k−1}: characteristic polynomial has a double root"));
        }
        Ok(h)
    }

    pub fn integral(p: u64, k: u32, a_p: i64, level_divides: bool) -> Result<Self> {
        Self::new(p, k, BigRational::from_integer(a_p.into()), level_divides)
    }

    /// The discriminant modular form Δ at `p`, with `a_p = τ(p)`.
    pub fn delta(p: u64) -> Result<Self> {
        let table = tau_table(p as usize)?;
        let t = table.get(p as usize).ok_or_else(|| Error::invalid("p = 0"))?;
        Self::new(p, DELTA_WEIGHT, BigRational::from_integer(t.into()), false)
    }

    /// `p^{k−1}`.
    pub fn norm(&self) -> BigInt {
        BigInt::from(arith::big_pow(self.p, (self.k - 1) as u64))
    }

    /// `a_p² − 4p^{k−1}`.
    pub fn discriminant(&self) -> BigRational {
        &self.a_p * &self.a_p - BigRational::from_integer(self.norm() * 4)
    }

    /// `|a_p| ≤ 2p^{(k−1)/2}`, checked as `a_p² ≤ 4p^{k−1}`.
    pub fn deligne_ok(&self) -> bool {
        self.level_divides || !self.discriminant().is_positive()
    }

    /// `a_p mod ℓ`; fails when the denominator is divisible by ℓ.
    pub fn a_p_mod(&self, ell: u64) -> Result<u64> {
        rational_mod(&self.a_p, ell)
    }
}

/// Reduces an exact rational modulo a prime.
pub fn rational_mod(q: &BigRational, ell: u64) -> Result<u64> {
    let m = BigInt::from(ell);
    let num = q.numer().mod_floor(&m).to_u64().unwrap();
    let den = q.denom().mod_floor(&m).to_u64().unwrap();
    let inv = arith::inv_mod_prime(den, ell)
        .ok_or_else(|| Error::invalid(format!("denominator of {q} is divisible by {ell}")))?;
    Ok(arith::mul_mod(num, inv, ell))
}

/// Exact `a(p^0), …, a(p^{n_max})`.
pub fn hecke_int_seq(params: &HeckeParams, n_max: usize) -> Result<Vec<BigRational>> {
    if n_max > guard::HECKE_EXACT_MAX {
        return Err(Error::guard("n_max", n_max as u64, guard::HECKE_EXACT_MAX as u64));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(BigRational::one());
    if n_max == 0 {
        return Ok(out);
    }
    out.push(params.a_p.clone());
    let c = BigRational::from_integer(params.norm());
    for n in 2..=n_max {
        let next = if params.level_divides {
            &out[n - 1] * &params.a_p
        } else {
            &out[n - 1] * &params.a_p - &c * &out[n - 2]
        };
        out.push(next);
    }
    Ok(out)
}

/// `n ↦ a(p^n) mod ℓ` as a recurrence over F_ℓ.
pub fn hecke_mod_seq(params: &HeckeParams, ell: u64) -> Result<LinRecSeq> {
    if ell == params.p {
        return Err(Error::invalid(format!("ℓ = p = {ell}")));
    }
    if !arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let a = params.a_p_mod(ell)?;
    if params.level_divides {
        if a == 0 {
            return Err(Error::DegenerateSequence);
        }
        return LinRecSeq::geometric(ell, a);
    }
    let c = arith::pow_mod(params.p % ell, (params.k - 1) as u64, ell);
    LinRecSeq::new(ell, &[arith::sub_mod(0, c, ell), a], &[1, a])
}

/// Values `a(p^n) mod ℓ` for `n = 1, …, τ` over one least period.
/// A sequence that is eventually zero is reported as the single value 0
/// with the degenerate flag set.
pub fn period_values(params: &HeckeParams, ell: u64) -> Result<(Vec<u64>, bool)> {
    match hecke_mod_seq(params, ell) {
        Err(Error::DegenerateSequence) => Ok((vec![0], true)),
        Err(e) => Err(e),
        Ok(seq) => {
            let period = seq.least_period()?;
            let limit = guard::max_iterations();
            if period.tau > limit {
                return Err(Error::guard("period length", period.tau, limit));
            }
            Ok((seq.iter().skip(1).take(period.tau as usize).collect(), period.degenerate))
        }
    }
}

/// Legendre symbol of `a_p² − 4p^{k−1}` modulo an odd prime `ℓ ≠ p`.
pub fn discriminant_class(params: &HeckeParams, ell: u64) -> Result<i8> {
    if ell == 2 {
        return Err(Error::invalid("ℓ = 2 has no quadratic-residue classification"));
    }
    if ell == params.p {
        return Err(Error::invalid(format!("ℓ = p = {ell}")));
    }
    let f = PrimeField::new(ell)?;
    let d = rational_mod(&params.discriminant(), ell)?;
    Ok(f.legendre(d))
}

/// Least `u ≥ 1` with `a(p^u) = 0` among `u ≤ u_max`.
pub fn zero_index(params: &HeckeParams, u_max: usize) -> Result<Option<usize>> {
    let seq = hecke_int_seq(params, u_max)?;
    Ok(seq.iter().skip(1).position(|v| v.is_zero()).map(|i| i + 1))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalReport {
    pub u: usize,
    pub ell: u64,
    /// `α^{u+1}` reduced mod ℓ.
    pub multiplier: u64,
    /// `(α^{u+1} + β^{u+1})/2` as an exact rational.
    pub multiplier_exact: String,
    pub multiplier_consistent: bool,
    pub lattice_vanishes: bool,
    pub off_lattice_geometric: bool,
    pub checked_terms: u64,
    pub tau: u64,
    pub s1: Complex64,
    pub main_term: f64,
    pub deviation: f64,
}

/// Verifies the structure forced by `a(p^u) = 0`: `a(p^{m(u+1)−1}) ≡ 0` and
/// `a(p^{m(u+1)+e}) ≡ c^m a(p^e)` with `c = α^{u+1}`, over several periods mod ℓ.
pub fn exceptional_structure_check(params: &HeckeParams, ell: u64, u_max: usize, seed: u64) -> Result<ExceptionalReport> {
    if params.level_divides {
        return Err(Error::invalid("exceptional structure needs p ∤ N"));
    }
    let u = zero_index(params, u_max)?
        .ok_or_else(|| Error::invalid(format!("a(p^u) ≠ 0 for all u ≤ {u_max}")))?;
    let seq = hecke_mod_seq(params, ell)?;
    let f = seq.field().clone();

    let ext = ExtField::new(ell, 2, seed)?;
    let roots = ff::roots_in_ext(&ext, &seq.char_poly(), seed)?;
    let alpha = roots.first().ok_or_else(|| Error::invalid("no root found"))?;
    let c_ext = ext.pow(alpha, (u + 1) as u64);
    let multiplier = ext
        .as_base(&c_ext)
        .ok_or_else(|| Error::invalid("α^{u+1} does not lie in F_ℓ"))?;

    // Lucas companion V_n = α^n + β^n, exactly.
    let norm = BigRational::from_integer(params.norm());
    let (mut v0, mut v1) = (BigRational::from_integer(2.into()), params.a_p.clone());
    for _ in 0..u {
        let v2 = &v1 * &params.a_p - &norm * &v0;
        v0 = v1;
        v1 = v2;
    }
    let c_exact = v1 / BigRational::from_integer(2.into());
    let multiplier_consistent = rational_mod(&c_exact, ell)? == multiplier;

    let tau = seq.least_period()?.tau;
    let span = (4 * tau).max(4 * (u as u64 + 1));
    let terms = seq.terms(span as usize);
    let w = u + 1;
    let mut lattice_vanishes = true;
    let mut off_lattice_geometric = true;
    let mut cm = 1u64;
    for (n, &v) in terms.iter().enumerate() {
        let (m, e) = (n / w, n % w);
        if e == 0 && m > 0 {
            cm = f.mul(&cm, &multiplier);
        }
        if e == u {
            lattice_vanishes &= v == 0;
        }
        off_lattice_geometric &= v == f.mul(&cm, &terms[e]);
    }

    let prof = expsum::profile(&seq)?;
    let main_term = tau as f64 / w as f64;
    Ok(ExceptionalReport {
        u,
        ell,
        multiplier,
        multiplier_exact: c_exact.to_string(),
        multiplier_consistent,
        lattice_vanishes,
        off_lattice_geometric,
        checked_terms: span,
        tau,
        s1: prof.s1,
        main_term,
        deviation: (prof.s1 - Complex64::new(main_term, 0.0)).norm(),
    })
}

/// Multiplicative convolution of value histograms over F_ℓ.
fn mul_convolve(a: &[u64], b: &[u64], ell: u64) -> Vec<u64> {
    let mut out = vec![0u64; ell as usize];
    let bs: Vec<(u64, u64)> = b
        .iter()
        .enumerate()
        .filter(|(_, &h)| h != 0)
        .map(|(c, &h)| (c as u64, h))
        .collect();
    for (x, &ha) in a.iter().enumerate() {
        if ha == 0 {
            continue;
        }
        for &(y, hb) in &bs {
            out[arith::mul_mod(x as u64, y, ell) as usize] += ha * hb;
        }
    }
    out
}

/// `Σ_{n_1≤τ_1} ⋯ Σ_{n_ν≤τ_ν} e_ℓ(ξ ∏ a(p_i^{n_i}))` via the value
/// distribution of the product.
pub fn multi_prime_sum(params: &[HeckeParams], ell: u64, xi: u64) -> Result<Complex64> {
    if params.is_empty() || params.len() > 3 {
        return Err(Error::invalid(format!("between 1 and 3 primes are supported, got {}", params.len())));
    }
    let mut primes: Vec<u64> = params.iter().map(|h| h.p).collect();
    primes.sort_unstable();
    if primes.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("duplicate primes"));
    }
    let lists = params
        .iter()
        .map(|h| period_values(h, ell).map(|(v, _)| v))
        .collect::<Result<Vec<_>>>()?;
    multi_sum_from_values(&lists, ell, xi)
}

/// The nested sum for explicit per-prime value lists over F_ℓ.
pub fn multi_sum_from_values(lists: &[Vec<u64>], ell: u64, xi: u64) -> Result<Complex64> {
    let limit = guard::max_iterations() as u128;
    let total: u128 = lists.iter().map(|v| v.len() as u128).product();
    if total > limit {
        return Err(Error::guard("product of periods", total, limit));
    }
    let hist_of = |v: &[u64]| {
        let mut h = vec![0u64; ell as usize];
        for &x in v {
            h[(x % ell) as usize] += 1;
        }
        h
    };
    let mut hist = hist_of(&lists[0]);
    for v in &lists[1..] {
        hist = mul_convolve(&hist, &hist_of(v), ell);
    }
    Ok(expsum::eval_histogram(&hist, &expsum::phase_table(ell), xi))
}
