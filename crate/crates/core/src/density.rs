//! Eigenvalue-class counting in GL₂(F_ℓ).
//!
//! With `t = ⌊ℓ^ε⌋`, a matrix is good when its eigenvalues `λ₁, λ₂` and the
//! ratio `λ₁/λ₂` all have multiplicative order above `t`. Good split classes
//! are indexed by `S₁` (ordered eigenvalue pairs in F_ℓ*), good non-split
//! classes by `S₂` (eigenvalues in F_{ℓ²} \ F_ℓ).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, Exponent};
use crate::error::{Error, Result};
use crate::ff::{self, ExtField, FiniteField};
use crate::modforms::{self, HeckeParams};

/// Largest ℓ accepted by [`nice_tuple_count`].
pub const NICE_TUPLE_MAX_ELL: u64 = 257;

fn odd_prime(ell: u64) -> Result<()> {
    if !arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == 2 {
        return Err(Error::invalid("ℓ must be odd"));
    }
    Ok(())
}

/// `|GL₂(F_ℓ)| = (ℓ² − 1)(ℓ² − ℓ)`.
pub fn gl2_order(ell: u64) -> u128 {
    let l = ell as u128;
    (l * l - 1) * (l * l - l)
}

/// `|{a ∈ F_ℓ* : ord(a) ≤ t}|`.
fn small_count(divisors: &[u64], t: u64) -> u64 {
    divisors.iter().filter(|&&d| d <= t).map(|&d| arith::euler_phi(d)).sum()
}

/// `|S₁|`: ordered pairs `(a, b)` with `ord(a), ord(b), ord(a/b) > t`.
///
/// Elements are handled as exponents of a generator of the cyclic group of
/// order `n = ℓ − 1`; the count for `a` depends only on `ord(a)`.
pub fn count_s1(ell: u64, t: u64) -> Result<u64> {
    odd_prime(ell)?;
    let n = ell - 1;
    let divisors = arith::divisors(&arith::factorize(n));
    let small_exps: Vec<u64> = divisors
        .iter()
        .filter(|&&d| d <= t)
        .flat_map(|&d| {
            let step = n / d;
            (0..d).filter(move |&i| arith::gcd(i, d) == 1).map(move |i| i * step)
        })
        .collect();
    let s = small_exps.len() as u64;
    let ord = |x: u64| n / arith::gcd(n, x);
    let mut total = 0u64;
    for &d in divisors.iter().filter(|&&d| d > t) {
        let a = n / d;
        let both_small = small_exps
            .iter()
            .filter(|&&e| ord((a + n - e) % n) <= t)
            .count() as u64;
        total += arith::euler_phi(d) * (n + both_small - 2 * s);
    }
    debug_assert_eq!(s, small_count(&divisors, t));
    Ok(total)
}

/// `|S₂|`: `λ ∈ F_{ℓ²} \ F_ℓ` with `ord(λ) > t` and `ord(λ^{ℓ−1}) > t`.
pub fn count_s2(ell: u64, t: u64) -> Result<u64> {
    odd_prime(ell)?;
    let m = ell * ell - 1;
    let n = ell - 1;
    let divisors = arith::divisors(&arith::factorize(m));
    Ok(divisors
        .iter()
        .filter(|&&d| n % d != 0 && d / arith::gcd(d, n) > t)
        .map(|&d| arith::euler_phi(d))
        .sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub ell: u64,
    pub eps: Exponent,
    pub t: u64,
    pub s1: u64,
    pub s2: u64,
    pub gl2: u128,
    /// `|C| = ((ℓ+1)ℓ|S₁| + ℓ(ℓ−1)|S₂|)/2`.
    pub good_matrices: u128,
    /// `|C| / |GL₂|`.
    pub lower_bound: f64,
    pub gap: f64,
    /// The same expression with the two class sizes exchanged.
    pub swapped_bound: f64,
    /// `ℓ^{−(1−3ε)}`.
    pub reference_1m3e: f64,
    /// `ℓ^{−(1−2ε)}`.
    pub reference_1m2e: f64,
}

pub fn density_lower_bound(ell: u64, eps: Exponent) -> Result<DensityReport> {
    odd_prime(ell)?;
    let t = eps.floor_pow(ell);
    let s1 = count_s1(ell, t)?;
    let s2 = count_s2(ell, t)?;
    let l = ell as u128;
    let gl2 = gl2_order(ell);
    let good = ((l + 1) * l * s1 as u128 + l * (l - 1) * s2 as u128) / 2;
    let swapped = ((l - 1) * l * s1 as u128 + (l + 1) * l * s2 as u128) as f64 / 2.0;
    let lower_bound = good as f64 / gl2 as f64;
    let e = eps.as_f64();
    let lf = ell as f64;
    Ok(DensityReport {
        ell,
        eps,
        t,
        s1,
        s2,
        gl2,
        good_matrices: good,
        lower_bound,
        gap: 1.0 - lower_bound,
        swapped_bound: swapped / gl2 as f64,
        reference_1m3e: lf.powf(-(1.0 - 3.0 * e)),
        reference_1m2e: lf.powf(-(1.0 - 2.0 * e)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NiceTupleReport {
    pub ell: u64,
    pub r: u32,
    pub k: u32,
    pub t: u64,
    /// Nice `2r`-tuples.
    pub count: u64,
    /// `(ℓ−1)^{r+1}/(ℓ−1, k−1)`: tuples with constant pair products, ignoring order conditions.
    pub unconstrained: u64,
    /// `|Δ_r^{(k−1)}(ℓ)|` in decimal.
    pub delta_order: String,
    /// `count · (ℓ(ℓ+1)/2)^r / |Δ_r^{(k−1)}(ℓ)|`.
    pub bound: f64,
    /// `2^{−r}`.
    pub reference: f64,
}

/// Counts `(a_1, …, a_{2r}) ∈ (F_ℓ*)^{2r}` with every `ord(a_i) > t`, every
/// `ord(a_i/a_j) > t` (`i ≠ j`), and `a_1a_2 = a_3a_4 = …` a `(k−1)`-th power.
///
/// For each admissible product `λ`, an index `a` stands for the pair `(a, λ/a)`;
/// nice tuples are ordered `r`-cliques of the pair-compatibility graph.
pub fn nice_tuple_count(ell: u64, r: u32, k: u32, t: u64) -> Result<NiceTupleReport> {
    odd_prime(ell)?;
    if !(1..=3).contains(&r) {
        return Err(Error::invalid(format!("r must be 1, 2 or 3, got {r}")));
    }
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if ell > NICE_TUPLE_MAX_ELL {
        return Err(Error::guard("ℓ", ell, NICE_TUPLE_MAX_ELL));
    }
    let n = ell - 1;
    let g = arith::gcd(n, (k - 1) as u64);
    let ord = |x: u64| n / arith::gcd(n, x % n);
    let good = |x: u64| ord(x) > t;

    // Products λ = generator^{g·j}: exactly the (k−1)-th powers.
    let lambdas: Vec<u64> = (0..n / g).map(|j| j * g).collect();
    let count: u64 = lambdas
        .par_iter()
        .map(|&lam| {
            // a ↦ (a, λ − a) in exponent notation.
            let verts: Vec<u64> = (0..n)
                .filter(|&a| {
                    let b = (lam + n - a) % n;
                    good(a) && good(b) && good((a + n - b) % n)
                })
                .collect();
            let compatible = |x: u64, y: u64| {
                let (xb, yb) = ((lam + n - x) % n, (lam + n - y) % n);
                [(x, y), (x, yb), (xb, y), (xb, yb)]
                    .iter()
                    .all(|&(u, v)| good((u + n - v) % n))
            };
            let v = verts.len();
            match r {
                1 => v as u64,
                _ => {
                    let adj: Vec<Vec<bool>> = verts
                        .iter()
                        .map(|&x| verts.iter().map(|&y| x != y && compatible(x, y)).collect())
                        .collect();
                    let mut c = 0u64;
                    for i in 0..v {
                        for j in 0..v {
                            if !adj[i][j] {
                                continue;
                            }
                            if r == 2 {
                                c += 1;
                            } else {
                                c += (0..v).filter(|&m| adj[i][m] && adj[j][m]).count() as u64;
                            }
                        }
                    }
                    c
                }
            }
        })
        .sum();

    let l = BigUint::from(ell);
    let gl2 = BigUint::from(gl2_order(ell));
    let delta = (&gl2 / (&l - 1u32)).pow(r) * (&l - 1u32) / BigUint::from(g);
    let class = (&l * (&l + 1u32)) / 2u32;
    let bound = BigRational::new((BigUint::from(count) * class.pow(r)).into(), delta.clone().into());
    let unconstrained = n.pow(r + 1) / g;
    Ok(NiceTupleReport {
        ell,
        r,
        k,
        t,
        count,
        unconstrained,
        delta_order: delta.to_string(),
        bound: bound.to_f64().unwrap_or(f64::NAN),
        reference: 0.5f64.powi(r as i32),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusRow {
    pub p: u64,
    pub a_p_mod: u64,
    pub class: i8,
    pub ord_alpha: u64,
    pub ord_beta: u64,
    pub ord_ratio: u64,
    pub good: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusSample {
    pub ell: u64,
    pub eps: Exponent,
    pub t: u64,
    pub sampled: usize,
    pub good: usize,
    pub fraction: Option<f64>,
    pub rows: Vec<FrobeniusRow>,
}

/// For every prime `p ≤ budget`, `p ≠ ℓ`, tests whether the roots of
/// `x² − a_p x + p^{k−1}` mod ℓ and their ratio all have order above `⌊ℓ^ε⌋`.
pub fn frobenius_sample(
    k: u32,
    coeffs: &BTreeMap<u64, BigRational>,
    ell: u64,
    budget: u64,
    eps: Exponent,
    seed: u64,
) -> Result<FrobeniusSample> {
    odd_prime(ell)?;
    let t = eps.floor_pow(ell);
    let ext = ExtField::new(ell, 2, seed)?;
    let mut rows = Vec::new();
    for p in arith::primes_up_to(budget) {
        if p == ell {
            continue;
        }
        let a_p = coeffs
            .get(&p)
            .ok_or_else(|| Error::invalid(format!("no coefficient for p = {p}")))?;
        let params = HeckeParams {
            p,
            k,
            a_p: a_p.clone(),
            level_divides: false,
        };
        let seq = modforms::hecke_mod_seq(&params, ell)?;
        let roots = ff::roots_in_ext(&ext, &seq.char_poly(), seed)?;
        let (alpha, beta) = (&roots[0], &roots[1]);
        let ratio = ext.mul(alpha, &ext.inv(beta).ok_or(Error::ZeroElement)?);
        let (oa, ob, or) = (ext.mult_order(alpha)?, ext.mult_order(beta)?, ext.mult_order(&ratio)?);
        rows.push(FrobeniusRow {
            p,
            a_p_mod: params.a_p_mod(ell)?,
            class: modforms::discriminant_class(&params, ell)?,
            ord_alpha: oa,
            ord_beta: ob,
            ord_ratio: or,
            good: oa > t && ob > t && or > t,
        });
    }
    let good = rows.iter().filter(|r| r.good).count();
    Ok(FrobeniusSample {
        ell,
        eps,
        t,
        sampled: rows.len(),
        good,
        fraction: (!rows.is_empty()).then(|| good as f64 / rows.len() as f64),
        rows,
    })
}

/// `τ(p)` for every prime `p ≤ budget`.
pub fn delta_coefficients(budget: u64) -> Result<BTreeMap<u64, BigRational>> {
    let table = modforms::tau_table(budget as usize)?;
    Ok(arith::primes_up_to(budget)
        .into_iter()
        .map(|p| (p, BigRational::from_integer(table.get(p as usize).unwrap().into())))
        .collect())
}

/// Reference curve `ℓ^{−(1−cε)}`.
pub fn reference_curve(ell: u64, eps: Exponent, c: u64) -> f64 {
    (ell as f64).powf(-(1.0 - c as f64 * eps.as_f64()))
}

impl DensityReport {
    pub fn csv_row(&self) -> [String; 6] {
        [
            self.ell.to_string(),
            self.eps.to_string(),
            self.s1.to_string(),
            self.s2.to_string(),
            format!("{:.12}", self.lower_bound),
            format!("{:.12}", self.gap),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord_mod(a: u64, ell: u64) -> u64 {
        let mut x = a % ell;
        let mut k = 1;
        while x != 1 {
            x = x * a % ell;
            k += 1;
        }
        k
    }

    fn s1_scan(ell: u64, t: u64) -> u64 {
        let mut c = 0;
        for a in 1..ell {
            for b in 1..ell {
                let ratio = a * arith::inv_mod_prime(b, ell).unwrap() % ell;
                if ord_mod(a, ell) > t && ord_mod(b, ell) > t && ord_mod(ratio, ell) > t {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn s1_small_cases() {
        assert_eq!(count_s1(5, 1).unwrap(), 6);
        assert_eq!(count_s1(13, 12).unwrap(), 0);
        for ell in [3u64, 5, 7, 11, 13, 31] {
            for t in 1..6 {
                assert_eq!(count_s1(ell, t).unwrap(), s1_scan(ell, t), "ℓ = {ell}, t = {t}");
            }
        }
        assert!(count_s1(2, 1).is_err());
    }

    #[test]
    fn s2_small_cases() {
        assert_eq!(count_s2(7, 48).unwrap(), 0);
        for ell in [3u64, 5, 7, 11] {
            let ext = ExtField::new(ell, 2, 0).unwrap();
            for t in 1..5 {
                let scan = ext
                    .elements()
                    .filter(|z| !ext.is_zero(z) && ext.as_base(z).is_none())
                    .filter(|z| {
                        let o = ext.mult_order(z).unwrap();
                        o > t && ext.mult_order(&ext.pow(z, ell - 1)).unwrap() > t
                    })
                    .count() as u64;
                assert_eq!(count_s2(ell, t).unwrap(), scan, "ℓ = {ell}, t = {t}");
            }
        }
    }

    #[test]
    fn density_shape() {
        let e = Exponent::new(1, 5).unwrap();
        let bounds: Vec<f64> = [101u64, 499, 997]
            .iter()
            .map(|&l| density_lower_bound(l, e).unwrap().lower_bound)
            .collect();
        assert!(bounds.iter().all(|&b| b <= 1.0));
        assert!(bounds[0] < bounds[1] && bounds[1] < bounds[2]);
        assert_eq!(gl2_order(3), 48);
        assert_eq!(gl2_order(5), 480);
    }

    #[test]
    fn nice_tuples_r1() {
        // r = 1 with (ℓ−1, k−1) = 1 is S₁.
        assert_eq!(nice_tuple_count(13, 1, 2, 2).unwrap().count, count_s1(13, 2).unwrap());
        assert!(nice_tuple_count(263, 1, 2, 1).unwrap_err().is_guard());
    }

    #[test]
    fn frobenius_empty_and_impossible() {
        let coeffs = delta_coefficients(100).unwrap();
        let e = Exponent::new(1, 5).unwrap();
        let empty = frobenius_sample(12, &coeffs, 13, 1, e, 0).unwrap();
        assert_eq!(empty.sampled, 0);
        assert_eq!(empty.fraction, None);
        let never = frobenius_sample(12, &coeffs, 13, 100, Exponent::new(2, 1).unwrap(), 0).unwrap();
        assert_eq!(never.fraction, Some(0.0));
    }
}
