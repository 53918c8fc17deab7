//! Representation counts `T_k(λ) = #{(n_1, …, n_k) ∈ [1, τ]^k : s_{n_1} + … + s_{n_k} ≡ λ}`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expsum::{self, SumProfile};
use crate::guard;

fn decimal_list<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaringTable {
    pub ell: u64,
    pub k: u32,
    pub tau: u64,
    pub histogram: Vec<u64>,
    #[serde(serialize_with = "decimal_list")]
    pub counts: Vec<BigUint>,
}

impl WaringTable {
    /// `(λ, T_k(λ), T_k(λ)·ℓ/τ^k)` rows.
    pub fn rows(&self) -> Vec<(u64, String, f64)> {
        let ratios = main_term_report(self).ratios;
        self.counts
            .iter()
            .zip(ratios)
            .enumerate()
            .map(|(l, (c, r))| (l as u64, c.to_string(), r))
            .collect()
    }
}

fn check_hist(hist: &[u64]) -> Result<u64> {
    let ell = hist.len() as u64;
    if ell == 0 {
        return Err(Error::invalid("empty histogram"));
    }
    if ell > guard::CONVOLUTION_MAX {
        return Err(Error::guard("ℓ", ell, guard::CONVOLUTION_MAX));
    }
    Ok(hist.iter().sum())
}

fn cyclic_convolve_u128(a: &[u128], b: &[u64]) -> Vec<u128> {
    let l = a.len();
    let mut out = vec![0u128; l];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % l] += x * y as u128;
            }
        }
    }
    out
}

fn cyclic_convolve_big(a: &[BigUint], b: &[u64]) -> Vec<BigUint> {
    let l = a.len();
    let mut out = vec![BigUint::zero(); l];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % l] += x * y;
            }
        }
    }
    out
}

/// `T_k` by `k − 1` cyclic convolutions of the value histogram over F_ℓ.
pub fn representation_counts(hist: &[u64], k: u32) -> Result<WaringTable> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let tau = check_hist(hist)?;
    // τ^k < 2^127 keeps every partial count in u128.
    let fits = (tau as u128).checked_pow(k).is_some_and(|v| v < (1u128 << 127));
    let counts = if fits {
        let mut acc: Vec<u128> = hist.iter().map(|&h| h as u128).collect();
        for _ in 1..k {
            acc = cyclic_convolve_u128(&acc, hist);
        }
        acc.into_iter().map(BigUint::from).collect()
    } else {
        let mut acc: Vec<BigUint> = hist.iter().map(|&h| BigUint::from(h)).collect();
        for _ in 1..k {
            acc = cyclic_convolve_big(&acc, hist);
        }
        acc
    };
    Ok(WaringTable {
        ell: hist.len() as u64,
        k,
        tau,
        histogram: hist.to_vec(),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierCheck {
    pub max_abs: f64,
    pub max_rel: f64,
}

/// Largest gap between `T_k(λ)` and `(1/ℓ) Σ_ξ S(ξ)^k e_ℓ(−ξλ)`.
pub fn fourier_check(profile: &SumProfile, table: &WaringTable) -> Result<FourierCheck> {
    if profile.p != table.ell || profile.histogram != table.histogram {
        return Err(Error::invalid("profile and table come from different histograms"));
    }
    let l = table.ell;
    let phases = expsum::phase_table(l);
    let powers: Vec<Complex64> = profile.sums.iter().map(|s| s.powu(table.k)).collect();
    let mut max_abs = 0f64;
    let mut max_rel = 0f64;
    for (lambda, count) in table.counts.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (xi, s) in powers.iter().enumerate() {
            let j = (l - (xi as u64 * lambda as u64) % l) % l;
            acc += s * phases[j as usize];
        }
        let formula = acc.re / l as f64;
        let exact = count.to_f64().unwrap_or(f64::INFINITY);
        let gap = (exact - formula).abs();
        max_abs = max_abs.max(gap);
        max_rel = max_rel.max(gap / (table.tau as f64).powi(table.k as i32));
    }
    Ok(FourierCheck { max_abs, max_rel })
}

/// Least `k ≤ k_max` such that every residue is a sum of `k` values from the histogram support.
pub fn min_basis_order(hist: &[u64], k_max: u32) -> Result<Option<u32>> {
    let tau = check_hist(hist)?;
    if tau == 0 {
        return Err(Error::DegenerateSequence);
    }
    let l = hist.len();
    let base: Vec<usize> = (0..l).filter(|&c| hist[c] > 0).collect();
    let mut support: Vec<bool> = hist.iter().map(|&h| h > 0).collect();
    for k in 1..=k_max {
        if support.iter().all(|&s| s) {
            return Ok(Some(k));
        }
        let mut next = vec![false; l];
        for (i, _) in support.iter().enumerate().filter(|(_, &s)| s) {
            for &j in &base {
                next[(i + j) % l] = true;
            }
        }
        support = next;
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize)]
pub struct MainTermReport {
    pub ell: u64,
    pub k: u32,
    /// `T_k(λ) ℓ / τ^k`.
    pub ratios: Vec<f64>,
    pub max_deviation: f64,
}

pub fn main_term_report(table: &WaringTable) -> MainTermReport {
    let total = BigUint::from(table.tau).pow(table.k);
    let ratios: Vec<f64> = table
        .counts
        .iter()
        .map(|c| {
            let num = c * table.ell;
            num_rational::BigRational::new(num.into(), total.clone().into())
                .to_f64()
                .unwrap_or(f64::NAN)
        })
        .collect();
    let max_deviation = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    MainTermReport {
        ell: table.ell,
        k: table.k,
        ratios,
        max_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrs::LinRecSeq;

    #[test]
    fn uniform_and_delta() {
        let t = representation_counts(&[3, 3, 3, 3, 3], 4).unwrap();
        assert!(t.counts.iter().all(|c| *c == BigUint::from(15u64.pow(4) / 5)));
        assert!(main_term_report(&t).ratios.iter().all(|&r| r == 1.0));

        let d = representation_counts(&[7, 0, 0], 5).unwrap();
        assert_eq!(d.counts[0], BigUint::from(7u64.pow(5)));
        assert!(d.counts[1..].iter().all(|c| c.is_zero()));
        assert_eq!(main_term_report(&d).ratios, vec![3.0, 0.0, 0.0]);
    }

    #[test]
    fn fibonacci_5_pairs() {
        let s = LinRecSeq::fibonacci(5).unwrap();
        let hist = expsum::histogram(&s, 20);
        let t = representation_counts(&hist, 2).unwrap();
        let v = s.terms(21);
        let mut brute = [0u64; 5];
        for a in 1..=20 {
            for b in 1..=20 {
                brute[((v[a] + v[b]) % 5) as usize] += 1;
            }
        }
        for l in 0..5 {
            assert_eq!(t.counts[l], BigUint::from(brute[l]));
        }
    }

    #[test]
    fn big_integer_path() {
        let t = representation_counts(&[1 << 40, 1 << 40, 0], 4).unwrap();
        let total: BigUint = t.counts.iter().sum();
        assert_eq!(total, BigUint::from(2u64 << 40).pow(4));
    }

    #[test]
    fn fourier_identity() {
        let s = LinRecSeq::fibonacci(11).unwrap();
        let prof = expsum::profile(&s).unwrap();
        for k in 1..=3 {
            let t = representation_counts(&prof.histogram, k).unwrap();
            assert!(fourier_check(&prof, &t).unwrap().max_abs < 0.5);
        }
    }

    #[test]
    fn basis_orders() {
        assert_eq!(min_basis_order(&[1, 1, 1], 5).unwrap(), Some(1));
        assert_eq!(min_basis_order(&[0, 4, 0, 0, 0], 20).unwrap(), None);
        assert_eq!(min_basis_order(&[2, 1, 0, 0, 0], 10).unwrap(), Some(4));
        assert!(min_basis_order(&[0, 0], 3).is_err());
    }
}
