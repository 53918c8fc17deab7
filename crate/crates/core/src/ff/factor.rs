//! Factorization over finite fields: square-free decomposition, distinct-degree
//! splitting and Cantor–Zassenhaus equal-degree splitting.

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ext::{ExtElem, ExtField};
use super::field::{FiniteField, PrimeField};
use super::poly::{self, Poly, PolyFp};
use crate::error::{Error, Result};

/// Complete factorization `f = unit · Π factor^multiplicity` with monic irreducible factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(PolyFp, u32)>,
}

impl Factorization {
    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|&(_, m)| m == 1)
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.factors
            .iter()
            .map(|(f, _)| f.degree().unwrap_or(0))
            .collect()
    }

    /// Multiplies everything back together.
    pub fn product(&self, field: &PrimeField) -> PolyFp {
        let mut acc = poly::constant(field, self.unit);
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = poly::mul(field, &acc, f);
            }
        }
        acc
    }
}

/// Irreducibility over F_p: `x^{p^r} ≡ x (mod f)` and `gcd(f, x^{p^d} − x) = 1` for `1 ≤ d < r`.
pub fn is_irreducible(field: &PrimeField, f: &PolyFp) -> bool {
    let Some(r) = f.degree() else {
        return false;
    };
    if r == 0 {
        return false;
    }
    if r == 1 {
        return true;
    }
    let x = poly::x(field);
    let mut h = poly::rem(field, &x, f);
    for d in 1..=r {
        h = poly::pow_mod(field, &h, field.p(), f);
        let diff = poly::sub(field, &h, &x);
        if d < r {
            if !poly::is_one(field, &poly::gcd(field, f, &diff)) {
                return false;
            }
        } else {
            return diff.is_zero();
        }
    }
    unreachable!()
}

/// Over F_p every coefficient is its own p-th root, so the p-th root of
/// `g(x^p)` is `g(x)`.
fn pth_root(field: &PrimeField, f: &PolyFp) -> PolyFp {
    let p = field.p() as usize;
    let v: Vec<u64> = f.coeffs().iter().step_by(p).copied().collect();
    poly::from_coeffs(field, v)
}

/// Square-free decomposition of a monic polynomial: pairs `(g_i, i)` with
/// `f = Π g_i^i` and each `g_i` square-free.
pub fn square_free_decomposition(field: &PrimeField, f: &PolyFp) -> Vec<(PolyFp, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = poly::derivative(field, f);
    let mut c = poly::gcd(field, f, &df);
    let mut w = poly::exact_div(field, f, &c);
    let mut i = 1u32;
    while !poly::is_one(field, &w) {
        let y = poly::gcd(field, &w, &c);
        let fac = poly::exact_div(field, &w, &y);
        if !poly::is_one(field, &fac) {
            out.push((fac, i));
        }
        w = y;
        c = poly::exact_div(field, &c, &w);
        i += 1;
    }
    if !poly::is_one(field, &c) {
        let root = pth_root(field, &c);
        let p = field.p() as u32;
        for (g, m) in square_free_decomposition(field, &root) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a square-free monic polynomial into `(product of all irreducible
/// factors of degree d, d)` pieces.
pub fn distinct_degree<F: FiniteField>(field: &F, f: &Poly<F::Elem>) -> Vec<(Poly<F::Elem>, usize)> {
    let mut out = Vec::new();
    let x = poly::x(field);
    let q = field.size();
    let mut rest = f.clone();
    let mut h = poly::rem(field, &x, &rest);
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = poly::pow_mod(field, &h, q, &rest);
        let g = poly::gcd(field, &rest, &poly::sub(field, &h, &x));
        if !poly::is_one(field, &g) {
            rest = poly::exact_div(field, &rest, &g);
            h = poly::rem(field, &h, &rest);
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(deg) = rest.degree().filter(|&k| k > 0) {
        out.push((rest, deg));
    }
    out
}

fn random_poly<F: FiniteField>(field: &F, deg_bound: usize, rng: &mut ChaCha8Rng) -> Poly<F::Elem> {
    poly::from_coeffs(field, (0..deg_bound).map(|_| field.random(rng)).collect())
}

/// Cantor–Zassenhaus splitting of a monic product of distinct irreducibles of degree `d`.
pub fn equal_degree<F: FiniteField>(
    field: &F,
    f: &Poly<F::Elem>,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Poly<F::Elem>> {
    let n = f.degree().expect("nonzero polynomial");
    if n == d {
        return vec![f.clone()];
    }
    let q = field.size();
    let odd_exponent = (field.characteristic() != 2).then(|| {
        let qd = BigUint::from(q).pow(d as u32);
        (qd - BigUint::one()) >> 1
    });
    loop {
        let a = random_poly(field, n, rng);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = match &odd_exponent {
            Some(e) => {
                let t = poly::pow_mod_big(field, &a, e, f);
                poly::sub(field, &t, &poly::one(field))
            }
            None => {
                // Characteristic 2: absolute trace map to F_2 of F_{q^d}.
                let m = field.degree() as usize * d;
                let mut acc = Poly::zero();
                let mut cur = poly::rem(field, &a, f);
                for _ in 0..m {
                    acc = poly::add(field, &acc, &cur);
                    cur = poly::mul_mod(field, &cur, &cur, f);
                }
                acc
            }
        };
        let g = poly::gcd(field, f, &b);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let h = poly::exact_div(field, f, &g);
            let mut out = equal_degree(field, &g, d, rng);
            out.extend(equal_degree(field, &h, d, rng));
            return out;
        }
    }
}

fn sort_key(f: &PolyFp) -> (usize, Vec<u64>) {
    (f.degree().unwrap_or(0), f.coeffs().iter().rev().copied().collect())
}

/// Complete factorization over F_p. Randomized splitting is keyed by `seed`;
/// the output is sorted by degree, then coefficients, so it does not depend on it.
pub fn factor_poly(field: &PrimeField, f: &PolyFp, seed: u64) -> Result<Factorization> {
    let lead = *f.lead().ok_or(Error::ZeroPolynomial)?;
    if f.degree() == Some(0) {
        return Err(Error::invalid("cannot factor a constant polynomial"));
    }
    let monic = poly::monic(field, f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (sqf, mult) in square_free_decomposition(field, &monic) {
        for (block, d) in distinct_degree(field, &sqf) {
            for g in equal_degree(field, &block, d, &mut rng) {
                factors.push((g, mult));
            }
        }
    }
    factors.sort_by_key(|(g, m)| (sort_key(g), *m));
    Ok(Factorization { unit: lead, factors })
}

/// All roots of an irreducible `f ∈ F_p[x]` of degree `d | r` inside `ext = F_{p^r}`,
/// returned as the Frobenius orbit `ρ, ρ^p, …, ρ^{p^{d-1}}`.
pub fn find_roots_in_ext(ext: &ExtField, f: &PolyFp, seed: u64) -> Result<Vec<ExtElem>> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 || ext.r() as usize % d != 0 {
        return Err(Error::DegreeMismatch {
            degree: d,
            ext: ext.r(),
        });
    }
    let lifted = poly::monic(ext, &poly::map_coeffs::<PrimeField, _>(ext, f, |&c| ext.embed(c)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = lifted;
    // Peel off one linear factor.
    while cur.degree() != Some(1) {
        let pieces = equal_degree(ext, &cur, 1, &mut rng);
        cur = pieces.into_iter().next().expect("at least one piece");
    }
    let root = ext.neg(&cur.coeffs()[0]);
    let mut orbit = vec![root];
    for _ in 1..d {
        let next = ext.frobenius(orbit.last().unwrap());
        orbit.push(next);
    }
    Ok(orbit)
}

/// Every root of `f` in `ext`, one entry per root with multiplicity, in a
/// deterministic order. Irreducible factors whose degree does not divide the
/// extension degree contribute nothing.
pub fn roots_in_ext(ext: &ExtField, f: &PolyFp, seed: u64) -> Result<Vec<ExtElem>> {
    let fac = factor_poly(ext.base(), f, seed)?;
    let mut out = Vec::new();
    for (g, m) in &fac.factors {
        let d = g.degree().unwrap();
        if ext.r() as usize % d != 0 {
            continue;
        }
        for root in find_roots_in_ext(ext, g, seed)? {
            for _ in 0..*m {
                out.push(root.clone());
            }
        }
    }
    Ok(out)
}
