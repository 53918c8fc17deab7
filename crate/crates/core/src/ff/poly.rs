//! Dense univariate polynomials over any [`FiniteField`].
//!
//! Coefficients are stored in ascending degree order and kept canonical:
//! no trailing zero coefficients, so the zero polynomial has no coefficients.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::field::FiniteField;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

/// Polynomial over the prime field, coefficients in `[0, p)`.
pub type PolyFp = Poly<u64>;

impl<E: Clone> Poly<E> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&E> {
        self.coeffs.last()
    }

    /// Coefficient of `x^i`, or `None` past the degree.
    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.coeffs.get(i)
    }
}

impl PolyFp {
    /// Builds a polynomial over F_p from integer coefficients, reducing and trimming.
    pub fn from_u64s(p: u64, coeffs: &[u64]) -> Self {
        let mut v: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        Poly { coeffs: v }
    }

    /// Builds a polynomial over F_p from signed coefficients.
    pub fn from_i64s(p: u64, coeffs: &[i64]) -> Self {
        let v: Vec<u64> = coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(p as i128) as u64)
            .collect();
        Self::from_u64s(p, &v)
    }
}

pub fn from_coeffs<F: FiniteField>(f: &F, mut v: Vec<F::Elem>) -> Poly<F::Elem> {
    while v.last().is_some_and(|c| f.is_zero(c)) {
        v.pop();
    }
    Poly { coeffs: v }
}

pub fn constant<F: FiniteField>(f: &F, c: F::Elem) -> Poly<F::Elem> {
    from_coeffs(f, vec![c])
}

pub fn one<F: FiniteField>(f: &F) -> Poly<F::Elem> {
    constant(f, f.one())
}

/// The monomial `x`.
pub fn x<F: FiniteField>(f: &F) -> Poly<F::Elem> {
    from_coeffs(f, vec![f.zero(), f.one()])
}

pub fn is_one<F: FiniteField>(f: &F, a: &Poly<F::Elem>) -> bool {
    a.coeffs.len() == 1 && f.is_one(&a.coeffs[0])
}

pub fn add<F: FiniteField>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let n = a.coeffs.len().max(b.coeffs.len());
    let zero = f.zero();
    let v = (0..n)
        .map(|i| {
            let x = a.coeffs.get(i).unwrap_or(&zero);
            let y = b.coeffs.get(i).unwrap_or(&zero);
            f.add(x, y)
        })
        .collect();
    from_coeffs(f, v)
}

pub fn sub<F: FiniteField>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let n = a.coeffs.len().max(b.coeffs.len());
    let zero = f.zero();
    let v = (0..n)
        .map(|i| {
            let x = a.coeffs.get(i).unwrap_or(&zero);
            let y = b.coeffs.get(i).unwrap_or(&zero);
            f.sub(x, y)
        })
        .collect();
    from_coeffs(f, v)
}

pub fn scale<F: FiniteField>(f: &F, a: &Poly<F::Elem>, c: &F::Elem) -> Poly<F::Elem> {
    from_coeffs(f, a.coeffs.iter().map(|x| f.mul(x, c)).collect())
}

pub fn mul<F: FiniteField>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let mut v = vec![f.zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            v[i + j] = f.add(&v[i + j], &f.mul(x, y));
        }
    }
    from_coeffs(f, v)
}

/// Quotient and remainder. Panics on division by the zero polynomial.
pub fn div_rem<F: FiniteField>(
    f: &F,
    a: &Poly<F::Elem>,
    b: &Poly<F::Elem>,
) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let db = b.degree().expect("division by zero polynomial");
    let lead_inv = f.inv(b.lead().unwrap()).expect("leading coefficient is a unit");
    let mut r = a.coeffs.clone();
    if r.len() <= db {
        return (Poly::zero(), a.clone());
    }
    let mut q = vec![f.zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if f.is_zero(&r[i]) {
            continue;
        }
        let c = f.mul(&r[i], &lead_inv);
        for (j, bj) in b.coeffs.iter().enumerate() {
            let k = i - db + j;
            r[k] = f.sub(&r[k], &f.mul(&c, bj));
        }
        q[i - db] = c;
    }
    r.truncate(db);
    (from_coeffs(f, q), from_coeffs(f, r))
}

pub fn rem<F: FiniteField>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    div_rem(f, a, b).1
}

/// Exact quotient; debug-asserts the remainder vanishes.
pub fn exact_div<F: FiniteField>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let (q, r) = div_rem(f, a, b);
    debug_assert!(r.is_zero(), "inexact polynomial division");
    q
}

/// Scales to a monic polynomial; the zero polynomial is returned unchanged.
pub fn monic<F: FiniteField>(f: &F, a: &Poly<F::Elem>) -> Poly<F::Elem> {
    match a.lead() {
        None => a.clone(),
        Some(l) => scale(f, a, &f.inv(l).expect("nonzero leading coefficient")),
    }
}

/// Monic greatest common divisor (zero only if both inputs are zero).
pub fn gcd<F: FiniteField>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

pub fn derivative<F: FiniteField>(f: &F, a: &Poly<F::Elem>) -> Poly<F::Elem> {
    let v = a
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(c, &f.from_base(i as u64 % f.characteristic())))
        .collect();
    from_coeffs(f, v)
}

/// Horner evaluation.
pub fn eval<F: FiniteField>(f: &F, a: &Poly<F::Elem>, x: &F::Elem) -> F::Elem {
    a.coeffs
        .iter()
        .rev()
        .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

pub fn mul_mod<F: FiniteField>(
    f: &F,
    a: &Poly<F::Elem>,
    b: &Poly<F::Elem>,
    m: &Poly<F::Elem>,
) -> Poly<F::Elem> {
    rem(f, &mul(f, a, b), m)
}

pub fn pow_mod<F: FiniteField>(
    f: &F,
    a: &Poly<F::Elem>,
    mut e: u64,
    m: &Poly<F::Elem>,
) -> Poly<F::Elem> {
    let mut acc = rem(f, &one(f), m);
    let mut base = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(f, &acc, &base, m);
        }
        base = mul_mod(f, &base, &base, m);
        e >>= 1;
    }
    acc
}

pub fn pow_mod_big<F: FiniteField>(
    f: &F,
    a: &Poly<F::Elem>,
    e: &BigUint,
    m: &Poly<F::Elem>,
) -> Poly<F::Elem> {
    let mut acc = rem(f, &one(f), m);
    let base = rem(f, a, m);
    for i in (0..e.bits()).rev() {
        acc = mul_mod(f, &acc, &acc, m);
        if e.bit(i) {
            acc = mul_mod(f, &acc, &base, m);
        }
    }
    acc
}

/// Maps every coefficient through a field embedding.
pub fn map_coeffs<F: FiniteField, G: FiniteField>(
    target: &G,
    a: &Poly<F::Elem>,
    embed: impl Fn(&F::Elem) -> G::Elem,
) -> Poly<G::Elem> {
    from_coeffs(target, a.coeffs.iter().map(embed).collect())
}
