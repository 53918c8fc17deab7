use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::factor::is_irreducible;
use super::field::{FiniteField, PrimeField};
use super::poly::{self, PolyFp};
use crate::arith::{self, add_mod, mul_mod, sub_mod};
use crate::error::{Error, Result};

/// An element of F_{p^r} in the polynomial basis `1, x, …, x^{r-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtElem(Vec<u64>);

impl ExtElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Debug)]
struct Inner {
    base: PrimeField,
    r: u32,
    modulus: PolyFp,
    size: u64,
    group_factors: Vec<(u64, u32)>,
    /// Row `i` holds the coordinates of `x^{i p} mod modulus`.
    frob_rows: Vec<Vec<u64>>,
}

/// The field F_{p^r} = F_p[x]/(modulus). Cloning shares the context.
#[derive(Debug, Clone)]
pub struct ExtField {
    inner: Arc<Inner>,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.base == other.inner.base && self.inner.modulus == other.inner.modulus
    }
}

fn check_size(p: u64, r: u32) -> Result<u64> {
    if r == 0 {
        return Err(Error::invalid("extension degree must be at least 1"));
    }
    match arith::checked_pow(p, r) {
        Some(q) if q < 1 << 63 => Ok(q),
        _ => Err(Error::FieldTooLarge { p, r }),
    }
}

/// Seed-keyed bijection of `[0, n)`: `i ↦ (a·i + b) mod n` with `gcd(a, n) = 1`.
struct AffinePermutation {
    n: u64,
    a: u64,
    b: u64,
}

impl AffinePermutation {
    fn new(n: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = rng.gen_range(1..n.max(2));
        while arith::gcd(a, n) != 1 {
            a = a % (n - 1) + 1;
        }
        let b = rng.gen_range(0..n);
        AffinePermutation { n, a, b }
    }

    fn apply(&self, i: u64) -> u64 {
        ((self.a as u128 * i as u128 + self.b as u128) % self.n as u128) as u64
    }
}

impl ExtField {
    /// Builds F_{p^r} with a modulus chosen by scanning monic degree-`r`
    /// candidates in a seed-keyed pseudorandom order; the first irreducible wins.
    pub fn new(p: u64, r: u32, seed: u64) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let size = check_size(p, r)?;
        let perm = AffinePermutation::new(size, seed);
        for i in 0..size {
            let mut idx = perm.apply(i);
            let mut coeffs = Vec::with_capacity(r as usize + 1);
            for _ in 0..r {
                coeffs.push(idx % p);
                idx /= p;
            }
            coeffs.push(1);
            if r > 1 && coeffs[0] == 0 {
                continue;
            }
            let cand = PolyFp::from_u64s(p, &coeffs);
            if is_irreducible(&base, &cand) {
                return Ok(Self::build(base, r, cand, size));
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// Builds F_{p^r} from a user-supplied modulus, which must be monic and irreducible.
    pub fn with_modulus(p: u64, modulus: PolyFp) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let r = modulus
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::invalid("modulus must have degree at least 1"))? as u32;
        let size = check_size(p, r)?;
        if modulus.lead() != Some(&1) {
            return Err(Error::invalid("modulus must be monic"));
        }
        if !is_irreducible(&base, &modulus) {
            return Err(Error::invalid("modulus is reducible"));
        }
        Ok(Self::build(base, r, modulus, size))
    }

    fn build(base: PrimeField, r: u32, modulus: PolyFp, size: u64) -> Self {
        let p = base.p();
        let group_factors = arith::factorize(size - 1);
        let xp = poly::pow_mod(&base, &poly::x(&base), p, &modulus);
        let mut frob_rows = Vec::with_capacity(r as usize);
        let mut cur = poly::rem(&base, &poly::one(&base), &modulus);
        for _ in 0..r {
            let mut row = cur.coeffs().to_vec();
            row.resize(r as usize, 0);
            frob_rows.push(row);
            cur = poly::mul_mod(&base, &cur, &xp, &modulus);
        }
        ExtField {
            inner: Arc::new(Inner {
                base,
                r,
                modulus,
                size,
                group_factors,
                frob_rows,
            }),
        }
    }

    pub fn base(&self) -> &PrimeField {
        &self.inner.base
    }

    pub fn p(&self) -> u64 {
        self.inner.base.p()
    }

    pub fn r(&self) -> u32 {
        self.inner.r
    }

    pub fn modulus(&self) -> &PolyFp {
        &self.inner.modulus
    }

    /// Prime factorization of p^r − 1.
    pub fn group_order_factorization(&self) -> &[(u64, u32)] {
        &self.inner.group_factors
    }

    /// Element from polynomial-basis coordinates; longer inputs are reduced by the modulus.
    pub fn elem(&self, coeffs: &[u64]) -> ExtElem {
        let p = self.p();
        let r = self.inner.r as usize;
        if coeffs.len() <= r {
            let mut v: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
            v.resize(r, 0);
            ExtElem(v)
        } else {
            let red = poly::rem(&self.inner.base, &PolyFp::from_u64s(p, coeffs), &self.inner.modulus);
            self.elem(red.coeffs())
        }
    }

    pub fn embed(&self, c: u64) -> ExtElem {
        self.from_base(c)
    }

    /// The class of `x`, a root of the modulus.
    pub fn generator_x(&self) -> ExtElem {
        self.elem(&[0, 1])
    }

    /// The element's value if it lies in the prime subfield.
    pub fn as_base(&self, z: &ExtElem) -> Option<u64> {
        if z.0[1..].iter().all(|&c| c == 0) {
            Some(z.0[0])
        } else {
            None
        }
    }

    /// `z^p`, applied as a linear map in the polynomial basis.
    pub fn frobenius(&self, z: &ExtElem) -> ExtElem {
        let p = self.p();
        let r = self.inner.r as usize;
        let mut out = vec![0u64; r];
        for (c, row) in z.0.iter().zip(&self.inner.frob_rows) {
            if *c == 0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(row) {
                *o = add_mod(*o, mul_mod(*c, *v, p), p);
            }
        }
        ExtElem(out)
    }

    /// `z^{p^k}`.
    pub fn frobenius_pow(&self, z: &ExtElem, k: u32) -> ExtElem {
        (0..k % self.inner.r).fold(z.clone(), |acc, _| self.frobenius(&acc))
    }

    /// `z + z^p + … + z^{p^{d-1}}`; with `d = r` this is the absolute trace.
    pub fn partial_trace(&self, z: &ExtElem, d: u32) -> ExtElem {
        let mut acc = self.zero();
        let mut cur = z.clone();
        for _ in 0..d {
            acc = self.add(&acc, &cur);
            cur = self.frobenius(&cur);
        }
        acc
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, z: &ExtElem) -> u64 {
        let t = self.partial_trace(z, self.inner.r);
        self.as_base(&t).expect("trace lies in the prime field")
    }

    /// Least `t ≥ 1` with `z^t = 1`, found by stripping prime factors of p^r − 1.
    pub fn mult_order(&self, z: &ExtElem) -> Result<u64> {
        if self.is_zero(z) {
            return Err(Error::ZeroElement);
        }
        let mut t = self.inner.size - 1;
        for &(q, _) in &self.inner.group_factors {
            while t % q == 0 && self.is_one(&self.pow(z, t / q)) {
                t /= q;
            }
        }
        Ok(t)
    }

    /// Minimal polynomial over F_p: the product of `x − z^{p^j}` over the distinct conjugates.
    pub fn min_poly(&self, z: &ExtElem) -> PolyFp {
        let mut conj = vec![z.clone()];
        loop {
            let next = self.frobenius(conj.last().unwrap());
            if next == *z {
                break;
            }
            conj.push(next);
        }
        let mut acc = poly::one(self);
        for c in &conj {
            let lin = poly::from_coeffs(self, vec![self.neg(c), self.one()]);
            acc = poly::mul(self, &acc, &lin);
        }
        let coeffs: Vec<u64> = acc
            .coeffs()
            .iter()
            .map(|c| self.as_base(c).expect("minimal polynomial has base coefficients"))
            .collect();
        PolyFp::from_u64s(self.p(), &coeffs)
    }

    /// Element with index `i` in base-p digit order, for exhaustive scans.
    pub fn from_index(&self, mut i: u64) -> ExtElem {
        let p = self.p();
        let v = (0..self.inner.r)
            .map(|_| {
                let c = i % p;
                i /= p;
                c
            })
            .collect();
        ExtElem(v)
    }

    /// Every field element, zero first. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        (0..self.inner.size).map(move |i| self.from_index(i))
    }

    /// First element of order p^r − 1 in index order.
    pub fn primitive_element(&self) -> ExtElem {
        let n = self.inner.size - 1;
        (1..self.inner.size)
            .map(|i| self.from_index(i))
            .find(|z| self.mult_order(z) == Ok(n))
            .expect("the multiplicative group is cyclic")
    }
}

impl FiniteField for ExtField {
    type Elem = ExtElem;

    fn zero(&self) -> ExtElem {
        ExtElem(vec![0; self.inner.r as usize])
    }

    fn one(&self) -> ExtElem {
        self.from_base(1)
    }

    fn is_zero(&self, a: &ExtElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let p = self.p();
        ExtElem(a.0.iter().zip(&b.0).map(|(&x, &y)| add_mod(x, y, p)).collect())
    }

    fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let p = self.p();
        ExtElem(a.0.iter().zip(&b.0).map(|(&x, &y)| sub_mod(x, y, p)).collect())
    }

    fn neg(&self, a: &ExtElem) -> ExtElem {
        let p = self.p();
        ExtElem(a.0.iter().map(|&x| sub_mod(0, x, p)).collect())
    }

    fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let p = self.p();
        let r = self.inner.r as usize;
        if r == 1 {
            return ExtElem(vec![mul_mod(a.0[0], b.0[0], p)]);
        }
        let mut t = vec![0u64; 2 * r - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                t[i + j] = add_mod(t[i + j], mul_mod(x, y, p), p);
            }
        }
        let m = self.inner.modulus.coeffs();
        for i in (r..2 * r - 1).rev() {
            let c = t[i];
            if c == 0 {
                continue;
            }
            for j in 0..r {
                t[i - r + j] = sub_mod(t[i - r + j], mul_mod(c, m[j], p), p);
            }
        }
        t.truncate(r);
        ExtElem(t)
    }

    fn inv(&self, a: &ExtElem) -> Option<ExtElem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.inner.size - 2))
        }
    }

    fn from_base(&self, c: u64) -> ExtElem {
        let mut v = vec![0; self.inner.r as usize];
        v[0] = c % self.p();
        ExtElem(v)
    }

    fn characteristic(&self) -> u64 {
        self.p()
    }

    fn degree(&self) -> u32 {
        self.inner.r
    }

    fn size(&self) -> u64 {
        self.inner.size
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtElem {
        let p = self.p();
        ExtElem((0..self.inner.r).map(|_| rng.gen_range(0..p)).collect())
    }
}

/// Builds F_{p^r} deterministically from `seed`.
pub fn make_ext_field(p: u64, r: u32, seed: u64) -> Result<ExtField> {
    ExtField::new(p, r, seed)
}
