//! Linear recurrence sequences over F_p.
//!
//! A sequence of order `r` satisfies
//! `s_{n+r} = a_{r-1} s_{n+r-1} + … + a_0 s_n` with characteristic polynomial
//! `ω(x) = x^r − a_{r-1} x^{r-1} − … − a_0`. The constant coefficient `a_0` is
//! required to be a unit, which makes the companion map invertible and the
//! sequence purely periodic.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::ff::{self, poly, ExtElem, ExtField, FiniteField, PolyFp, PrimeField};
use crate::guard;

/// Wire form `{p, coeffs, init}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqSpec {
    pub p: u64,
    pub coeffs: Vec<u64>,
    pub init: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeqSpec", into = "SeqSpec")]
pub struct LinRecSeq {
    field: PrimeField,
    coeffs: Vec<u64>,
    init: Vec<u64>,
}

impl TryFrom<SeqSpec> for LinRecSeq {
    type Error = Error;
    fn try_from(s: SeqSpec) -> Result<Self> {
        LinRecSeq::new(s.p, &s.coeffs, &s.init)
    }
}

impl From<LinRecSeq> for SeqSpec {
    fn from(s: LinRecSeq) -> Self {
        SeqSpec {
            p: s.field.p(),
            coeffs: s.coeffs,
            init: s.init,
        }
    }
}

/// Least period of a sequence. `degenerate` marks the all-zero sequence,
/// reported with period 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub tau: u64,
    pub degenerate: bool,
}

impl LinRecSeq {
    /// `coeffs = [a_0, …, a_{r-1}]`, `init = [s_0, …, s_{r-1}]`; values are reduced mod `p`.
    pub fn new(p: u64, coeffs: &[u64], init: &[u64]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if coeffs.is_empty() {
            return Err(Error::invalid("empty coefficient list"));
        }
        if coeffs.len() != init.len() {
            return Err(Error::invalid(format!(
                "{} coefficients but {} initial values",
                coeffs.len(),
                init.len()
            )));
        }
        let coeffs: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
        if coeffs[0] == 0 {
            return Err(Error::ZeroConstantTerm(p));
        }
        Ok(LinRecSeq {
            field,
            coeffs,
            init: init.iter().map(|c| c % p).collect(),
        })
    }

    /// Signed-coefficient convenience constructor.
    pub fn from_signed(p: u64, coeffs: &[i64], init: &[i64]) -> Result<Self> {
        let red = |v: &[i64]| -> Vec<u64> {
            v.iter().map(|&c| arith::reduce_i128(c as i128, p)).collect()
        };
        Self::new(p, &red(coeffs), &red(init))
    }

    /// `F_{n+2} = F_{n+1} + F_n`, `F_0 = 0`, `F_1 = 1`.
    pub fn fibonacci(p: u64) -> Result<Self> {
        Self::new(p, &[1, 1], &[0, 1])
    }

    /// `s_n = g^n`.
    pub fn geometric(p: u64, g: u64) -> Result<Self> {
        Self::new(p, &[g], &[1])
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn init(&self) -> &[u64] {
        &self.init
    }

    pub fn is_zero(&self) -> bool {
        self.init.iter().all(|&c| c == 0)
    }

    /// `ω(x) = x^r − a_{r-1}x^{r-1} − … − a_0`.
    pub fn char_poly(&self) -> PolyFp {
        let p = self.p();
        let mut v: Vec<u64> = self.coeffs.iter().map(|&a| arith::sub_mod(0, a, p)).collect();
        v.push(1);
        PolyFp::from_u64s(p, &v)
    }

    /// `s_n`, via `x^n mod ω(x)` for indices past the initial block.
    pub fn term(&self, n: u64) -> u64 {
        let r = self.order();
        if (n as usize) < r && n < r as u64 {
            return self.init[n as usize];
        }
        let f = &self.field;
        let red = poly::pow_mod(f, &poly::x(f), n, &self.char_poly());
        red.coeffs()
            .iter()
            .zip(&self.init)
            .fold(0, |acc, (c, s)| arith::add_mod(acc, arith::mul_mod(*c, *s, f.p()), f.p()))
    }

    /// Unbounded cursor over `s_0, s_1, …`.
    pub fn iter(&self) -> SeqIter<'_> {
        SeqIter {
            seq: self,
            state: self.init.clone(),
            head: 0,
        }
    }

    /// The first `count` terms.
    pub fn terms(&self, count: usize) -> Vec<u64> {
        self.iter().take(count).collect()
    }

    /// Least period, bounded by the process iteration guard.
    pub fn least_period(&self) -> Result<Period> {
        self.least_period_capped(guard::max_iterations())
    }

    /// Least period with an explicit iteration cap.
    ///
    /// The companion map is a bijection, so the orbit of the initial state is
    /// a pure cycle; the loop therefore only has to wait for the initial state
    /// to reappear. Failing to see it within `p^r` steps would mean a
    /// preperiod, which is reported as an internal error.
    pub fn least_period_capped(&self, limit: u64) -> Result<Period> {
        if self.is_zero() {
            return Ok(Period {
                tau: 1,
                degenerate: true,
            });
        }
        let state_space = arith::checked_pow(self.p(), self.order() as u32).unwrap_or(u64::MAX);
        let mut it = self.iter();
        let r = self.order();
        let first = self.init[0];
        let mut t = 0u64;
        loop {
            it.step();
            t += 1;
            if it.state[it.head] == first && it.matches_init() {
                return Ok(Period {
                    tau: t,
                    degenerate: false,
                });
            }
            if t >= state_space {
                return Err(Error::invalid(format!(
                    "state of order-{r} recurrence did not return within {state_space} steps"
                )));
            }
            if t >= limit {
                return Err(Error::guard("period search steps", t, limit));
            }
        }
    }

    /// Termwise weighted sum `Σ w_i s^{(i)}_n`, realized with the literal
    /// product of the components' characteristic polynomials.
    pub fn combine(seqs: &[LinRecSeq], weights: &[u64]) -> Result<LinRecSeq> {
        let first = seqs.first().ok_or_else(|| Error::invalid("nothing to combine"))?;
        if seqs.len() != weights.len() {
            return Err(Error::invalid("one weight per sequence is required"));
        }
        let p = first.p();
        if let Some(s) = seqs.iter().find(|s| s.p() != p) {
            return Err(Error::ModulusMismatch(p, s.p()));
        }
        let f = &first.field;
        let product = seqs
            .iter()
            .fold(poly::one(f), |acc, s| poly::mul(f, &acc, &s.char_poly()));
        let order = product.degree().unwrap();
        let coeffs: Vec<u64> = product.coeffs()[..order]
            .iter()
            .map(|&c| arith::sub_mod(0, c, p))
            .collect();
        let mut init = vec![0u64; order];
        for (s, &w) in seqs.iter().zip(weights) {
            for (slot, v) in init.iter_mut().zip(s.iter()) {
                *slot = arith::add_mod(*slot, arith::mul_mod(w % p, v, p), p);
            }
        }
        LinRecSeq::new(p, &coeffs, &init)
    }
}

/// Cursor holding the current state window in a ring buffer.
#[derive(Debug, Clone)]
pub struct SeqIter<'a> {
    seq: &'a LinRecSeq,
    state: Vec<u64>,
    head: usize,
}

impl SeqIter<'_> {
    fn step(&mut self) {
        let p = self.seq.p();
        let r = self.state.len();
        let mut next = 0u64;
        for (i, &a) in self.seq.coeffs.iter().enumerate() {
            let s = self.state[(self.head + i) % r];
            next = arith::add_mod(next, arith::mul_mod(a, s, p), p);
        }
        self.state[self.head] = next;
        self.head = (self.head + 1) % r;
    }

    fn matches_init(&self) -> bool {
        let r = self.state.len();
        (0..r).all(|i| self.state[(self.head + i) % r] == self.seq.init[i])
    }
}

impl Iterator for SeqIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let v = self.state[self.head];
        self.step();
        Some(v)
    }
}

/// One irreducible factor `ω_i` of the characteristic polynomial together with
/// its chosen root `α_i`, the Frobenius orbit of that root and the trace coefficient `γ_i`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralComponent {
    pub factor: PolyFp,
    pub degree: usize,
    pub root: ExtElem,
    pub orbit: Vec<ExtElem>,
    pub gamma: ExtElem,
    pub root_order: u64,
}

/// `s_n = Σ_i Tr_{F_{p^{r_i}}/F_p}(γ_i α_i^n)` with all roots living in
/// the splitting field F_{p^L}, `L = lcm(r_i)`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralData {
    pub p: u64,
    pub char_poly: PolyFp,
    pub splitting_degree: u32,
    pub splitting_modulus: PolyFp,
    pub components: Vec<SpectralComponent>,
    pub period: Period,
    #[serde(skip)]
    pub field: ExtField,
}

impl SpectralData {
    pub fn root_orders(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.root_order).collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.degree).collect()
    }

    /// Number of irreducible factors.
    pub fn nu(&self) -> usize {
        self.components.len()
    }

    /// `s_n` recomputed from the trace form.
    pub fn evaluate(&self, n: u64) -> u64 {
        let f = &self.field;
        let mut acc = f.zero();
        for c in &self.components {
            let z = f.mul(&c.gamma, &f.pow(&c.root, n));
            acc = f.add(&acc, &f.partial_trace(&z, c.degree as u32));
        }
        f.as_base(&acc).expect("trace form is F_p-valued")
    }

    /// `s_0, …, s_{count-1}` from the trace form, advancing root powers incrementally.
    pub fn reconstruct(&self, count: usize) -> Vec<u64> {
        let f = &self.field;
        let mut cur: Vec<ExtElem> = self.components.iter().map(|c| c.gamma.clone()).collect();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut acc = f.zero();
            for (c, z) in self.components.iter().zip(cur.iter_mut()) {
                acc = f.add(&acc, &f.partial_trace(z, c.degree as u32));
                *z = f.mul(z, &c.root);
            }
            out.push(f.as_base(&acc).expect("trace form is F_p-valued"));
        }
        out
    }
}

/// Solves `m · x = rhs` over a field by Gaussian elimination; `None` if singular.
fn solve<F: FiniteField>(f: &F, mut m: Vec<Vec<F::Elem>>, mut rhs: Vec<F::Elem>) -> Option<Vec<F::Elem>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&i| !f.is_zero(&m[i][col]))?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = f.inv(&m[col][col])?;
        for j in col..n {
            m[col][j] = f.mul(&m[col][j], &inv);
        }
        rhs[col] = f.mul(&rhs[col], &inv);
        for i in 0..n {
            if i == col || f.is_zero(&m[i][col]) {
                continue;
            }
            let c = m[i][col].clone();
            for j in col..n {
                let t = f.mul(&c, &m[col][j]);
                m[i][j] = f.sub(&m[i][j], &t);
            }
            let t = f.mul(&c, &rhs[col]);
            rhs[i] = f.sub(&rhs[i], &t);
        }
    }
    Some(rhs)
}

/// Decomposes a sequence with square-free characteristic polynomial into
/// trace-of-root-power form. `seed` keys the modulus search and root splitting.
pub fn spectral_decompose(seq: &LinRecSeq, seed: u64) -> Result<SpectralData> {
    let field = seq.field();
    let p = seq.p();
    let omega = seq.char_poly();
    let fac = ff::factor_poly(field, &omega, seed)?;
    if !fac.is_square_free() {
        return Err(Error::RepeatedRoot);
    }
    let degrees = fac.degrees();
    let big_l = degrees.iter().fold(1u64, |acc, &d| arith::lcm(acc, d as u64)) as u32;
    let ext = ExtField::new(p, big_l, seed)?;

    let mut roots_by_factor = Vec::with_capacity(fac.factors.len());
    for (g, _) in &fac.factors {
        roots_by_factor.push(ff::find_roots_in_ext(&ext, g, seed)?);
    }
    let all_roots: Vec<&ExtElem> = roots_by_factor.iter().flatten().collect();
    let r = all_roots.len();

    // Vandermonde system  s_n = Σ_j β_j ρ_j^n,  0 ≤ n < r.
    let mut rows = Vec::with_capacity(r);
    let mut powers: Vec<ExtElem> = vec![ext.one(); r];
    for _ in 0..r {
        rows.push(powers.clone());
        for (pw, rho) in powers.iter_mut().zip(&all_roots) {
            *pw = ext.mul(pw, rho);
        }
    }
    let rhs: Vec<ExtElem> = seq.init().iter().map(|&s| ext.embed(s)).collect();
    let beta = solve(&ext, rows, rhs).ok_or(Error::RepeatedRoot)?;

    let mut components = Vec::with_capacity(fac.factors.len());
    let mut offset = 0;
    for ((g, _), orbit) in fac.factors.iter().zip(roots_by_factor) {
        let d = orbit.len();
        let gamma = beta[offset].clone();
        offset += d;
        let root = orbit[0].clone();
        let root_order = ext.mult_order(&root)?;
        components.push(SpectralComponent {
            factor: g.clone(),
            degree: d,
            root,
            orbit,
            gamma,
            root_order,
        });
    }
    Ok(SpectralData {
        p,
        char_poly: omega,
        splitting_degree: big_l,
        splitting_modulus: ext.modulus().clone(),
        components,
        period: seq.least_period()?,
        field: ext,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_char_poly() {
        let s = LinRecSeq::fibonacci(7).unwrap();
        assert_eq!(s.char_poly(), PolyFp::from_i64s(7, &[-1, -1, 1]));
    }

    #[test]
    fn rejects_zero_constant_term() {
        assert_eq!(LinRecSeq::new(5, &[0, 1], &[1, 1]), Err(Error::ZeroConstantTerm(5)));
        assert!(LinRecSeq::new(5, &[], &[]).is_err());
        assert!(LinRecSeq::new(5, &[1, 1], &[1]).is_err());
    }

    #[test]
    fn geometric_closed_form() {
        let s = LinRecSeq::geometric(7, 3).unwrap();
        let mut g = 1;
        for (n, v) in s.terms(20).into_iter().enumerate() {
            assert_eq!(v, g, "n = {n}");
            g = g * 3 % 7;
        }
        assert_eq!(s.term(6), 1);
    }

    #[test]
    fn fibonacci_terms() {
        let s = LinRecSeq::fibonacci(7).unwrap();
        assert_eq!(s.term(10), 55 % 7);
        assert_eq!(s.term(0), 0);
        assert_eq!(s.term(1), 1);
        let direct = s.terms(200);
        for n in [2u64, 17, 99, 199] {
            assert_eq!(s.term(n), direct[n as usize]);
        }
    }

    #[test]
    fn pisano_spot_values() {
        assert_eq!(LinRecSeq::fibonacci(11).unwrap().least_period().unwrap().tau, 10);
        assert_eq!(LinRecSeq::fibonacci(7).unwrap().least_period().unwrap().tau, 16);
    }

    #[test]
    fn geometric_period_is_order() {
        let f = PrimeField::new(13).unwrap();
        for g in 1..13 {
            let s = LinRecSeq::geometric(13, g).unwrap();
            assert_eq!(s.least_period().unwrap().tau, f.mult_order(g).unwrap());
        }
    }

    #[test]
    fn zero_sequence_is_degenerate() {
        let s = LinRecSeq::new(5, &[1, 2], &[0, 0]).unwrap();
        assert_eq!(
            s.least_period().unwrap(),
            Period {
                tau: 1,
                degenerate: true
            }
        );
    }

    #[test]
    fn period_guard_trips() {
        let s = LinRecSeq::fibonacci(1_000_003).unwrap();
        let err = s.least_period_capped(1000).unwrap_err();
        assert!(err.is_guard());
    }

    #[test]
    fn json_round_trip() {
        let s = LinRecSeq::fibonacci(11).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"p":11,"coeffs":[1,1],"init":[0,1]}"#);
        let back: LinRecSeq = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<LinRecSeq>(r#"{"p":11,"coeffs":[0,1],"init":[0,1]}"#).is_err());
    }

    #[test]
    fn combine_identity_and_superposition() {
        let s = LinRecSeq::fibonacci(13).unwrap();
        let c = LinRecSeq::combine(&[s.clone()], &[1]).unwrap();
        assert_eq!(c.terms(50), s.terms(50));

        let a = LinRecSeq::geometric(7, 2).unwrap();
        let b = LinRecSeq::geometric(7, 3).unwrap();
        let c = LinRecSeq::combine(&[a, b], &[1, 1]).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.char_poly(), PolyFp::from_i64s(7, &[6, -5, 1]));
        let mut x = (1u64, 1u64);
        for v in c.terms(30) {
            assert_eq!(v, (x.0 + x.1) % 7);
            x = (x.0 * 2 % 7, x.1 * 3 % 7);
        }
    }

    #[test]
    fn combine_rejects_mixed_moduli() {
        let a = LinRecSeq::fibonacci(7).unwrap();
        let b = LinRecSeq::fibonacci(11).unwrap();
        assert_eq!(LinRecSeq::combine(&[a, b], &[1, 1]), Err(Error::ModulusMismatch(7, 11)));
    }

    #[test]
    fn spectral_geometric() {
        let s = LinRecSeq::new(11, &[2], &[5]).unwrap();
        let sd = spectral_decompose(&s, 0).unwrap();
        assert_eq!(sd.nu(), 1);
        let c = &sd.components[0];
        assert_eq!(sd.field.as_base(&c.gamma), Some(5));
        assert_eq!(sd.field.as_base(&c.root), Some(2));
        assert_eq!(c.root_order, 10);
    }

    #[test]
    fn spectral_fibonacci_mod_3() {
        let s = LinRecSeq::fibonacci(3).unwrap();
        let sd = spectral_decompose(&s, 0).unwrap();
        assert_eq!(sd.nu(), 1);
        assert_eq!(sd.splitting_degree, 2);
        let c = &sd.components[0];
        assert_eq!(c.orbit[1], sd.field.pow(&c.root, 3));
        assert_eq!(sd.period.tau, 8);
        assert_eq!(sd.reconstruct(8), s.terms(8));
        for n in 0..8 {
            assert_eq!(sd.evaluate(n), s.term(n));
        }
    }

    #[test]
    fn spectral_two_geometrics() {
        // 4·2^n + 6·3^n mod 7
        let a = LinRecSeq::new(7, &[2], &[4]).unwrap();
        let b = LinRecSeq::new(7, &[3], &[6]).unwrap();
        let c = LinRecSeq::combine(&[a, b], &[1, 1]).unwrap();
        let sd = spectral_decompose(&c, 0).unwrap();
        let f = &sd.field;
        let mut amps: Vec<(u64, u64)> = sd
            .components
            .iter()
            .map(|c| (f.as_base(&c.root).unwrap(), f.as_base(&c.gamma).unwrap()))
            .collect();
        amps.sort();
        assert_eq!(amps, vec![(2, 4), (3, 6)]);
    }

    #[test]
    fn spectral_rejects_repeated_root() {
        let s = LinRecSeq::fibonacci(5).unwrap();
        assert_eq!(spectral_decompose(&s, 0).unwrap_err(), Error::RepeatedRoot);
    }
}
