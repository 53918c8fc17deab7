//! Word-sized integer arithmetic: modular products and powers, primality,
//! integer factorization and divisor lattices.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial division covers every prime below this bound before Pollard rho takes over.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    if s >= m as u128 {
        (s - m as u128) as u64
    } else {
        s as u64
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime via Fermat. Returns `None` for zero.
pub fn inv_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Reduces a signed integer into `[0, m)`.
pub fn reduce_i128(v: i128, m: u64) -> u64 {
    v.rem_euclid(m as i128) as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// `base^exp` if it fits in a `u64`.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set is exact below 2^64.
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_BOUND))
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut power = 1u64;
        let mut lam = 1u64;
        while g == 1 {
            if power == lam {
                x = y;
                power *= 2;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            g = gcd(x.abs_diff(y), n);
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
///
/// Trial division by every prime below 10^6, then Pollard rho on the cofactor.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for &q in small_primes() {
        if q * q > n {
            break;
        }
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
    }
    if n > 1 {
        let mut rest = Vec::new();
        factor_into(n, &mut rest);
        rest.sort_unstable();
        for q in rest {
            match out.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    out
}

/// All positive divisors of the number whose factorization is given, ascending.
pub fn divisors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(q, e) in factors {
        let len = divs.len();
        let mut pw = 1u64;
        for _ in 0..e {
            pw *= q;
            for i in 0..len {
                divs.push(divs[i] * pw);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

/// Least prime divisor; `None` for `n < 2`.
pub fn least_prime_divisor(n: u64) -> Option<u64> {
    factorize(n).first().map(|&(q, _)| q)
}

/// Multiplicative order of `a` modulo the prime `p`, given the factorization of `p - 1`.
pub fn order_mod_prime(a: u64, p: u64, group_factors: &[(u64, u32)]) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let mut t = p - 1;
    for &(q, _) in group_factors {
        while t % q == 0 && pow_mod(a, t / q, p) == 1 {
            t /= q;
        }
    }
    Some(t)
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64, group_factors: &[(u64, u32)]) -> u64 {
    if p == 2 {
        return 1;
    }
    (2..p)
        .find(|&g| group_factors.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// A positive rational exponent `num/den`, used for thresholds such as `p^ε`.
///
/// All comparisons against powers are carried out with exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponent {
    pub num: u64,
    pub den: u64,
}

impl Exponent {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("exponent denominator is zero"));
        }
        let g = gcd(num, den).max(1);
        Ok(Exponent {
            num: num / g,
            den: den / g,
        })
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        let num = self.num * other.den + other.num * self.den;
        let den = self.den * other.den;
        Exponent::new(num, den).expect("nonzero denominator")
    }

    /// `x > base^self`, decided exactly as `x^den > base^num`.
    pub fn exceeded_by(&self, x: u64, base: u64) -> bool {
        BigUint::from(x).pow(self.den as u32) > BigUint::from(base).pow(self.num as u32)
    }

    /// `x < base^self`, decided exactly.
    pub fn exceeds(&self, x: u64, base: u64) -> bool {
        BigUint::from(x).pow(self.den as u32) < BigUint::from(base).pow(self.num as u32)
    }

    /// Largest integer `t` with `t ≤ base^self`.
    pub fn floor_pow(&self, base: u64) -> u64 {
        let target = BigUint::from(base).pow(self.num as u32);
        // Binary search on t with t^den ≤ target.
        let (mut lo, mut hi) = (0u64, 1u64);
        while BigUint::from(hi).pow(self.den as u32) <= target {
            lo = hi;
            match hi.checked_mul(2) {
                Some(h) => hi = h,
                None => return u64::MAX,
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if BigUint::from(mid).pow(self.den as u32) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Smallest integer `c` with `c ≥ base^self`.
    pub fn ceil_pow(&self, base: u64) -> u64 {
        let f = self.floor_pow(base);
        let exact = BigUint::from(f).pow(self.den as u32) == BigUint::from(base).pow(self.num as u32);
        if exact {
            f
        } else {
            f + 1
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("expected a fraction m/k, got {s:?}"));
        match s.split_once('/') {
            Some((m, k)) => {
                let m = m.trim().parse().map_err(|_| bad())?;
                let k = k.trim().parse().map_err(|_| bad())?;
                Exponent::new(m, k)
            }
            None => Exponent::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

/// `|x|^k` as an exact big integer.
pub(crate) fn big_pow(x: u64, k: u64) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    BigUint::from(x).pow(k as u32)
}
