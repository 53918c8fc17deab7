use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::Serialize;

use crate::arith::{self, add_mod, mul_mod, pow_mod, sub_mod};
use crate::error::{Error, Result};

/// Operations shared by the prime field and its extensions.
///
/// Elements are plain values; every operation goes through the field so
/// the modulus data is never duplicated per element.
pub trait FiniteField: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Image of an integer under the prime-field embedding.
    fn from_base(&self, c: u64) -> Self::Elem;
    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> u32;
    /// Number of elements.
    fn size(&self) -> u64;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// The prime field F_p, with the factorization of p − 1 cached for order computations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeField {
    p: u64,
    #[serde(skip)]
    group_factors: Vec<(u64, u32)>,
}

impl PrimeField {
    /// Fails unless `p` is prime and below 2^63.
    pub fn new(p: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 63 {
            return Err(Error::FieldTooLarge { p, r: 1 });
        }
        Ok(PrimeField {
            p,
            group_factors: arith::factorize(p - 1),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn group_factors(&self) -> &[(u64, u32)] {
        &self.group_factors
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        arith::reduce_i128(v, self.p)
    }

    /// Multiplicative order of a nonzero residue.
    pub fn mult_order(&self, a: u64) -> Result<u64> {
        arith::order_mod_prime(a, self.p, &self.group_factors).ok_or(Error::ZeroElement)
    }

    /// Legendre symbol via Euler's criterion, for odd p.
    pub fn legendre(&self, a: u64) -> i8 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.p == 2 {
            return 1;
        }
        if pow_mod(a, (self.p - 1) / 2, self.p) == 1 {
            1
        } else {
            -1
        }
    }

    pub fn primitive_root(&self) -> u64 {
        arith::primitive_root(self.p, &self.group_factors)
    }
}

impl FiniteField for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.p)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        arith::inv_mod_prime(*a, self.p)
    }
    fn from_base(&self, c: u64) -> u64 {
        c % self.p
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn size(&self) -> u64 {
        self.p
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn pow(&self, a: &u64, e: u64) -> u64 {
        pow_mod(*a, e, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert!(PrimeField::new(2).is_ok());
    }

    #[test]
    fn order_of_two_mod_seven() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.mult_order(2), Ok(3));
        assert_eq!(f.mult_order(1), Ok(1));
        assert_eq!(f.mult_order(0), Err(Error::ZeroElement));
    }

    #[test]
    fn legendre_matches_squares() {
        let f = PrimeField::new(13).unwrap();
        let squares: Vec<u64> = (1..13).map(|x| x * x % 13).collect();
        for a in 1..13 {
            assert_eq!(f.legendre(a) == 1, squares.contains(&a));
        }
        assert_eq!(f.legendre(0), 0);
    }
}
