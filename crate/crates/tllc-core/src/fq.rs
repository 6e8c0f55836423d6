//! Finite fields `F_p[x]/(h)` with exp/log tables.
//!
//! Elements are encoded as integers `Σ c_i p^i` (`c_i` the coefficient of `x^i`).

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{factor, is_prime};
use crate::error::{Error, Result};

/// Fields larger than this are rejected (tables are built eagerly).
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

#[derive(Clone, Debug)]
pub struct FqField {
    p: u64,
    f: usize,
    q: u64,
    /// Monic modulus, constant term first, length `f + 1`.
    modulus: Vec<u64>,
    generator: u64,
    exp: Vec<u64>,
    log: Vec<u64>,
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // b monic
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (c * bc) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Irreducibility by trial division with all monic polynomials of degree ≤ deg/2.
pub fn is_irreducible(h: &[u64], p: u64) -> bool {
    let deg = h.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                g.push(t % p);
                t /= p;
            }
            g.push(1);
            if poly_rem(h, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FqField {
    /// `F_{p^f}` with the smallest monic irreducible modulus in the integer encoding.
    pub fn new(p: u64, f: usize) -> Result<Self> {
        if !is_prime(p) || f == 0 {
            return Err(Error::InvalidConfig("finite field needs a prime p and f >= 1"));
        }
        let count = p.pow(f as u32);
        for idx in 0..count {
            let mut h = Vec::with_capacity(f + 1);
            let mut t = idx;
            for _ in 0..f {
                h.push(t % p);
                t /= p;
            }
            h.push(1);
            if is_irreducible(&h, p) {
                return Self::with_modulus(p, &h);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// `F_p[x]/(h)` for a monic irreducible `h` (constant term first).
    pub fn with_modulus(p: u64, h: &[u64]) -> Result<Self> {
        let f = h.len() - 1;
        if h[f] != 1 {
            return Err(Error::InvalidConfig("field modulus must be monic"));
        }
        if !is_irreducible(h, p) {
            return Err(Error::InvalidConfig("field modulus must be irreducible"));
        }
        let q = p.pow(f as u32);
        if q > MAX_FIELD_SIZE {
            return Err(Error::InvalidConfig("finite field too large for tables"));
        }
        let mut fld = FqField {
            p,
            f,
            q,
            modulus: h.iter().map(|c| c % p).collect(),
            generator: 0,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let primes: Vec<u64> = factor(q - 1).iter().map(|&(r, _)| r).collect();
        let g = (1..q)
            .find(|&g| primes.iter().all(|&r| fld.pow_slow(g, (q - 1) / r) != 1))
            .expect("multiplicative group is cyclic");
        fld.generator = g;
        let mut exp = vec![0u64; (q - 1) as usize];
        let mut log = vec![u64::MAX; q as usize];
        let mut x = 1u64;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = k as u64;
            x = fld.mul_slow(x, g);
        }
        if x != 1 {
            return Err(Error::Verification("generator order"));
        }
        fld.exp = exp;
        fld.log = log;
        Ok(fld)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The fixed generator of the multiplicative group.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn to_coeffs(&self, a: u64) -> Vec<u64> {
        let mut t = a;
        (0..self.f)
            .map(|_| {
                let c = t % self.p;
                t /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u64]) -> u64 {
        let mut r = 0;
        for i in (0..self.f).rev() {
            let ci = c.get(i).copied().unwrap_or(0) % self.p;
            r = r * self.p + ci;
        }
        r
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (ca, cb) = (self.to_coeffs(a), self.to_coeffs(b));
        let c: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.from_coeffs(&c)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let c: Vec<u64> = self.to_coeffs(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.from_coeffs(&c)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let (ca, cb) = (self.to_coeffs(a), self.to_coeffs(b));
        let mut prod = vec![0u64; 2 * self.f];
        for (i, x) in ca.iter().enumerate() {
            for (j, y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.from_coeffs(&poly_rem(&prod, &self.modulus, self.p))
    }

    fn pow_slow(&self, a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul_slow(r, b);
            }
            b = self.mul_slow(b, b);
            e >>= 1;
        }
        r
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn pow(&self, a: u64, e: i64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let k = (self.log[a as usize] as i128 * e as i128).rem_euclid((self.q - 1) as i128);
        self.exp[k as usize]
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, -1))
        }
    }

    /// Discrete log to the fixed generator.
    pub fn dlog(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    /// `generator^k`.
    pub fn gen_pow(&self, k: i64) -> u64 {
        self.exp[k.rem_euclid((self.q - 1) as i64) as usize]
    }

    /// Frobenius `a ↦ a^p`.
    pub fn frob(&self, a: u64) -> u64 {
        self.pow(a, self.p as i64)
    }

    /// Embedding of the prime field.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f9 = FqField::new(3, 2).unwrap();
        assert_eq!(f9.size(), 9);
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let g = f9.generator();
        assert_eq!(f9.pow(g, 8), 1);
        assert_ne!(f9.pow(g, 4), 1);
        for a in 1..9 {
            assert_eq!(f9.mul(a, f9.inv(a).unwrap()), 1);
        }
        let f8 = FqField::new(2, 3).unwrap();
        assert_eq!(f8.size(), 8);
        assert!(!is_irreducible(&[1, 0, 1], 2));
    }

    #[test]
    fn frobenius_is_additive() {
        let f = FqField::new(5, 2).unwrap();
        for a in 0..25 {
            for b in 0..25 {
                assert_eq!(f.frob(f.add(a, b)), f.add(f.frob(a), f.frob(b)));
            }
        }
    }
}
