//! `Q_p` at a fixed working precision with effective-precision tracking.

use alloc::vec::Vec;
use core::fmt;

use crate::arith::{inv_mod, is_prime, legendre, mul_mod, pow_mod, val_p};
use crate::error::{Error, Result};

/// The prime `p`, the working precision `N` and the rank `ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeConfig {
    pub p: u64,
    pub n: u32,
    pub ell: u64,
    /// When set, enforce `p > 2ℓ` for odd `ℓ`.
    pub strict: bool,
}

impl PrimeConfig {
    pub fn new(p: u64, n: u32, ell: u64) -> Result<Self> {
        let cfg = PrimeConfig { p, n, ell, strict: true };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same checks minus the `p > 2ℓ` bound.
    pub fn relaxed(p: u64, n: u32, ell: u64) -> Result<Self> {
        let cfg = PrimeConfig { p, n, ell, strict: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 2 || !is_prime(self.p) {
            return Err(Error::InvalidConfig("p must be an odd prime"));
        }
        if !is_prime(self.ell) {
            return Err(Error::InvalidConfig("ell must be prime"));
        }
        if self.strict && self.ell != 2 && self.p <= 2 * self.ell {
            return Err(Error::InvalidConfig("odd ell needs p > 2*ell"));
        }
        if self.n < 8 {
            return Err(Error::InvalidConfig("precision N must be at least 8"));
        }
        let mut m: u128 = 1;
        for _ in 0..self.n {
            m *= self.p as u128;
        }
        if m >= 1u128 << 62 {
            return Err(Error::InvalidConfig("p^N must stay below 2^62"));
        }
        Ok(())
    }

    /// `p^k` for `k ≤ N`.
    pub fn pk(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    pub fn modulus(&self) -> u64 {
        self.pk(self.n)
    }
}

/// `p^v·u` with `u` a unit known modulo `p^prec`.
#[derive(Clone, Copy, Debug)]
pub struct PadicNumber {
    p: u64,
    v: i64,
    unit: u64,
    prec: u32,
    zero: bool,
}

impl PartialEq for PadicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.zero || other.zero {
            return self.zero == other.zero;
        }
        if self.v != other.v {
            return false;
        }
        let m = self.p.pow(self.prec.min(other.prec));
        self.unit % m == other.unit % m
    }
}

impl PadicNumber {
    pub fn zero(cfg: &PrimeConfig) -> Self {
        PadicNumber { p: cfg.p, v: 0, unit: 0, prec: cfg.n, zero: true }
    }

    /// `p^v·unit` with full working precision; `unit` must be prime to `p`.
    pub fn from_parts(cfg: &PrimeConfig, v: i64, unit: u64) -> Self {
        assert!(!unit.is_multiple_of(cfg.p), "unit part divisible by p");
        PadicNumber { p: cfg.p, v, unit: unit % cfg.modulus(), prec: cfg.n, zero: false }
    }

    /// `p^v·unit` with the unit known modulo `p^prec`.
    pub fn from_parts_prec(p: u64, v: i64, unit: u64, prec: u32) -> Result<Self> {
        if prec < 1 {
            return Err(Error::PrecisionExhausted);
        }
        assert!(!unit.is_multiple_of(p), "unit part divisible by p");
        Ok(PadicNumber { p, v, unit: unit % p.pow(prec), prec, zero: false })
    }

    pub fn from_int(cfg: &PrimeConfig, n: i64) -> Self {
        if n == 0 {
            return Self::zero(cfg);
        }
        let v = val_p(n.unsigned_abs(), cfg.p);
        let m = cfg.modulus() as i128;
        let u = (n / cfg.p.pow(v) as i64) as i128;
        PadicNumber { p: cfg.p, v: v as i64, unit: u.rem_euclid(m) as u64, prec: cfg.n, zero: false }
    }

    pub fn from_rational(cfg: &PrimeConfig, a: i64, b: i64) -> Result<Self> {
        Self::from_int(cfg, a).div(&Self::from_int(cfg, b))
    }

    pub fn one(cfg: &PrimeConfig) -> Self {
        Self::from_int(cfg, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Valuation; `i64::MAX` for zero.
    pub fn val(&self) -> i64 {
        if self.zero {
            i64::MAX
        } else {
            self.v
        }
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Residue of the unit part modulo `p`.
    pub fn unit_residue(&self) -> u64 {
        self.unit % self.p
    }

    fn modulus(&self) -> u64 {
        self.p.pow(self.prec)
    }

    /// Base-`p` digits of the unit part, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let mut u = self.unit;
        (0..self.prec)
            .map(|_| {
                let d = u % self.p;
                u /= self.p;
                d
            })
            .collect()
    }

    pub fn from_unit_digits(p: u64, v: i64, digits: &[u64]) -> Result<Self> {
        let mut u = 0u64;
        for &d in digits.iter().rev() {
            u = u * p + d;
        }
        if digits.is_empty() || digits[0] == 0 {
            return Err(Error::Precondition("unit digits must start with a nonzero digit"));
        }
        Self::from_parts_prec(p, v, u, digits.len() as u32)
    }

    /// The integer `p^v·u mod p^k` for a `p`-adic integer.
    pub fn mod_pk(&self, k: u32) -> Result<u64> {
        let m = self.p.pow(k);
        if self.zero || self.v >= k as i64 {
            return Ok(0);
        }
        if self.v < 0 {
            return Err(Error::Precondition("not a p-adic integer"));
        }
        if self.v + (self.prec as i64) < k as i64 {
            return Err(Error::PrecisionExhausted);
        }
        Ok(mul_mod(self.p.pow(self.v as u32), self.unit, m))
    }

    pub fn neg(&self) -> Self {
        if self.zero {
            return *self;
        }
        let m = self.modulus();
        PadicNumber { unit: (m - self.unit) % m, ..*self }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.zero {
            return *self;
        }
        if other.zero {
            return *other;
        }
        let prec = self.prec.min(other.prec);
        let m = self.p.pow(prec);
        PadicNumber {
            p: self.p,
            v: self.v + other.v,
            unit: mul_mod(self.unit % m, other.unit % m, m),
            prec,
            zero: false,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.zero {
            return Ok(*other);
        }
        if other.zero {
            return Ok(*self);
        }
        let (a, b) = if self.v <= other.v { (self, other) } else { (other, self) };
        let d = (b.v - a.v) as u64;
        // relative precision of the sum with respect to p^{a.v}
        let prec = (a.prec as u64).min(d + b.prec as u64) as u32;
        let m = self.p.pow(prec);
        let shift = if d >= prec as u64 { 0 } else { self.p.pow(d as u32) };
        let s = ((a.unit % m) as u128 + (shift as u128 * (b.unit % m) as u128) % m as u128)
            % m as u128;
        let s = s as u64;
        if s == 0 {
            return Ok(PadicNumber { p: self.p, v: 0, unit: 0, prec, zero: true });
        }
        let k = val_p(s, self.p);
        let prec2 = prec - k;
        if prec2 < 1 {
            return Err(Error::PrecisionExhausted);
        }
        Ok(PadicNumber {
            p: self.p,
            v: a.v + k as i64,
            unit: (s / self.p.pow(k)) % self.p.pow(prec2),
            prec: prec2,
            zero: false,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.zero {
            return Err(Error::DivisionByZero);
        }
        let m = self.modulus();
        Ok(PadicNumber { v: -self.v, unit: inv_mod(self.unit, m).unwrap(), ..*self })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if self.zero {
            if e <= 0 {
                return Err(Error::DivisionByZero);
            }
            return Ok(*self);
        }
        let base = if e < 0 { self.inv()? } else { *self };
        let m = self.modulus();
        Ok(PadicNumber {
            v: base.v * e.abs(),
            unit: pow_mod(base.unit, e.unsigned_abs(), m),
            ..base
        })
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.zero {
            return *self;
        }
        PadicNumber { v: self.v + k, ..*self }
    }

    /// Even valuation and square unit residue.
    pub fn is_square(&self) -> bool {
        assert!(!self.zero, "is_square of zero");
        self.v % 2 == 0 && legendre(self.unit_residue() as i64, self.p) == 1
    }

    /// Square root whose unit residue lies in `{1, …, (p-1)/2}`.
    pub fn sqrt_hensel(&self) -> Result<Self> {
        if self.zero {
            return Ok(*self);
        }
        if !self.is_square() {
            return Err(Error::NotASquare);
        }
        let p = self.p;
        let r = self.unit_residue();
        let r0 = (1..=(p - 1) / 2).find(|x| x * x % p == r).unwrap();
        let m = self.modulus();
        let mut y = r0 % m;
        // Newton: y <- y - (y^2 - u)/(2y); converges quadratically.
        for _ in 0..=self.prec {
            let y2 = mul_mod(y, y, m);
            let num = (y2 + m - self.unit % m) % m;
            let den = inv_mod(mul_mod(2, y, m), m).unwrap();
            y = (y + m - mul_mod(num, den, m)) % m;
        }
        Ok(PadicNumber { p, v: self.v / 2, unit: y, prec: self.prec, zero: false })
    }

    /// The Teichmüller representative of a nonzero residue `r mod p`.
    pub fn teichmuller(cfg: &PrimeConfig, r: u64) -> Self {
        let r = r % cfg.p;
        assert!(r != 0, "teichmuller of zero residue");
        let m = cfg.modulus();
        let mut x = r;
        for _ in 0..cfg.n {
            x = pow_mod(x, cfg.p, m);
        }
        PadicNumber { p: cfg.p, v: 0, unit: x, prec: cfg.n, zero: false }
    }

    /// The same number with precision capped at `prec`.
    pub fn with_prec(&self, prec: u32) -> Self {
        if self.zero || prec >= self.prec {
            return *self;
        }
        PadicNumber { unit: self.unit % self.p.pow(prec), prec, ..*self }
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            write!(f, "0")
        } else {
            write!(f, "{}^{}*{} (+O({}^{}))", self.p, self.v, self.unit, self.p, self.prec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u64) -> PrimeConfig {
        PrimeConfig::new(p, 10, 2).unwrap()
    }

    #[test]
    fn config_rules() {
        assert!(PrimeConfig::new(2, 10, 2).is_err());
        assert!(PrimeConfig::new(5, 10, 3).is_err());
        assert!(PrimeConfig::new(7, 10, 3).is_ok());
        assert!(PrimeConfig::new(3, 7, 2).is_err());
        assert!(PrimeConfig::relaxed(5, 10, 3).is_ok());
    }

    #[test]
    fn spec_examples() {
        let c = cfg(5);
        let a = PadicNumber::from_parts(&c, 0, 2);
        let b = PadicNumber::from_parts(&c, 1, 3);
        let ab = a.mul(&b);
        assert_eq!((ab.val(), ab.unit()), (1, 6));
        assert!(a.add(&a.neg()).unwrap().is_zero());

        let c3 = cfg(3);
        let inv = PadicNumber::from_int(&c3, 4).inv().unwrap();
        // 1 - 3 + 9 - 27 + ... mod 3^10
        let m = 3i64.pow(10);
        let series: i64 = (0..10).map(|k| (-3i64).pow(k)).sum::<i64>().rem_euclid(m);
        assert_eq!(inv.unit() as i64, series);

        assert!(PadicNumber::from_parts(&c3, 2, 1).is_square());
        assert!(!PadicNumber::from_int(&c3, 3).is_square());
        assert!(!PadicNumber::from_int(&cfg(7), 3).is_square());

        assert_eq!(PadicNumber::from_int(&c, 4).sqrt_hensel().unwrap().unit_residue(), 2);
        let c7 = cfg(7);
        let y = PadicNumber::from_int(&c7, 2).sqrt_hensel().unwrap();
        assert_eq!(y.unit_residue(), 3);
        assert_eq!(y.mul(&y), PadicNumber::from_int(&c7, 2));

        let t = PadicNumber::teichmuller(&c, 2);
        assert_eq!(t.pow(4).unwrap(), PadicNumber::one(&c));
        assert_eq!(t.unit_residue(), 2);
        assert_eq!(PadicNumber::teichmuller(&c, 4), PadicNumber::from_int(&c, -1));
    }

    #[test]
    fn cancellation_loses_precision() {
        let c = cfg(3);
        let a = PadicNumber::from_int(&c, 10);
        let b = PadicNumber::from_int(&c, 1);
        let d = a.sub(&b).unwrap();
        assert_eq!(d.val(), 2);
        assert_eq!(d.prec(), 8);
    }

    #[test]
    fn division_by_zero() {
        let c = cfg(3);
        assert_eq!(PadicNumber::one(&c).div(&PadicNumber::zero(&c)), Err(Error::DivisionByZero));
    }
}
