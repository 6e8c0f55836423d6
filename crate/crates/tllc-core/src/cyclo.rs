//! Cyclotomic integers in the power basis of `ζ_m` reduced mod `Φ_m`, and
//! roots of unity kept as exact fractions of a turn.
//!
//! Conductors are normalised so that they are never `2 mod 4`
//! (`Q(ζ_{2k}) = Q(ζ_k)` for odd `k`), and an element whose only nonzero
//! coefficient is the constant one is stored at conductor 1.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::arith::{divisors, euler_phi, gcd, lcm, mobius};
use crate::error::{Error, Result};

/// Largest conductor any operation may produce.
pub const MAX_CONDUCTOR: u64 = 5040;

/// `exp(2πi·num/den)` with `0 ≤ num < den` and `gcd(num, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };
    pub const MINUS_ONE: RootOfUnity = RootOfUnity { num: 1, den: 2 };

    /// `ζ_m^k`.
    pub fn new(k: i64, m: u64) -> Self {
        assert!(m >= 1, "root of unity needs m >= 1");
        let k = k.rem_euclid(m as i64) as u64;
        let g = gcd(k, m);
        if k == 0 {
            return Self::ONE;
        }
        RootOfUnity { num: k / g, den: m / g }
    }

    pub fn from_sign(s: i32) -> Self {
        if s >= 0 {
            Self::ONE
        } else {
            Self::MINUS_ONE
        }
    }

    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn inv(&self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn pow(&self, e: i64) -> Self {
        let e = e.rem_euclid(self.den as i64) as u128;
        let k = (self.num as u128 * e) % self.den as u128;
        Self::new(k as i64, self.den)
    }

    /// The value as ±1 if it is real.
    pub fn as_sign(&self) -> Option<i32> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// Exponent of this root as a power of `ζ_m`, if `m` is a multiple of the order.
    pub fn exponent_in(&self, m: u64) -> Option<u64> {
        if !m.is_multiple_of(self.den) {
            return None;
        }
        Some(self.num * (m / self.den))
    }

    /// Errors when the order exceeds [`MAX_CONDUCTOR`].
    pub fn to_cyc(&self) -> Result<CycInt> {
        CycInt::from_terms(self.den, [(self.num, 1)])
    }
}

impl Mul for RootOfUnity {
    type Output = RootOfUnity;
    fn mul(self, rhs: Self) -> Self {
        let m = lcm(self.den, rhs.den);
        let k = self.num * (m / self.den) + rhs.num * (m / rhs.den);
        RootOfUnity::new((k % m) as i64, m)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.den {
            1 => write!(f, "1"),
            2 => write!(f, "-1"),
            d => write!(f, "z{}^{}", d, self.num),
        }
    }
}

/// Reduction data for one conductor: `Φ_m` and `x^j mod Φ_m` for `φ(m) ≤ j < m`.
struct Table {
    phi: usize,
    rows: Vec<i64>,
}

impl Table {
    fn build(m: u64) -> Table {
        let poly = cyclotomic_poly(m);
        let phi = poly.len() - 1;
        let mut rows = Vec::with_capacity((m as usize - phi) * phi);
        // x^phi = -(Φ_m - x^phi)
        let mut cur: Vec<i64> = poly[..phi].iter().map(|c| -c).collect();
        for j in phi..m as usize {
            if j > phi {
                let top = cur[phi - 1];
                for i in (1..phi).rev() {
                    cur[i] = cur[i - 1] - top * poly[i];
                }
                cur[0] = -top * poly[0];
            }
            rows.extend_from_slice(&cur);
        }
        Table { phi, rows }
    }

    fn row(&self, j: usize) -> &[i64] {
        let start = (j - self.phi) * self.phi;
        &self.rows[start..start + self.phi]
    }
}

#[cfg(feature = "std")]
fn table(m: u64) -> Arc<Table> {
    use std::collections::BTreeMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<BTreeMap<u64, Arc<Table>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&m) {
        return t.clone();
    }
    let t = Arc::new(Table::build(m));
    cache.lock().unwrap().insert(m, t.clone());
    t
}

#[cfg(not(feature = "std"))]
fn table(m: u64) -> Arc<Table> {
    Arc::new(Table::build(m))
}

/// Coefficients of `Φ_m`, constant term first.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    let divs = divisors(m);
    let mut poly = vec![1i64];
    for &d in &divs {
        if mobius(m / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i64; poly.len() + d];
            for (i, &c) in poly.iter().enumerate() {
                next[i] -= c;
                next[i + d] += c;
            }
            poly = next;
        }
    }
    for &d in &divs {
        if mobius(m / d) == -1 {
            // poly = q·(x^d - 1), solved from the low end
            let d = d as usize;
            let qlen = poly.len() - d;
            let mut q = vec![0i64; qlen];
            for i in 0..qlen {
                let prev = if i >= d { q[i - d] } else { 0 };
                q[i] = prev - poly[i];
            }
            poly = q;
        }
    }
    poly
}

fn normal_conductor(m: u64) -> u64 {
    if m % 4 == 2 {
        m / 2
    } else {
        m
    }
}

/// An element of `Z[ζ_m]`.
#[derive(Clone, Debug)]
pub struct CycInt {
    m: u64,
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn zero() -> Self {
        CycInt { m: 1, coeffs: vec![0] }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        CycInt { m: 1, coeffs: vec![n] }
    }

    /// `ζ_m^k` in canonical form.
    pub fn root_of_unity(m: u64, k: i64) -> Result<Self> {
        RootOfUnity::new(k, m).to_cyc()
    }

    /// Builds `Σ c·ζ_m^e` from exponent/coefficient pairs.
    pub fn from_terms<I: IntoIterator<Item = (u64, i64)>>(m: u64, terms: I) -> Result<Self> {
        let (m, flip) = if m % 4 == 2 { (m / 2, true) } else { (m, false) };
        if m > MAX_CONDUCTOR {
            return Err(Error::ConductorOverflow(m));
        }
        let mut acc = vec![0i64; m as usize];
        for (e, c) in terms {
            if flip {
                // ζ_{2m} = -ζ_m^{(m+1)/2} for odd m
                let e2 = e % (2 * m);
                let sign = if e2 % 2 == 1 { -1 } else { 1 };
                let j = (e2 * m.div_ceil(2)) % m;
                acc[j as usize] += sign * c;
            } else {
                acc[(e % m) as usize] += c;
            }
        }
        Ok(Self::reduce_dense(m, acc))
    }

    /// Sum of roots of unity with integer multiplicities.
    pub fn from_roots<I: IntoIterator<Item = (RootOfUnity, i64)>>(terms: I) -> Result<Self> {
        let terms: Vec<(RootOfUnity, i64)> = terms.into_iter().collect();
        let m = terms.iter().fold(1, |acc, (r, _)| lcm(acc, r.order()));
        if normal_conductor(m) > MAX_CONDUCTOR {
            return Err(Error::ConductorOverflow(m));
        }
        Self::from_terms(m, terms.iter().map(|(r, c)| (r.exponent_in(m).unwrap(), *c)))
    }

    fn reduce_dense(m: u64, mut acc: Vec<i64>) -> Self {
        let phi = euler_phi(m) as usize;
        if acc[phi..].iter().any(|&c| c != 0) {
            let t = table(m);
            for j in phi..m as usize {
                let c = acc[j];
                if c != 0 {
                    let row = t.row(j);
                    for i in 0..phi {
                        acc[i] += c * row[i];
                    }
                }
            }
        }
        acc.truncate(phi);
        let mut out = CycInt { m, coeffs: acc };
        out.shrink_rational();
        out
    }

    fn shrink_rational(&mut self) {
        if self.m > 1 && self.coeffs[1..].iter().all(|&c| c == 0) {
            self.coeffs.truncate(1);
            self.m = 1;
        }
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    /// Power-basis coefficients, constant term first.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Rebuilds from stored power-basis coefficients (as produced by [`Self::coeffs`]).
    pub fn from_coeffs(m: u64, coeffs: &[i64]) -> Result<Self> {
        Self::from_terms(m, coeffs.iter().enumerate().map(|(i, &c)| (i as u64, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The value as an integer, if it is rational.
    pub fn as_int(&self) -> Option<i64> {
        if self.m == 1 {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    fn terms_at(&self, l: u64) -> impl Iterator<Item = (u64, i64)> + '_ {
        let step = l / self.m;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (i as u64 * step, c))
    }

    fn common(&self, other: &CycInt) -> Result<u64> {
        let l = lcm(self.m, other.m);
        if l > MAX_CONDUCTOR {
            return Err(Error::ConductorOverflow(l));
        }
        Ok(l)
    }

    pub fn try_add(&self, other: &CycInt) -> Result<CycInt> {
        let l = self.common(other)?;
        Self::from_terms(l, self.terms_at(l).chain(other.terms_at(l)))
    }

    pub fn try_sub(&self, other: &CycInt) -> Result<CycInt> {
        let l = self.common(other)?;
        Self::from_terms(
            l,
            self.terms_at(l).chain(other.terms_at(l).map(|(e, c)| (e, -c))),
        )
    }

    pub fn try_mul(&self, other: &CycInt) -> Result<CycInt> {
        let l = self.common(other)?;
        let a: Vec<(u64, i64)> = self.terms_at(l).collect();
        let b: Vec<(u64, i64)> = other.terms_at(l).collect();
        let mut acc = vec![0i64; l as usize];
        for &(ea, ca) in &a {
            for &(eb, cb) in &b {
                acc[((ea + eb) % l) as usize] += ca * cb;
            }
        }
        Self::from_terms(l, acc.into_iter().enumerate().map(|(i, c)| (i as u64, c)))
    }

    pub fn scale(&self, k: i64) -> CycInt {
        let mut out = CycInt { m: self.m, coeffs: self.coeffs.iter().map(|c| c * k).collect() };
        if k == 0 {
            out = CycInt::zero();
        }
        out
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> CycInt {
        let m = self.m;
        Self::from_terms(m, self.terms_at(m).map(|(e, c)| ((m - e) % m, c)))
            .expect("conductor unchanged")
    }

    /// Galois automorphism `ζ_m ↦ ζ_m^k` for `k` prime to the conductor.
    pub fn galois(&self, k: u64) -> CycInt {
        let m = self.m;
        Self::from_terms(m, self.terms_at(m).map(|(e, c)| ((e * (k % m)) % m, c)))
            .expect("conductor unchanged")
    }

    pub fn mul_root(&self, r: RootOfUnity) -> Result<CycInt> {
        let l = lcm(self.m, r.order());
        if normal_conductor(l) > MAX_CONDUCTOR {
            return Err(Error::ConductorOverflow(l));
        }
        let shift = r.exponent_in(l).unwrap();
        Self::from_terms(l, self.terms_at(l).map(|(e, c)| ((e + shift) % l, c)))
    }

    pub fn pow(&self, e: u32) -> Result<CycInt> {
        let mut out = CycInt::one();
        for _ in 0..e {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// If this element is a root of unity, returns it.
    pub fn as_root(&self) -> Option<RootOfUnity> {
        let m = if self.m % 2 == 1 { 2 * self.m } else { self.m };
        (0..m)
            .map(|k| RootOfUnity::new(k as i64, m))
            .find(|r| r.to_cyc().as_ref() == Ok(self))
    }

    /// Every power-basis coefficient divisible by `d`.
    pub fn divisible_by(&self, d: i64) -> bool {
        self.coeffs.iter().all(|c| c % d == 0)
    }

    pub fn div_exact(&self, d: i64) -> CycInt {
        debug_assert!(self.divisible_by(d));
        CycInt { m: self.m, coeffs: self.coeffs.iter().map(|c| c / d).collect() }
    }

    /// Floating-point image under `ζ_m ↦ exp(2πi/m)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let t = 2.0 * core::f64::consts::PI * i as f64 / self.m as f64;
                re += c as f64 * libm::cos(t);
                im += c as f64 * libm::sin(t);
            }
        }
        (re, im)
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        if self.m == other.m {
            return self.coeffs == other.coeffs;
        }
        match self.try_sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl Eq for CycInt {}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.try_add(rhs).expect("conductor overflow")
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.try_sub(rhs).expect("conductor overflow")
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.try_mul(rhs).expect("conductor overflow")
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.scale(-1)
    }
}

impl TryFrom<RootOfUnity> for CycInt {
    type Error = Error;
    fn try_from(r: RootOfUnity) -> Result<Self> {
        r.to_cyc()
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_int() {
            return write!(f, "{n}");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ => write!(f, "{c}*z{}^{i}", self.m)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let i = CycInt::root_of_unity(4, 1).unwrap();
        let i3 = CycInt::root_of_unity(4, 3).unwrap();
        assert!((&i + &i3).is_zero());
        let z8 = CycInt::root_of_unity(8, 1).unwrap();
        assert_eq!(&z8 * &z8, CycInt::root_of_unity(4, 1).unwrap());
        let w = &CycInt::root_of_unity(3, 1).unwrap() + &CycInt::root_of_unity(3, 2).unwrap();
        assert_eq!(w, CycInt::from_int(-1));
        assert_eq!(CycInt::root_of_unity(2, 1).unwrap(), CycInt::from_int(-1));
        assert_eq!(CycInt::root_of_unity(1, 0).unwrap(), CycInt::one());
        let r = CycInt::root_of_unity(8, 2).unwrap();
        assert_eq!(r.conductor(), 4);
        assert_eq!(r.coeffs(), &[0, 1]);
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), [-1, 1]);
        assert_eq!(cyclotomic_poly(6), [1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), [1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(9), [1, 0, 0, 1, 0, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_poly(105).contains(&-2));
    }

    #[test]
    fn odd_times_two_conductor() {
        // ζ_6 = -ζ_3^2
        let z6 = CycInt::root_of_unity(6, 1).unwrap();
        assert_eq!(z6, -&CycInt::root_of_unity(3, 2).unwrap());
        assert_eq!(z6.conductor(), 3);
    }

    #[test]
    fn as_root_recovers() {
        let r = RootOfUnity::new(5, 24);
        assert_eq!(r.to_cyc().unwrap().as_root(), Some(r));
        assert_eq!(CycInt::from_int(2).as_root(), None);
    }
}
