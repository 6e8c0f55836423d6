//! Values `q^{r/2}·z` with `z` a cyclotomic integer and `q^{1/2}` a formal symbol.

use core::fmt;

use crate::cyclo::{CycInt, RootOfUnity};
use crate::error::{Error, Result};

/// `q^{half_exp/2}·cyc`, canonicalised so that `cyc` is not divisible by `q`.
///
/// Zero is stored with `half_exp = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactValue {
    q: u64,
    half_exp: i64,
    cyc: CycInt,
}

impl ExactValue {
    pub fn new(q: u64, half_exp: i64, cyc: CycInt) -> Self {
        assert!(q >= 2, "q must be at least 2");
        let mut v = ExactValue { q, half_exp, cyc };
        v.canonicalize();
        v
    }

    pub fn zero(q: u64) -> Self {
        ExactValue::new(q, 0, CycInt::zero())
    }

    pub fn one(q: u64) -> Self {
        ExactValue::new(q, 0, CycInt::one())
    }

    pub fn from_root(q: u64, half_exp: i64, r: RootOfUnity) -> Result<Self> {
        Ok(ExactValue::new(q, half_exp, r.to_cyc()?))
    }

    fn canonicalize(&mut self) {
        if self.cyc.is_zero() {
            self.cyc = CycInt::zero();
            self.half_exp = 0;
            return;
        }
        let q = self.q as i64;
        while self.cyc.divisible_by(q) {
            self.cyc = self.cyc.div_exact(q);
            self.half_exp += 2;
        }
    }

    /// Returns the canonical form; canonical values are returned unchanged.
    pub fn canonical(&self) -> Self {
        ExactValue::new(self.q, self.half_exp, self.cyc.clone())
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn half_exp(&self) -> i64 {
        self.half_exp
    }

    pub fn cyc(&self) -> &CycInt {
        &self.cyc
    }

    pub fn is_zero(&self) -> bool {
        self.cyc.is_zero()
    }

    pub fn mul(&self, other: &ExactValue) -> Result<ExactValue> {
        assert_eq!(self.q, other.q, "values over different q");
        if self.is_zero() || other.is_zero() {
            return Ok(ExactValue::zero(self.q));
        }
        Ok(ExactValue::new(
            self.q,
            self.half_exp + other.half_exp,
            self.cyc.try_mul(&other.cyc)?,
        ))
    }

    /// Sum; defined only when both sides carry the same power of `q^{1/2}`.
    pub fn add(&self, other: &ExactValue) -> Result<ExactValue> {
        assert_eq!(self.q, other.q, "values over different q");
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.half_exp != other.half_exp {
            return Err(Error::HalfExpMismatch(self.half_exp, other.half_exp));
        }
        Ok(ExactValue::new(self.q, self.half_exp, self.cyc.try_add(&other.cyc)?))
    }

    pub fn neg(&self) -> ExactValue {
        ExactValue { q: self.q, half_exp: self.half_exp, cyc: -&self.cyc }
    }

    pub fn conj(&self) -> ExactValue {
        ExactValue { q: self.q, half_exp: self.half_exp, cyc: self.cyc.conj() }
    }

    pub fn mul_root(&self, r: RootOfUnity) -> Result<ExactValue> {
        Ok(ExactValue { q: self.q, half_exp: self.half_exp, cyc: self.cyc.mul_root(r)? })
    }

    /// Multiplies by `q^{k/2}`.
    pub fn shift_half_exp(&self, k: i64) -> ExactValue {
        if self.is_zero() {
            return self.clone();
        }
        ExactValue { q: self.q, half_exp: self.half_exp + k, cyc: self.cyc.clone() }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.half_exp == 0 {
            write!(f, "{}", self.cyc)
        } else {
            write!(f, "q^({}/2)*({})", self.half_exp, self.cyc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let q = 3;
        let a = ExactValue::new(q, 1, CycInt::root_of_unity(8, 1).unwrap());
        let b = ExactValue::new(q, 1, CycInt::root_of_unity(8, -1).unwrap());
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, ExactValue::new(q, 2, CycInt::one()));

        let z = ExactValue::zero(q);
        assert!(z.mul(&a).unwrap().is_zero());

        let v = ExactValue::new(3, -1, CycInt::from_int(3));
        assert_eq!(v.half_exp(), 1);
        assert_eq!(v.cyc(), &CycInt::one());
    }

    #[test]
    fn mismatched_add_is_error() {
        let a = ExactValue::new(5, 1, CycInt::one());
        let b = ExactValue::new(5, 0, CycInt::one());
        assert_eq!(a.add(&b), Err(Error::HalfExpMismatch(1, 0)));
    }
}
