//! Tame extensions `E = F[x]/(g)` of `F = Q_p` and their elements.
//!
//! An element is `p^k·Σ c_i x^i` with the `c_i` known modulo `p^prec` and not
//! all divisible by `p`. For ramified kinds `x` is the uniformiser; for
//! unramified kinds the uniformiser is `p`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{inv_mod, legendre, mul_mod, pow_mod, primitive_root, val_p};
use crate::error::{Error, Result};
use crate::fq::FqField;
use crate::padic::{PadicNumber, PrimeConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtKind {
    /// `x² - u₀` with `u₀` a nonsquare unit.
    UnramQuad,
    /// `x² - Δ` with `v(Δ) = 1`.
    RamQuad,
    /// Degree `ℓ`, irreducible mod `p`.
    UnramL,
    /// `x^ℓ - Δ` with `v(Δ) = 1` and `ℓ | p - 1`.
    RamGaloisL,
}

impl ExtKind {
    pub const ALL: [ExtKind; 4] =
        [ExtKind::UnramQuad, ExtKind::RamQuad, ExtKind::UnramL, ExtKind::RamGaloisL];

    pub fn name(&self) -> &'static str {
        match self {
            ExtKind::UnramQuad => "UnramQuad",
            ExtKind::RamQuad => "RamQuad",
            ExtKind::UnramL => "UnramL",
            ExtKind::RamGaloisL => "RamGaloisL",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        ExtKind::ALL.iter().copied().find(|k| k.name() == s)
    }

    pub fn is_ramified(&self) -> bool {
        matches!(self, ExtKind::RamQuad | ExtKind::RamGaloisL)
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, ExtKind::UnramQuad | ExtKind::RamQuad)
    }
}

impl fmt::Display for ExtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of [`TameExtension::unit_level`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UnitLevel {
    /// `v_E(w)` is not a multiple of `e`, so `w ∉ F*·U_E`.
    NotInFU,
    /// Largest `k` with `w ∈ F*·U_E^k` (`U_E^0 = U_E`).
    Level(u32),
}

#[derive(Clone, Debug)]
pub struct ExtElement {
    p: u64,
    k: i64,
    coeffs: Vec<u64>,
    prec: u32,
    zero: bool,
}

impl PartialEq for ExtElement {
    fn eq(&self, other: &Self) -> bool {
        if self.zero || other.zero {
            return self.zero == other.zero;
        }
        if self.k != other.k {
            return false;
        }
        let m = self.p.pow(self.prec.min(other.prec));
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a % m == b % m)
    }
}

impl ExtElement {
    pub fn p_power(&self) -> i64 {
        self.k
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Absolute precision: the element is known modulo `p^abs_prec·O_E`.
    pub fn abs_prec(&self) -> i64 {
        self.k + self.prec as i64
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        write!(f, "{}^{}*(", self.p, self.k)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        write!(f, ")")
    }
}

/// A tame extension with its Galois data and residue field.
#[derive(Clone, Debug)]
pub struct TameExtension {
    cfg: PrimeConfig,
    kind: ExtKind,
    d: usize,
    e: usize,
    f: usize,
    /// Non-leading coefficients of the monic defining polynomial, mod `p^N`.
    g: Vec<u64>,
    delta: Option<PadicNumber>,
    /// `gal[i]` is the matrix of `σ^i` on the basis `1, x, …, x^{d-1}` (columns), mod `p^N`.
    gal: Vec<Vec<Vec<u64>>>,
    residue: FqField,
}

fn smallest_nonsquare(p: u64) -> u64 {
    (2..p).find(|&a| legendre(a as i64, p) == -1).unwrap()
}

fn smallest_non_lth_power(p: u64, l: u64) -> u64 {
    (2..p).find(|&a| pow_mod(a, (p - 1) / l, p) != 1).unwrap()
}

/// Determinant modulo `p^m` by elimination with minimal-valuation pivots.
pub fn det_mod_pk(mut a: Vec<Vec<u64>>, p: u64, m_exp: u32) -> u64 {
    let n = a.len();
    let m = p.pow(m_exp);
    let mut det = 1u64;
    let vp = |x: u64| if x == 0 { u32::MAX } else { val_p(x, p) };
    for col in 0..n {
        let piv = (col..n).min_by_key(|&r| vp(a[r][col] % m));
        let piv = piv.unwrap();
        if a[piv][col].is_multiple_of(m) {
            return 0;
        }
        if piv != col {
            a.swap(piv, col);
            det = (m - det) % m;
        }
        let pv = a[col][col] % m;
        let s = vp(pv);
        let pu = pv / p.pow(s);
        let pu_inv = inv_mod(pu, m).unwrap();
        det = mul_mod(det, pv, m);
        for r in col + 1..n {
            let x = a[r][col] % m;
            if x == 0 {
                continue;
            }
            // factor = x / pivot, integral since v(x) ≥ s
            let fac = mul_mod(x / p.pow(s), pu_inv, m);
            for c in col..n {
                let sub = mul_mod(fac, a[col][c], m);
                a[r][c] = (a[r][c] % m + m - sub) % m;
            }
        }
    }
    det
}

impl TameExtension {
    /// Builds an extension of the given kind. `delta` is required for ramified
    /// kinds (valuation one) and optional for `UnramQuad` (a nonsquare unit).
    pub fn build(cfg: PrimeConfig, kind: ExtKind, delta: Option<PadicNumber>) -> Result<Self> {
        cfg.validate()?;
        let p = cfg.p;
        let big = cfg.modulus();
        let l = cfg.ell;
        let (d, e, f, g, delta) = match kind {
            ExtKind::UnramQuad => {
                let dl = match delta {
                    Some(x) => {
                        if x.is_zero() || x.val() != 0 || x.is_square() {
                            return Err(Error::InvalidExtension(
                                "UnramQuad needs a nonsquare unit",
                            ));
                        }
                        x
                    }
                    None => PadicNumber::from_int(&cfg, smallest_nonsquare(p) as i64),
                };
                let c = dl.mod_pk(cfg.n)?;
                (2, 1, 2, vec![(big - c) % big, 0], Some(dl))
            }
            ExtKind::RamQuad | ExtKind::RamGaloisL => {
                let deg = if kind == ExtKind::RamQuad { 2 } else { l as usize };
                if kind == ExtKind::RamGaloisL {
                    if l == 2 {
                        return Err(Error::InvalidExtension("use RamQuad for l = 2"));
                    }
                    if !(p - 1).is_multiple_of(l) {
                        return Err(Error::InvalidExtension("RamGaloisL needs l | p-1"));
                    }
                }
                let dl = delta.unwrap_or_else(|| PadicNumber::from_int(&cfg, p as i64));
                if dl.is_zero() || dl.val() != 1 {
                    return Err(Error::InvalidExtension("ramified kinds need v(Delta) = 1"));
                }
                let c = dl.mod_pk(cfg.n)?;
                let mut g = vec![0u64; deg];
                g[0] = (big - c) % big;
                (deg, deg, 1, g, Some(dl))
            }
            ExtKind::UnramL => {
                if l == 2 {
                    return Err(Error::InvalidExtension("use UnramQuad for l = 2"));
                }
                let deg = l as usize;
                if (p - 1).is_multiple_of(l) {
                    let u = smallest_non_lth_power(p, l);
                    let mut g = vec![0u64; deg];
                    g[0] = big - u;
                    (deg, 1, deg, g, Some(PadicNumber::from_int(&cfg, u as i64)))
                } else {
                    let fld = FqField::new(p, deg)?;
                    let g = fld.modulus()[..deg].to_vec();
                    (deg, 1, deg, g, None)
                }
            }
        };
        let residue = if e == 1 {
            let gbar: Vec<u64> =
                g.iter().map(|c| c % p).chain(core::iter::once(1)).collect();
            FqField::with_modulus(p, &gbar)?
        } else {
            FqField::new(p, 1)?
        };
        let mut ext = TameExtension { cfg, kind, d, e, f, g, delta, gal: Vec::new(), residue };
        ext.install_galois()?;
        Ok(ext)
    }

    fn install_galois(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let x = self.gen();
        let sx = match self.kind {
            ExtKind::UnramQuad | ExtKind::RamQuad => self.neg(&x),
            ExtKind::RamGaloisL => {
                let r = pow_mod(primitive_root(cfg.p), (cfg.p - 1) / cfg.ell, cfg.p);
                let z = PadicNumber::teichmuller(&cfg, r);
                self.mul(&self.from_padic(&z), &x)
            }
            ExtKind::UnramL => {
                // Newton-lift the residue Frobenius x^p to a root of g.
                let mut y = self.pow(&x, cfg.p as i64)?;
                for _ in 0..=cfg.n {
                    let gy = self.eval_g(&y, false);
                    let dgy = self.eval_g(&y, true);
                    y = self.sub(&y, &self.div(&gy, &dgy)?);
                }
                y
            }
        };
        let mut images = vec![x.clone(), sx.clone()];
        let mats0 = self.identity_matrix();
        self.gal = vec![mats0];
        let m1 = self.matrix_of_map(&sx);
        self.gal.push(m1);
        for i in 2..self.d {
            let prev = images[i - 1].clone();
            let next = self.galois_apply(1, &prev)?;
            self.gal.push(self.matrix_of_map(&next));
            images.push(next);
        }
        self.gal.truncate(self.d);
        // σ is a root of g and has order d
        if !self.eval_g(&sx, false).is_zero() && self.val(&self.eval_g(&sx, false)) < (self.e as i64) * (cfg.n as i64 - 2) {
            return Err(Error::Verification("Galois generator is not a root of g"));
        }
        let mut y = x.clone();
        for _ in 0..self.d {
            y = self.galois_apply(1, &y)?;
        }
        if y != x {
            return Err(Error::Verification("Galois generator order"));
        }
        Ok(())
    }

    fn identity_matrix(&self) -> Vec<Vec<u64>> {
        (0..self.d).map(|i| (0..self.d).map(|j| u64::from(i == j)).collect()).collect()
    }

    /// Matrix (rows × columns) of the ring map sending `x` to `y`.
    fn matrix_of_map(&self, y: &ExtElement) -> Vec<Vec<u64>> {
        let big = self.cfg.modulus();
        let mut cols = Vec::with_capacity(self.d);
        let mut pw = self.one();
        for _ in 0..self.d {
            cols.push(self.to_integral_coeffs(&pw, big));
            pw = self.mul(&pw, y);
        }
        (0..self.d).map(|r| (0..self.d).map(|c| cols[c][r]).collect()).collect()
    }

    /// Integer coefficient vector of an integral element modulo `m`.
    fn to_integral_coeffs(&self, w: &ExtElement, m: u64) -> Vec<u64> {
        if w.zero {
            return vec![0; self.d];
        }
        assert!(w.k >= 0, "element is not integral");
        let s = if w.k as u32 >= 64 { 0 } else { pow_mod(self.cfg.p, w.k as u64, m) };
        w.coeffs.iter().map(|&c| mul_mod(c % m, s, m)).collect()
    }

    /// `g(y)`, or `g'(y)` when `deriv` is set.
    fn eval_g(&self, y: &ExtElement, deriv: bool) -> ExtElement {
        let mut acc = self.zero();
        let d = self.d;
        let mut coeffs: Vec<i64> = self.g.iter().map(|&c| c as i64).collect();
        coeffs.push(1);
        let coeffs: Vec<i64> = if deriv {
            (1..=d).map(|i| coeffs[i] * i as i64).collect()
        } else {
            coeffs
        };
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, y);
            acc = self.add(&acc, &self.from_int(c));
        }
        acc
    }

    pub fn config(&self) -> &PrimeConfig {
        &self.cfg
    }

    pub fn kind(&self) -> ExtKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn ramification(&self) -> usize {
        self.e
    }

    pub fn residue_degree(&self) -> usize {
        self.f
    }

    /// `q_E = p^f`.
    pub fn residue_card(&self) -> u64 {
        self.cfg.p.pow(self.f as u32)
    }

    pub fn residue_field(&self) -> &FqField {
        &self.residue
    }

    /// Monic defining polynomial, constant term first (coefficients mod `p^N`).
    pub fn defining_poly(&self) -> Vec<u64> {
        let mut g = self.g.clone();
        g.push(1);
        g
    }

    /// `Δ` with `x^d = Δ` (quadratic kinds: `δ = x`, `δ² = Δ`).
    pub fn delta(&self) -> Option<PadicNumber> {
        self.delta
    }

    pub fn is_galois(&self) -> bool {
        !self.gal.is_empty()
    }

    fn p(&self) -> u64 {
        self.cfg.p
    }

    fn normalize(&self, k: i64, mut coeffs: Vec<u64>, prec: u32) -> ExtElement {
        let p = self.p();
        let m = p.pow(prec);
        for c in coeffs.iter_mut() {
            *c %= m;
        }
        let s = coeffs.iter().filter(|&&c| c != 0).map(|&c| val_p(c, p)).min();
        match s {
            None => self.zero(),
            Some(s) => {
                let ps = p.pow(s);
                let prec2 = prec - s;
                let m2 = p.pow(prec2);
                ExtElement {
                    p,
                    k: k + s as i64,
                    coeffs: coeffs.iter().map(|c| (c / ps) % m2).collect(),
                    prec: prec2,
                    zero: false,
                }
            }
        }
    }

    pub fn zero(&self) -> ExtElement {
        ExtElement { p: self.p(), k: 0, coeffs: vec![0; self.d], prec: self.cfg.n, zero: true }
    }

    pub fn one(&self) -> ExtElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> ExtElement {
        self.from_padic(&PadicNumber::from_int(&self.cfg, n))
    }

    /// `p^k·Σ c_i x^i` at full precision.
    pub fn element(&self, k: i64, coeffs: &[i64]) -> ExtElement {
        assert!(coeffs.len() <= self.d, "too many coefficients");
        let m = self.cfg.modulus() as i64;
        let mut c: Vec<u64> = coeffs.iter().map(|&a| a.rem_euclid(m) as u64).collect();
        c.resize(self.d, 0);
        self.normalize(k, c, self.cfg.n)
    }

    /// `p^k·Σ c_i x^i` with the coefficients known modulo `p^prec`.
    pub fn element_prec(&self, k: i64, coeffs: &[u64], prec: u32) -> Result<ExtElement> {
        if prec < 1 || prec > self.cfg.n {
            return Err(Error::PrecisionExhausted);
        }
        let mut c = coeffs.to_vec();
        c.resize(self.d, 0);
        Ok(self.normalize(k, c, prec))
    }

    pub fn from_padic(&self, x: &PadicNumber) -> ExtElement {
        if x.is_zero() {
            return self.zero();
        }
        let mut c = vec![0u64; self.d];
        c[0] = x.unit();
        self.normalize(x.val(), c, x.prec())
    }

    /// The adjoined root `x` (this is `δ` for the quadratic kinds).
    pub fn gen(&self) -> ExtElement {
        let mut c = vec![0i64; self.d];
        c[1] = 1;
        self.element(0, &c)
    }

    /// `ϖ = x` for ramified kinds, `p` for unramified ones.
    pub fn uniformizer(&self) -> ExtElement {
        if self.e > 1 {
            self.gen()
        } else {
            self.from_int(self.p() as i64)
        }
    }

    /// `ϖ^n`.
    pub fn uniformizer_pow(&self, n: i64) -> Result<ExtElement> {
        if self.e == 1 {
            return Ok(self.element(n, &[1]));
        }
        let e = self.e as i64;
        let (a, b) = (n.div_euclid(e), n.rem_euclid(e));
        let da = self.delta.unwrap().pow(a)?;
        let mut c = vec![0i64; self.d];
        c[b as usize] = 1;
        Ok(self.mul(&self.from_padic(&da), &self.element(0, &c)))
    }

    pub fn neg(&self, a: &ExtElement) -> ExtElement {
        if a.zero {
            return a.clone();
        }
        let m = self.p().pow(a.prec);
        ExtElement { coeffs: a.coeffs.iter().map(|c| (m - c % m) % m).collect(), ..a.clone() }
    }

    pub fn add(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        if a.zero {
            return b.clone();
        }
        if b.zero {
            return a.clone();
        }
        let (lo, hi) = if a.k <= b.k { (a, b) } else { (b, a) };
        let sh = (hi.k - lo.k) as u64;
        let prec = (lo.prec as u64).min(sh + hi.prec as u64) as u32;
        let m = self.p().pow(prec);
        let fac = if sh >= prec as u64 { 0 } else { self.p().pow(sh as u32) };
        let c: Vec<u64> = lo
            .coeffs
            .iter()
            .zip(&hi.coeffs)
            .map(|(&x, &y)| (x % m + mul_mod(fac, y % m, m)) % m)
            .collect();
        self.normalize(lo.k, c, prec)
    }

    pub fn sub(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        self.add(a, &self.neg(b))
    }

    fn poly_mul(&self, a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        let d = self.d;
        let mut r = vec![0u128; 2 * d - 1];
        let mm = m as u128;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + (x % m) as u128 * (y % m) as u128) % mm;
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = r[i] % mm;
            if c == 0 {
                continue;
            }
            for j in 0..d {
                let gj = (self.g[j] % m) as u128;
                r[i - d + j] = (r[i - d + j] + mm - (c * gj) % mm) % mm;
            }
            r[i] = 0;
        }
        r.truncate(d);
        r.into_iter().map(|c| c as u64).collect()
    }

    pub fn mul(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        if a.zero || b.zero {
            return self.zero();
        }
        let prec = a.prec.min(b.prec);
        let m = self.p().pow(prec);
        let c = self.poly_mul(&a.coeffs, &b.coeffs, m);
        self.normalize(a.k + b.k, c, prec)
    }

    pub fn scale(&self, a: &ExtElement, x: &PadicNumber) -> ExtElement {
        self.mul(a, &self.from_padic(x))
    }

    /// `v_E`; `i64::MAX` for zero.
    pub fn val(&self, a: &ExtElement) -> i64 {
        if a.zero {
            return i64::MAX;
        }
        let e = self.e as i64;
        if self.e == 1 {
            return a.k;
        }
        let p = self.p();
        let first = a.coeffs.iter().position(|c| c % p != 0).unwrap() as i64;
        e * a.k + first
    }

    /// Inverse of a unit (`v_E = 0`, `k = 0`) by Newton iteration.
    fn inv_unit(&self, u: &ExtElement) -> ExtElement {
        let r = self.residue_of_unit_raw(u);
        let rinv = self.residue.inv(r).unwrap();
        let c: Vec<i64> = self.residue_lift(rinv);
        let mut y = self.element(0, &c);
        let two = self.from_int(2);
        // the residue inverse is only correct to ϖ_E-adic order 1
        let mut steps = 1;
        while (1u32 << steps) <= u.prec * self.e as u32 {
            steps += 1;
        }
        for _ in 0..=steps {
            let uy = self.mul(u, &y);
            y = self.mul(&y, &self.sub(&two, &uy));
        }
        // the iteration cannot gain precision beyond the input
        ExtElement { prec: y.prec.min(u.prec), ..y }.renormalized(self)
    }

    pub fn inv(&self, a: &ExtElement) -> Result<ExtElement> {
        if a.zero {
            return Err(Error::DivisionByZero);
        }
        let e = self.e as i64;
        let t = self.val(a) - e * a.k;
        let base = ExtElement { k: 0, ..a.clone() };
        let inv_base = if t == 0 {
            self.inv_unit(&base)
        } else {
            let mut c = vec![0i64; self.d];
            c[(e - t) as usize] = 1;
            let shift = self.element(0, &c);
            let prod = self.mul(&base, &shift);
            // prod = p·U with U a unit
            let u = ExtElement { k: 0, ..prod.clone() };
            let ui = self.inv_unit(&u);
            let mut r = self.mul(&ui, &shift);
            r.k -= prod.k;
            r
        };
        let mut out = inv_base;
        out.k -= a.k;
        Ok(out)
    }

    pub fn div(&self, a: &ExtElement, b: &ExtElement) -> Result<ExtElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &ExtElement, e: i64) -> Result<ExtElement> {
        let mut base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc)
    }

    /// Lift of a residue-field element to integer coefficients.
    pub fn residue_lift(&self, r: u64) -> Vec<i64> {
        let mut c: Vec<i64> = self.residue.to_coeffs(r).iter().map(|&x| x as i64).collect();
        c.resize(self.d, 0);
        c
    }

    fn residue_of_unit_raw(&self, u: &ExtElement) -> u64 {
        let p = self.p();
        if self.e == 1 {
            let c: Vec<u64> = u.coeffs.iter().map(|c| c % p).collect();
            self.residue.from_coeffs(&c)
        } else {
            u.coeffs[0] % p
        }
    }

    /// Residue class in `F_{q_E}` of a unit.
    pub fn residue(&self, u: &ExtElement) -> Result<u64> {
        if u.zero || self.val(u) != 0 {
            return Err(Error::Precondition("residue of a non-unit"));
        }
        Ok(self.residue_of_unit_raw(u))
    }

    /// Element of `O_E` whose residue is `r` (coefficient lift).
    pub fn lift_residue(&self, r: u64) -> ExtElement {
        self.element(0, &self.residue_lift(r))
    }

    /// `w·ϖ^{-v_E(w)}`.
    pub fn unit_part(&self, w: &ExtElement) -> Result<ExtElement> {
        let v = self.val(w);
        Ok(self.mul(w, &self.uniformizer_pow(-v)?))
    }

    /// Teichmüller representative of a nonzero residue.
    pub fn teichmuller(&self, r: u64) -> Result<ExtElement> {
        if r == 0 {
            return Err(Error::Precondition("teichmuller of zero"));
        }
        let q = self.residue_card() as i64;
        let mut y = self.lift_residue(r);
        for _ in 0..(self.e as u32 * self.cfg.n + 1) {
            y = self.pow(&y, q)?;
        }
        Ok(y)
    }

    pub fn is_in_base(&self, w: &ExtElement) -> bool {
        if w.zero {
            return true;
        }
        let m = self.p().pow(w.prec);
        w.coeffs[1..].iter().all(|c| c % m == 0)
    }

    /// The element as a member of `F`, if it lies there.
    pub fn to_base(&self, w: &ExtElement) -> Option<PadicNumber> {
        if !self.is_in_base(w) {
            return None;
        }
        if w.zero {
            return Some(PadicNumber::zero(&self.cfg));
        }
        PadicNumber::from_parts_prec(self.p(), w.k, w.coeffs[0], w.prec).ok()
    }

    /// Matrix of multiplication by the coefficient part of `w` modulo `m`.
    fn mult_matrix(&self, w: &ExtElement, m: u64) -> Vec<Vec<u64>> {
        let mut cols = Vec::with_capacity(self.d);
        for j in 0..self.d {
            let mut basis = vec![0u64; self.d];
            basis[j] = 1;
            cols.push(self.poly_mul(&w.coeffs, &basis, m));
        }
        (0..self.d).map(|r| (0..self.d).map(|c| cols[c][r]).collect()).collect()
    }

    fn padic_from_scaled(&self, k: i64, x: u64, prec: u32) -> Result<PadicNumber> {
        if x == 0 {
            return Ok(PadicNumber::zero(&self.cfg));
        }
        let v = val_p(x, self.p());
        PadicNumber::from_parts_prec(self.p(), k + v as i64, x / self.p().pow(v), prec - v)
    }

    /// `N_{E/F}(w)` as the determinant of multiplication by `w`.
    pub fn norm(&self, w: &ExtElement) -> Result<PadicNumber> {
        if w.zero {
            return Ok(PadicNumber::zero(&self.cfg));
        }
        let m = self.p().pow(w.prec);
        let det = det_mod_pk(self.mult_matrix(w, m), self.p(), w.prec);
        if det == 0 {
            return Err(Error::PrecisionExhausted);
        }
        self.padic_from_scaled(self.d as i64 * w.k, det, w.prec)
    }

    /// `Tr_{E/F}(w)` as the trace of multiplication by `w`.
    pub fn trace(&self, w: &ExtElement) -> Result<PadicNumber> {
        if w.zero {
            return Ok(PadicNumber::zero(&self.cfg));
        }
        let m = self.p().pow(w.prec);
        let mat = self.mult_matrix(w, m);
        let t = (0..self.d).fold(0u64, |acc, i| (acc + mat[i][i]) % m);
        self.padic_from_scaled(w.k, t, w.prec)
    }

    /// `σ^i(w)` for the stored generator `σ`.
    pub fn galois_apply(&self, i: i64, w: &ExtElement) -> Result<ExtElement> {
        if self.gal.is_empty() {
            return Err(Error::NotGalois);
        }
        if w.zero {
            return Ok(w.clone());
        }
        let idx = i.rem_euclid(self.d as i64) as usize;
        if idx >= self.gal.len() {
            // generator images are installed incrementally during build
            let mut y = w.clone();
            for _ in 0..idx {
                y = self.galois_apply(1, &y)?;
            }
            return Ok(y);
        }
        let m = self.p().pow(w.prec);
        let mat = &self.gal[idx];
        let c: Vec<u64> = (0..self.d)
            .map(|r| (0..self.d).fold(0u64, |acc, j| (acc + mul_mod(mat[r][j] % m, w.coeffs[j] % m, m)) % m))
            .collect();
        Ok(self.normalize(w.k, c, w.prec))
    }

    /// Complex-conjugation analogue for quadratic kinds: `σ(w)`.
    pub fn conj(&self, w: &ExtElement) -> ExtElement {
        self.galois_apply(1, w).expect("quadratic kinds are Galois")
    }

    /// Largest `k` with `w ∈ F*·U_E^k`, found by searching over `F*` representatives.
    pub fn unit_level(&self, w: &ExtElement) -> Result<UnitLevel> {
        if w.zero {
            return Err(Error::Precondition("unit_level of zero"));
        }
        let e = self.e as i64;
        let v = self.val(w);
        if v % e != 0 {
            return Ok(UnitLevel::NotInFU);
        }
        // w' = w / p^{v/e} is a unit
        let u = ExtElement { k: w.k - v / e, ..w.clone() };
        let p = self.p();
        let prec = u.prec;
        let m = p.pow(prec);
        let coeffs = self.to_integral_coeffs(&u, m);
        // candidate c mod p^j for the current modulus exponent j
        let mut cands: Vec<u64> = vec![0];
        let mut j = 0u32;
        let mut level = 0u32;
        loop {
            let next = level + 1;
            if next as i64 >= e * prec as i64 {
                return Err(Error::PrecisionExhausted);
            }
            let need = (next as i64 + e - 1) / e;
            let need = need as u32;
            if need > j {
                let pj = p.pow(j);
                let mut lifted = Vec::new();
                for &c in &cands {
                    for t in 0..p {
                        let c2 = c + t * pj;
                        if !c2.is_multiple_of(p) {
                            lifted.push(c2);
                        }
                    }
                }
                cands = lifted;
                j = need;
            }
            cands.retain(|&c| {
                let mut diff = coeffs.clone();
                diff[0] = (diff[0] + m - c % m) % m;
                self.coeff_val(&diff, m) >= next as i64
            });
            if cands.is_empty() {
                return Ok(UnitLevel::Level(level));
            }
            level = next;
        }
    }

    /// `v_E` of an integral coefficient vector known mod `m = p^prec`.
    fn coeff_val(&self, c: &[u64], m: u64) -> i64 {
        let p = self.p();
        let e = self.e as i64;
        c.iter()
            .enumerate()
            .filter(|(_, &x)| x % m != 0)
            .map(|(i, &x)| {
                let vp = val_p(x % m, p) as i64;
                if self.e == 1 {
                    vp
                } else {
                    e * vp + i as i64
                }
            })
            .min()
            .unwrap_or(i64::MAX)
    }

    /// The `p`-adic logarithm on `U_E^1`.
    pub fn log(&self, w: &ExtElement) -> Result<ExtElement> {
        let z = self.sub(w, &self.one());
        if w.zero || self.val(w) != 0 || self.val(&z) < 1 {
            return Err(Error::Precondition("log needs a principal unit"));
        }
        if z.zero {
            return Ok(self.zero());
        }
        self.log_series(&z, None)
    }

    /// `Σ (-1)^{n+1} z^n/n`, optionally truncated before `n = limit`.
    fn log_series(&self, z: &ExtElement, limit: Option<u64>) -> Result<ExtElement> {
        let p = self.p();
        let e = self.e as i64;
        let vz = self.val(z);
        let target = e * z.abs_prec();
        let mut acc = self.zero();
        let mut zn = z.clone();
        let mut n = 1u64;
        loop {
            if let Some(l) = limit {
                if n >= l {
                    break;
                }
            }
            let a = val_p(n, p);
            if (n as i64) * vz - e * (a as i64) >= target + e && limit.is_none() {
                // all later terms are below the working precision too
                let mut logn = 0i64;
                let mut t = n;
                while t >= p {
                    t /= p;
                    logn += 1;
                }
                if (n as i64) * vz - e * logn >= target + e {
                    break;
                }
            }
            let unit = n / p.pow(a);
            let ui = PadicNumber::from_int(&self.cfg, unit as i64).inv()?;
            let mut term = self.scale(&zn, &ui);
            if !term.zero {
                term.k -= a as i64;
            }
            if n.is_multiple_of(2) {
                term = self.neg(&term);
            }
            acc = self.add(&acc, &term);
            zn = self.mul(&zn, z);
            n += 1;
        }
        Ok(acc)
    }

    /// The exponential on `𝔭_E^r` with `r > e/(p-1)`.
    pub fn exp(&self, z: &ExtElement) -> Result<ExtElement> {
        if z.zero {
            return Ok(self.one());
        }
        let p = self.p() as i64;
        let e = self.e as i64;
        let vz = self.val(z);
        if (p - 1) * vz <= e {
            return Err(Error::Precondition("exp needs v_E(z) > e/(p-1)"));
        }
        let target = e * z.abs_prec().max(1);
        let mut acc = self.one();
        let mut term = self.one();
        let mut n = 1i64;
        loop {
            // term = z^n / n!
            let a = val_p(n as u64, p as u64);
            let unit = n / p.pow(a);
            let ui = PadicNumber::from_int(&self.cfg, unit).inv()?;
            term = self.scale(&self.mul(&term, z), &ui);
            if !term.zero {
                term.k -= a as i64;
            }
            acc = self.add(&acc, &term);
            n += 1;
            // v_E(z^n/n!) ≥ n·vz - e(n-1)/(p-1)
            if n * vz * (p - 1) - e * (n - 1) >= (target + e) * (p - 1) {
                break;
            }
        }
        Ok(acc)
    }

    /// Homomorphism `U_E^1 → E` used to linearise wild characters: the
    /// logarithm when `e < p-1`, otherwise the logarithm truncated below
    /// degree `p` (a homomorphism modulo `𝔭_E^p`).
    pub fn wild_log(&self, u: &ExtElement) -> Result<ExtElement> {
        if self.full_log_applies() {
            return self.log(u);
        }
        let z = self.sub(u, &self.one());
        if u.zero || self.val(u) != 0 || self.val(&z) < 1 {
            return Err(Error::Precondition("log needs a principal unit"));
        }
        if z.zero {
            return Ok(self.zero());
        }
        self.log_series(&z, Some(self.p()))
    }

    /// Whether the full logarithm is an isomorphism `U_E^1 ≅ 𝔭_E`.
    pub fn full_log_applies(&self) -> bool {
        (self.e as u64) < self.p() - 1
    }

    /// Largest wild level the character model supports.
    pub fn max_wild_level(&self) -> Option<u32> {
        if self.full_log_applies() {
            None
        } else {
            Some(self.p() as u32 - 1)
        }
    }

    /// Principal-unit part `u₁` of a unit `w₀ = ω·u₁`, returned through its
    /// wild logarithm: `L(u₁) = L(w₀^{q_E-1})/(q_E-1)`.
    pub fn wild_log_of_unit(&self, w0: &ExtElement) -> Result<ExtElement> {
        let q1 = self.residue_card() as i64 - 1;
        let u = self.pow(w0, q1)?;
        let l = self.wild_log(&u)?;
        let inv = PadicNumber::from_int(&self.cfg, q1).inv()?;
        Ok(self.scale(&l, &inv))
    }

    /// Characteristic polynomial of multiplication by `w` (monic, constant
    /// term first), over `F`.
    pub fn char_poly(&self, w: &ExtElement) -> Result<Vec<PadicNumber>> {
        // Newton identities from power traces; d < p so the divisions are by units.
        let d = self.d;
        let mut traces = Vec::with_capacity(d);
        let mut pw = w.clone();
        for _ in 0..d {
            traces.push(self.trace(&pw)?);
            pw = self.mul(&pw, w);
        }
        // e_0 = 1; k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} t_i
        let mut es = vec![PadicNumber::one(&self.cfg)];
        for k in 1..=d {
            let mut s = PadicNumber::zero(&self.cfg);
            for i in 1..=k {
                let mut t = es[k - i].mul(&traces[i - 1]);
                if i % 2 == 0 {
                    t = t.neg();
                }
                s = s.add(&t)?;
            }
            es.push(s.div(&PadicNumber::from_int(&self.cfg, k as i64))?);
        }
        // x^d - e1 x^{d-1} + e2 x^{d-2} - ...
        let mut poly = vec![PadicNumber::zero(&self.cfg); d + 1];
        for (k, ek) in es.iter().enumerate() {
            poly[d - k] = if k % 2 == 0 { *ek } else { ek.neg() };
        }
        Ok(poly)
    }

    /// Discriminant of the characteristic polynomial of `w`, as
    /// `det(Tr(w^{i+j}))`.
    pub fn discriminant(&self, w: &ExtElement) -> Result<PadicNumber> {
        if w.zero {
            return Ok(PadicNumber::zero(&self.cfg));
        }
        let d = self.d;
        let base = ExtElement { k: 0, ..w.clone() };
        let prec = w.prec;
        let m = self.p().pow(prec);
        let mut traces = Vec::with_capacity(2 * d - 1);
        let mut pw = self.one();
        for _ in 0..(2 * d - 1) {
            let mat = self.mult_matrix(&pw, m);
            let mut t = (0..d).fold(0u64, |acc, i| (acc + mat[i][i]) % m);
            // mult_matrix ignores the p-power of pw
            if pw.k > 0 {
                t = mul_mod(t, pow_mod(self.p(), pw.k as u64, m), m);
            }
            traces.push(t);
            pw = self.mul(&pw, &base);
        }
        let h: Vec<Vec<u64>> = (0..d).map(|i| (0..d).map(|j| traces[i + j]).collect()).collect();
        let det = det_mod_pk(h, self.p(), prec);
        if det == 0 {
            return Err(Error::PrecisionExhausted);
        }
        self.padic_from_scaled((d * (d - 1)) as i64 * w.k, det, prec)
    }
}

impl ExtElement {
    fn renormalized(self, ext: &TameExtension) -> ExtElement {
        if self.zero {
            return self;
        }
        ext.normalize(self.k, self.coeffs, self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u64, ell: u64) -> PrimeConfig {
        PrimeConfig::new(p, 12, ell).unwrap()
    }

    #[test]
    fn unram_quad_frobenius() {
        let c = cfg(5, 2);
        let e = TameExtension::build(c, ExtKind::UnramQuad, None).unwrap();
        let x = e.gen();
        assert_eq!(e.conj(&x), e.neg(&x));
        assert!(e.trace(&x).unwrap().is_zero());
        assert_eq!(e.delta().unwrap(), PadicNumber::from_int(&c, 2));
    }

    #[test]
    fn ram_quad_valuations() {
        let c = cfg(3, 2);
        let e = TameExtension::build(c, ExtKind::RamQuad, Some(PadicNumber::from_int(&c, 3))).unwrap();
        let w = e.uniformizer();
        assert_eq!(e.val(&w), 1);
        assert_eq!(e.val(&e.from_int(3)), 2);
        assert_eq!(e.norm(&w).unwrap(), PadicNumber::from_int(&c, -3));
        let w2 = e.mul(&w, &w);
        assert_eq!(w2, e.from_int(3));
    }

    #[test]
    fn ram_galois_cubic() {
        let c = cfg(7, 3);
        let e = TameExtension::build(c, ExtKind::RamGaloisL, Some(PadicNumber::from_int(&c, 7))).unwrap();
        let x = e.gen();
        let sx = e.galois_apply(1, &x).unwrap();
        let s3 = e.galois_apply(3, &x).unwrap();
        assert_eq!(s3, x);
        let g = e.sub(&e.pow(&sx, 3).unwrap(), &e.from_int(7));
        assert!(g.is_zero() || e.val(&g) >= 30);
    }

    #[test]
    fn unram_cubic_frobenius_residue() {
        let c = cfg(7, 3);
        let e = TameExtension::build(c, ExtKind::UnramL, None).unwrap();
        let w = e.element(0, &[2, 5, 1]);
        let sw = e.galois_apply(1, &w).unwrap();
        let wq = e.pow(&w, 7).unwrap();
        assert!(e.val(&e.sub(&sw, &wq)) >= 1);
    }

    #[test]
    fn inverse_round_trip() {
        let c = cfg(3, 2);
        let e = TameExtension::build(c, ExtKind::RamQuad, Some(PadicNumber::from_int(&c, 6))).unwrap();
        let a = e.element(0, &[4, 7]);
        let b = e.element(-1, &[3, 2]);
        let q = e.div(&e.mul(&a, &b), &b).unwrap();
        assert_eq!(q, a);
    }

    #[test]
    fn log_exp_round_trip() {
        let c = cfg(5, 2);
        let e = TameExtension::build(c, ExtKind::UnramQuad, None).unwrap();
        let w = e.from_int(6);
        let l = e.log(&w).unwrap();
        assert_eq!(e.exp(&l).unwrap(), w);
        assert!(e.log(&e.one()).unwrap().is_zero());
    }

    #[test]
    fn unit_levels() {
        let c = cfg(3, 2);
        let rq = TameExtension::build(c, ExtKind::RamQuad, Some(PadicNumber::from_int(&c, 3))).unwrap();
        assert_eq!(rq.unit_level(&rq.element(0, &[1, 1])).unwrap(), UnitLevel::Level(1));
        assert_eq!(rq.unit_level(&rq.gen()).unwrap(), UnitLevel::NotInFU);
        let uq = TameExtension::build(c, ExtKind::UnramQuad, None).unwrap();
        assert_eq!(uq.unit_level(&uq.element(0, &[1, 3])).unwrap(), UnitLevel::Level(1));
        assert_eq!(uq.unit_level(&uq.element(0, &[0, 2])).unwrap(), UnitLevel::Level(0));
    }
}
