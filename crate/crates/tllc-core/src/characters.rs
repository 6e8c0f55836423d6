//! Finite-order characters of `E*` and `F*`, pair classification, the
//! twisting characters `Δ_χ` and the quadratic character `δ_{E/F}`.
//!
//! A character of `E*` is stored as its value on the fixed uniformizer `ϖ`,
//! a tame exponent (`ω ↦ ζ_{q_E−1}^{t·dlog ω}` on Teichmüller units, logs to
//! the residue field's generator) and a wild element `α` with
//! `χ(u) = ψ_E(α·L(u))` on `U_E^1`, where `ψ_E = ψ∘Tr` for the level-one
//! `ψ` and `L` is the extension's wild logarithm. Characters of `F*`
//! composed with the norm can be attached as twists.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{pow_mod, primitive_root};
use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::ext::{ExtElement, ExtKind, TameExtension};
use crate::padic::{PadicNumber, PrimeConfig};
use crate::symbols::{cft_character, hilbert, langlands_lambda, AdditiveCharacter};

/// Discrete log in `F_p*` to the least primitive root.
pub fn dlog_mod_p(p: u64, r: u64) -> u64 {
    let g = primitive_root(p);
    let r = r % p;
    assert!(r != 0, "dlog of zero");
    (0..p - 1).find(|&k| pow_mod(g, k, p) == r).expect("primitive root generates")
}

/// The `p`-adic logarithm of a principal unit of `F`.
pub fn log_base(cfg: &PrimeConfig, u: &PadicNumber) -> Result<PadicNumber> {
    let z = u.sub(&PadicNumber::one(cfg))?;
    if z.is_zero() {
        return Ok(PadicNumber::zero(cfg));
    }
    if z.val() < 1 {
        return Err(Error::Precondition("log needs a principal unit"));
    }
    let target = u.prec() as i64 + 1;
    let mut acc = PadicNumber::zero(cfg);
    let mut zn = z;
    let mut n = 1i64;
    loop {
        let term = zn.div(&PadicNumber::from_int(cfg, if n % 2 == 1 { n } else { -n }))?;
        acc = acc.add(&term)?;
        n += 1;
        zn = zn.mul(&z);
        // v(z^n/n) ≥ n - log_p(n)
        let mut logn = 0i64;
        let mut t = n;
        while t >= cfg.p as i64 {
            t /= cfg.p as i64;
            logn += 1;
        }
        if n * z.val() - logn > target {
            break;
        }
    }
    Ok(acc)
}

/// A finite-order character of `F* = p^Z × μ_{p−1} × U_F^1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseCharacter {
    /// Value at `p`.
    pub p_value: RootOfUnity,
    /// Exponent modulo `p − 1` on Teichmüller units (logs to the least primitive root).
    pub tame: u64,
    /// `φ(u) = ψ(α·log u)` on `U_F^1`.
    pub alpha: Option<PadicNumber>,
}

impl BaseCharacter {
    pub fn trivial() -> Self {
        BaseCharacter { p_value: RootOfUnity::ONE, tame: 0, alpha: None }
    }

    /// The unramified character with `φ(p) = r`.
    pub fn unramified(r: RootOfUnity) -> Self {
        BaseCharacter { p_value: r, tame: 0, alpha: None }
    }

    pub fn eval(&self, cfg: &PrimeConfig, x: &PadicNumber) -> Result<RootOfUnity> {
        if x.is_zero() {
            return Err(Error::Precondition("character at zero"));
        }
        let p = cfg.p;
        let mut r = self.p_value.pow(x.val());
        let res = x.unit_residue();
        r = r * RootOfUnity::new((self.tame * dlog_mod_p(p, res)) as i64, p - 1);
        if let Some(a) = &self.alpha {
            let u = PadicNumber::from_parts_prec(p, 0, x.unit(), x.prec())?;
            let u1 = u.div(&PadicNumber::teichmuller(cfg, res))?;
            let l = log_base(cfg, &u1)?;
            r = r * AdditiveCharacter::standard(cfg, 1).eval(&a.mul(&l))?;
        }
        Ok(r)
    }
}

/// A finite-order character of `E*`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultCharacter {
    pub uniformizer_value: RootOfUnity,
    /// Exponent modulo `q_E − 1`.
    pub tame_exponent: u64,
    pub alpha: Option<ExtElement>,
    /// Characters `φ` of `F*` multiplied in as `φ∘N_{E/F}`.
    pub twists: Vec<BaseCharacter>,
}

/// `ψ_E(y) = ψ(Tr_{E/F} y)` for the level-one `ψ`.
pub fn psi_e(ext: &TameExtension, y: &ExtElement) -> Result<RootOfUnity> {
    AdditiveCharacter::standard(ext.config(), 1).eval(&ext.trace(y)?)
}

impl MultCharacter {
    pub fn new(uniformizer_value: RootOfUnity, tame_exponent: u64, alpha: Option<ExtElement>) -> Self {
        MultCharacter { uniformizer_value, tame_exponent, alpha, twists: Vec::new() }
    }

    pub fn trivial() -> Self {
        Self::new(RootOfUnity::ONE, 0, None)
    }

    /// `φ∘N_{E/F}`.
    pub fn from_base(phi: BaseCharacter) -> Self {
        MultCharacter { twists: vec![phi], ..Self::trivial() }
    }

    /// `χ·(φ∘N_{E/F})`.
    pub fn twisted(&self, phi: BaseCharacter) -> Self {
        let mut out = self.clone();
        out.twists.push(phi);
        out
    }

    fn eval_base(&self, ext: &TameExtension, w: &ExtElement) -> Result<RootOfUnity> {
        let v = ext.val(w);
        let w0 = ext.unit_part(w)?;
        let rf = ext.residue_field();
        let res = ext.residue(&w0)?;
        let qe = rf.size();
        let dl = rf.dlog(res).expect("unit residue");
        let mut r = self.uniformizer_value.pow(v);
        r = r * RootOfUnity::new(((self.tame_exponent as u128 * dl as u128) % (qe - 1) as u128) as i64, qe - 1);
        if let Some(a) = &self.alpha {
            if ext.val(a) < 0 {
                let l = ext.wild_log_of_unit(&w0)?;
                r = r * psi_e(ext, &ext.mul(a, &l))?;
            }
        }
        Ok(r)
    }

    pub fn eval(&self, ext: &TameExtension, w: &ExtElement) -> Result<RootOfUnity> {
        if w.is_zero() {
            return Err(Error::Precondition("character at zero"));
        }
        let mut r = self.eval_base(ext, w)?;
        if !self.twists.is_empty() {
            let n = ext.norm(w)?;
            for phi in &self.twists {
                r = r * phi.eval(ext.config(), &n)?;
            }
        }
        Ok(r)
    }

    /// The wild element including the twists' contributions.
    pub fn total_alpha(&self, ext: &TameExtension) -> Option<ExtElement> {
        let mut acc = self.alpha.clone().unwrap_or_else(|| ext.zero());
        for phi in &self.twists {
            if let Some(a) = &phi.alpha {
                acc = ext.add(&acc, &ext.from_padic(a));
            }
        }
        if acc.is_zero() {
            None
        } else {
            Some(acc)
        }
    }

    /// Smallest `n ≥ 0` with `χ` trivial on `U_E^{n+1}`.
    pub fn level(&self, ext: &TameExtension) -> u32 {
        match self.total_alpha(ext) {
            Some(a) if ext.val(&a) < 0 => (-ext.val(&a)) as u32,
            _ => 0,
        }
    }

    /// `χ∘σ^i` for the stored Galois generator `σ`.
    pub fn conjugate(&self, ext: &TameExtension, i: i64) -> Result<Self> {
        let pi = ext.uniformizer();
        let uval = self.eval_base(ext, &ext.galois_apply(i, &pi)?)?;
        let rf = ext.residue_field();
        let omega = ext.teichmuller(rf.generator())?;
        let tv = self.eval_base(ext, &ext.galois_apply(i, &omega)?)?;
        let t = tv.exponent_in(rf.size() - 1).ok_or(Error::Verification("tame value order"))?;
        let alpha = match &self.alpha {
            Some(a) => Some(ext.galois_apply(-i, a)?),
            None => None,
        };
        Ok(MultCharacter { uniformizer_value: uval, tame_exponent: t, alpha, twists: self.twists.clone() })
    }
}

/// Elements generating `E*/U_E^{n+1}`: `ϖ`, a Teichmüller generator of
/// `μ_{q_E−1}`, and `1 + b·ϖ^j` for residue basis lifts `b`, `1 ≤ j ≤ n`.
pub fn generators(ext: &TameExtension, n: u32) -> Result<Vec<ExtElement>> {
    let mut gens = vec![ext.uniformizer(), ext.teichmuller(ext.residue_field().generator())?];
    gens.extend(principal_generators(ext, 1, n)?);
    Ok(gens)
}

/// `1 + b·ϖ^j` for residue basis lifts `b` and `lo ≤ j ≤ hi`.
pub fn principal_generators(ext: &TameExtension, lo: u32, hi: u32) -> Result<Vec<ExtElement>> {
    let mut out = Vec::new();
    let p = ext.config().p;
    for j in lo..=hi {
        let pj = ext.uniformizer_pow(j as i64)?;
        for i in 0..ext.residue_degree() {
            let b = ext.lift_residue(p.pow(i as u32));
            out.push(ext.add(&ext.one(), &ext.mul(&b, &pj)));
        }
    }
    Ok(out)
}

/// Cached classification of a pair `(E/F, χ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairFlags {
    pub regular: bool,
    pub admissible: bool,
    /// `None` at level 0.
    pub minimal: Option<bool>,
    pub level: u32,
}

#[derive(Clone, Debug)]
pub struct CharPair {
    pub ext: TameExtension,
    pub chi: MultCharacter,
    pub flags: PairFlags,
}

impl CharPair {
    pub fn new(ext: TameExtension, chi: MultCharacter) -> Result<Self> {
        let flags = classify_pair(&ext, &chi)?;
        Ok(CharPair { ext, chi, flags })
    }

    pub fn eval(&self, w: &ExtElement) -> Result<RootOfUnity> {
        self.chi.eval(&self.ext, w)
    }
}

fn sigma_invariant_on(ext: &TameExtension, chi: &MultCharacter, gens: &[ExtElement]) -> Result<bool> {
    for g in gens {
        if chi.eval(ext, &ext.galois_apply(1, g)?)? != chi.eval(ext, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Regular: `χ ≠ χ∘σ` (for cyclic `E/F` this is "does not factor through the
/// norm"). Admissible: regular, and if `χ|_{U_E^1}` factors through the norm
/// then `E/F` is unramified.
pub fn classify_pair(ext: &TameExtension, chi: &MultCharacter) -> Result<PairFlags> {
    if !ext.is_galois() {
        return Err(Error::NotGalois);
    }
    let level = chi.level(ext);
    let gens = generators(ext, level)?;
    let regular = !sigma_invariant_on(ext, chi, &gens)?;
    let wild_invariant = sigma_invariant_on(ext, chi, &principal_generators(ext, 1, level)?)?;
    let admissible = regular && (!wild_invariant || !ext.kind().is_ramified());
    let minimal = if level >= 1 { Some(is_minimal(ext, chi)?) } else { None };
    Ok(PairFlags { regular, admissible, minimal, level })
}

/// `(α + 𝔭_E^{−n+1}) ∩ F = ∅`, by searching `F`-representatives of
/// `𝔭_E^{−n}/𝔭_E^{−n+1}`.
pub fn is_minimal(ext: &TameExtension, chi: &MultCharacter) -> Result<bool> {
    let n = chi.level(ext) as i64;
    if n < 1 {
        return Err(Error::Precondition("minimality needs level >= 1"));
    }
    let alpha = chi.total_alpha(ext).expect("positive level");
    let cfg = ext.config();
    let e = ext.ramification() as i64;
    // F-elements of E-valuation ≥ −n, modulo those of E-valuation ≥ −n+1
    let lo = (-n).div_euclid(e) + if (-n).rem_euclid(e) != 0 { 1 } else { 0 };
    let cands: Vec<PadicNumber> = if lo * e == -n {
        (0..cfg.p as i64).map(|c| PadicNumber::from_int(cfg, c).shift(lo)).collect()
    } else {
        vec![PadicNumber::zero(cfg)]
    };
    for f in cands {
        let d = ext.sub(&alpha, &ext.from_padic(&f));
        if ext.val(&d) > -n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For `E = F(δ)` quadratic: `(a, b)` with `α = a + bδ`.
pub fn quad_coords(ext: &TameExtension, a: &ExtElement) -> Result<(PadicNumber, PadicNumber)> {
    let cfg = ext.config();
    if a.is_zero() {
        return Ok((PadicNumber::zero(cfg), PadicNumber::zero(cfg)));
    }
    let p = cfg.p;
    let m = p.pow(a.prec());
    let mk = |c: u64| -> Result<PadicNumber> {
        let c = c % m;
        if c == 0 {
            return Ok(PadicNumber::zero(cfg));
        }
        let v = crate::arith::val_p(c, p);
        PadicNumber::from_parts_prec(p, a.p_power() + v as i64, c / p.pow(v), a.prec() - v)
    };
    Ok((mk(a.coeffs()[0])?, mk(a.coeffs()[1])?))
}

/// For unramified quadratic `E` and minimal `χ` of level `n`: the exponent
/// `l` in `α = p^k u + p^l vδ`, which should equal `−n`.
pub fn l_exponent(ext: &TameExtension, chi: &MultCharacter) -> Result<i64> {
    if ext.kind() != ExtKind::UnramQuad {
        return Err(Error::InvalidExtension("l exponent is for the unramified quadratic case"));
    }
    let alpha = chi.total_alpha(ext).ok_or(Error::Precondition("level-0 character"))?;
    let (_, b) = quad_coords(ext, &alpha)?;
    Ok(b.val())
}

/// The alias `X` of the text: returns `α(χ)` after checking
/// `χ(1+x) = ψ_E(α x)` on a spanning set of `𝔭_E^{⌊n/2⌋+1}/𝔭_E^{n+1}`.
pub fn alpha_of_chi(ext: &TameExtension, chi: &MultCharacter) -> Result<ExtElement> {
    let n = chi.level(ext);
    if n < 1 {
        return Err(Error::Precondition("alpha of a level-0 character"));
    }
    let alpha = chi.total_alpha(ext).expect("positive level");
    for g in principal_generators(ext, n / 2 + 1, n)? {
        let x = ext.sub(&g, &ext.one());
        if chi.eval(ext, &g)? != psi_e(ext, &ext.mul(&alpha, &x))? {
            return Err(Error::Verification("alpha(chi) defining relation"));
        }
    }
    Ok(alpha)
}

/// `ζ(β, ϖ)`: the Teichmüller root of unity with `β ϖ^{−v_E(β)} ≡ ζ mod U_E^1`,
/// for totally ramified `E`.
pub fn zeta_root(ext: &TameExtension, beta: &ExtElement) -> Result<PadicNumber> {
    zeta_root_wrt(ext, beta, &ext.uniformizer())
}

/// `ζ(β, ϖ')` for another uniformizer `ϖ'`.
pub fn zeta_root_wrt(ext: &TameExtension, beta: &ExtElement, pi: &ExtElement) -> Result<PadicNumber> {
    if !ext.kind().is_ramified() {
        return Err(Error::InvalidExtension("zeta_root needs a totally ramified extension"));
    }
    if beta.is_zero() || ext.val(pi) != 1 {
        return Err(Error::Precondition("zeta_root needs beta != 0 and a uniformizer"));
    }
    let u = ext.mul(beta, &ext.pow(pi, -ext.val(beta))?);
    let r = ext.residue(&u)?;
    Ok(PadicNumber::teichmuller(ext.config(), r))
}

/// `(a, b)` with the minimal part: for ramified quadratic `E`, the `δ`-part
/// `bδ` of `α = a + bδ` carries the odd valuation; it is the wild element of
/// `χ' = χ·(φ∘N)^{−1}` for the `φ` with `α(φ) = a`.
pub fn minimal_alpha(ext: &TameExtension, chi: &MultCharacter) -> Result<ExtElement> {
    let alpha = chi.total_alpha(ext).ok_or(Error::Precondition("level-0 character"))?;
    match ext.kind() {
        ExtKind::RamQuad => {
            let (_, b) = quad_coords(ext, &alpha)?;
            if b.is_zero() {
                return Err(Error::Precondition("character is a norm twist of a level-0 character"));
            }
            let ab = ext.scale(&ext.gen(), &b);
            if ext.val(&ab) >= 0 {
                return Err(Error::Precondition("minimal part has level 0"));
            }
            Ok(ab)
        }
        _ => Ok(alpha),
    }
}

/// `Δ(ϖ) = ℵ(ζ(α', ϖ'))·λ^{n'}` for a ramified quadratic `E`, with `α'` the
/// minimal part of `α(χ)` and `n' = −v_E(α')`.
pub fn ramified_delta_at(ext: &TameExtension, chi: &MultCharacter, pi: &ExtElement) -> Result<RootOfUnity> {
    let a = minimal_alpha(ext, chi)?;
    let n = -ext.val(&a);
    let z = zeta_root_wrt(ext, &a, pi)?;
    let lam = langlands_lambda(ext, &AdditiveCharacter::standard(ext.config(), 1))?;
    Ok(cft_character(ext, &z)? * lam.pow(n))
}

/// `Δ_χ`. Unramified quadratic: `(−1)^{v_E}`. Ramified quadratic: trivial on
/// `U_E^1`, equal to `ℵ_{E/F}` on `μ_F`, and `Δ(ϖ)` as in
/// [`ramified_delta_at`]. Odd degree: trivial when `δ_{E/F} = 1`, the
/// unramified quadratic character otherwise.
pub fn delta_twist(pair: &CharPair) -> Result<MultCharacter> {
    if !pair.flags.regular {
        return Err(Error::NotRegular);
    }
    let ext = &pair.ext;
    let unram_quadratic = MultCharacter::new(RootOfUnity::MINUS_ONE, 0, None);
    match ext.kind() {
        ExtKind::UnramQuad => Ok(unram_quadratic),
        ExtKind::RamQuad => {
            let dpi = ramified_delta_at(ext, &pair.chi, &ext.uniformizer())?;
            let p = ext.config().p;
            Ok(MultCharacter::new(dpi, (p - 1) / 2, None))
        }
        ExtKind::UnramL | ExtKind::RamGaloisL => {
            let d = delta_ef(ext)?;
            if d.is_trivial(ext.config()) {
                Ok(MultCharacter::trivial())
            } else {
                Ok(unram_quadratic)
            }
        }
    }
}

/// `δ_{E/F} = (·, disc)_F` with `disc` the discriminant of the defining polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticCharacter {
    pub disc: PadicNumber,
}

impl QuadraticCharacter {
    pub fn eval(&self, x: &PadicNumber) -> i32 {
        hilbert(x, &self.disc)
    }

    /// Trivial iff it kills `p` and a nonsquare unit.
    pub fn is_trivial(&self, cfg: &PrimeConfig) -> bool {
        let p = cfg.p;
        let g = (2..p).find(|&a| crate::arith::legendre(a as i64, p) == -1).unwrap();
        self.eval(&PadicNumber::from_int(cfg, p as i64)) == 1 && self.eval(&PadicNumber::from_int(cfg, g as i64)) == 1
    }
}

pub fn delta_ef(ext: &TameExtension) -> Result<QuadraticCharacter> {
    Ok(QuadraticCharacter { disc: ext.discriminant(&ext.gen())? })
}
