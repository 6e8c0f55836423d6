//! Hilbert symbols, additive characters, Weil indices, Hasse invariants,
//! Langlands constants of quadratic extensions and the class field theory
//! character `ℵ_{E/F}`.
//!
//! Level convention: `ψ` has level `n` when it is trivial on `p^n·O` and not
//! on `p^{n-1}·O`. The level-`n` character is `x ↦ e({x/p^n})`.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{legendre, pow_mod, primitive_root};
use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::ext::{ExtKind, TameExtension};
use crate::padic::{PadicNumber, PrimeConfig};

/// `(a, b)_F` for odd `p` from valuations and Legendre symbols.
pub fn hilbert(a: &PadicNumber, b: &PadicNumber) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    let p = a.p();
    let (al, be) = (a.val().rem_euclid(2), b.val().rem_euclid(2));
    let eps = ((p - 1) / 2) as i64 % 2;
    let mut s = if (al * be * eps) % 2 == 1 { -1 } else { 1 };
    if be == 1 {
        s *= legendre(a.unit_residue() as i64, p);
    }
    if al == 1 {
        s *= legendre(b.unit_residue() as i64, p);
    }
    s
}

/// `(a, b)_F` by searching for a primitive zero of `a x² + b y² − z²` that
/// Hensel's lemma lifts. Both arguments are first divided by even powers of
/// `p`, so every primitive vector has a partial derivative of valuation at
/// most one and a search modulo `p³` is complete.
pub fn hilbert_by_solvability(a: &PadicNumber, b: &PadicNumber) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    let p = a.p();
    let m3 = p * p * p;
    let reduce = |x: &PadicNumber| -> u64 {
        let u = x.unit() % m3;
        if x.val().rem_euclid(2) == 1 {
            (u * p) % m3
        } else {
            u
        }
    };
    let (ra, rb) = (reduce(a), reduce(b));
    let f = |x: u64, y: u64, z: u64, m: u64| -> u64 {
        let t = (ra % m) * (x * x % m) % m + (rb % m) * (y * y % m) % m;
        (t % m + m - z * z % m) % m
    };
    let vp = |x: u64| -> u32 {
        if !x.is_multiple_of(p) {
            0
        } else if !x.is_multiple_of(p * p) {
            1
        } else {
            2
        }
    };
    // smallest valuation among the partials 2ax, 2by, -2z
    let grad_val = |x: u64, y: u64, z: u64| -> u32 {
        let m = m3;
        vp(2 * ra % m * x % m).min(vp(2 * rb % m * y % m)).min(vp(2 * z % m))
    };
    let mut base = Vec::new();
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                // solutions are taken up to unit scaling: first nonzero coordinate 1
                let lead = if x != 0 { x } else if y != 0 { y } else { z };
                if lead != 1 || f(x, y, z, p) != 0 {
                    continue;
                }
                if grad_val(x, y, z) == 0 {
                    return 1;
                }
                base.push((x, y, z));
            }
        }
    }
    let lift = |sols: &[(u64, u64, u64)], step: u64, modulus: u64| -> Vec<(u64, u64, u64)> {
        let mut out = Vec::new();
        for &(x, y, z) in sols {
            for i in 0..p {
                for j in 0..p {
                    for k in 0..p {
                        let (x2, y2, z2) = (x + i * step, y + j * step, z + k * step);
                        if f(x2, y2, z2, modulus) == 0 {
                            out.push((x2, y2, z2));
                        }
                    }
                }
            }
        }
        out
    };
    let level2 = lift(&base, p, p * p);
    for chunk in level2.chunks(64) {
        if lift(chunk, p * p, m3).iter().any(|&(x, y, z)| grad_val(x, y, z) <= 1) {
            return 1;
        }
    }
    -1
}

/// `x ↦ ψ_n(scale·x)` with `ψ_n` the standard character of level `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdditiveCharacter {
    pub level: i64,
    pub scale: PadicNumber,
}

impl AdditiveCharacter {
    pub fn standard(cfg: &PrimeConfig, level: i64) -> Self {
        AdditiveCharacter { level, scale: PadicNumber::one(cfg) }
    }

    /// The twist `x ↦ ψ(a·x)`.
    pub fn twist(&self, a: &PadicNumber) -> Self {
        AdditiveCharacter { level: self.level, scale: self.scale.mul(a) }
    }

    /// Level of the character itself, taking the scale into account.
    pub fn effective_level(&self) -> i64 {
        self.level - self.scale.val()
    }

    pub fn eval(&self, x: &PadicNumber) -> Result<RootOfUnity> {
        let y = self.scale.mul(x);
        if y.is_zero() {
            return Ok(RootOfUnity::ONE);
        }
        let k = self.level - y.val();
        if k <= 0 {
            return Ok(RootOfUnity::ONE);
        }
        if k as u32 > y.prec() {
            return Err(Error::PrecisionExhausted);
        }
        let pk = y.p().pow(k as u32);
        Ok(RootOfUnity::new((y.unit() % pk) as i64, pk))
    }
}

/// A sum `Σ c_j ζ^j` over `ζ = e(1/p^k)`, kept dense; used only by the
/// Gauss-sum oracle, whose conductors exceed the general cyclotomic bound.
struct PPowerSum {
    p: u64,
    pk: u64,
    c: Vec<i64>,
}

impl PPowerSum {
    /// Reduces to the basis `ζ^j`, `j < (p-1)p^{k-1}`.
    fn canonical(mut self) -> Self {
        let step = self.pk / self.p;
        for r in 0..step as usize {
            let top = r + (self.p as usize - 1) * step as usize;
            let c = self.c[top];
            if c != 0 {
                self.c[top] = 0;
                for i in 0..(self.p as usize - 1) {
                    self.c[r + i * step as usize] -= c;
                }
            }
        }
        self
    }

    fn conj(&self) -> Self {
        let n = self.pk as usize;
        let mut c = vec![0i64; n];
        for (j, &x) in self.c.iter().enumerate() {
            c[(n - j) % n] += x;
        }
        PPowerSum { p: self.p, pk: self.pk, c }.canonical()
    }

    fn approx(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, &x) in self.c.iter().enumerate() {
            if x != 0 {
                let t = 2.0 * core::f64::consts::PI * j as f64 / self.pk as f64;
                re += x as f64 * libm::cos(t);
                im += x as f64 * libm::sin(t);
            }
        }
        (re, im)
    }
}

/// Largest modulus the Gauss sum oracle enumerates.
const ORACLE_TERMS: u128 = 1 << 22;

/// `S/|S|` for `S = Σ_{j mod p^k} e(u j²/p^k)`.
fn normalized_quadratic_sum(p: u64, k: u32, u: u64) -> Result<RootOfUnity> {
    let pk = p.pow(k);
    let mut c = vec![0i64; pk as usize];
    for j in 0..pk {
        let t = (j as u128 * j as u128 % pk as u128 * u as u128 % pk as u128) as usize;
        c[t] += 1;
    }
    let s = PPowerSum { p, pk, c }.canonical();
    let sc = s.conj();
    let (re, im) = s.approx();
    if s.c == sc.c {
        return Ok(if re > 0.0 { RootOfUnity::ONE } else { RootOfUnity::MINUS_ONE });
    }
    let neg: Vec<i64> = sc.c.iter().map(|x| -x).collect();
    if s.c == neg {
        return Ok(if im > 0.0 { RootOfUnity::new(1, 4) } else { RootOfUnity::new(3, 4) });
    }
    Err(Error::Verification("Gauss sum is not a 4th root of unity times a positive real"))
}

/// Weil index of `x ↦ ψ(x²)` from finite Gauss sums over `p^{-m}O/p^M O`,
/// checked to be stable from `m` to `m+1`.
pub fn weil_index_oracle(psi: &AdditiveCharacter) -> Result<RootOfUnity> {
    let p = psi.scale.p();
    let n = psi.effective_level();
    let u = psi.scale.unit();
    // with x = p^{-m} j the sum runs over j mod p^{n+2m}
    let mut m = 0i64;
    while n + 2 * m < 1 {
        m += 1;
    }
    let mut k0 = (n + 2 * m) as u32;
    if k0 + 2 > psi.scale.prec() {
        return Err(Error::PrecisionExhausted);
    }
    // the sum mod p^{k+2} is p times the sum mod p^k, so large moduli can step down
    while k0 > 2 && (p as u128).pow(k0 + 2) > ORACLE_TERMS {
        k0 -= 2;
    }
    let g0 = normalized_quadratic_sum(p, k0, u % p.pow(k0))?;
    let g1 = normalized_quadratic_sum(p, k0 + 2, u % p.pow(k0 + 2))?;
    if g0 != g1 {
        return Err(Error::NonStabilization);
    }
    Ok(g0)
}

/// Closed form of the Weil index of `x ↦ ψ(x²)` for odd `p`: `1` at even
/// level, `(u|p)·ε_p` at odd level with `ε_p ∈ {1, i}` by `p mod 4`.
pub fn weil_index_closed(psi: &AdditiveCharacter) -> RootOfUnity {
    let p = psi.scale.p();
    if psi.effective_level().rem_euclid(2) == 0 {
        return RootOfUnity::ONE;
    }
    let eps = if p % 4 == 1 { RootOfUnity::ONE } else { RootOfUnity::new(1, 4) };
    let s = legendre(psi.scale.unit_residue() as i64, p);
    eps * RootOfUnity::from_sign(s)
}

/// `γ_F(a, ψ) = γ(aψ)/γ(ψ)` through the Gauss-sum oracle.
pub fn weil_gamma(a: &PadicNumber, psi: &AdditiveCharacter) -> Result<RootOfUnity> {
    if a.is_zero() {
        return Err(Error::Precondition("weil_gamma of zero"));
    }
    Ok(weil_index_oracle(&psi.twist(a))? * weil_index_oracle(psi)?.inv())
}

/// `γ_F(a, ψ)` through the closed form.
pub fn weil_gamma_closed(a: &PadicNumber, psi: &AdditiveCharacter) -> RootOfUnity {
    weil_index_closed(&psi.twist(a)) * weil_index_closed(psi).inv()
}

/// A diagonal quadratic form `Σ a_i x_i²`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm {
    pub diag: Vec<PadicNumber>,
}

impl QuadForm {
    pub fn new(diag: Vec<PadicNumber>) -> Result<Self> {
        if diag.is_empty() || diag.iter().any(|a| a.is_zero()) {
            return Err(Error::Precondition("degenerate quadratic form"));
        }
        Ok(QuadForm { diag })
    }

    pub fn det(&self) -> PadicNumber {
        let mut d = self.diag[0];
        for a in &self.diag[1..] {
            d = d.mul(a);
        }
        d
    }

    /// Weil index of `ψ∘Q` (unnormalised), the product over the diagonal.
    pub fn weil_index(&self, psi: &AdditiveCharacter) -> Result<RootOfUnity> {
        let mut g = RootOfUnity::ONE;
        for a in &self.diag {
            g = g * weil_index_oracle(&psi.twist(a))?;
        }
        Ok(g)
    }
}

/// `h(Q) = γ(ψ∘Q)·γ(ψ)^{-n}·γ(det Q, ψ)^{-1}`; always `±1`.
pub fn hasse_invariant(q: &QuadForm, psi: &AdditiveCharacter) -> Result<i32> {
    let n = q.diag.len() as i64;
    let g = q.weil_index(psi)? * weil_index_oracle(psi)?.pow(-n) * weil_gamma(&q.det(), psi)?.inv();
    g.as_sign().ok_or(Error::Verification("Hasse invariant is not a sign"))
}

/// `λ_{E/F}(ψ)` for quadratic `E = F(√Δ)`: the Weil index of `ψ∘N` on the
/// norm form `diag(1, −Δ)`.
pub fn langlands_lambda(ext: &TameExtension, psi: &AdditiveCharacter) -> Result<RootOfUnity> {
    if !ext.kind().is_quadratic() {
        return Err(Error::InvalidExtension("langlands_lambda needs a quadratic extension"));
    }
    let delta = ext.delta().expect("quadratic kinds carry Δ");
    let cfg = ext.config();
    QuadForm::new(vec![PadicNumber::one(cfg), delta.neg()])?.weil_index(psi)
}

/// `ℵ_{E/F}(x)`, the character of `F*` with kernel `N(E*)`.
///
/// Quadratic `E`: `(x, Δ)`. Unramified of degree `d`: `ζ_d^{v(x)}`. Ramified
/// Galois of degree `ℓ`: `F*/N(E*)` is identified with `Z/ℓ` through the
/// unit part of `x/N(ϖ)^{v(x)}`, read in `F_p*/(F_p*)^ℓ` by the discrete log
/// to the least primitive root.
pub fn cft_character(ext: &TameExtension, x: &PadicNumber) -> Result<RootOfUnity> {
    if x.is_zero() {
        return Err(Error::Precondition("cft_character of zero"));
    }
    match ext.kind() {
        ExtKind::UnramQuad | ExtKind::RamQuad => {
            Ok(RootOfUnity::from_sign(hilbert(x, &ext.delta().expect("quadratic"))))
        }
        ExtKind::UnramL => Ok(RootOfUnity::new(x.val(), ext.degree() as u64)),
        ExtKind::RamGaloisL => {
            let l = ext.degree() as u64;
            let p = x.p();
            let npi = ext.norm(&ext.uniformizer())?;
            let u = x.div(&npi.pow(x.val())?)?;
            let g = primitive_root(p);
            let r = u.unit_residue();
            let k = (0..p - 1).find(|&k| pow_mod(g, k, p) == r).expect("primitive root");
            Ok(RootOfUnity::new((k % l) as i64, l))
        }
    }
}

/// Representatives of `F*/U_F^1` restricted to valuations in `0..l` paired
/// with their `ℵ_{E/F}` values, and a flag that the values kill exactly the
/// subgroup generated by norms of `ϖ^a·ω` (Teichmüller `ω`).
pub fn norm_group_check(ext: &TameExtension) -> Result<bool> {
    let cfg = *ext.config();
    let p = cfg.p;
    let d = ext.degree() as i64;
    // norms of generators of E*/U_E^1, reduced to F*/U_F^1 ≅ Z × F_p*
    let mut gens: Vec<(i64, u64)> = Vec::new();
    let npi = ext.norm(&ext.uniformizer())?;
    gens.push((npi.val(), npi.unit_residue()));
    let rf = ext.residue_field();
    let w = ext.teichmuller(rf.generator())?;
    let nw = ext.norm(&w)?;
    gens.push((nw.val(), nw.unit_residue()));
    // subgroup of (Z/d) × F_p* generated by the norms; F*/N has order d and
    // v(N(E*)) ⊂ fZ, so reducing valuations mod d loses nothing
    let mut seen = vec![false; (d as usize) * p as usize];
    let idx = |v: i64, r: u64| v.rem_euclid(d) as usize * p as usize + r as usize;
    let mut stack = vec![(0i64, 1u64)];
    seen[idx(0, 1)] = true;
    while let Some((v, r)) = stack.pop() {
        for &(gv, gr) in &gens {
            let (v2, r2) = ((v + gv).rem_euclid(d), r * gr % p);
            if !seen[idx(v2, r2)] {
                seen[idx(v2, r2)] = true;
                stack.push((v2, r2));
            }
        }
    }
    let size = seen.iter().filter(|&&s| s).count() as i64;
    if size * d != d * (p as i64 - 1) {
        return Ok(false);
    }
    for v in 0..d {
        for r in 1..p {
            let x = PadicNumber::from_parts(&cfg, v, r);
            let in_kernel = cft_character(ext, &x)?.is_one();
            if in_kernel != seen[idx(v, r)] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u64) -> PrimeConfig {
        PrimeConfig::relaxed(p, 12, 2).unwrap()
    }

    #[test]
    fn hilbert_examples() {
        let c = cfg(3);
        let three = PadicNumber::from_int(&c, 3);
        let two = PadicNumber::from_int(&c, 2);
        assert_eq!(hilbert(&three, &three), -1);
        assert_eq!(hilbert(&three, &two), -1);
        assert_eq!(hilbert_by_solvability(&three, &three), -1);
        assert_eq!(hilbert_by_solvability(&three, &two), -1);
        assert_eq!(hilbert_by_solvability(&two, &two), 1);
    }

    #[test]
    fn gamma_of_nonsquare_unit() {
        for p in [3u64, 5, 7] {
            let c = cfg(p);
            let d = PadicNumber::from_int(&c, (2..p).find(|&a| legendre(a as i64, p) == -1).unwrap() as i64);
            for level in 0..3 {
                let psi = AdditiveCharacter::standard(&c, level);
                let g = weil_gamma(&d, &psi).unwrap();
                let want = if level % 2 == 1 { RootOfUnity::MINUS_ONE } else { RootOfUnity::ONE };
                assert_eq!(g, want, "p={p} level={level}");
                assert_eq!(weil_gamma_closed(&d, &psi), want);
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_on_small_grid() {
        for p in [3u64, 5, 7] {
            let c = cfg(p);
            for v in -2..3 {
                for u in 1..p {
                    let a = PadicNumber::from_parts(&c, v, u);
                    let psi = AdditiveCharacter::standard(&c, 1).twist(&a);
                    assert_eq!(weil_index_oracle(&psi).unwrap(), weil_index_closed(&psi));
                }
            }
        }
    }

    #[test]
    fn lambda_matches_lemma_form() {
        use crate::ext::{ExtKind, TameExtension};
        for p in [3u64, 5, 7] {
            let c = cfg(p);
            let g = (2..p).find(|&a| legendre(a as i64, p) == -1).unwrap();
            let deltas = [
                (ExtKind::UnramQuad, None),
                (ExtKind::RamQuad, None),
                (ExtKind::RamQuad, Some(PadicNumber::from_parts(&c, 1, g))),
            ];
            for (kind, d) in deltas {
                let e = TameExtension::build(c, kind, d).unwrap();
                let delta = e.delta().unwrap();
                let m1 = PadicNumber::from_int(&c, -1);
                for level in 0..3 {
                    let psi = AdditiveCharacter::standard(&c, level);
                    let lam = langlands_lambda(&e, &psi).unwrap();
                    let want = weil_gamma(&delta, &psi).unwrap() * RootOfUnity::from_sign(hilbert(&m1, &delta));
                    assert_eq!(lam, want);
                    assert!(lam.pow(-4).is_one());
                }
            }
        }
    }

    #[test]
    fn hasse_of_binary_forms() {
        let c = cfg(5);
        let psi = AdditiveCharacter::standard(&c, 1);
        for (a, b) in [(1, 1), (2, 5), (5, 10), (3, 15), (25, 2)] {
            let (a, b) = (PadicNumber::from_int(&c, a), PadicNumber::from_int(&c, b));
            let q = QuadForm::new(vec![a, b]).unwrap();
            assert_eq!(hasse_invariant(&q, &psi).unwrap(), hilbert(&a, &b));
        }
    }

    #[test]
    fn ramified_cubic_norm_group() {
        use crate::ext::{ExtKind, TameExtension};
        let c = PrimeConfig::new(7, 12, 3).unwrap();
        let e = TameExtension::build(c, ExtKind::RamGaloisL, None).unwrap();
        assert!(norm_group_check(&e).unwrap());
    }
}
