//! Deligne–Lusztig values on elliptic regular elements of `GL(n, F_q)`
//! (prime `q`) by brute force over the group, and the depth-zero
//! comparison with the character formula.
//!
//! The elliptic torus is `F_{q^n}*` acting on itself by multiplication in
//! the basis `1, x, …, x^{n−1}` of the field's modulus.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::is_prime;
use crate::characters::{CharPair, MultCharacter};
use crate::covers::GenuineCharacter;
use crate::cyclo::{CycInt, RootOfUnity};
use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::ext::{ExtElement, TameExtension};
use crate::formula::{depth_zero_classes, eval_formula, PositiveSystem, SuiteReport};
use crate::fq::FqField;

/// Groups with more than this many matrices are not enumerated.
pub const MAX_ENUMERATION: u64 = 200_000;

/// `n × n` matrix over `F_q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix(pub Vec<u64>);

#[derive(Clone, Debug)]
pub struct GLnq {
    n: usize,
    q: u64,
    field: FqField,
    /// `(g, g^{−1})` for every `g`, when the group is small enough.
    elements: Option<Vec<(Matrix, Matrix)>>,
}

fn mat_mul(a: &Matrix, b: &Matrix, n: usize, q: u64) -> Matrix {
    let mut c = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a.0[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] = (c[i * n + j] + x * b.0[k * n + j]) % q;
            }
        }
    }
    Matrix(c)
}

fn inv_mod(a: u64, q: u64) -> u64 {
    crate::arith::pow_mod(a, q - 2, q)
}

/// Gauss–Jordan inverse; `None` when singular.
fn mat_inv(a: &Matrix, n: usize, q: u64) -> Option<Matrix> {
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row: Vec<u64> = a.0[i * n..(i + 1) * n].to_vec();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        let iv = inv_mod(m[col][col], q);
        for x in m[col].iter_mut() {
            *x = *x * iv % q;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..2 * n {
                    m[r][c] = (m[r][c] + q * q - f * m[col][c] % q) % q;
                }
            }
        }
    }
    Some(Matrix(m.iter().flat_map(|row| row[n..].to_vec()).collect()))
}

impl GLnq {
    /// `GL(n, q)` for prime `q`, with the elliptic torus from `F_{q^n}`.
    pub fn new(n: usize, q: u64) -> Result<Self> {
        if !is_prime(q) || n < 2 {
            return Err(Error::InvalidConfig("GL(n, q) needs n >= 2 and a prime q"));
        }
        Self::from_field(FqField::new(q, n)?)
    }

    /// `GL(n, p)` with the torus `F_{p^n}*` given by `field` (degree `n ≥ 2`).
    pub fn from_field(field: FqField) -> Result<Self> {
        let (n, q) = (field.degree(), field.p());
        if n < 2 {
            return Err(Error::InvalidConfig("GL(n, q) needs n >= 2"));
        }
        let total = q.checked_pow((n * n) as u32).unwrap_or(u64::MAX);
        let elements = if total <= MAX_ENUMERATION {
            let mut out = Vec::new();
            for idx in 0..total {
                let mut t = idx;
                let g = Matrix(
                    (0..n * n)
                        .map(|_| {
                            let c = t % q;
                            t /= q;
                            c
                        })
                        .collect(),
                );
                if let Some(gi) = mat_inv(&g, n, q) {
                    out.push((g, gi));
                }
            }
            Some(out)
        } else {
            None
        };
        Ok(GLnq { n, q, field, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn is_enumerated(&self) -> bool {
        self.elements.is_some()
    }

    fn elements(&self) -> Result<&[(Matrix, Matrix)]> {
        self.elements.as_deref().ok_or(Error::InvalidConfig("group too large for enumeration"))
    }

    /// Number of enumerated invertible matrices.
    pub fn order(&self) -> Result<u64> {
        Ok(self.elements()?.len() as u64)
    }

    /// `∏_{i<n} (q^n − q^i)`.
    pub fn order_formula(&self) -> u64 {
        let qn = self.q.pow(self.n as u32);
        (0..self.n).map(|i| qn - self.q.pow(i as u32)).product()
    }

    /// `|T^Φ| = q^n − 1`.
    pub fn torus_order(&self) -> u64 {
        self.field.size() - 1
    }

    /// Matrix of multiplication by `a ∈ F_{q^n}`.
    pub fn torus_matrix(&self, a: u64) -> Matrix {
        let n = self.n;
        let mut m = vec![0u64; n * n];
        for j in 0..n {
            let col = self.field.to_coeffs(self.field.mul(a, self.field.pow(self.field_x(), j as i64)));
            for i in 0..n {
                m[i * n + j] = col[i];
            }
        }
        Matrix(m)
    }

    /// The basis element `x`, encoded as the integer `q`.
    fn field_x(&self) -> u64 {
        self.q
    }

    /// The field element `a` if `m` is multiplication by `a`.
    pub fn torus_element(&self, m: &Matrix) -> Option<u64> {
        let n = self.n;
        let col: Vec<u64> = (0..n).map(|i| m.0[i * n]).collect();
        let a = self.field.from_coeffs(&col);
        if a != 0 && &self.torus_matrix(a) == m {
            Some(a)
        } else {
            None
        }
    }

    /// Matrix of the Frobenius `x ↦ x^q` on `F_{q^n}`.
    pub fn frobenius_matrix(&self) -> Matrix {
        let n = self.n;
        let mut m = vec![0u64; n * n];
        for j in 0..n {
            let b = self.field.pow(self.field_x(), j as i64);
            let col = self.field.to_coeffs(self.field.frob(b));
            for i in 0..n {
                m[i * n + j] = col[i];
            }
        }
        Matrix(m)
    }

    pub fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        mat_mul(a, b, self.n, self.q)
    }

    pub fn inv(&self, a: &Matrix) -> Option<Matrix> {
        mat_inv(a, self.n, self.q)
    }

    /// `s` generates `F_{q^n}` over `F_q`: its Frobenius orbit has `n` points.
    pub fn is_regular(&self, s: u64) -> bool {
        if s == 0 {
            return false;
        }
        let mut x = s;
        for _ in 1..self.n {
            x = self.field.frob(x);
            if x == s {
                return false;
            }
        }
        true
    }
}

/// `θ(x) = ζ_{q^n−1}^{k·dlog x}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FqMultChar {
    pub k: u64,
}

impl FqMultChar {
    pub fn eval(&self, field: &FqField, x: u64) -> Result<RootOfUnity> {
        let m = field.size() - 1;
        let d = field.dlog(x).ok_or(Error::Precondition("character at zero"))?;
        Ok(RootOfUnity::new(((self.k as u128 * d as u128) % m as u128) as i64, m))
    }

    /// `k, kq, …, kq^{n−1}` distinct modulo `q^n − 1`.
    pub fn is_regular(&self, field: &FqField) -> bool {
        let m = field.size() - 1;
        let q = field.p();
        let mut seen = Vec::new();
        let mut k = self.k % m;
        for _ in 0..field.degree() {
            if seen.contains(&k) {
                return false;
            }
            seen.push(k);
            k = k * q % m;
        }
        true
    }
}

fn check_inputs(g: &GLnq, s: u64, theta: &FqMultChar) -> Result<()> {
    if !g.is_regular(s) {
        return Err(Error::Precondition("s is not regular semisimple elliptic"));
    }
    if !theta.is_regular(&g.field) {
        return Err(Error::NotRegular);
    }
    Ok(())
}

/// `Σ_{g : g^{−1}sg ∈ T} θ(g^{−1}sg)` over the whole group.
pub fn carter_sum(g: &GLnq, s: u64, theta: &FqMultChar) -> Result<CycInt> {
    if !g.is_regular(s) {
        return Err(Error::Precondition("s is not regular semisimple elliptic"));
    }
    let sm = g.torus_matrix(s);
    let mut terms: Vec<(RootOfUnity, i64)> = Vec::new();
    for (x, xi) in g.elements()? {
        let c = g.mul(&g.mul(xi, &sm), x);
        if let Some(t) = g.torus_element(&c) {
            terms.push((theta.eval(&g.field, t)?, 1));
        }
    }
    CycInt::from_roots(terms)
}

/// `Σ_{i<n} θ(s^{q^i})`.
pub fn orbit_sum(g: &GLnq, s: u64, theta: &FqMultChar) -> Result<CycInt> {
    let mut terms = Vec::new();
    let mut x = s;
    for _ in 0..g.n {
        terms.push((theta.eval(&g.field, x)?, 1));
        x = g.field.frob(x);
    }
    CycInt::from_roots(terms)
}

/// `ε_T·ε_{C⁰(s)}` from the stated constants: `ε_T = −1`, and
/// `ε_{C⁰(s)} = 1` for `n = 2`, `(−1)^n` for odd `n`.
pub fn sign_stated(n: usize) -> i32 {
    let eps_c = if n == 2 || n.is_multiple_of(2) { 1 } else { -1 };
    -eps_c
}

/// Number of cycles of a permutation.
fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for i in 0..perm.len() {
        if !seen[i] {
            cycles += 1;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
            }
        }
    }
    cycles
}

/// `ε_T·ε_G = (−1)^{rk T + rk G}` with `F_q`-ranks read off as the number
/// of Frobenius cycles on the eigenvalue slots: the conjugates of a field
/// generator for `T`, the diagonal coordinates for the split `G`.
pub fn sign_rank(g: &GLnq) -> i32 {
    let gen = g.field.generator();
    let conj: Vec<u64> = (0..g.n).map(|i| g.field.pow(gen, g.q.pow(i as u32) as i64)).collect();
    let perm: Vec<usize> = conj.iter().map(|&c| conj.iter().position(|&d| d == g.field.frob(c)).unwrap()).collect();
    let rank_t = cycle_count(&perm);
    let identity: Vec<usize> = (0..g.n).collect();
    let rank_g = cycle_count(&identity);
    if (rank_t + rank_g).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `R_{T,θ}(s) = ε_T ε_G·carter_sum/|T|` when the group is enumerated,
/// otherwise `ε_T ε_G·Σ θ(s^{q^i})` (the normalizer reduction).
pub fn dl_value(g: &GLnq, s: u64, theta: &FqMultChar) -> Result<CycInt> {
    check_inputs(g, s, theta)?;
    let sign = sign_rank(g);
    if sign != sign_stated(g.n) {
        return Err(Error::Verification("DL sign routes disagree"));
    }
    let base = if g.is_enumerated() {
        let c = carter_sum(g, s, theta)?;
        let t = g.torus_order() as i64;
        if !c.divisible_by(t) {
            return Err(Error::Verification("Carter sum not divisible by |T|"));
        }
        c.div_exact(t)
    } else {
        orbit_sum(g, s, theta)?
    };
    Ok(base.scale(sign as i64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizerReport {
    pub full_sum: CycInt,
    pub normalizer_sum: CycInt,
    pub torus_times_orbit: CycInt,
    pub weyl_order: u64,
    pub holds: bool,
}

/// The full-group Carter sum, the sum over `N_G(T)` found by enumeration,
/// and `|T|·Σ_{N/T} θ(ʷs)`, with `|N/T|`.
pub fn normalizer_identity(g: &GLnq, s: u64, theta: &FqMultChar) -> Result<NormalizerReport> {
    check_inputs(g, s, theta)?;
    let full = carter_sum(g, s, theta)?;
    let gen = g.torus_matrix(g.field.generator());
    let sm = g.torus_matrix(s);
    let mut n_terms = Vec::new();
    let mut n_order = 0u64;
    for (x, xi) in g.elements()? {
        if g.torus_element(&g.mul(&g.mul(xi, &gen), x)).is_none() {
            continue;
        }
        n_order += 1;
        let t = g.torus_element(&g.mul(&g.mul(xi, &sm), x)).ok_or(Error::Verification("normalizer"))?;
        n_terms.push((theta.eval(&g.field, t)?, 1));
    }
    let normalizer_sum = CycInt::from_roots(n_terms)?;
    let t = g.torus_order();
    let torus_times_orbit = orbit_sum(g, s, theta)?.scale(t as i64);
    let weyl_order = n_order / t;
    let holds = full == normalizer_sum && full == torus_times_orbit && weyl_order == g.n as u64;
    Ok(NormalizerReport { full_sum: full, normalizer_sum, torus_times_orbit, weyl_order, holds })
}

/// Writes `w = z·a` with `z = p^k ∈ F*` and `a` a unit, for unramified `E`;
/// returns `(z, a, residue of a)`.
fn split_central(ext: &TameExtension, w: &ExtElement) -> Result<(ExtElement, u64)> {
    let v = ext.val(w);
    let z = ext.uniformizer_pow(v)?;
    let a = ext.div(w, &z)?;
    Ok((z, ext.residue(&a)?))
}

/// Compares the exact part of the depth-zero formula with
/// `(χΔ_χ)(z)·R_{T,θ}(s)` at every `n(w) = 0` class `w = z·a` modulo
/// `F*U_E^{cutoff}`, with `s` the residue of `a` and `θ` the residue
/// character of `χ`.
pub fn depth_zero_crosscheck(g: &GenuineCharacter, grp: &GLnq, cutoff: u32) -> Result<SuiteReport> {
    let ext = &g.model.ext;
    if ext.kind().is_ramified() {
        return Err(Error::InvalidExtension("depth-zero comparison needs an unramified torus"));
    }
    if g.chi.level(ext) != 0 {
        return Err(Error::Precondition("depth-zero comparison needs a level-0 character"));
    }
    let rf = ext.residue_field();
    if rf.size() != grp.field.size() || rf.modulus() != grp.field.modulus() || rf.generator() != grp.field.generator() {
        return Err(Error::Precondition("finite group does not match the residue field"));
    }
    let theta = residue_character(ext, &g.chi)?;
    let dchi = g.model.delta_chi.clone().unwrap_or_else(|| {
        if ext.degree() == 2 {
            MultCharacter::new(RootOfUnity::MINUS_ONE, 0, None)
        } else {
            MultCharacter::trivial()
        }
    });
    let q = ext.config().p;
    let mut rep = SuiteReport::new("depth-zero");
    for w in depth_zero_classes(ext, cutoff)? {
        let f = eval_formula(g, &w, PositiveSystem::STANDARD)?;
        let (z, s) = split_central(ext, &w)?;
        let c = g.chi.eval(ext, &z)? * dchi.eval(ext, &z)?;
        let dl = dl_value(grp, s, &theta)?;
        let want = ExactValue::new(q, 0, dl.mul_root(c)?);
        let pass = f.exact == want;
        rep.records.push(crate::formula::CheckRecord {
            id: alloc::format!("depth-zero/{w}"),
            input: alloc::format!("w={w}, s={s}, k={}", theta.k),
            lhs: alloc::format!("{}", f.exact),
            rhs: alloc::format!("{want}"),
            pass,
        });
    }
    Ok(rep)
}

/// `θ` with `χ|_{U_E} = θ∘(reduction)` for a level-0 character.
pub fn residue_character(ext: &TameExtension, chi: &MultCharacter) -> Result<FqMultChar> {
    if chi.level(ext) != 0 {
        return Err(Error::Precondition("residue character of a positive-level character"));
    }
    let rf = ext.residue_field();
    let omega = ext.teichmuller(rf.generator())?;
    let k = chi.eval(ext, &omega)?.exponent_in(rf.size() - 1).ok_or(Error::Verification("tame value order"))?;
    Ok(FqMultChar { k })
}

/// Regular level-0 pair check through the residue character.
pub fn residue_regular(pair: &CharPair) -> Result<bool> {
    Ok(residue_character(&pair.ext, &pair.chi)?.is_regular(pair.ext.residue_field()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        for (n, q) in [(2, 3), (2, 5), (3, 2)] {
            let g = GLnq::new(n, q).unwrap();
            assert_eq!(g.order().unwrap(), g.order_formula());
        }
    }

    #[test]
    fn torus_embedding_is_a_homomorphism() {
        let g = GLnq::new(2, 3).unwrap();
        let f = g.field().clone();
        for a in 1..9 {
            for b in 1..9 {
                assert_eq!(g.mul(&g.torus_matrix(a), &g.torus_matrix(b)), g.torus_matrix(f.mul(a, b)));
            }
        }
        let fr = g.frobenius_matrix();
        let fri = g.inv(&fr).unwrap();
        for a in 1..9 {
            let c = g.mul(&g.mul(&fr, &g.torus_matrix(a)), &fri);
            assert_eq!(c, g.torus_matrix(f.frob(a)));
        }
    }

    #[test]
    fn carter_sum_gl2_3() {
        let g = GLnq::new(2, 3).unwrap();
        let s = g.field().generator();
        let theta = FqMultChar { k: 1 };
        let c = carter_sum(&g, s, &theta).unwrap();
        assert_eq!(c, orbit_sum(&g, s, &theta).unwrap().scale(8));
        let triv = carter_sum(&g, s, &FqMultChar { k: 0 }).unwrap();
        assert_eq!(triv, CycInt::from_int(16));
        assert!(carter_sum(&g, 1, &theta).is_err());
        let r = dl_value(&g, s, &theta).unwrap();
        let want = CycInt::from_roots([(RootOfUnity::new(1, 8), -1), (RootOfUnity::new(3, 8), -1)]).unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn signs_agree() {
        for (n, q) in [(2, 3), (3, 2), (3, 3)] {
            let g = GLnq::new(n, q).unwrap();
            assert_eq!(sign_rank(&g), sign_stated(n));
        }
    }
}
