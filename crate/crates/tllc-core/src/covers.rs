//! Double covers of elliptic tori: the `τ∘ρ` cover, its concrete models,
//! the maps `κ` between them, the Weyl action and genuine characters.
//!
//! Conjugates of `w` are ordered as `w, σw, …, σ^{ℓ−1}w` for the stored
//! Galois generator `σ`; `2ρ(w) = ∏ (σ^i w)^{ℓ−1−2i}`. For odd `ℓ` the
//! character `τ₀` of `(EL)*` is carried by its restriction to `E*`, which
//! is all that evaluations on torus elements see; that restriction agrees
//! with `ℵ_{E/F}^{−1}` on `F*` because `ℵ_{EL/L}|_{F*} = ℵ_{E/F}∘N_{L/F}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::legendre;
use crate::characters::{classify_pair, dlog_mod_p, CharPair, MultCharacter, QuadraticCharacter};
use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::ext::{ExtElement, ExtKind, TameExtension};
use crate::padic::PadicNumber;
use crate::symbols::{cft_character, hilbert};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    Pgl2,
    Gl2,
    PglLDeltaNontrivial,
    GlLDeltaNontrivial,
    PglLSplit,
    GlLSplit,
}

impl CaseTag {
    pub const ALL: [CaseTag; 6] = [
        CaseTag::Pgl2,
        CaseTag::Gl2,
        CaseTag::PglLDeltaNontrivial,
        CaseTag::GlLDeltaNontrivial,
        CaseTag::PglLSplit,
        CaseTag::GlLSplit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::Pgl2 => "PGL2",
            CaseTag::Gl2 => "GL2",
            CaseTag::PglLDeltaNontrivial => "PGLl_delta!=1",
            CaseTag::GlLDeltaNontrivial => "GLl_delta!=1",
            CaseTag::PglLSplit => "PGLl_split",
            CaseTag::GlLSplit => "GLl_split",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s))
    }

    /// Torus `E*/F*` rather than `E*`.
    pub fn is_projective(&self) -> bool {
        matches!(self, CaseTag::Pgl2 | CaseTag::PglLDeltaNontrivial | CaseTag::PglLSplit)
    }

    pub fn is_rank_two(&self) -> bool {
        matches!(self, CaseTag::Pgl2 | CaseTag::Gl2)
    }

    pub fn is_split(&self) -> bool {
        matches!(self, CaseTag::PglLSplit | CaseTag::GlLSplit)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `τ = τ₀·|·|`, with `τ₀` stored as a character of `E*`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauCharacter {
    pub tau0: MultCharacter,
}

fn root_of_sign_sqrt(s: i32) -> RootOfUnity {
    if s == 1 {
        RootOfUnity::ONE
    } else {
        RootOfUnity::new(1, 4)
    }
}

impl TauCharacter {
    /// Two distinct admissible choices of `τ₀`.
    pub fn choices(ext: &TameExtension) -> Result<Vec<TauCharacter>> {
        let cfg = ext.config();
        let p = cfg.p;
        let l = ext.degree() as u64;
        let mk = |u, t, a| TauCharacter { tau0: MultCharacter::new(u, t, a) };
        let out = match ext.kind() {
            ExtKind::UnramQuad => {
                let a = ext.scale(&ext.gen(), &PadicNumber::from_int(cfg, 1).shift(-1));
                vec![mk(RootOfUnity::MINUS_ONE, 0, None), mk(RootOfUnity::MINUS_ONE, p - 1, Some(a))]
            }
            ExtKind::RamQuad => {
                let delta = ext.delta().unwrap();
                let s = root_of_sign_sqrt(hilbert(&PadicNumber::from_int(cfg, -1), &delta));
                let a = ext.scale(&ext.gen(), &delta.inv()?);
                vec![
                    mk(s, (p - 1) / 2, None),
                    mk(s * RootOfUnity::MINUS_ONE, (p - 1) / 2, Some(a)),
                ]
            }
            ExtKind::UnramL => vec![
                mk(RootOfUnity::new(-1, l), 0, None),
                mk(RootOfUnity::new(-1, l), p - 1, None),
            ],
            ExtKind::RamGaloisL => {
                // τ₀(ω) = ℵ(ω)^{-1} on μ_F, in the residue field's own logs
                let c = dlog_mod_p(p, ext.residue_field().generator());
                let t = ((p - 1) - (c * (p - 1) / l) % (p - 1)) % (p - 1);
                vec![mk(RootOfUnity::ONE, t, None), mk(RootOfUnity::new(1, l), t, None)]
            }
        };
        for t in &out {
            if !t.verify(ext)? {
                return Err(Error::Verification("tau0 restriction to F*"));
            }
        }
        Ok(out)
    }

    /// `τ₀|_{F*} = ℵ_{E/F}` (`ℓ = 2`) or `ℵ_{E/F}^{−1}` (odd `ℓ`) on
    /// `p`, a primitive root and `1 + p`.
    pub fn verify(&self, ext: &TameExtension) -> Result<bool> {
        let cfg = ext.config();
        let p = cfg.p;
        let g = crate::arith::primitive_root(p);
        for x in [p as i64, g as i64, 1 + p as i64] {
            let xf = PadicNumber::from_int(cfg, x);
            let mut want = cft_character(ext, &xf)?;
            if !ext.kind().is_quadratic() {
                want = want.inv();
            }
            if self.tau0.eval(ext, &ext.from_padic(&xf))? != want {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn eval0(&self, ext: &TameExtension, w: &ExtElement) -> Result<RootOfUnity> {
        self.tau0.eval(ext, w)
    }

    /// `τ₀(w)·|w|` for the absolute value extending `|·|_F`, so
    /// `|w| = |N w|_F^{1/[E:F]}`; the `q` of the value is `p`. Fails when
    /// `|w|` is not a half-integral power of `p`.
    pub fn eval(&self, ext: &TameExtension, w: &ExtElement) -> Result<ExactValue> {
        let e = ext.ramification() as i64;
        let v = 2 * ext.val(w);
        if v % e != 0 {
            return Err(Error::Precondition("|w| is not a half-integral power of p"));
        }
        ExactValue::from_root(ext.config().p, -v / e, self.eval0(ext, w)?)
    }
}

/// `∏ (σ^i w)^{c_i}` for integer exponents `c_i`.
pub fn conj_product(ext: &TameExtension, w: &ExtElement, exps: &[i64]) -> Result<ExtElement> {
    let mut acc = ext.one();
    for (i, &c) in exps.iter().enumerate() {
        if c != 0 {
            let wi = ext.galois_apply(i as i64, w)?;
            acc = ext.mul(&acc, &ext.pow(&wi, c)?);
        }
    }
    Ok(acc)
}

/// Exponents of `2ρ` on the ordered conjugates: `ℓ−1−2i`.
pub fn two_rho_exponents(l: usize) -> Vec<i64> {
    (0..l).map(|i| l as i64 - 1 - 2 * i as i64).collect()
}

/// `2ρ(w)` as an element of `E`.
pub fn two_rho(ext: &TameExtension, w: &ExtElement) -> Result<ExtElement> {
    conj_product(ext, w, &two_rho_exponents(ext.degree()))
}

/// `ρ(w)` for odd `ℓ` (integral exponents `(ℓ−1)/2 − i`).
pub fn rho(ext: &TameExtension, w: &ExtElement) -> Result<ExtElement> {
    let l = ext.degree();
    if l.is_multiple_of(2) {
        return Err(Error::Precondition("rho(w) lies in E only for odd degree"));
    }
    let exps: Vec<i64> = two_rho_exponents(l).iter().map(|c| c / 2).collect();
    conj_product(ext, w, &exps)
}

/// `(s^{−1}ρ − ρ)(w)` for `s = σ^i`, as an element of `E`.
pub fn weyl_rho_ratio(ext: &TameExtension, i: i64, w: &ExtElement) -> Result<ExtElement> {
    let l = ext.degree();
    let c = two_rho_exponents(l);
    let mut halves = vec![0i64; l];
    for j in 0..l {
        halves[(j as i64 + i).rem_euclid(l as i64) as usize] += c[j];
        halves[j] -= c[j];
    }
    if halves.iter().any(|h| h % 2 != 0) {
        return Err(Error::Verification("Weyl ratio exponents not integral"));
    }
    let exps: Vec<i64> = halves.iter().map(|h| h / 2).collect();
    conj_product(ext, w, &exps)
}

/// A point of the `τ∘ρ` cover: a torus element and `λ` with `λ² = τ(2ρ(base))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverElement {
    pub tag: CaseTag,
    pub base: ExtElement,
    pub lambda: ExactValue,
}

/// A point of a concrete model.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelElement {
    /// `[w]` in `E*/ker(q)` for the model's quadratic character `q`.
    Quotient { w: ExtElement },
    /// `(w, [z])` with `[z] ∈ E*/ker(q)` and `z/w ∈ F*`.
    Pair { w: ExtElement, z: ExtElement },
    /// `(z, ε)` in the split model.
    Signed { z: ExtElement, eps: i32 },
}

impl ModelElement {
    pub fn base(&self) -> &ExtElement {
        match self {
            ModelElement::Quotient { w } | ModelElement::Pair { w, .. } => w,
            ModelElement::Signed { z, .. } => z,
        }
    }
}

/// A concrete model of the cover for one case tag.
#[derive(Clone, Debug)]
pub struct CoverModel {
    pub tag: CaseTag,
    pub ext: TameExtension,
    pub tau: TauCharacter,
    /// Quadratic character of `F*` cutting out the model (`ℵ_{E/F}` or `δ_{E/F}`).
    pub quad: Option<QuadraticCharacter>,
    /// `Δ_χ` for the odd-degree nonsplit tags.
    pub delta_chi: Option<MultCharacter>,
    /// An element of `F*` outside `ker(quad)`.
    pub x0: Option<PadicNumber>,
}

fn nonsquare_unit(p: u64) -> u64 {
    (2..p).find(|&a| legendre(a as i64, p) == -1).unwrap()
}

impl CoverModel {
    /// The model for `tag`. Odd-degree nonsplit tags need a nontrivial
    /// quadratic `δ`; when `delta` is `None` the computed `δ_{E/F}` is used
    /// and must be nontrivial.
    pub fn new(tag: CaseTag, ext: TameExtension, tau: TauCharacter, delta: Option<QuadraticCharacter>) -> Result<Self> {
        let cfg = *ext.config();
        let quadratic = ext.kind().is_quadratic();
        if tag.is_rank_two() != quadratic {
            return Err(Error::Precondition("case tag does not match the extension degree"));
        }
        let (quad, delta_chi) = match tag {
            CaseTag::Pgl2 | CaseTag::Gl2 => (Some(QuadraticCharacter { disc: ext.delta().unwrap() }), None),
            CaseTag::PglLDeltaNontrivial | CaseTag::GlLDeltaNontrivial => {
                let d = match delta {
                    Some(d) => d,
                    None => crate::characters::delta_ef(&ext)?,
                };
                if d.is_trivial(&cfg) {
                    return Err(Error::Precondition("delta_{E/F} is trivial for this extension"));
                }
                // Δ_χ is the unramified quadratic character of E; its restriction must be δ
                let dchi = MultCharacter::new(RootOfUnity::MINUS_ONE, 0, None);
                for x in [cfg.p as i64, nonsquare_unit(cfg.p) as i64] {
                    let xf = PadicNumber::from_int(&cfg, x);
                    if dchi.eval(&ext, &ext.from_padic(&xf))? != RootOfUnity::from_sign(d.eval(&xf)) {
                        return Err(Error::Precondition("delta is not the restriction of the unramified quadratic character"));
                    }
                }
                (Some(d), Some(dchi))
            }
            CaseTag::PglLSplit | CaseTag::GlLSplit => (None, None),
        };
        let x0 = match &quad {
            Some(q) => {
                let cands = [cfg.p as i64, nonsquare_unit(cfg.p) as i64, (cfg.p * nonsquare_unit(cfg.p)) as i64];
                let found = cands.iter().map(|&x| PadicNumber::from_int(&cfg, x)).find(|x| q.eval(x) == -1);
                Some(found.ok_or(Error::Verification("no element outside the kernel"))?)
            }
            None => None,
        };
        Ok(CoverModel { tag, ext, tau, quad, delta_chi, x0 })
    }

    fn q(&self) -> u64 {
        self.ext.config().p
    }

    /// `τ(2ρ(w))`, evaluated on the element `2ρ(w)`.
    pub fn tau_two_rho(&self, w: &ExtElement) -> Result<ExactValue> {
        self.tau.eval(&self.ext, &two_rho(&self.ext, w)?)
    }

    /// `ρ_τ(w) = τ(ρ(w))` (odd `ℓ`).
    pub fn rho_tau(&self, w: &ExtElement) -> Result<ExactValue> {
        self.tau.eval(&self.ext, &rho(&self.ext, w)?)
    }

    fn quad_sign(&self, x: &PadicNumber) -> Result<i32> {
        Ok(self.quad.as_ref().ok_or(Error::Precondition("model has no quadratic character"))?.eval(x))
    }

    /// `z/w ∈ F*`.
    fn ratio_in_base(&self, z: &ExtElement, w: &ExtElement) -> Result<PadicNumber> {
        let r = self.ext.div(z, w)?;
        self.ext.to_base(&r).ok_or(Error::Precondition("[w] != [z] in E*/F*"))
    }

    pub fn kappa(&self, m: &ModelElement) -> Result<CoverElement> {
        let ext = &self.ext;
        let p = self.q();
        let (base, lambda) = match (self.tag, m) {
            (CaseTag::Pgl2, ModelElement::Quotient { w }) => {
                let t = self.tau.eval0(ext, w)?;
                let abs = self.tau.eval(ext, &two_rho(ext, w)?)?.half_exp();
                (w.clone(), ExactValue::from_root(p, abs / 2, t)?)
            }
            (CaseTag::Gl2, ModelElement::Pair { w, z }) => {
                let s = self.quad_sign(&self.ratio_in_base(z, w)?)?;
                let t = self.tau.eval0(ext, w)? * RootOfUnity::from_sign(s);
                let abs = self.tau.eval(ext, &two_rho(ext, w)?)?.half_exp();
                (w.clone(), ExactValue::from_root(p, abs / 2, t)?)
            }
            (CaseTag::PglLDeltaNontrivial, ModelElement::Quotient { w }) => {
                let d = self.delta_chi.as_ref().unwrap().eval(ext, w)?;
                (w.clone(), self.rho_tau(w)?.mul_root(d)?)
            }
            (CaseTag::GlLDeltaNontrivial, ModelElement::Pair { w, z }) => {
                self.ratio_in_base(z, w)?;
                let d = self.delta_chi.as_ref().unwrap().eval(ext, z)?;
                (w.clone(), self.rho_tau(w)?.mul_root(d)?)
            }
            (CaseTag::PglLSplit | CaseTag::GlLSplit, ModelElement::Signed { z, eps }) => {
                (z.clone(), self.rho_tau(z)?.mul_root(RootOfUnity::from_sign(*eps))?)
            }
            _ => return Err(Error::Precondition("model element does not belong to this case")),
        };
        Ok(CoverElement { tag: self.tag, base, lambda })
    }

    /// The two model elements over a torus point (the trivial one first).
    pub fn fiber(&self, w: &ExtElement) -> Result<[ModelElement; 2]> {
        let ext = &self.ext;
        Ok(match self.tag {
            CaseTag::Pgl2 | CaseTag::PglLDeltaNontrivial => {
                let x0 = ext.from_padic(self.x0.as_ref().unwrap());
                [ModelElement::Quotient { w: w.clone() }, ModelElement::Quotient { w: ext.mul(&x0, w) }]
            }
            CaseTag::Gl2 | CaseTag::GlLDeltaNontrivial => {
                let x0 = ext.from_padic(self.x0.as_ref().unwrap());
                [
                    ModelElement::Pair { w: w.clone(), z: w.clone() },
                    ModelElement::Pair { w: w.clone(), z: ext.mul(&x0, w) },
                ]
            }
            CaseTag::PglLSplit | CaseTag::GlLSplit => {
                [ModelElement::Signed { z: w.clone(), eps: 1 }, ModelElement::Signed { z: w.clone(), eps: -1 }]
            }
        })
    }

    /// Inverse of `κ`: the model element over `c.base` whose image has `c.lambda`.
    pub fn kappa_inv(&self, c: &CoverElement) -> Result<ModelElement> {
        if c.tag != self.tag {
            return Err(Error::Precondition("cover element from another case"));
        }
        let [a, b] = self.fiber(&c.base)?;
        let la = self.kappa(&a)?.lambda;
        if la == c.lambda {
            Ok(a)
        } else if la.neg() == c.lambda {
            Ok(b)
        } else {
            Err(Error::Precondition("lambda does not lie over the base"))
        }
    }

    /// `λ² = τ(2ρ(base))`.
    pub fn check_lambda_squared(&self, c: &CoverElement) -> Result<bool> {
        Ok(c.lambda.mul(&c.lambda)? == self.tau_two_rho(&c.base)?)
    }

    /// `σ^i·(w, λ) = (σ^i w, λ·τ((s^{−1}ρ − ρ)(w)))`.
    pub fn weyl_act(&self, i: i64, c: &CoverElement) -> Result<CoverElement> {
        let ext = &self.ext;
        if !ext.is_galois() && i.rem_euclid(ext.degree() as i64) != 0 {
            return Err(Error::NotGalois);
        }
        let factor = self.tau.eval(ext, &weyl_rho_ratio(ext, i, &c.base)?)?;
        Ok(CoverElement { tag: c.tag, base: ext.galois_apply(i, &c.base)?, lambda: c.lambda.mul(&factor)? })
    }

    /// The Weyl action on the model as the text simplifies it:
    /// `[w] ↦ [σw]`, `(w,[z]) ↦ (σw,[σz])`, `(z, ε) ↦ (σz, ε)`.
    pub fn weyl_act_model(&self, i: i64, m: &ModelElement) -> Result<ModelElement> {
        let ext = &self.ext;
        Ok(match m {
            ModelElement::Quotient { w } => ModelElement::Quotient { w: ext.galois_apply(i, w)? },
            ModelElement::Pair { w, z } => {
                ModelElement::Pair { w: ext.galois_apply(i, w)?, z: ext.galois_apply(i, z)? }
            }
            ModelElement::Signed { z, eps } => ModelElement::Signed { z: ext.galois_apply(i, z)?, eps: *eps },
        })
    }

    /// `[m] = [m']` in the model (bases compared modulo `F*` for projective tags).
    pub fn model_eq(&self, a: &ModelElement, b: &ModelElement) -> Result<bool> {
        let ext = &self.ext;
        let same_class = |x: &ExtElement, y: &ExtElement| -> Result<Option<PadicNumber>> {
            Ok(ext.to_base(&ext.div(x, y)?))
        };
        Ok(match (a, b) {
            (ModelElement::Quotient { w: x }, ModelElement::Quotient { w: y }) => match same_class(x, y)? {
                Some(r) => self.quad_sign(&r)? == 1,
                None => false,
            },
            (ModelElement::Pair { w: w1, z: z1 }, ModelElement::Pair { w: w2, z: z2 }) => {
                w1 == w2
                    && match same_class(z1, z2)? {
                        Some(r) => self.quad_sign(&r)? == 1,
                        None => false,
                    }
            }
            (ModelElement::Signed { z: z1, eps: e1 }, ModelElement::Signed { z: z2, eps: e2 }) => {
                e1 == e2
                    && if self.tag.is_projective() {
                        same_class(z1, z2)?.is_some()
                    } else {
                        z1 == z2
                    }
            }
            _ => false,
        })
    }
}

/// A genuine character of a cover model, built from a character of `E*`.
#[derive(Clone, Debug)]
pub struct GenuineCharacter {
    pub model: CoverModel,
    pub chi: MultCharacter,
}

/// `χ̃` for the pair's character on the given model: `χ(w)·q(z/w)` on pair
/// models, `χ(w)` on quotient models (which needs `χ|_{F*} = q`), and
/// `χ ⊗ sgn` on split models.
pub fn genuine_from_pair(pair: &CharPair, model: &CoverModel) -> Result<GenuineCharacter> {
    if !pair.flags.regular {
        return Err(Error::NotRegular);
    }
    let ext = &model.ext;
    let cfg = ext.config();
    match model.tag {
        CaseTag::PglLSplit | CaseTag::GlLSplit
            if !crate::characters::delta_ef(ext)?.is_trivial(cfg) => {
                return Err(Error::Precondition("split case needs a trivial delta_{E/F}"));
            }
        _ => {}
    }
    if model.tag.is_projective() {
        let g = crate::arith::primitive_root(cfg.p);
        for x in [cfg.p as i64, g as i64, 1 + cfg.p as i64] {
            let xf = PadicNumber::from_int(cfg, x);
            let want = match &model.quad {
                Some(q) => RootOfUnity::from_sign(q.eval(&xf)),
                None => RootOfUnity::ONE,
            };
            if pair.chi.eval(ext, &ext.from_padic(&xf))? != want {
                return Err(Error::Precondition("chi does not descend to the projective model"));
            }
        }
    }
    Ok(GenuineCharacter { model: model.clone(), chi: pair.chi.clone() })
}

impl GenuineCharacter {
    pub fn eval_model(&self, m: &ModelElement) -> Result<RootOfUnity> {
        let ext = &self.model.ext;
        Ok(match m {
            ModelElement::Quotient { w } => self.chi.eval(ext, w)?,
            ModelElement::Pair { w, z } => {
                let r = ext.to_base(&ext.div(z, w)?).ok_or(Error::Precondition("[w] != [z]"))?;
                self.chi.eval(ext, w)? * RootOfUnity::from_sign(self.model.quad_sign(&r)?)
            }
            ModelElement::Signed { z, eps } => self.chi.eval(ext, z)? * RootOfUnity::from_sign(*eps),
        })
    }

    /// `χ̃∘κ^{−1}` on a cover element.
    pub fn eval_cover(&self, c: &CoverElement) -> Result<RootOfUnity> {
        self.eval_model(&self.model.kappa_inv(c)?)
    }

    /// Recovers `χ(w) = χ̃(w,[z])·q(z/w)` (or `χ̃(z, 1)` on split models).
    pub fn recover(&self, w: &ExtElement) -> Result<RootOfUnity> {
        let [a, b] = self.model.fiber(w)?;
        let ext = &self.model.ext;
        Ok(match (&a, &b) {
            (_, ModelElement::Pair { z, .. }) => {
                let r = ext.to_base(&ext.div(z, w)?).unwrap();
                self.eval_model(&b)? * RootOfUnity::from_sign(self.model.quad_sign(&r)?)
            }
            _ => self.eval_model(&a)?,
        })
    }
}

/// Delegates to the pair classification of the underlying character.
pub fn is_regular_genuine(g: &GenuineCharacter) -> Result<bool> {
    Ok(classify_pair(&g.model.ext, &g.chi)?.regular)
}

/// Outcome of the splitting search for `E*/N(E*) → E*/F*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub splits: bool,
    pub hilbert_minus1_delta: i32,
}

/// The extension `1 → F*/N → E*/N → E*/F* → 1` splits iff some quadratic
/// character of `E*` restricts to `ℵ_{E/F}` on `F*`. Quadratic characters
/// are trivial on `U_E^1`, so they are determined by their values at `ϖ`
/// and at a generator of `μ_{q_E−1}`; all four are tried.
pub fn check_split(ext: &TameExtension) -> Result<SplitReport> {
    if !ext.kind().is_quadratic() {
        return Err(Error::InvalidExtension("check_split is for quadratic extensions"));
    }
    let cfg = ext.config();
    let qe = ext.residue_card();
    let g = crate::arith::primitive_root(cfg.p);
    let mut splits = false;
    for pv in [RootOfUnity::ONE, RootOfUnity::MINUS_ONE] {
        for t in [0, (qe - 1) / 2] {
            let mu = MultCharacter::new(pv, t, None);
            let mut ok = true;
            for x in [cfg.p as i64, g as i64, 1 + cfg.p as i64] {
                let xf = PadicNumber::from_int(cfg, x);
                if mu.eval(ext, &ext.from_padic(&xf))? != cft_character(ext, &xf)? {
                    ok = false;
                    break;
                }
            }
            splits |= ok;
        }
    }
    let m1 = PadicNumber::from_int(cfg, -1);
    Ok(SplitReport { splits, hilbert_minus1_delta: hilbert(&m1, &ext.delta().unwrap()) })
}

/// Representatives of `E*/(F*·U_E^c)`: `ϖ^a·ω·∏_j (1 + b_j ϖ^j)` with
/// `0 ≤ a < e`, `ω` over `μ_E/μ_F`, and `b_j` over a complement of the
/// residue field of `F` (only at `j ≡ 0 mod e`; for other `j` all of `F_p`).
pub fn torus_classes(ext: &TameExtension, c: u32) -> Result<Vec<ExtElement>> {
    let p = ext.config().p;
    let e = ext.ramification() as u32;
    let f = ext.residue_degree();
    let rf = ext.residue_field();
    let qe = rf.size();
    let mut units: Vec<ExtElement> = Vec::new();
    for k in 0..(qe - 1) / (p - 1) {
        units.push(ext.teichmuller(rf.gen_pow(k as i64))?);
    }
    for j in 1..c {
        let pj = ext.uniformizer_pow(j as i64)?;
        // residues with zero F_p-coordinate when F's filtration jumps here
        let step: Vec<u64> = if j % e == 0 {
            (0..qe).filter(|r| r % p == 0).collect()
        } else {
            (0..qe).collect()
        };
        let step: Vec<u64> = if f == 1 && j % e == 0 { vec![0] } else { step };
        let mut next = Vec::with_capacity(units.len() * step.len());
        for u in &units {
            for &r in &step {
                if r == 0 {
                    next.push(u.clone());
                } else {
                    let t = ext.add(&ext.one(), &ext.mul(&ext.lift_residue(r), &pj));
                    next.push(ext.mul(u, &t));
                }
            }
        }
        units = next;
    }
    let mut out = Vec::new();
    for a in 0..e {
        let pa = ext.uniformizer_pow(a as i64)?;
        for u in &units {
            out.push(ext.mul(&pa, u));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeConfig;

    fn ext(p: u64, kind: ExtKind) -> TameExtension {
        let ell = if kind.is_quadratic() { 2 } else { 3 };
        TameExtension::build(PrimeConfig::relaxed(p, 12, ell).unwrap(), kind, None).unwrap()
    }

    #[test]
    fn tau_choices_restrict_correctly() {
        for kind in ExtKind::ALL {
            let e = ext(7, kind);
            assert_eq!(TauCharacter::choices(&e).unwrap().len(), 2);
        }
        assert_eq!(TauCharacter::choices(&ext(3, ExtKind::RamQuad)).unwrap().len(), 2);
    }

    #[test]
    fn pgl2_non_norm_maps_to_minus_one() {
        let e = ext(3, ExtKind::RamQuad);
        let tau = TauCharacter::choices(&e).unwrap().remove(0);
        let m = CoverModel::new(CaseTag::Pgl2, e.clone(), tau, None).unwrap();
        // 2 is not a norm from Q_3(√3)
        let x = e.from_int(2);
        let c = m.kappa(&ModelElement::Quotient { w: x }).unwrap();
        assert_eq!(c.lambda, ExactValue::from_root(3, 0, RootOfUnity::MINUS_ONE).unwrap());
        let id = m.kappa(&ModelElement::Quotient { w: e.one() }).unwrap();
        assert_eq!(id.lambda, ExactValue::one(3));
    }

    #[test]
    fn split_search_matches_hilbert_symbol() {
        for (p, kind, split) in [(3, ExtKind::RamQuad, false), (5, ExtKind::RamQuad, true), (3, ExtKind::UnramQuad, true)] {
            let r = check_split(&ext(p, kind)).unwrap();
            assert_eq!(r.splits, split);
            assert_eq!(r.splits, r.hilbert_minus1_delta == 1);
        }
    }

    #[test]
    fn torus_class_counts() {
        assert_eq!(torus_classes(&ext(3, ExtKind::UnramQuad), 3).unwrap().len(), 36);
        assert_eq!(torus_classes(&ext(5, ExtKind::RamQuad), 3).unwrap().len(), 10);
        assert_eq!(torus_classes(&ext(7, ExtKind::RamGaloisL), 3).unwrap().len(), 147);
    }

    #[test]
    fn torus_classes_are_distinct() {
        let e = ext(3, ExtKind::UnramQuad);
        let cl = torus_classes(&e, 3).unwrap();
        for i in 0..cl.len() {
            for j in 0..i {
                let r = e.div(&cl[i], &cl[j]).unwrap();
                assert!(!matches!(e.unit_level(&r).unwrap(), crate::ext::UnitLevel::Level(k) if k >= 3));
            }
        }
    }
}
