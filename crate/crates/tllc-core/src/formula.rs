//! The character formula on elliptic tori: the depth `n(w)`, Weyl
//! denominators, the constant `ε` (exact part plus symbolic positive
//! factors), the Q-form γ-factor, and the finite-level identity and
//! separation checks.
//!
//! Depths are kept as `k/e` with `k` the level of `w` in `F*·U_E^k`, and the
//! depth of a character of level `n` is `r = n/e`, so the window
//! `n(w) ≤ r/2` reads `2k ≤ n`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::characters::{delta_twist, l_exponent, quad_coords, CharPair, MultCharacter};
use crate::covers::{torus_classes, CoverModel, GenuineCharacter, TauCharacter};
use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::ext::{ExtElement, ExtKind, TameExtension, UnitLevel};
use crate::padic::PadicNumber;
use crate::symbols::{cft_character, hilbert, weil_gamma, weil_gamma_closed, AdditiveCharacter, QuadForm};

/// `n(w) = num/den` with `den = e(E/F)` (not reduced).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Depth {
    pub num: u32,
    pub den: u32,
}

impl Depth {
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `n(w) ≤ r/2` for a character of level `level` on the same extension.
    pub fn within_half_depth(&self, level: u32) -> bool {
        2 * self.num <= level
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else if self.num.is_multiple_of(self.den) {
            write!(f, "{}", self.num / self.den)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DepthClass {
    pub depth: Depth,
    /// `w = z·u` with `z ∈ F*` and `u` principal, when `n(w) > 0`.
    pub decomposition: Option<(PadicNumber, ExtElement)>,
}

/// Coefficient `c_i` of `w = Σ c_i x^i` as an element of `F`.
pub fn coefficient(ext: &TameExtension, w: &ExtElement, i: usize) -> Result<PadicNumber> {
    let cfg = ext.config();
    if w.is_zero() {
        return Ok(PadicNumber::zero(cfg));
    }
    let p = cfg.p;
    let m = p.pow(w.prec());
    let c = w.coeffs()[i] % m;
    if c == 0 {
        return Ok(PadicNumber::zero(cfg));
    }
    let v = crate::arith::val_p(c, p);
    PadicNumber::from_parts_prec(p, w.p_power() + v as i64, c / p.pow(v), w.prec() - v)
}

/// `n(w)` from the coordinates of `w` in the basis `1, x, …, x^{ℓ−1}`.
///
/// Unramified: the level is `min_{i≥1} v(c_i) − v(c_0)` when `c_0` has the
/// strictly smallest valuation, else 0. Ramified (`v_E(x) = 1`): when
/// `c_0` carries the smallest `v_E`, the level is
/// `min_{i≥1} (e(v(c_i) − v(c_0)) + i)`, else `w ∉ F*U_E` and `n(w) = 0`.
pub fn n_depth_closed(ext: &TameExtension, w: &ExtElement) -> Result<Depth> {
    if w.is_zero() || ext.is_in_base(w) {
        return Err(Error::NotRegular);
    }
    let e = ext.ramification() as i64;
    let c: Vec<PadicNumber> = (0..ext.degree()).map(|i| coefficient(ext, w, i)).collect::<Result<_>>()?;
    let depth = |k: i64| Depth { num: k as u32, den: e as u32 };
    if c[0].is_zero() {
        return Ok(depth(0));
    }
    let v0 = c[0].val();
    let rest = c.iter().enumerate().skip(1).filter(|(_, ci)| !ci.is_zero());
    let k = if e == 1 {
        let m = rest.map(|(_, ci)| ci.val()).min().expect("w not in F");
        (m - v0).max(0)
    } else {
        let m = rest.map(|(i, ci)| e * (ci.val() - v0) + i as i64).min().expect("w not in F");
        m.max(0)
    };
    Ok(depth(k))
}

/// `n(w)` by the membership search `w ∈ F*U_E^k \ F*U_E^{k+1}`, checked
/// against [`n_depth_closed`].
pub fn n_depth(ext: &TameExtension, w: &ExtElement) -> Result<DepthClass> {
    if w.is_zero() || ext.is_in_base(w) {
        return Err(Error::NotRegular);
    }
    let e = ext.ramification() as u32;
    let k = match ext.unit_level(w)? {
        UnitLevel::NotInFU => 0,
        UnitLevel::Level(k) => k,
    };
    let depth = Depth { num: k, den: e };
    if n_depth_closed(ext, w)? != depth {
        return Err(Error::Verification("n(w) closed form disagrees with membership"));
    }
    let decomposition = if k > 0 {
        let z = coefficient(ext, w, 0)?;
        let u = ext.div(w, &ext.from_padic(&z))?;
        Some((z, u))
    } else {
        None
    };
    Ok(DepthClass { depth, decomposition })
}

/// A positive system `sΔ⁺`, recorded by the length of `s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PositiveSystem {
    pub weyl_length: u32,
}

impl PositiveSystem {
    pub const STANDARD: PositiveSystem = PositiveSystem { weyl_length: 0 };
    pub const OPPOSITE: PositiveSystem = PositiveSystem { weyl_length: 1 };
}

/// `Σ_{k=1}^{(ℓ−1)/2} k` for odd `ℓ`.
pub fn half_sum(l: usize) -> u64 {
    let h = (l as u64 - 1) / 2;
    h * (h + 1) / 2
}

fn sign_element(ext: &TameExtension, odd: bool) -> ExtElement {
    ext.from_int(if odd { -1 } else { 1 })
}

/// `ε(s) = (−1, Δ)^{ℓ(s)(ℓ+1)}`.
pub fn epsilon_sign(weyl_length: u32, delta: Option<&PadicNumber>, l: usize) -> i32 {
    if (weyl_length as u64 * (l as u64 + 1)).is_multiple_of(2) {
        return 1;
    }
    let d = delta.expect("odd exponent only occurs for l = 2");
    let m1 = PadicNumber::from_parts_prec(d.p(), 0, d.p().pow(d.prec()) - 1, d.prec()).expect("prec >= 1");
    hilbert(&m1, d)
}

/// The unimodular `τ₀` part of the Weyl denominator and `|D(w)|^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylDenominator {
    /// `τ₀(±(w − w̄))` for `ℓ = 2`; `τ₀((−1)^{Σk ± ℓ(s)})` for odd `ℓ`.
    pub tau_part: RootOfUnity,
    pub abs_d_half: ExactValue,
}

/// `v_F(D(w))` with `D(w) = (w − w̄)²/N(w)` for `ℓ = 2`.
pub fn discriminant_valuation_direct(ext: &TameExtension, w: &ExtElement) -> Result<i64> {
    if ext.degree() != 2 {
        return Err(Error::Precondition("direct discriminant is for quadratic extensions"));
    }
    let d = ext.sub(w, &ext.conj(w));
    let d2 = ext.to_base(&ext.mul(&d, &d)).ok_or(Error::Verification("(w - conj w)^2 not in F"))?;
    Ok(d2.val() - ext.norm(w)?.val())
}

/// `v_F(D(w))` from the characteristic polynomial: `disc(w)/N(w)^{ℓ−1}`.
pub fn discriminant_valuation(ext: &TameExtension, w: &ExtElement) -> Result<i64> {
    let l = ext.degree() as i64;
    Ok(ext.discriminant(w)?.val() - (l - 1) * ext.norm(w)?.val())
}

pub fn weyl_denominator(
    ext: &TameExtension,
    tau: &TauCharacter,
    w: &ExtElement,
    ps: PositiveSystem,
) -> Result<WeylDenominator> {
    if w.is_zero() || ext.is_in_base(w) {
        return Err(Error::NotRegular);
    }
    let q = ext.config().p;
    let flip = ps.weyl_length % 2 == 1;
    let tau_part = if ext.degree() == 2 {
        let mut d = ext.sub(w, &ext.conj(w));
        if flip {
            d = ext.neg(&d);
        }
        tau.eval0(ext, &d)?
    } else {
        let odd = (half_sum(ext.degree()) + ps.weyl_length as u64) % 2 == 1;
        tau.eval0(ext, &sign_element(ext, odd))?
    };
    let vd = discriminant_valuation(ext, w)?;
    Ok(WeylDenominator { tau_part, abs_d_half: ExactValue::from_root(q, -vd, RootOfUnity::ONE)? })
}

/// `x ↦ x^{−1}` for `x = ζ·q^{h/2}`.
pub fn inv_monomial(x: &ExactValue) -> Result<ExactValue> {
    let r = x.cyc().as_root().ok_or(Error::Precondition("not a root of unity times a power of q"))?;
    ExactValue::from_root(x.q(), -x.half_exp(), r.inv())
}

/// 2×2 matrices over `F`, for the Q-form computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[PadicNumber; 2]; 2]);

impl Mat2 {
    fn mul(&self, o: &Mat2) -> Result<Mat2> {
        let a = &self.0;
        let b = &o.0;
        let e = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
        Ok(Mat2([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]]))
    }

    fn sub(&self, o: &Mat2) -> Result<Mat2> {
        let a = &self.0;
        let b = &o.0;
        Ok(Mat2([
            [a[0][0].sub(&b[0][0])?, a[0][1].sub(&b[0][1])?],
            [a[1][0].sub(&b[1][0])?, a[1][1].sub(&b[1][1])?],
        ]))
    }

    fn bracket(&self, o: &Mat2) -> Result<Mat2> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    fn trace(&self) -> Result<PadicNumber> {
        self.0[0][0].add(&self.0[1][1])
    }
}

/// `a + dδ ↦ [[a, d], [dΔ, a]]`.
pub fn embed_quadratic(ext: &TameExtension, y: &ExtElement) -> Result<Mat2> {
    let delta = ext.delta().ok_or(Error::InvalidExtension("matrix embedding needs a quadratic extension"))?;
    let (a, d) = quad_coords(ext, y)?;
    Ok(Mat2([[a, d], [d.mul(&delta), a]]))
}

/// Gram matrix of `Q(V, W) = tr([α, W][V, Y])/2` on the basis
/// `V₁ = diag(1, −1)`, `V₂ = [[0, 1], [−Δ, 0]]`.
pub fn q_form_gram(ext: &TameExtension, alpha: &ExtElement, y: &ExtElement) -> Result<[[PadicNumber; 2]; 2]> {
    let cfg = ext.config();
    let delta = ext.delta().ok_or(Error::InvalidExtension("Q-form needs a quadratic extension"))?;
    let a = embed_quadratic(ext, alpha)?;
    let ym = embed_quadratic(ext, y)?;
    let one = PadicNumber::one(cfg);
    let zero = PadicNumber::zero(cfg);
    let basis = [Mat2([[one, zero], [zero, one.neg()]]), Mat2([[zero, one], [delta.neg(), zero]])];
    let half = PadicNumber::from_int(cfg, 2).inv()?;
    let mut g = [[zero; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let t = a.bracket(&basis[j])?.mul(&basis[i].bracket(&ym)?)?.trace()?;
            g[i][j] = t.mul(&half);
        }
    }
    Ok(g)
}

/// The Q-form as a diagonal [`QuadForm`]; errors when degenerate.
pub fn q_form_matrix(ext: &TameExtension, alpha: &ExtElement, y: &ExtElement) -> Result<QuadForm> {
    if ext.degree() != 2 {
        return Err(Error::InvalidExtension("Q-form is implemented for GL(2) only"));
    }
    let g = q_form_gram(ext, alpha, y)?;
    if !g[0][1].is_zero() || !g[1][0].is_zero() {
        return Err(Error::Verification("Q-form Gram matrix is not diagonal"));
    }
    QuadForm::new(vec![g[0][0], g[1][1]])
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaFactor {
    /// Weil index of `ψ∘Q` from Gauss sums on the Gram matrix.
    pub oracle: RootOfUnity,
    /// `(x, Δ)(y, Δ)γ_F(Δ, ψ)`.
    pub closed: RootOfUnity,
    pub hasse: i32,
}

/// `γ(α, Y)` both ways.
pub fn gamma_factor(
    ext: &TameExtension,
    alpha: &ExtElement,
    y: &ExtElement,
    psi: &AdditiveCharacter,
) -> Result<GammaFactor> {
    let form = q_form_matrix(ext, alpha, y)?;
    let delta = ext.delta().expect("quadratic");
    let (_, x) = quad_coords(ext, alpha)?;
    let (_, yy) = quad_coords(ext, y)?;
    let closed = RootOfUnity::from_sign(hilbert(&x, &delta) * hilbert(&yy, &delta)) * weil_gamma_closed(&delta, psi);
    Ok(GammaFactor {
        oracle: form.weil_index(psi)?,
        closed,
        hasse: crate::symbols::hasse_invariant(&form, psi)?,
    })
}

/// Positive factors kept symbolically, with exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormTag {
    DegPi,
    DegSigma,
    CPsiGPrime,
    CPsiGInv,
    AbsEtaAlphaInvSqrt,
    AbsDGammaInvSqrt,
    /// `λ(σ)` for odd `ℓ`: a sign with no closed form here, carried opaquely.
    LambdaSigma,
}

impl NormTag {
    pub fn name(&self) -> &'static str {
        match self {
            NormTag::DegPi => "deg(pi)",
            NormTag::DegSigma => "deg(sigma)",
            NormTag::CPsiGPrime => "c_psi(g')",
            NormTag::CPsiGInv => "c_psi(g)^-1",
            NormTag::AbsEtaAlphaInvSqrt => "|eta(alpha)|^-1/2",
            NormTag::AbsDGammaInvSqrt => "|D(gamma)|^-1/2",
            NormTag::LambdaSigma => "lambda(sigma)",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormToken(pub BTreeMap<NormTag, i32>);

impl NormToken {
    pub fn from_tags(tags: &[(NormTag, i32)]) -> Self {
        let mut t = NormToken::default();
        for &(k, e) in tags {
            t.push(k, e);
        }
        t
    }

    fn push(&mut self, k: NormTag, e: i32) {
        let v = self.0.entry(k).or_insert(0);
        *v += e;
        if *v == 0 {
            self.0.remove(&k);
        }
    }

    pub fn mul(&self, other: &NormToken) -> NormToken {
        let mut out = self.clone();
        for (&k, &e) in &other.0 {
            out.push(k, e);
        }
        out
    }
}

impl fmt::Display for NormToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (k, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{}", k.name())?;
            } else {
                write!(f, "{}^{}", k.name(), e)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormulaValue {
    pub exact: ExactValue,
    pub norm: NormToken,
}

impl fmt::Display for FormulaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * [{}]", self.exact, self.norm)
    }
}

fn root_value(q: u64, r: RootOfUnity) -> Result<ExactValue> {
    ExactValue::from_root(q, 0, r)
}

/// `Δ_χ` as used by the odd-degree formula on this model.
fn model_delta_chi(model: &CoverModel) -> MultCharacter {
    model.delta_chi.clone().unwrap_or_else(MultCharacter::trivial)
}

/// Checks the window `0 ≤ n(w) ≤ r/2` (and `n(w) = 0` at depth zero).
pub fn check_window(ext: &TameExtension, chi: &MultCharacter, w: &ExtElement) -> Result<Depth> {
    let depth = n_depth(ext, w)?.depth;
    let level = chi.level(ext);
    if level == 0 {
        if ext.kind().is_ramified() {
            return Err(Error::Precondition("depth-zero formula needs an unramified torus"));
        }
        if !depth.is_zero() {
            return Err(Error::Precondition("w outside the window n(w) = 0"));
        }
    } else if !depth.within_half_depth(level) {
        return Err(Error::Precondition("w outside the window n(w) <= r/2"));
    }
    Ok(depth)
}

/// Unimodular part of `ε(χ̃, Δ⁺, τ)` and its symbolic positive factors.
pub fn epsilon_constant(g: &GenuineCharacter, ps: PositiveSystem) -> Result<(RootOfUnity, NormToken)> {
    let ext = &g.model.ext;
    let tau = &g.model.tau;
    let l = ext.degree();
    let eps_pos = tau.eval0(ext, &sign_element(ext, ps.weyl_length % 2 == 1))?;
    let base = if l == 2 {
        tau.eval0(ext, &ext.scale(&ext.gen(), &PadicNumber::from_int(ext.config(), 2)))?
    } else {
        tau.eval0(ext, &sign_element(ext, half_sum(l) % 2 == 1))?
    };
    let level = g.chi.level(ext);
    if level == 0 {
        let sign = RootOfUnity::from_sign(if l % 2 == 1 { 1 } else { -1 });
        return Ok((sign * base * eps_pos, NormToken::from_tags(&[(NormTag::DegPi, 1), (NormTag::DegSigma, -1)])));
    }
    let mut tags = vec![
        (NormTag::DegPi, 1),
        (NormTag::CPsiGPrime, 1),
        (NormTag::CPsiGInv, 1),
        (NormTag::AbsEtaAlphaInvSqrt, 1),
    ];
    let lead = if l == 2 {
        let delta = ext.delta().expect("quadratic");
        let alpha = g.chi.total_alpha(ext).expect("positive level");
        let (_, x) = quad_coords(ext, &alpha)?;
        let psi = AdditiveCharacter::standard(ext.config(), 1);
        RootOfUnity::from_sign(hilbert(&x, &delta)) * weil_gamma_closed(&delta, &psi)
    } else {
        tags.push((NormTag::LambdaSigma, 1));
        RootOfUnity::ONE
    };
    Ok((lead * base * eps_pos, NormToken::from_tags(&tags)))
}

/// The reduced formula: `ℓ = 2` uses `χ(w) + (−1,Δ)χ(w̄)` over
/// `τ₀(w − w̄)|D(w)|^{1/2}`; odd `ℓ` uses `Σ χΔ_χ(σ^i w)` over the
/// collapsed denominator `τ₀((−1)^{Σk})|D(w)|^{1/2}`.
pub fn eval_formula(g: &GenuineCharacter, w: &ExtElement, ps: PositiveSystem) -> Result<FormulaValue> {
    if !crate::covers::is_regular_genuine(g)? {
        return Err(Error::NotRegular);
    }
    eval_formula_unchecked(g, w, ps)
}

fn eval_formula_unchecked(g: &GenuineCharacter, w: &ExtElement, ps: PositiveSystem) -> Result<FormulaValue> {
    let ext = &g.model.ext;
    let q = ext.config().p;
    let l = ext.degree();
    check_window(ext, &g.chi, w)?;
    let mut num = ExactValue::zero(q);
    if l == 2 {
        let delta = ext.delta().expect("quadratic");
        let s = RootOfUnity::from_sign(hilbert(&PadicNumber::from_int(ext.config(), -1), &delta));
        num = num.add(&root_value(q, g.chi.eval(ext, w)?)?)?;
        num = num.add(&root_value(q, s * g.chi.eval(ext, &ext.conj(w))?)?)?;
    } else {
        let dchi = model_delta_chi(&g.model);
        for i in 0..l as i64 {
            let wi = ext.galois_apply(i, w)?;
            num = num.add(&root_value(q, g.chi.eval(ext, &wi)? * dchi.eval(ext, &wi)?)?)?;
        }
    }
    let den = weyl_denominator(ext, &g.model.tau, w, ps)?;
    let (eps, norm) = epsilon_constant(g, ps)?;
    let exact = num.mul_root(eps * den.tau_part.inv())?.mul(&inv_monomial(&den.abs_d_half)?)?;
    Ok(FormulaValue { exact, norm })
}

/// The unreduced formula for the standard positive system:
/// `Σ_s ε(s)χ̃(s·κ(m))` over `τ(Δ⁰(w))·λ(κ(m))`, with the Weyl action and
/// `κ` of the cover model. For odd `ℓ` the factor `τ(Δ⁰)` lives on `EL`
/// and enters only through `τ(Δ⁰)ρ_τ(w) = τ₀((−1)^{Σk})|D(w)|^{1/2}·ρ_τ(w)/ρ_{τ₀}(w)`.
pub fn eval_formula_literal(g: &GenuineCharacter, w: &ExtElement) -> Result<FormulaValue> {
    let model = &g.model;
    let ext = &model.ext;
    let q = ext.config().p;
    let l = ext.degree();
    check_window(ext, &g.chi, w)?;
    let [m, _] = model.fiber(w)?;
    let c = model.kappa(&m)?;
    let mut num = ExactValue::zero(q);
    for i in 0..l as i64 {
        let ci = model.weyl_act(i, &c)?;
        let len = if l == 2 { i as u32 } else { 0 };
        let s = RootOfUnity::from_sign(epsilon_sign(len, ext.delta().as_ref(), l));
        num = num.add(&root_value(q, s * g.eval_cover(&ci)?)?)?;
    }
    let den = if l == 2 {
        let d0 = ext.sub(&ext.one(), &ext.div(&ext.conj(w), w)?);
        model.tau.eval(ext, &d0)?.mul(&c.lambda)?
    } else {
        let collapsed = model.tau.eval0(ext, &sign_element(ext, half_sum(l) % 2 == 1))?;
        let vd = discriminant_valuation(ext, w)?;
        let abs = ExactValue::from_root(q, -vd, collapsed)?;
        abs.mul(&c.lambda)?.mul(&inv_monomial(&model.rho_tau(w)?)?)?
    };
    let (eps, norm) = epsilon_constant(g, PositiveSystem::STANDARD)?;
    let exact = num.mul_root(eps)?.mul(&inv_monomial(&den)?)?;
    Ok(FormulaValue { exact, norm })
}

/// Name of an identity suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Omega,
    Mu,
    Lambda,
    DeltaDelta,
    LMinusN,
    Window,
    Collapse,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Omega, Suite::Mu, Suite::Lambda, Suite::DeltaDelta, Suite::LMinusN, Suite::Window, Suite::Collapse];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Omega => "omega",
            Suite::Mu => "mu",
            Suite::Lambda => "lambda",
            Suite::DeltaDelta => "deltadelta",
            Suite::LMinusN => "lminusn",
            Suite::Window => "window",
            Suite::Collapse => "collapse",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// One evaluated identity instance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), records: Vec::new() }
    }

    pub fn checked(&self) -> usize {
        self.records.len()
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.records.iter().filter(|r| !r.pass).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    fn push<A: fmt::Display + PartialEq>(&mut self, id: String, input: String, lhs: A, rhs: A) {
        let pass = lhs == rhs;
        self.records.push(CheckRecord { id, input, lhs: format!("{lhs}"), rhs: format!("{rhs}"), pass });
    }

    fn record(&mut self, id: String, input: String, lhs: String, rhs: String, pass: bool) {
        self.records.push(CheckRecord { id, input, lhs, rhs, pass });
    }

    /// Concatenation; reports are merged in order.
    pub fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.records.extend(other.records);
        self
    }
}

/// The order-two-power character `Ω` of `E*` with `Ω|_{F*} = ℵ_{E/F}`:
/// unramified `(−1)^{v_E}`, ramified `Ω(ϖ) = s` with `s² = (−1, Δ)` and
/// the quadratic character on `μ_E`.
pub fn omega_character(ext: &TameExtension) -> Result<MultCharacter> {
    let cfg = ext.config();
    match ext.kind() {
        ExtKind::UnramQuad => Ok(MultCharacter::new(RootOfUnity::MINUS_ONE, 0, None)),
        ExtKind::RamQuad => {
            let delta = ext.delta().expect("quadratic");
            let s = if hilbert(&PadicNumber::from_int(cfg, -1), &delta) == 1 {
                RootOfUnity::ONE
            } else {
                RootOfUnity::new(1, 4)
            };
            Ok(MultCharacter::new(s, (cfg.p - 1) / 2, None))
        }
        _ => Err(Error::InvalidExtension("Omega is defined for quadratic extensions")),
    }
}

fn regular_classes(ext: &TameExtension, cutoff: u32) -> Result<Vec<ExtElement>> {
    Ok(torus_classes(ext, cutoff)?.into_iter().filter(|w| !ext.is_in_base(w)).collect())
}

/// `(w − w̄)/2δ ∈ F*`, as an element of `E`.
fn half_imaginary(ext: &TameExtension, w: &ExtElement) -> Result<ExtElement> {
    let d = ext.sub(w, &ext.conj(w));
    ext.div(&d, &ext.scale(&ext.gen(), &PadicNumber::from_int(ext.config(), 2)))
}

/// Runs one identity suite for `pair` over the torus classes modulo
/// `F*U_E^{cutoff}` where the suite ranges over torus points.
pub fn identity_suite(pair: &CharPair, suite: Suite, cutoff: u32) -> Result<SuiteReport> {
    let ext = &pair.ext;
    let cfg = ext.config();
    let psi = AdditiveCharacter::standard(cfg, 1);
    let mut rep = SuiteReport::new(suite.name());
    let need_quadratic = || -> Result<PadicNumber> {
        ext.delta().filter(|_| ext.kind().is_quadratic()).ok_or(Error::InvalidExtension("suite needs a quadratic extension"))
    };
    match suite {
        Suite::Omega => {
            need_quadratic()?;
            let omega = omega_character(ext)?;
            let delta_e = ext.gen();
            for (ti, tau) in TauCharacter::choices(ext)?.iter().enumerate() {
                for w in regular_classes(ext, cutoff)? {
                    if !n_depth(ext, &w)?.depth.is_zero() {
                        continue;
                    }
                    let lhs = tau.eval0(ext, &half_imaginary(ext, &w)?)?;
                    let rhs = omega.eval(ext, &ext.div(&w, &delta_e)?)?;
                    rep.push::<RootOfUnity>(format!("omega/tau{ti}/{w}"), format!("w={w}"), lhs, rhs);
                }
            }
        }
        Suite::Mu => {
            let delta = need_quadratic()?;
            let alpha = pair.chi.total_alpha(ext).ok_or(Error::Precondition("mu suite needs positive level"))?;
            let (_, x) = quad_coords(ext, &alpha)?;
            let mu = omega_character(ext)?;
            let lead = RootOfUnity::from_sign(hilbert(&x, &delta)) * weil_gamma_closed(&delta, &psi);
            for w in regular_classes(ext, cutoff)? {
                let dc = n_depth(ext, &w)?;
                let Some((z, _)) = dc.decomposition else { continue };
                let (_, b) = quad_coords(ext, &w)?;
                let y = ext.scale(&ext.gen(), &b.div(&z)?);
                let wbar = ext.conj(&w);
                for (tag, yy, ww, sgn) in [("Y", y.clone(), w.clone(), 1i64), ("sY", ext.conj(&y), wbar.clone(), -1)] {
                    let gf = gamma_factor(ext, &alpha, &yy, &psi)?;
                    let hi = ext.scale(&half_imaginary(ext, &w)?, &PadicNumber::from_int(cfg, sgn));
                    let rhs = lead * mu.eval(ext, &hi)? * mu.eval(ext, &ww)?;
                    rep.push::<RootOfUnity>(format!("mu/{tag}/oracle/{w}"), format!("w={w}"), gf.oracle, rhs);
                    rep.push::<RootOfUnity>(format!("mu/{tag}/closed/{w}"), format!("w={w}"), gf.closed, rhs);
                }
            }
        }
        Suite::Lambda => {
            let delta = need_quadratic()?;
            if ext.kind() != ExtKind::UnramQuad {
                return Err(Error::InvalidExtension("lambda suite is for the unramified quadratic case"));
            }
            let alpha = pair.chi.total_alpha(ext).ok_or(Error::Precondition("lambda suite needs positive level"))?;
            let (_, x) = quad_coords(ext, &alpha)?;
            let r = pair.chi.level(ext) as i64;
            let lhs = RootOfUnity::from_sign(if r % 2 == 0 { -1 } else { 1 });
            let hx = RootOfUnity::from_sign(hilbert(&x, &delta));
            let input = format!("alpha={alpha}, r={r}");
            rep.push::<RootOfUnity>("lambda/closed".into(), input.clone(), lhs, hx * weil_gamma_closed(&delta, &psi));
            rep.push::<RootOfUnity>("lambda/oracle".into(), input, lhs, hx * weil_gamma(&delta, &psi)?);
        }
        Suite::DeltaDelta => {
            let delta = need_quadratic()?;
            if ext.kind() != ExtKind::RamQuad {
                return Err(Error::InvalidExtension("delta(delta) suite is for the ramified quadratic case"));
            }
            let alpha = pair.chi.total_alpha(ext).ok_or(Error::Precondition("suite needs positive level"))?;
            let (_, x) = quad_coords(ext, &alpha)?;
            let dchi = delta_twist(pair)?;
            let lhs = dchi.eval(ext, &ext.gen())?;
            let hx = RootOfUnity::from_sign(hilbert(&x, &delta));
            let input = format!("alpha={alpha}");
            rep.push::<RootOfUnity>("deltadelta/closed".into(), input.clone(), lhs, hx * weil_gamma_closed(&delta, &psi));
            rep.push::<RootOfUnity>("deltadelta/oracle".into(), input, lhs, hx * weil_gamma(&delta, &psi)?);
        }
        Suite::LMinusN => {
            let l = l_exponent(ext, &pair.chi)?;
            let n = pair.chi.level(ext) as i64;
            rep.push::<i64>("lminusn".into(), format!("level={n}"), l, -n);
        }
        Suite::Window => {
            if ext.kind() != ExtKind::UnramQuad {
                return Err(Error::InvalidExtension("window suite is for the unramified quadratic case"));
            }
            for w in regular_classes(ext, cutoff)? {
                let routes = window_routes(ext, &w)?;
                let pass = routes.iter().all(|&b| b == routes[0]);
                let s = format!("{routes:?}");
                rep.record(format!("window/{w}"), format!("w={w}"), s.clone(), String::from(if pass { "agree" } else { "disagree" }), pass);
            }
        }
        Suite::Collapse => {
            let l = ext.degree();
            if l.is_multiple_of(2) {
                return Err(Error::InvalidExtension("collapse suite is for odd degree"));
            }
            let taus = TauCharacter::choices(ext)?;
            let sign_odd = half_sum(l) % 2 == 1;
            let sgn = PadicNumber::from_int(cfg, if sign_odd { -1 } else { 1 });
            for w in regular_classes(ext, cutoff)? {
                let c = collapse_data(ext, &w)?;
                let id = format!("{w}");
                let collapsed = c.ny.mul(&sgn).div(&c.nw.pow(((l - 1) / 2) as i64)?)?;
                for (ti, tau) in taus.iter().enumerate() {
                    let lhs = tau.eval0(ext, &ext.from_padic(&collapsed))?;
                    let rhs = tau.eval0(ext, &ext.from_padic(&sgn))?;
                    rep.push::<RootOfUnity>(format!("collapse/tau{ti}/{id}"), format!("w={w}"), lhs, rhs);
                }
                let prod_ok = c.vandermonde == ext.scale(&ext.from_padic(&c.ny), &sgn);
                rep.record(format!("collapse/product/{id}"), format!("w={w}"), format!("{}", c.vandermonde), String::from("(-1)^sum*N(y)"), prod_ok);
                rep.push::<i64>(format!("collapse/valuation/{id}"), format!("w={w}"), 2 * c.ny.val(), c.disc_val);
                if n_depth(ext, &w)?.depth.is_zero() {
                    let dv = c.disc_val - (l as i64 - 1) * c.nw.val();
                    rep.push::<i64>(format!("collapse/unit/{id}"), format!("w={w}"), dv, 0);
                }
            }
        }
    }
    Ok(rep)
}

struct Collapse {
    ny: PadicNumber,
    nw: PadicNumber,
    vandermonde: ExtElement,
    disc_val: i64,
}

/// `N(y)` with `y = ∏_{k=1}^{(ℓ−1)/2} (w − σ^k w)`, the Vandermonde-type
/// product `∏_{i<j} (σ^i w − σ^j w)`, and `v_F(disc(w))`.
fn collapse_data(ext: &TameExtension, w: &ExtElement) -> Result<Collapse> {
    let l = ext.degree();
    let conj: Vec<ExtElement> = (0..l as i64).map(|i| ext.galois_apply(i, w)).collect::<Result<_>>()?;
    let mut y = ext.one();
    for k in 1..=(l - 1) / 2 {
        y = ext.mul(&y, &ext.sub(w, &conj[k]));
    }
    let mut v = ext.one();
    for i in 0..l {
        for j in i + 1..l {
            v = ext.mul(&v, &ext.sub(&conj[i], &conj[j]));
        }
    }
    Ok(Collapse { ny: ext.norm(&y)?, nw: ext.norm(w)?, vandermonde: v, disc_val: ext.discriminant(w)?.val() })
}

/// Four membership tests for `w` in the unramified quadratic torus:
/// `w ∈ F*K₀ \ F*K₁` via the matrix of `w`, `w ∈ F*A`, `w ∉ F*U_E^1`,
/// and `n(w) = 0`.
pub fn window_routes(ext: &TameExtension, w: &ExtElement) -> Result<[bool; 4]> {
    let m = embed_quadratic(ext, w)?;
    let entries = [m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]];
    let vmin = entries.iter().filter(|x| !x.is_zero()).map(|x| x.val()).min().expect("nonzero matrix");
    // scale to an integral matrix with a unit entry
    let scaled: Vec<PadicNumber> = entries.iter().map(|x| x.shift(-vmin)).collect();
    let det = scaled[0].mul(&scaled[3]).sub(&scaled[1].mul(&scaled[2]))?;
    let in_k0 = !det.is_zero() && det.val() == 0;
    // c·M ∈ 1 + pM₂(O) for some c iff the scaled matrix is scalar mod p
    let off_small = scaled[1].is_zero() || scaled[1].val() >= 1;
    let off_small2 = scaled[2].is_zero() || scaled[2].val() >= 1;
    let diag_eq = {
        let d = scaled[0].sub(&scaled[3])?;
        d.is_zero() || d.val() >= 1
    };
    let in_k1 = off_small && off_small2 && diag_eq;
    let route1 = in_k0 && !in_k1;
    let (a, b) = quad_coords(ext, w)?;
    let route2 = a.is_zero() || (!b.is_zero() && a.val() >= b.val());
    let route3 = !matches!(ext.unit_level(w)?, UnitLevel::Level(k) if k >= 1);
    let route4 = n_depth(ext, w)?.depth.is_zero();
    Ok([route1, route2, route3, route4])
}

/// Formula values over a list of points (`None` where the window guard refuses).
pub fn formula_profile(g: &GenuineCharacter, points: &[ExtElement]) -> Result<Vec<Option<FormulaValue>>> {
    if !crate::covers::is_regular_genuine(g)? {
        return Err(Error::NotRegular);
    }
    points
        .iter()
        .map(|w| match eval_formula_unchecked(g, w, PositiveSystem::STANDARD) {
            Ok(v) => Ok(Some(v)),
            Err(Error::Precondition(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Outcome of comparing two formulas on the `n(w) = 0` classes.
#[derive(Clone, Debug, PartialEq)]
pub enum Separation {
    /// The formulas agree at every tested class.
    EquivalentByWeyl,
    /// A point where they differ, with the reason.
    SeparatedAt { w: ExtElement, reason: &'static str },
    /// No nonvanishing point was found at this level.
    Inconclusive,
}

fn same_extension(a: &TameExtension, b: &TameExtension) -> bool {
    a.kind() == b.kind() && a.config().p == b.config().p && a.delta() == b.delta()
}

/// The `n(w) = 0` classes modulo `F*U_E^{cutoff}`.
pub fn depth_zero_classes(ext: &TameExtension, cutoff: u32) -> Result<Vec<ExtElement>> {
    let mut out = Vec::new();
    for w in regular_classes(ext, cutoff)? {
        if n_depth(ext, &w)?.depth.is_zero() {
            out.push(w);
        }
    }
    Ok(out)
}

/// A point `w` with `n(w) = 0` where the formula does not vanish.
pub fn find_nonvanishing(g: &GenuineCharacter, cutoff: u32) -> Result<Option<ExtElement>> {
    let pts = depth_zero_classes(&g.model.ext, cutoff)?;
    let prof = formula_profile(g, &pts)?;
    Ok(pts.into_iter().zip(prof).find(|(_, v)| matches!(v, Some(v) if !v.exact.is_zero())).map(|(w, _)| w))
}

/// The `n(w) = 0` classes of a formula's torus with the formula values there.
#[derive(Clone, Debug)]
pub struct SeparationData {
    pub ext: TameExtension,
    pub points: Vec<ExtElement>,
    pub profile: Vec<Option<FormulaValue>>,
}

/// Generators of `F*` modulo `U_F^{cutoff}`.
fn central_generators(ext: &TameExtension, cutoff: u32) -> Vec<PadicNumber> {
    let cfg = ext.config();
    let mut out = vec![
        PadicNumber::from_parts(cfg, 1, 1),
        PadicNumber::teichmuller(cfg, crate::arith::primitive_root(cfg.p)),
    ];
    out.extend((1..cutoff).map(|j| PadicNumber::from_int(cfg, 1 + cfg.pk(j) as i64)));
    out
}

/// The profile covers the classes and their translates by generators of the
/// center, so that twists by characters of `F*` are not missed.
pub fn separation_data(g: &GenuineCharacter, cutoff: u32) -> Result<SeparationData> {
    let ext = g.model.ext.clone();
    let classes = depth_zero_classes(&ext, cutoff)?;
    let mut points = classes.clone();
    for z in central_generators(&ext, cutoff) {
        points.extend(classes.iter().map(|w| ext.scale(w, &z)));
    }
    let profile = formula_profile(g, &points)?;
    Ok(SeparationData { ext, points, profile })
}

fn nonzero(v: &Option<FormulaValue>) -> bool {
    matches!(v, Some(v) if !v.exact.is_zero())
}

/// Compares `F(χ̃_A)` and `F(χ̃_B)` on the `n(w) = 0` classes modulo
/// `F*U_E^{cutoff}` and their central translates. For different extensions a
/// nonvanishing point of one formula is a witness, since the other formula is
/// supported on conjugates of its own torus; a witness whose determinant is not a norm from the
/// other extension is preferred.
pub fn separation_test(a: &GenuineCharacter, b: &GenuineCharacter, cutoff: u32) -> Result<Separation> {
    separate(&separation_data(a, cutoff)?, &separation_data(b, cutoff)?)
}

/// [`separation_test`] on precomputed profiles.
pub fn separate(a: &SeparationData, b: &SeparationData) -> Result<Separation> {
    if !same_extension(&a.ext, &b.ext) {
        for (d, other) in [(a, &b.ext), (b, &a.ext)] {
            let ext = &d.ext;
            let mut fallback = None;
            for (w, v) in d.points.iter().zip(&d.profile) {
                if !nonzero(v) {
                    continue;
                }
                let det = ext.norm(w)?;
                if other.degree() == ext.degree() && !cft_character(other, &det)?.is_one() {
                    return Ok(Separation::SeparatedAt { w: w.clone(), reason: "determinant is not a norm from the other torus" });
                }
                fallback.get_or_insert_with(|| w.clone());
            }
            if let Some(w) = fallback {
                return Ok(Separation::SeparatedAt { w, reason: "point of a non-conjugate torus with nonzero value" });
            }
        }
        return Ok(Separation::Inconclusive);
    }
    for (w, (x, y)) in a.points.iter().zip(a.profile.iter().zip(&b.profile)) {
        if x != y {
            return Ok(Separation::SeparatedAt { w: w.clone(), reason: "formula values differ" });
        }
    }
    if !a.profile.iter().any(nonzero) {
        return Ok(Separation::Inconclusive);
    }
    Ok(Separation::EquivalentByWeyl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharPair;
    use crate::covers::{genuine_from_pair, CaseTag};
    use crate::padic::PrimeConfig;

    fn ext(p: u64, kind: ExtKind) -> TameExtension {
        let ell = if kind.is_quadratic() { 2 } else { 3 };
        TameExtension::build(PrimeConfig::relaxed(p, 12, ell).unwrap(), kind, None).unwrap()
    }

    #[test]
    fn depth_examples() {
        let e = ext(5, ExtKind::RamQuad);
        let w = e.element(0, &[2, 3]);
        assert_eq!(n_depth(&e, &w).unwrap().depth, Depth { num: 1, den: 2 });
        let u = ext(3, ExtKind::UnramQuad);
        let w = u.add(&u.from_int(2), &u.element(2, &[0, 1]));
        assert_eq!(n_depth(&u, &w).unwrap().depth, Depth { num: 2, den: 1 });
        assert!(n_depth(&u, &u.element(0, &[1, 1])).unwrap().depth.is_zero());
        assert_eq!(n_depth(&u, &u.from_int(7)), Err(Error::NotRegular));
    }

    #[test]
    fn q_form_unit_case() {
        let e = ext(3, ExtKind::UnramQuad);
        let d = e.gen();
        let g = q_form_gram(&e, &d, &d).unwrap();
        let delta = e.delta().unwrap();
        let four = PadicNumber::from_int(e.config(), 4);
        assert_eq!(g[0][0], four.mul(&delta));
        assert_eq!(g[1][1], four.mul(&delta).mul(&delta).neg());
        assert!(q_form_matrix(&e, &e.from_int(1), &d).is_err());
    }

    #[test]
    fn gamma_level_one_nonsquare_unit() {
        let e = ext(3, ExtKind::UnramQuad);
        let psi = AdditiveCharacter::standard(e.config(), 1);
        let g = gamma_factor(&e, &e.gen(), &e.gen(), &psi).unwrap();
        assert_eq!(g.oracle, RootOfUnity::MINUS_ONE);
        assert_eq!(g.closed, RootOfUnity::MINUS_ONE);
    }

    #[test]
    fn epsilon_sign_cases() {
        let cfg = PrimeConfig::relaxed(3, 12, 2).unwrap();
        let p = PadicNumber::from_int(&cfg, 3);
        assert_eq!(epsilon_sign(1, Some(&p), 2), -1);
        assert_eq!(epsilon_sign(0, Some(&p), 2), 1);
        assert_eq!(epsilon_sign(1, None, 3), 1);
    }

    #[test]
    fn literal_and_reduced_routes_agree_gl2() {
        let e = ext(3, ExtKind::UnramQuad);
        let a = e.element(-1, &[0, 1]);
        let chi = MultCharacter::new(RootOfUnity::ONE, 1, Some(a));
        let pair = CharPair::new(e.clone(), chi).unwrap();
        for tau in TauCharacter::choices(&e).unwrap() {
            let model = CoverModel::new(CaseTag::Gl2, e.clone(), tau, None).unwrap();
            let g = genuine_from_pair(&pair, &model).unwrap();
            for w in depth_zero_classes(&e, 2).unwrap() {
                let r = eval_formula(&g, &w, PositiveSystem::STANDARD).unwrap();
                assert_eq!(r, eval_formula_literal(&g, &w).unwrap());
                assert_eq!(r, eval_formula(&g, &w, PositiveSystem::OPPOSITE).unwrap());
            }
        }
    }
}
