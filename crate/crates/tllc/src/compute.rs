//! One-shot computations behind `tllc compute`, returning JSON values.

use serde_json::{json, Value};
use tllc_core::characters::CharPair;
use tllc_core::covers::{genuine_from_pair, CaseTag, CoverModel, TauCharacter};
use tllc_core::ext::ExtElement;
use tllc_core::finite_dl::{dl_value, FqMultChar, GLnq};
use tllc_core::formula::{eval_formula, n_depth, FormulaValue, PositiveSystem};
use tllc_core::symbols::{hilbert, hilbert_by_solvability, langlands_lambda, weil_gamma, weil_gamma_closed, AdditiveCharacter};
use tllc_core::{CycInt, Error, ExactValue, PadicNumber, PrimeConfig, Result, RootOfUnity};

use crate::characters::{element, CharacterSpec, ElementSpec};

pub fn cyc_json(c: &CycInt) -> Value {
    json!({ "conductor": c.conductor(), "coeffs": c.coeffs(), "display": c.to_string() })
}

pub fn root_json(r: RootOfUnity) -> Value {
    json!({ "order": r.order(), "exponent": r.num(), "display": r.to_string() })
}

pub fn exact_json(v: &ExactValue) -> Value {
    json!({ "q": v.q(), "half_exp": v.half_exp(), "cyc": cyc_json(v.cyc()), "display": v.to_string() })
}

pub fn formula_json(v: &FormulaValue) -> Value {
    let norm: serde_json::Map<String, Value> = v.norm.0.iter().map(|(t, e)| (t.name().to_string(), json!(e))).collect();
    json!({ "exact": exact_json(&v.exact), "norm": norm, "display": v.to_string() })
}

/// Parses `a` or `a/b` as a rational number of `Q_p`.
pub fn parse_padic(pc: &PrimeConfig, s: &str) -> anyhow::Result<PadicNumber> {
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>()?, b.trim().parse::<i64>()?),
        None => (s.trim().parse::<i64>()?, 1),
    };
    if a == 0 {
        anyhow::bail!("zero is not allowed here");
    }
    Ok(PadicNumber::from_rational(pc, a, b)?)
}

pub fn hilbert_json(a: &PadicNumber, b: &PadicNumber) -> Value {
    json!({ "value": hilbert(a, b), "oracle": hilbert_by_solvability(a, b) })
}

pub fn gamma_json(pc: &PrimeConfig, a: &PadicNumber, level: i64) -> Result<Value> {
    let psi = AdditiveCharacter::standard(pc, level);
    let v = weil_gamma(a, &psi)?;
    Ok(json!({ "value": cyc_json(&v.to_cyc()?), "closed": cyc_json(&weil_gamma_closed(a, &psi).to_cyc()?) }))
}

pub fn lambda_json(spec: &CharacterSpec, pc: &PrimeConfig, level: i64) -> Result<Value> {
    let e = spec.extension(pc)?;
    let psi = AdditiveCharacter::standard(e.config(), level);
    Ok(json!({ "value": cyc_json(&langlands_lambda(&e, &psi)?.to_cyc()?) }))
}

pub fn depth_json(spec: &CharacterSpec, pc: &PrimeConfig, w: &ElementSpec) -> Result<Value> {
    let e = spec.extension(pc)?;
    let w = element(&e, w)?;
    let d = n_depth(&e, &w)?.depth;
    Ok(json!({ "w": w.to_string(), "num": d.num, "den": d.den, "value": d.to_string() }))
}

/// The character formula for `spec` at `w`, on the GL case tag of its degree.
pub fn formula_eval(spec: &CharacterSpec, pc: &PrimeConfig, w: &ElementSpec, tau: usize, opposite: bool) -> Result<(ExtElement, FormulaValue)> {
    let (e, chi) = spec.build(pc)?;
    let w = element(&e, w)?;
    let pair = CharPair::new(e.clone(), chi)?;
    let tag = if e.kind().is_quadratic() {
        CaseTag::Gl2
    } else if tllc_core::characters::delta_ef(&e)?.is_trivial(e.config()) {
        CaseTag::GlLSplit
    } else {
        CaseTag::GlLDeltaNontrivial
    };
    let mut taus = TauCharacter::choices(&e)?;
    if tau >= taus.len() {
        return Err(Error::Precondition("tau index out of range"));
    }
    let model = CoverModel::new(tag, e.clone(), taus.swap_remove(tau), None)?;
    let g = genuine_from_pair(&pair, &model)?;
    let ps = if opposite { PositiveSystem::OPPOSITE } else { PositiveSystem::STANDARD };
    let v = eval_formula(&g, &w, ps)?;
    Ok((w, v))
}

pub fn dl_json(n: usize, q: u64, s: u64, k: u64) -> Result<Value> {
    let g = GLnq::new(n, q)?;
    if s == 0 || s >= g.field().size() {
        return Err(Error::Precondition("s must be a nonzero element of F_{q^n}"));
    }
    let v = dl_value(&g, s, &FqMultChar { k })?;
    Ok(json!({ "value": cyc_json(&v), "enumerated": g.is_enumerated() }))
}
