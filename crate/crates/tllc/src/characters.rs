//! TOML character files.
//!
//! ```toml
//! [[character]]
//! kind = "UnramQuad"
//! pi_value = [0, 1]    # χ(ϖ) = ζ_m^k as [k, m]
//! tame = 1
//! alpha = { shift = -2, coeffs = [1, 1] }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use tllc_core::characters::MultCharacter;
use tllc_core::ext::{ExtKind, TameExtension};
use tllc_core::{Error, PadicNumber, PrimeConfig, Result, RootOfUnity};

/// `p^shift·Σ coeffs[i]·x^i` in the extension's power basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    #[serde(default)]
    pub shift: i64,
    pub coeffs: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    pub kind: String,
    /// `Δ` for the defining polynomial, an integer; the kind's default when absent.
    pub delta: Option<i64>,
    #[serde(default = "unit_root")]
    pub pi_value: [i64; 2],
    #[serde(default)]
    pub tame: u64,
    pub alpha: Option<ElementSpec>,
}

fn unit_root() -> [i64; 2] {
    [0, 1]
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterFile {
    #[serde(default)]
    pub character: Vec<CharacterSpec>,
}

impl CharacterFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Ok(toml::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Builds every character; ids are `<index>/<kind>`.
    pub fn resolve(&self, pc: &PrimeConfig) -> Result<Vec<(String, TameExtension, MultCharacter)>> {
        self.character
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (e, chi) = c.build(pc)?;
                Ok((format!("{i:03}/{}", c.kind), e, chi))
            })
            .collect()
    }
}

impl CharacterSpec {
    pub fn extension(&self, pc: &PrimeConfig) -> Result<TameExtension> {
        let kind = ExtKind::from_name(&self.kind).ok_or(Error::InvalidExtension("unknown extension kind"))?;
        let ell = if kind.is_quadratic() { 2 } else { pc.ell };
        let cfg = PrimeConfig::relaxed(pc.p, pc.n, ell)?;
        let delta = self.delta.map(|d| PadicNumber::from_int(&cfg, d));
        TameExtension::build(cfg, kind, delta)
    }

    pub fn build(&self, pc: &PrimeConfig) -> Result<(TameExtension, MultCharacter)> {
        let e = self.extension(pc)?;
        let [k, m] = self.pi_value;
        if m <= 0 {
            return Err(Error::Precondition("pi_value order must be positive"));
        }
        let alpha = self.alpha.as_ref().map(|a| element(&e, a)).transpose()?;
        Ok((e, MultCharacter::new(RootOfUnity::new(k, m as u64), self.tame, alpha)))
    }
}

pub fn element(e: &TameExtension, spec: &ElementSpec) -> Result<tllc_core::ext::ExtElement> {
    if spec.coeffs.len() > e.degree() {
        return Err(Error::Precondition("more coefficients than the extension degree"));
    }
    Ok(e.element(spec.shift, &spec.coeffs))
}
