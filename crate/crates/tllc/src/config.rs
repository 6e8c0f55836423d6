//! Run configuration: TOML file, environment default and CLI overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tllc_core::ext::ExtKind;
use tllc_core::PrimeConfig;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "TLLC_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "pretty" => Ok(Format::Pretty),
            _ => Err(format!("unknown format {s:?} (json, csv, pretty)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("{0}")]
    Invalid(String),
}

/// Everything that determines a run. Serialized verbatim into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p: u64,
    pub ell: u64,
    /// Working p-adic precision `N`.
    pub precision: u32,
    /// Restrict extension-dependent suites to one kind.
    pub kind: Option<String>,
    /// TOML file of characters for the invariance suite.
    pub characters: Option<PathBuf>,
    pub suites: Vec<String>,
    pub format: Format,
    pub seed: u64,
    /// Level cutoff `c` for torus classes modulo `F*U_E^c`.
    pub cutoff: u32,
    /// Torus classes per extension before the cutoff is lowered.
    pub max_classes: u64,
    /// Random samples per sampled check family.
    pub samples: usize,
    /// `n` and `q` of the finite group for the DL and normalizer suites.
    pub gl_n: Option<usize>,
    pub gl_q: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 3,
            ell: 2,
            precision: 12,
            kind: None,
            characters: None,
            suites: vec!["all".into()],
            format: Format::Json,
            seed: 0,
            cutoff: 3,
            max_classes: 25_000,
            samples: 100,
            gl_n: None,
            gl_q: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn prime_config(&self) -> Result<PrimeConfig, ConfigError> {
        PrimeConfig::new(self.p, self.precision, self.ell).map_err(|e| match e {
            tllc_core::Error::InvalidConfig(s) => ConfigError::Invalid(s.into()),
            e => ConfigError::Invalid(e.to_string()),
        })
    }

    pub fn kind(&self) -> Result<Option<ExtKind>, ConfigError> {
        self.kind
            .as_deref()
            .map(|k| ExtKind::from_name(k).ok_or_else(|| ConfigError::Invalid(format!("unknown extension kind {k:?}"))))
            .transpose()
    }

    pub fn gl_n(&self) -> usize {
        self.gl_n.unwrap_or(self.ell as usize)
    }

    pub fn gl_q(&self) -> u64 {
        self.gl_q.unwrap_or(self.p)
    }

    /// Rejects combinations the library would refuse later.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.prime_config()?;
        if let Some(k) = self.kind()? {
            if k.is_quadratic() != (self.ell == 2) {
                return Err(ConfigError::Invalid(format!("kind {} does not have degree ell = {}", k.name(), self.ell)));
            }
        }
        if self.cutoff == 0 || self.cutoff > 4 {
            return Err(ConfigError::Invalid("cutoff must be between 1 and 4".into()));
        }
        if self.max_classes == 0 {
            return Err(ConfigError::Invalid("max_classes must be positive".into()));
        }
        if self.samples == 0 {
            return Err(ConfigError::Invalid("samples must be positive".into()));
        }
        let (n, q) = (self.gl_n(), self.gl_q());
        if !tllc_core::arith::is_prime(q) {
            return Err(ConfigError::Invalid("gl_q must be prime".into()));
        }
        if n < 2 || q.checked_pow(n as u32).is_none_or(|s| s > tllc_core::fq::MAX_FIELD_SIZE) {
            return Err(ConfigError::Invalid(format!("gl_n must be at least 2 with gl_q^gl_n <= {}", tllc_core::fq::MAX_FIELD_SIZE)));
        }
        for s in &self.suites {
            if s != "all" && crate::suites::SuiteId::from_name(s).is_none() {
                return Err(ConfigError::Invalid(format!("unknown suite {s:?}")));
            }
        }
        Ok(())
    }
}
