//! Std companion to `tllc-core`: run configuration, check suites, reports
//! and the one-shot computations used by the `tllc` binary.

pub mod characters;
pub mod compute;
pub mod config;
pub mod report;
pub mod suites;

use config::RunConfig;
use report::Report;

/// Why a run produced no report.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("precision exhausted; raise the working precision")]
    Precision,
    #[error(transparent)]
    Core(tllc_core::Error),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl From<tllc_core::Error> for RunError {
    fn from(e: tllc_core::Error) -> Self {
        match e {
            tllc_core::Error::PrecisionExhausted | tllc_core::Error::NonStabilization => RunError::Precision,
            tllc_core::Error::InvalidConfig(s) => RunError::Config(s.into()),
            e => RunError::Core(e),
        }
    }
}

impl From<config::ConfigError> for RunError {
    fn from(e: config::ConfigError) -> Self {
        match e {
            config::ConfigError::Invalid(s) => RunError::Config(s),
            e => RunError::Config(e.to_string()),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Precision => 3,
            RunError::Core(_) | RunError::Other(_) => 4,
        }
    }
}

/// Validates `cfg`, runs the selected suites on `jobs` threads (0 = all cores)
/// and assembles the sorted report.
pub fn run_suites(cfg: &RunConfig, jobs: usize) -> Result<Report, RunError> {
    cfg.validate()?;
    let ids = suites::selected(cfg).map_err(RunError::Config)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(anyhow::Error::from)?;
    let entries = pool.install(|| suites::run_all(cfg, &ids))?;
    Ok(Report::new(cfg.clone(), entries))
}
