//! Report schema `v1` and its JSON, CSV and plain-text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};

pub const SCHEMA: &str = "v1";

/// One checked identity instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    /// Unique within a report; entries are sorted by it.
    pub id: String,
    pub suite: String,
    /// Stable tag naming the identity under test.
    pub anchor: String,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

impl Entry {
    pub fn new(suite: &str, anchor: &str, id: String, input: String, lhs: String, rhs: String, pass: bool) -> Self {
        Entry { id: format!("{suite}/{id}"), suite: suite.into(), anchor: anchor.into(), input, lhs, rhs, pass }
    }

    /// An entry comparing two displayable values for equality.
    pub fn eq<A: std::fmt::Display + PartialEq>(suite: &str, anchor: &str, id: String, input: String, lhs: A, rhs: A) -> Self {
        let pass = lhs == rhs;
        Entry::new(suite, anchor, id, input, lhs.to_string(), rhs.to_string(), pass)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub checks: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub config: RunConfig,
    pub checks: usize,
    pub failures: usize,
    pub suites: BTreeMap<String, SuiteSummary>,
    pub entries: Vec<Entry>,
}

impl Report {
    /// Sorts by id so the result does not depend on scheduling.
    pub fn new(config: RunConfig, mut entries: Vec<Entry>) -> Self {
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        let mut suites: BTreeMap<String, SuiteSummary> = BTreeMap::new();
        for e in &entries {
            let s = suites.entry(e.suite.clone()).or_default();
            s.checks += 1;
            s.failures += usize::from(!e.pass);
        }
        let failures = entries.iter().filter(|e| !e.pass).count();
        Report { schema: SCHEMA.into(), config, checks: entries.len(), failures, suites, entries }
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(self)? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for e in &self.entries {
                    w.serialize(e)?;
                }
                String::from_utf8(w.into_inner()?)?
            }
            Format::Pretty => self.pretty(),
        })
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "tllc report {} (p = {}, ell = {}, seed = {})", self.schema, c.p, c.ell, c.seed);
        for (name, s) in &self.suites {
            let _ = writeln!(out, "  {name:<12} {:>7} checks  {:>5} failed", s.checks, s.failures);
        }
        let _ = writeln!(out, "  {:<12} {:>7} checks  {:>5} failed", "total", self.checks, self.failures);
        for e in self.entries.iter().filter(|e| !e.pass) {
            let _ = writeln!(out, "FAIL {} [{}] {}: {} != {}", e.id, e.anchor, e.input, e.lhs, e.rhs);
        }
        out
    }
}
