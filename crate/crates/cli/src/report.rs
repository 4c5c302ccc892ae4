//! Report schema v1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA: &str = "ayev-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub anchor: String,
    pub verdict: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
    pub wall_time_us: u64,
}

impl Entry {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, pass: bool) -> Self {
        Entry {
            id: id.into(),
            anchor: anchor.into(),
            verdict: if pass { Outcome::Pass } else { Outcome::Fail },
            counterexample: None,
            details: BTreeMap::new(),
            wall_time_us: 0,
        }
    }

    pub fn detail(mut self, key: &str, value: impl Into<String>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn counterexample(mut self, c: Option<String>) -> Self {
        self.counterexample = c;
        self
    }

    pub fn timed(mut self, since: std::time::Instant) -> Self {
        self.wall_time_us = since.elapsed().as_micros() as u64;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub entries: Vec<Entry>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, entries: Vec<Entry>) -> Self {
        let passed = entries.iter().filter(|e| e.passed()).count();
        Report {
            schema: SCHEMA.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            summary: Summary {
                total: entries.len(),
                passed,
                failed: entries.len() - passed,
            },
            entries,
            error: None,
        }
    }

    pub fn failed(command: &str, config: RunConfig, error: String) -> Self {
        let mut r = Report::new(command, config, Vec::new());
        r.error = Some(error);
        r
    }

    pub fn ok(&self) -> bool {
        self.error.is_none() && self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let rank = match (self.config.m, self.config.n) {
            (Some(m), Some(n)) => format!("  (m|n)=({m}|{n})"),
            _ => String::new(),
        };
        let _ = writeln!(s, "ayev {}  {}{rank}", self.tool_version, self.command);
        let width = self.entries.iter().map(|e| e.id.len()).max().unwrap_or(0);
        for e in &self.entries {
            let v = if e.passed() { "PASS" } else { "FAIL" };
            let ms = e.wall_time_us as f64 / 1000.0;
            let _ = writeln!(s, "{v}  {:width$}  {}  {ms:.1}ms", e.id, e.anchor);
            if let Some(c) = &e.counterexample {
                let _ = writeln!(s, "      counterexample: {c}");
            }
            for (k, d) in &e.details {
                if d.contains('\n') {
                    let _ = writeln!(s, "      {k}:");
                    for line in d.lines() {
                        let _ = writeln!(s, "        {line}");
                    }
                } else {
                    let _ = writeln!(s, "      {k}: {d}");
                }
            }
        }
        if let Some(err) = &self.error {
            let _ = writeln!(s, "error: {err}");
        }
        let _ = writeln!(
            s,
            "summary: {} checks, {} passed, {} failed",
            self.summary.total, self.summary.passed, self.summary.failed
        );
        s
    }

    /// Copy with every wall time zeroed, for comparisons across runs.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for e in &mut r.entries {
            e.wall_time_us = 0;
        }
        r
    }
}
