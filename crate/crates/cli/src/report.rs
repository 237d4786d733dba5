//! JSON reports. Everything needed to rerun a command is echoed; there are no
//! timestamps, so identical runs give identical bytes.

use serde::{Deserialize, Serialize};

use crate::config::Resolved;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// A published value used as an input or a reference.
    Paper,
    /// Computed by this run.
    Computed,
    /// Supplied on the command line.
    Input,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub name: String,
    pub value: f64,
    pub source: Source,
}

impl Provenance {
    pub fn new(name: impl Into<String>, value: f64, source: Source) -> Self {
        Provenance { name: name.into(), value, source }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Command arguments as parsed.
    pub arguments: serde_json::Value,
    pub config: Resolved,
    pub result: serde_json::Value,
    pub provenance: Vec<Provenance>,
    /// False when a verification inside the command failed.
    pub pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}
