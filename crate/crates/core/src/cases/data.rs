//! Bundled case-study data sets and their loading.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::CaseError;

/// Environment variable naming a directory that replaces the bundled data.
pub const DATA_DIR_ENV: &str = "TIGHT_STORAGE_DATA";

const BUNDLED_APPROXIMATED: &str = include_str!("../../data/approximated.json");
const BUNDLED_PAPER_FAITHFUL: &str = include_str!("../../data/paper-faithful.json");

/// Where the numbers in a data set come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Every value is taken from the published case studies.
    Published,
    /// Generator data chosen to reproduce the qualitative behaviour only.
    Approximated,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Published => "published",
            Provenance::Approximated => "approximated",
        })
    }
}

/// The two data files shipped with the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSource {
    PaperFaithful,
    Approximated,
}

impl DataSource {
    pub fn file_name(self) -> &'static str {
        match self {
            DataSource::PaperFaithful => "paper-faithful.json",
            DataSource::Approximated => "approximated.json",
        }
    }

    fn bundled(self) -> &'static str {
        match self {
            DataSource::PaperFaithful => BUNDLED_PAPER_FAITHFUL,
            DataSource::Approximated => BUNDLED_APPROXIMATED,
        }
    }
}

impl std::str::FromStr for DataSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper-faithful" => Ok(DataSource::PaperFaithful),
            "approximated" => Ok(DataSource::Approximated),
            _ => Err(format!("unknown data set `{s}` (expected paper-faithful or approximated)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenarios {
    pub uc: Scenario,
    pub uc_reserves: Scenario,
    pub tep: Scenario,
    pub multiperiod: Scenario,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSet {
    pub provenance: Provenance,
    /// Free-text remarks on where values come from.
    #[serde(default)]
    pub notes: Vec<String>,
    pub scenarios: Scenarios,
}

/// JSON paths of `null` values.
fn null_paths(v: &serde_json::Value, path: &str, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Null => out.push(path.to_string()),
        serde_json::Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                null_paths(x, &format!("{path}[{i}]"), out);
            }
        }
        serde_json::Value::Object(o) => {
            for (k, x) in o {
                null_paths(x, &format!("{path}.{k}"), out);
            }
        }
        _ => {}
    }
}

impl DataSet {
    /// Parses a data file. `null` marks a value still to be filled in; a
    /// file containing any is reported as incomplete with every such path.
    pub fn parse(text: &str, origin: &str) -> Result<DataSet, CaseError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CaseError::Data(format!("{origin}: {e}")))?;
        let mut missing = Vec::new();
        null_paths(&value, "$", &mut missing);
        if !missing.is_empty() {
            return Err(CaseError::IncompleteData { origin: origin.to_string(), missing });
        }
        let d: DataSet = serde_json::from_value(value).map_err(|e| CaseError::Data(format!("{origin}: {e}")))?;
        for s in [&d.scenarios.uc, &d.scenarios.uc_reserves, &d.scenarios.tep, &d.scenarios.multiperiod] {
            s.check()?;
        }
        Ok(d)
    }

    pub fn from_path(path: &Path) -> Result<DataSet, CaseError> {
        let text = std::fs::read_to_string(path).map_err(|e| CaseError::Data(format!("{}: {e}", path.display())))?;
        DataSet::parse(&text, &path.display().to_string())
    }

    /// Loads `source` from the directory named by the environment variable
    /// when it is set, otherwise from the copy compiled into the library.
    pub fn load(source: DataSource) -> Result<DataSet, CaseError> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => DataSet::from_path(&PathBuf::from(dir).join(source.file_name())),
            None => DataSet::parse(source.bundled(), source.file_name()),
        }
    }
}
