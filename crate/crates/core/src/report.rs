//! Machine-readable experiment reports. Serialization is deterministic: keyed
//! collections are BTree-ordered and floats print in shortest round-trip
//! form, so identical runs produce byte-identical JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    /// "<=" or ">=" relating measured to threshold.
    pub comparison: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_hash: Option<String>,
    pub seed: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub values: BTreeMap<String, f64>,
    pub criteria: Vec<CriterionRecord>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(command: &str, config_hash: String, seed: u64) -> Self {
        ExperimentReport {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            config_hash,
            calibration_hash: None,
            seed,
            params: BTreeMap::new(),
            values: BTreeMap::new(),
            criteria: Vec::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn value(&mut self, key: &str, value: f64) {
        // serde_json cannot carry non-finite numbers; encode them as huge
        // sentinels so a bad run still produces a readable report.
        let v = if value.is_finite() { value } else { f64::MAX };
        self.values.insert(key.to_string(), v);
    }

    pub fn check_le(&mut self, name: &str, measured: f64, threshold: f64) -> bool {
        let pass = measured.is_finite() && measured <= threshold;
        self.criteria.push(CriterionRecord {
            name: name.to_string(),
            measured: if measured.is_finite() { measured } else { f64::MAX },
            threshold,
            comparison: "<=".to_string(),
            pass,
        });
        self.pass &= pass;
        pass
    }

    pub fn check_ge(&mut self, name: &str, measured: f64, threshold: f64) -> bool {
        let pass = measured.is_finite() && measured >= threshold;
        self.criteria.push(CriterionRecord {
            name: name.to_string(),
            measured: if measured.is_finite() { measured } else { -f64::MAX },
            threshold,
            comparison: ">=".to_string(),
            pass,
        });
        self.pass &= pass;
        pass
    }

    /// |measured - center| <= tol as a single criterion.
    pub fn check_within(&mut self, name: &str, measured: f64, center: f64, tol: f64) -> bool {
        self.check_le(name, (measured - center).abs(), tol)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    /// One line per criterion, for terminal output.
    pub fn summary_lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| {
                format!(
                    "[{}] {}: measured {:.6e} {} {:.6e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.comparison,
                    c.threshold
                )
            })
            .collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Canonical hash of any serializable configuration.
pub fn config_hash<T: Serialize>(cfg: &T) -> Result<String> {
    Ok(sha256_hex(serde_json::to_string(cfg)?.as_bytes()))
}
