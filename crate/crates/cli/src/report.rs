//! Versioned JSON envelope shared by every subcommand, plus plain-text
//! rendering.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Bumped whenever the envelope or any embedded payload changes shape.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub m: i64,
    pub l: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u64,
    /// `"hit"` or `"miss"` when the cache was consulted.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cache: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group: Option<Group>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub normalized: Option<String>,
    pub result: Value,
    pub certificates: Value,
    pub timing: Timing,
}

impl ReportEnvelope {
    pub fn new(command: &str, group: Option<Group>) -> ReportEnvelope {
        ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            group,
            input: None,
            normalized: None,
            result: Value::Null,
            certificates: Value::Object(Default::default()),
            timing: Timing { elapsed_ms: 0, cache: None },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes") + "\n"
    }
}

/// Formats `{"num": p, "den": q}` as `p/q` (or `p` when `q = 1`).
pub fn rational_text(v: &Value) -> Option<String> {
    let num = v.get("num")?.as_str()?;
    let den = v.get("den")?.as_str()?;
    Some(if den == "1" { num.to_string() } else { format!("{num}/{den}") })
}

/// Two-column table; the key column is padded, values are never truncated.
pub fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

pub fn field(v: &Value, key: &str) -> String {
    match v.get(key) {
        None | Some(Value::Null) => "-".into(),
        Some(x) => rational_text(x).unwrap_or_else(|| match x {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }),
    }
}
