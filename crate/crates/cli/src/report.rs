//! Command reports: a pass flag plus named fields, rendered as text or JSON.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), passed: true, fields: Map::new() }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.fields.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn fail_if(&mut self, cond: bool) -> &mut Self {
        if cond {
            self.passed = false;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// One `key: value` line per field; arrays of strings go one per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, if self.passed { "PASS" } else { "FAIL" });
        for (k, v) in &self.fields {
            match v {
                Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_string) => {
                    out.push_str(&format!("  {k}:\n"));
                    for item in items {
                        out.push_str(&format!("    {}\n", item.as_str().unwrap_or_default()));
                    }
                }
                Value::String(s) => out.push_str(&format!("  {k}: {s}\n")),
                Value::Number(n) => out.push_str(&format!("  {k}: {}\n", fmt_number(n))),
                other => out.push_str(&format!("  {k}: {other}\n")),
            }
        }
        out
    }
}

fn fmt_number(n: &serde_json::Number) -> String {
    match (n.as_u64(), n.as_i64(), n.as_f64()) {
        (Some(u), _, _) => u.to_string(),
        (_, Some(i), _) => i.to_string(),
        (_, _, Some(f)) if f != 0.0 && (f.abs() < 1e-3 || f.abs() >= 1e6) => format!("{f:.3e}"),
        (_, _, Some(f)) => format!("{f:.6}"),
        _ => n.to_string(),
    }
}
