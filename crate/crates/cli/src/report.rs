use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckVerdict {
    Pass,
    Fail,
    Boundary,
    Undecided,
}

impl CheckVerdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "FAIL",
            Self::Boundary => "boundary",
            Self::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: CheckVerdict,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub results: Vec<Check>,
    pub elapsed_ms: f64,
}

pub struct ReportBuilder {
    command: String,
    inputs: Vec<InputDigest>,
    results: Vec<Check>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            results: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        let hash = Sha256::digest(bytes);
        let mut hex = String::with_capacity(64);
        for b in hash {
            let _ = write!(hex, "{b:02x}");
        }
        self.inputs.push(InputDigest {
            path: path.to_string(),
            sha256: hex,
        });
    }

    pub fn check(&mut self, name: &str, verdict: CheckVerdict, details: Value) {
        self.results.push(Check {
            name: name.to_string(),
            verdict,
            details,
        });
    }

    pub fn finish(self) -> RunReport {
        RunReport {
            command: self.command,
            inputs: self.inputs,
            results: self.results,
            elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
        }
    }
}

impl RunReport {
    /// Fail beats undecided beats pass; boundary counts as a pass.
    pub fn exit_code(&self) -> i32 {
        let has = |v| self.results.iter().any(|c| c.verdict == v);
        if has(CheckVerdict::Fail) {
            2
        } else if has(CheckVerdict::Undecided) {
            3
        } else {
            0
        }
    }

    pub fn table(&self) -> String {
        let width = self.results.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = format!("{} ({:.1} ms)\n", self.command, self.elapsed_ms);
        for c in &self.results {
            let _ = writeln!(out, "  {:<9} {:<width$}  {}", c.verdict.label(), c.name, compact(&c.details));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", compact(v)))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.3e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn exit_code_priorities() {
        let mut r = ReportBuilder::new("t");
        r.check("a", CheckVerdict::Pass, json!({}));
        r.check("b", CheckVerdict::Boundary, json!({}));
        assert_eq!(r.finish().exit_code(), 0);
        let mut r = ReportBuilder::new("t");
        r.check("a", CheckVerdict::Undecided, json!({}));
        assert_eq!(r.finish().exit_code(), 3);
        let mut r = ReportBuilder::new("t");
        r.check("a", CheckVerdict::Undecided, json!({}));
        r.check("b", CheckVerdict::Fail, json!({}));
        assert_eq!(r.finish().exit_code(), 2);
    }

    #[test]
    fn digest_is_sha256() {
        let mut r = ReportBuilder::new("t");
        r.input("x", b"abc");
        assert_eq!(
            r.finish().inputs[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn table_lists_every_check() {
        let mut r = ReportBuilder::new("demo");
        r.check("dim", CheckVerdict::Pass, json!({"dim": 6, "gap": 0.5}));
        r.check("cone", CheckVerdict::Fail, json!({"note": "x"}));
        let t = r.finish().table();
        assert!(t.contains("pass") && t.contains("dim=6") && t.contains("FAIL") && t.contains("note=x"));
    }
}
