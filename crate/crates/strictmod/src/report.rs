//! Reports: a human part, then a marker line, then a JSON block.

use serde_json::{json, Map, Value};

pub const MACHINE_MARKER: &str = "=== machine ===";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// Precision at which the verdict was decided, when it depends on one.
    pub precision: Option<i64>,
    pub detail: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub prec: Option<i64>,
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
    pub result: Map<String, Value>,
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str, input: &str, prec: Option<i64>) -> Self {
        Report {
            command: command.to_string(),
            input: input.to_string(),
            prec,
            lines: Vec::new(),
            checks: Vec::new(),
            result: Map::new(),
            error: None,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn check(&mut self, name: &str, holds: bool, precision: Option<i64>) {
        self.checks.push(Check { name: name.to_string(), holds, precision, detail: None });
    }

    pub fn check_detail(&mut self, name: &str, holds: bool, precision: Option<i64>, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), holds, precision, detail: Some(detail.into()) });
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.result.insert(key.to_string(), v);
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.error = Some(msg.into());
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.holds)
    }

    pub fn status(&self) -> &'static str {
        if self.error.is_some() {
            "error"
        } else if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn machine(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "holds": c.holds, "precision": c.precision, "detail": c.detail}))
            .collect();
        json!({
            "command": self.command,
            "input": self.input,
            "prec": self.prec,
            "status": self.status(),
            "error": self.error,
            "checks": checks,
            "result": Value::Object(self.result.clone()),
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("strictmod {} {}\n", self.command, self.input));
        if let Some(p) = self.prec {
            out.push_str(&format!("working precision: {p}\n"));
        }
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        if !self.checks.is_empty() {
            out.push_str("checks:\n");
            for c in &self.checks {
                let mark = if c.holds { "pass" } else { "FAIL" };
                out.push_str(&format!("  [{mark}] {}", c.name));
                if let Some(p) = c.precision {
                    out.push_str(&format!(" (decided at precision {p})"));
                }
                if let Some(d) = &c.detail {
                    out.push_str(&format!(": {d}"));
                }
                out.push('\n');
            }
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("error: {e}\n"));
        }
        out.push_str(&format!("status: {}\n", self.status()));
        out.push_str(MACHINE_MARKER);
        out.push('\n');
        out.push_str(&serde_json::to_string_pretty(&self.machine()).expect("json"));
        out.push('\n');
        out
    }
}

/// The JSON block of a rendered report.
pub fn machine_block(report: &str) -> Option<Value> {
    let (_, tail) = report.split_once(MACHINE_MARKER)?;
    serde_json::from_str(tail.trim()).ok()
}
