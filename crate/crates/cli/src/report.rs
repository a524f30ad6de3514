use serde_json::{json, Map, Value};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub tol: Option<f64>,
    pub pass: bool,
}

/// Collected checks of one command run, plus free-form tables.
#[derive(Debug, Default)]
pub struct Report {
    pub command: String,
    pub config: Map<String, Value>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub data: Map<String, Value>,
    pub seconds: f64,
}

impl Report {
    pub fn new(command: &str, config: Map<String, Value>) -> Self {
        Report {
            command: command.to_string(),
            config,
            ..Default::default()
        }
    }

    /// `actual ≤ tol`.
    pub fn small(&mut self, name: &str, actual: f64, tol: f64) {
        self.checks.push(Check {
            name: name.into(),
            expected: json!(0.0),
            actual: json!(actual),
            tol: Some(tol),
            pass: actual <= tol,
        });
    }

    pub fn exact<T: Into<Value> + PartialEq + Clone>(&mut self, name: &str, expected: T, actual: T) {
        self.checks.push(Check {
            name: name.into(),
            pass: expected == actual,
            expected: expected.into(),
            actual: actual.into(),
            tol: None,
        });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn verdict(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "expected": c.expected,
                    "actual": c.actual,
                    "tol": c.tol,
                    "pass": c.pass,
                })
            })
            .collect();
        json!({
            "command": self.command,
            "config": self.config,
            "checks": checks,
            "verdict": if self.verdict() { "pass" } else { "fail" },
            "seconds": self.seconds,
            "notes": self.notes,
            "data": self.data,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.command);
        for c in &self.checks {
            let tol = c.tol.map(|t| format!(", tol {t:e}")).unwrap_or_default();
            s.push_str(&format!(
                "  [{}] {}: {} (expected {}{tol})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.actual,
                c.expected
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s.push_str(&format!("verdict: {}\n", if self.verdict() { "pass" } else { "fail" }));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_is_the_conjunction() {
        let mut r = Report::new("x", Map::new());
        r.small("a", 1e-12, 1e-10);
        assert!(r.verdict());
        r.exact("b", true, false);
        assert!(!r.verdict());
        let v = r.to_json();
        assert_eq!(v["verdict"], "fail");
        assert_eq!(v["checks"][0]["tol"], json!(1e-10));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys[..5], ["command", "config", "checks", "verdict", "seconds"]);
    }
}
