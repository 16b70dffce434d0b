use std::fmt;
use std::time::Duration;

/// One pass/fail line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Line-oriented result of a run. `body()` is deterministic; timings and
/// notes are kept apart.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub config_hash: String,
    pub lines: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub timings: Vec<(String, Duration)>,
    /// Run-dependent remarks such as cache hits; not part of the body.
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, config_hash: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            config_hash: config_hash.into(),
            ..Default::default()
        }
    }

    pub fn line(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> bool {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    pub fn time(&mut self, stage: &str, d: Duration) {
        self.timings.push((stage.to_string(), d));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn body(&self) -> String {
        let mut out = format!(
            "command = {}\nconfig = {}\n",
            self.command, self.config_hash
        );
        for (k, v) in &self.lines {
            out.push_str(&format!("{k} = {v}\n"));
        }
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("check {} = {status} {}\n", c.name, c.detail));
        }
        out.push_str(&format!(
            "status = {}\n",
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        out
    }

    /// Timings and notes, one per line.
    pub fn diagnostics(&self) -> String {
        let mut out: String = self.notes.iter().map(|n| format!("note {n}\n")).collect();
        for (s, d) in &self.timings {
            out.push_str(&format!("time {s} = {:.3}s\n", d.as_secs_f64()));
        }
        out
    }
}
