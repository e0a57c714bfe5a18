//! Human-readable and JSON renderings of a command's outcome.

use serde_json::Value;

/// How a command ended. Input errors never produce a report; they exit 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The input was well formed but mathematically rejected.
    Rejected,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Rejected => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub title: String,
    pub lines: Vec<(String, String)>,
    pub json: Value,
    pub status: Status,
}

impl Report {
    pub fn new(title: impl Into<String>, json: Value) -> Self {
        Report {
            title: title.into(),
            lines: Vec::new(),
            json,
            status: Status::Success,
        }
    }

    pub fn line(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.lines.push((key.into(), value.to_string()));
        self
    }

    pub fn reject(mut self) -> Self {
        self.status = Status::Rejected;
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            return serde_json::to_string_pretty(&self.json).expect("report is valid JSON");
        }
        let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = self.title.clone();
        for (k, v) in &self.lines {
            out.push_str(&format!("\n  {k:<width$}  {v}"));
        }
        out
    }
}
