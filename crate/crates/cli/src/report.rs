//! Run reports, rendered as plain text or JSON.

use std::fmt::Write;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    /// A force in kN.
    Load(f64),
    /// An initial and final force in kN.
    LoadPair {
        initial: f64,
        r#final: f64,
    },
    /// A dimensionless interaction coefficient.
    Coefficient(f64),
    /// A dimensionless ratio such as a relative error.
    Ratio(f64),
    Count(usize),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Item {
    pub key: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub title: String,
    pub items: Vec<Item>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: Value) -> &mut Self {
        self.items.push(Item {
            key: key.into(),
            value,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Vec<ConfigEntry>,
    pub sections: Vec<Section>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config: Vec<(String, String)>) -> Self {
        Report {
            command: command.to_string(),
            config: config
                .into_iter()
                .map(|(key, value)| ConfigEntry { key, value })
                .collect(),
            sections: Vec::new(),
            warnings: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "boltseq {}", self.command);
        let _ = writeln!(s, "\n[configuration]");
        for e in &self.config {
            let _ = writeln!(s, "  {} = {}", e.key, e.value);
        }
        for section in &self.sections {
            let _ = writeln!(s, "\n[{}]", section.title);
            for item in &section.items {
                let _ = writeln!(s, "  {}: {}", item.key, render(&item.value));
            }
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(s, "\n[warnings]");
            for w in &self.warnings {
                let _ = writeln!(s, "  {w}");
            }
        }
        if !self.files.is_empty() {
            let _ = writeln!(s, "\n[files]");
            for f in &self.files {
                let _ = writeln!(s, "  {f}");
            }
        }
        s
    }
}

/// Fixed-precision text with negative zero folded to zero.
fn fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn kn(v: f64) -> String {
    format!("{} kN", fixed(v, 1))
}

fn render(v: &Value) -> String {
    match v {
        Value::Load(x) => kn(*x),
        Value::LoadPair { initial, r#final } => {
            format!("initial {}, final {}", kn(*initial), kn(*r#final))
        }
        Value::Coefficient(x) => fixed(*x, 4),
        Value::Ratio(x) => format!("{x:.3e}"),
        Value::Count(n) => n.to_string(),
        Value::Text(t) => t.clone(),
    }
}
