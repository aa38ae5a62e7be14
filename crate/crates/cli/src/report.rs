//! Schema-versioned reports. JSON is canonical; csv and text are
//! projections of the same records.

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Anchor for records that only exercise input/output plumbing.
pub const PLUMBING: &str = "plumbing";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub witness: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            records: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        anchor: &str,
        ok: bool,
        witness: impl Serialize,
    ) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.summary.total += 1;
        if ok {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self.records.push(Record {
            name: name.into(),
            anchor: anchor.to_string(),
            status,
            witness: serde_json::to_value(witness).unwrap_or(Value::Null),
        });
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["name", "anchor", "status", "witness"])?;
                for r in &self.records {
                    let status = if r.status == Status::Pass {
                        "pass"
                    } else {
                        "fail"
                    };
                    w.write_record([
                        r.name.as_str(),
                        r.anchor.as_str(),
                        status,
                        &r.witness.to_string(),
                    ])?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| csv::Error::from(e.into_error()))?;
                Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
            }
            Format::Text => {
                let mut out = format!(
                    "{} (schema {}, nestrix {})\n",
                    self.command, self.schema, self.version
                );
                for r in &self.records {
                    let tag = if r.status == Status::Pass {
                        "PASS"
                    } else {
                        "FAIL"
                    };
                    out.push_str(&format!("{tag} {} [{}] {}\n", r.name, r.anchor, r.witness));
                }
                out.push_str(&format!(
                    "{} checks, {} passed, {} failed\n",
                    self.summary.total, self.summary.passed, self.summary.failed
                ));
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections_agree_on_counts() {
        let mut r = Report::new("demo", &serde_json::json!({"seed": 1}));
        r.push("a", PLUMBING, true, "x");
        r.push(
            "b, with comma",
            PLUMBING,
            false,
            serde_json::json!({"k": [1, 2]}),
        );
        assert!(!r.passed());
        let csv = r.render(Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("\"b, with comma\""));
        let text = r.render(Format::Text).unwrap();
        assert!(text.ends_with("2 checks, 1 passed, 1 failed\n"));
        let json: Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(json["summary"]["failed"], 1);
    }
}
