//! Record rendering as CSV, JSON or an aligned text table.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" | "txt" => Ok(Format::Text),
            other => Err(Error::param(format!("unknown format '{other}' (csv, json, text)"))),
        }
    }
}

/// One command's output: metadata, a table of records, trailing summary
/// lines and an optional hand-written human view.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Summary lines; `#` comments in CSV, a `summary` array in JSON.
    pub summary: Vec<Value>,
    pub text: Option<String>,
}

impl Report {
    pub fn new(meta: Map<String, Value>, columns: Vec<&'static str>) -> Self {
        Report { meta, columns, ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
            Format::Text => self.text.clone().unwrap_or_else(|| self.table()),
        }
    }

    fn meta_lines(&self, out: &mut String) {
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {}", plain(v));
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        self.meta_lines(&mut out);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| csv_cell(&plain(v))).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for s in &self.summary {
            let _ = writeln!(out, "# summary: {s}");
        }
        out
    }

    fn json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(self.meta.clone()));
        doc.insert("records".into(), Value::Array(records));
        if !self.summary.is_empty() {
            doc.insert("summary".into(), Value::Array(self.summary.clone()));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
        s.push('\n');
        s
    }

    fn table(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(plain).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        self.meta_lines(&mut out);
        let line = |items: Vec<&str>| -> String {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(self.columns.clone()));
        for r in &cells {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
        }
        for s in &self.summary {
            let _ = writeln!(out, "{}", plain(s));
        }
        out
    }
}

/// Strings unquoted, nulls empty, everything else as JSON. Floats use the
/// shortest representation that round-trips.
pub fn plain(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// JSON number, or null for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut meta = Map::new();
        meta.insert("seed".into(), json!(7));
        let mut r = Report::new(meta, vec!["model", "d"]);
        r.push(vec![json!("hg"), num(0.1 + 0.2)]);
        r.push(vec![json!("a,b"), Value::Null]);
        r
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv);
        assert_eq!(s, "# seed: 7\nmodel,d\nhg,0.30000000000000004\n\"a,b\",\n");
    }

    #[test]
    fn json_round_trips_floats() {
        let x: f64 = 0.1 + 0.2;
        let v: Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(v["records"][0]["d"].as_f64().unwrap().to_bits(), x.to_bits());
        assert_eq!(v["meta"]["seed"], 7);
    }

    #[test]
    fn text_alignment() {
        let s = sample().render(Format::Text);
        let lines: Vec<&str> = s.lines().skip(1).collect();
        assert_eq!(lines[0].len(), lines[1].len());
        assert!(lines[0].starts_with("model ") && lines[0].ends_with(" d"));
    }
}
