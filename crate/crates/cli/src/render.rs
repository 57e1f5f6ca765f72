//! Output formats. JSON carries full doubles; pretty output uses six
//! significant digits; CSV is used for tables.

use anyhow::Result;
use leakgame::matrix::LabeledMatrix;
use leakgame::report::sig6;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// What a command produced, before formatting.
pub struct Report {
    pub json: Value,
    /// tabular form, when the command has one
    pub table: Option<LabeledMatrix>,
    /// `quantity,value` rows appended after the CSV table
    pub summary: Vec<(String, f64)>,
    /// replaces the generic pretty rendering
    pub pretty: Option<String>,
    pub exit: u8,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Self { json, table: None, summary: vec![], pretty: None, exit: 0 }
    }

    pub fn with_table(mut self, m: LabeledMatrix) -> Self {
        self.table = Some(m);
        self
    }

    pub fn with_summary(mut self, rows: Vec<(String, f64)>) -> Self {
        self.summary = rows;
        self
    }

    pub fn with_pretty(mut self, text: String) -> Self {
        self.pretty = Some(text);
        self
    }

    pub fn exit(mut self, code: u8) -> Self {
        self.exit = code;
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.json)? + "\n",
            Format::Csv => {
                let mut out = match &self.table {
                    Some(m) => matrix_csv(m)?,
                    None => flat_csv(&self.json)?,
                };
                if !self.summary.is_empty() {
                    if self.table.is_some() {
                        out.push('\n');
                    }
                    out += &pairs_csv(&self.summary)?;
                }
                out
            }
            Format::Pretty => {
                if let Some(p) = &self.pretty {
                    return Ok(p.clone());
                }
                let mut out = String::new();
                match &self.table {
                    Some(m) => {
                        out += &matrix_pretty(m);
                        if !self.summary.is_empty() {
                            out.push('\n');
                        }
                        for (k, v) in &self.summary {
                            out += &format!("{k}: {}\n", sig6(*v));
                        }
                    }
                    None => pretty_value(&self.json, 0, &mut out),
                }
                out
            }
        })
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().flexible(true).from_writer(vec![])
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn matrix_csv(m: &LabeledMatrix) -> Result<String> {
    let mut w = writer();
    let mut head = vec![String::new()];
    head.extend(m.cols().iter().map(|c| c.to_string()));
    w.write_record(&head)?;
    for (r, label) in m.rows().iter().enumerate() {
        let mut rec = vec![label.to_string()];
        rec.extend(m.row(r).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    finish(w)
}

fn pairs_csv(rows: &[(String, f64)]) -> Result<String> {
    let mut w = writer();
    w.write_record(["quantity", "value"])?;
    for (k, v) in rows {
        w.write_record([k.as_str(), &v.to_string()])?;
    }
    finish(w)
}

/// Flattens nested objects into `path,value` rows.
fn flat_csv(v: &Value) -> Result<String> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            x => out.push((prefix.to_string(), x.to_string())),
        }
    }
    let mut rows = vec![];
    walk("", v, &mut rows);
    let mut w = writer();
    w.write_record(["key", "value"])?;
    for (k, x) in rows {
        w.write_record([k, x])?;
    }
    finish(w)
}

pub fn matrix_pretty(m: &LabeledMatrix) -> String {
    let mut cells: Vec<Vec<String>> = vec![std::iter::once(String::new()).chain(m.cols().iter().map(|c| c.to_string())).collect()];
    for (r, label) in m.rows().iter().enumerate() {
        cells.push(std::iter::once(label.to_string()).chain(m.row(r).iter().map(|&v| sig6(v))).collect());
    }
    let widths: Vec<usize> =
        (0..cells[0].len()).map(|k| cells.iter().map(|row| row[k].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
        out += line.join("  ").trim_end();
        out.push('\n');
    }
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) if n.is_f64() => Some(n.as_f64().map_or_else(|| n.to_string(), sig6)),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Null => Some("-".into()),
        _ => None,
    }
}

fn pretty_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => *out += &format!("{pad}{k}: {s}\n"),
                    None if x.as_array().is_some_and(|a| a.iter().all(|e| scalar(e).is_some())) => {
                        let items: Vec<String> = x.as_array().unwrap().iter().filter_map(scalar).collect();
                        *out += &format!("{pad}{k}: [{}]\n", items.join(", "));
                    }
                    None => {
                        *out += &format!("{pad}{k}:\n");
                        pretty_value(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                match scalar(x) {
                    Some(s) => *out += &format!("{pad}- {s}\n"),
                    None => {
                        *out += &format!("{pad}-\n");
                        pretty_value(x, indent + 1, out);
                    }
                }
            }
        }
        x => *out += &format!("{pad}{}\n", scalar(x).unwrap_or_default()),
    }
}
