//! Record emission. Every stream starts with a metadata record; tables are
//! written as CSV (metadata and other side records become `#` comment lines)
//! or as JSON Lines.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub struct Emitter {
    out: Box<dyn Write>,
    csv: bool,
    columns: Option<Vec<String>>,
}

impl Emitter {
    pub fn new(cfg: &RunConfig, subcommand: &str, table_default: bool) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match &cfg.output.path {
            Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
        };
        let csv = match cfg.output.format {
            Format::Auto => table_default,
            Format::Csv => true,
            Format::Jsonl => false,
        };
        let mut e = Self { out, csv, columns: None };
        e.side_record(json!({
            "record": "meta",
            "tool": "torbil",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": subcommand,
            "config_hash": cfg.hash(),
            "seed": cfg.seed,
        }))?;
        Ok(e)
    }

    /// A non-tabular record: a JSON line, or a `#` comment line in CSV.
    pub fn side_record(&mut self, v: Value) -> Result<(), CliError> {
        let line = serde_json::to_string(&v).map_err(|e| CliError::Io(e.to_string()))?;
        if self.csv {
            writeln!(self.out, "# {line}")?;
        } else {
            writeln!(self.out, "{line}")?;
        }
        Ok(())
    }

    /// A table row. Arrays are spread over `name_0, name_1, ...` columns in CSV.
    pub fn row(&mut self, v: Value) -> Result<(), CliError> {
        if !self.csv {
            return self.side_record(v);
        }
        let Value::Object(map) = v else { return Err(CliError::Io("table rows must be objects".into())) };
        let flat = flatten(map);
        let cols: Vec<String> = flat.iter().map(|(k, _)| k.clone()).collect();
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        match &self.columns {
            None => {
                w.write_record(&cols)?;
                self.columns = Some(cols);
            }
            Some(c) if *c != cols => return Err(CliError::Io("inconsistent table columns".into())),
            Some(_) => {}
        }
        w.write_record(flat.iter().map(|(_, s)| s.as_str()))?;
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.out.write_all(&bytes)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(map: Map<String, Value>) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (k, v) in map {
        match v {
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    out.push((format!("{k}_{i}"), cell(item)));
                }
            }
            Value::Object(inner) => {
                for (ik, iv) in inner {
                    out.push((format!("{k}_{ik}"), cell(&iv)));
                }
            }
            other => out.push((k, cell(&other))),
        }
    }
    out
}
