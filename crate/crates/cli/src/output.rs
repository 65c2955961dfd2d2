//! CSV tables behind a `#` metadata block; no timestamps, so identical flags
//! give identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::Value;

use crate::error::{usage, CliError};

pub enum Document {
    Csv(Table),
    /// A single result object; metadata goes inside it.
    Json(Value),
}

#[derive(Debug, Default)]
pub struct Table {
    /// `(key, value)` lines of the metadata block, after the common ones.
    pub meta: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Verdict or fit; repeated in the metadata block and written to `--json`.
    pub json: Option<Value>,
    /// False when some row carries an unconverged partial sum.
    pub converged: bool,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, converged: true, ..Self::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_owned(), value.to_string()));
    }
}

/// Shortest round-trip form, so reruns and parsers see the same number.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_table(
    table: &Table,
    common: &[(String, String)],
    out: Option<&Path>,
    json: Option<&Path>,
) -> Result<(), CliError> {
    let mut w = open(out)?;
    for (k, v) in common.iter().chain(&table.meta) {
        writeln!(w, "# {k}: {v}")?;
    }
    writeln!(w, "# all_converged: {}", table.converged)?;
    match (&table.json, json) {
        (Some(v), path) => {
            writeln!(w, "# result: {v}")?;
            if let Some(p) = path {
                let mut f = BufWriter::new(File::create(p)?);
                serde_json::to_writer_pretty(&mut f, v).map_err(io::Error::from)?;
                writeln!(f)?;
                f.flush()?;
            }
        }
        (None, Some(_)) => return Err(usage("--json applies only to unitarity and spectrum --scan omega")),
        (None, None) => {}
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.header)?;
    for row in &table.rows {
        csv.write_record(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// A JSON document with the metadata folded in as an object.
pub fn write_json(mut doc: Value, common: &[(String, String)], out: Option<&Path>) -> Result<(), CliError> {
    let meta: serde_json::Map<String, Value> = common.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
    doc["metadata"] = Value::Object(meta);
    let mut w = open(out)?;
    serde_json::to_writer_pretty(&mut w, &doc).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
