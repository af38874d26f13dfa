//! Benchmark records and their CSV and JSON serializations.

use std::collections::BTreeMap;
use std::io::Write;

use matfrechet::{Error, Result};
use serde::{Deserialize, Serialize};

/// Version of the column set below; bumped on any change to it.
pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema of the JSON output document.
pub const SCHEMA_JSON: &str = include_str!("../schema/bench_record.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub schema_version: u32,
    pub experiment: String,
    pub method: String,
    pub function: String,
    pub matrix: String,
    pub rule: Option<String>,
    pub n: usize,
    pub k: usize,
    pub m: Option<usize>,
    pub seed: u64,
    pub elapsed_seconds: f64,
    pub rel_error: Option<f64>,
    pub value: Option<f64>,
}

pub type Summary = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchDocument {
    pub schema_version: u32,
    pub experiment: String,
    pub records: Vec<BenchRecord>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Streams CSV rows as they arrive; JSON is written as one document by [`RecordWriter::finish`].
pub struct RecordWriter<W: Write> {
    format: OutputFormat,
    experiment: String,
    csv: Option<csv::Writer<W>>,
    json: Option<W>,
    records: Vec<BenchRecord>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, format: OutputFormat, experiment: &str) -> Self {
        let (csv, json) = match format {
            OutputFormat::Csv => (Some(csv::Writer::from_writer(out)), None),
            OutputFormat::Json => (None, Some(out)),
        };
        Self {
            format,
            experiment: experiment.to_string(),
            csv,
            json,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: BenchRecord) -> Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.serialize(&record).map_err(io_err)?;
            w.flush()?;
        }
        if self.format == OutputFormat::Json {
            self.records.push(record);
        }
        Ok(())
    }

    /// Completes the output; `error` marks a run that stopped early.
    pub fn finish(mut self, summary: Summary, error: Option<String>) -> Result<()> {
        if let Some(mut w) = self.csv.take() {
            w.flush()?;
            return Ok(());
        }
        let doc = BenchDocument {
            schema_version: SCHEMA_VERSION,
            experiment: self.experiment.clone(),
            records: std::mem::take(&mut self.records),
            summary,
            error,
        };
        let mut out = self.json.take().expect("json writer present");
        serde_json::to_writer_pretty(&mut out, &doc).map_err(io_err)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }
}

pub fn read_csv(text: &str) -> Result<Vec<BenchRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(io_err)
}
