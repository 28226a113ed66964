use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const CSV_HEADER: &str =
    "method,hull_size,scenario,median_ns,mean_ns,p99_ns,mean_vertex_visits,mean_face_visits,checksum";

/// One CSV row. Timing and count fields are empty on skipped rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: String,
    pub hull_size: usize,
    pub scenario: String,
    pub median_ns: Option<f64>,
    pub mean_ns: Option<f64>,
    pub p99_ns: Option<f64>,
    pub mean_vertex_visits: Option<f64>,
    pub mean_face_visits: Option<f64>,
    pub checksum: Option<f64>,
}

impl BenchRecord {
    /// Placeholder row for a method or hull that could not be built.
    pub fn skipped(method: &str, hull_size: usize, scenario: &str) -> Self {
        BenchRecord {
            method: method.to_string(),
            hull_size,
            scenario: scenario.to_string(),
            median_ns: None,
            mean_ns: None,
            p99_ns: None,
            mean_vertex_visits: None,
            mean_face_visits: None,
            checksum: None,
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.median_ns.is_none()
    }
}

/// Writes records as CSV to `path`, or to stdout when `path` is `None`.
pub fn write_records(records: &[BenchRecord], path: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(sink);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
