//! CSV and JSONL readers for raw documents. Bad records are collected and
//! reading continues.

use std::io::{BufRead, Read};

use serde_json::Value;

use super::RawDocument;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    /// 1-based record number (data row for CSV, line for JSONL).
    pub record: usize,
    pub doc_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub docs: Vec<RawDocument>,
    pub failures: Vec<RecordError>,
}

impl IngestReport {
    pub fn records(&self) -> usize {
        self.docs.len() + self.failures.len()
    }

    fn fail(&mut self, record: usize, doc_id: Option<String>, message: impl Into<String>) {
        let message = message.into();
        log::warn!("skipping record {record} ({doc_id:?}): {message}");
        self.failures.push(RecordError {
            record,
            doc_id,
            message,
        });
    }
}

/// Reads a headed CSV. A missing id or text column in the header fails the
/// whole read; per-row problems are recorded as failures.
pub fn read_csv<R: Read>(reader: R, id_col: &str, text_col: &str) -> Result<IngestReport, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let (id_idx, text_idx) = match (find(id_col), find(text_col)) {
        (Some(i), Some(t)) => (i, t),
        _ => {
            return Err(csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("CSV header lacks column {id_col:?} or {text_col:?}"),
            )))
        }
    };

    let mut report = IngestReport::default();
    for (i, rec) in rdr.records().enumerate() {
        let n = i + 1;
        match rec {
            Err(e) => report.fail(n, None, e.to_string()),
            Ok(rec) => {
                let id = rec.get(id_idx).map(str::to_owned);
                match (id, rec.get(text_idx)) {
                    (Some(id), _) if id.is_empty() => report.fail(n, None, "empty id"),
                    (Some(id), Some(text)) => report.docs.push(RawDocument::new(id, text)),
                    (id, None) => report.fail(n, id, "missing text field"),
                    (None, _) => report.fail(n, None, "missing id field"),
                }
            }
        }
    }
    Ok(report)
}

/// Reads one JSON object per line. Ids may be strings or numbers; blank
/// lines are skipped.
pub fn read_jsonl<R: BufRead>(reader: R, id_key: &str, text_key: &str) -> std::io::Result<IngestReport> {
    let mut report = IngestReport::default();
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                report.fail(n, None, format!("invalid JSON: {e}"));
                continue;
            }
        };
        let id = match value.get(id_key) {
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            Some(Value::Number(x)) => x.to_string(),
            _ => {
                report.fail(n, None, format!("missing or invalid {id_key:?}"));
                continue;
            }
        };
        match value.get(text_key) {
            Some(Value::String(t)) => report.docs.push(RawDocument::new(id, t.clone())),
            _ => report.fail(n, Some(id), format!("missing or invalid {text_key:?}")),
        }
    }
    Ok(report)
}
