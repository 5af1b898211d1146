//! Line-delimited JSON helpers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::for_each_line;

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_jsonl_to(&mut w, items).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_jsonl_to<W: Write, T: Serialize>(w: &mut W, items: &[T]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut *w, item)?;
        w.write_all(b"\n").map_err(|e| Error::io("<writer>", e))?;
    }
    Ok(())
}

/// A record that failed to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadLine {
    pub line: usize,
    pub message: String,
}

/// Reads every parseable record; malformed lines are returned separately.
pub fn read_jsonl_lenient<T: DeserializeOwned>(path: &Path) -> Result<(Vec<T>, Vec<BadLine>)> {
    let mut items = Vec::new();
    let mut bad = Vec::new();
    for_each_line(path, |line, text| match serde_json::from_str(text) {
        Ok(item) => items.push(item),
        Err(e) => bad.push(BadLine {
            line,
            message: e.to_string(),
        }),
    })?;
    Ok((items, bad))
}

/// Reads every record, failing on the first malformed line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let (items, bad) = read_jsonl_lenient(path)?;
    match bad.into_iter().next() {
        Some(b) => Err(Error::Record {
            path: path.into(),
            line: b.line,
            message: b.message,
        }),
        None => Ok(items),
    }
}
