//! Report emission: JSON on stdout with round-trip-safe floats, optional
//! CSV plot data written to files. Stdout must be byte-identical across
//! runs for identical inputs, so nothing time- or machine-dependent is
//! ever serialized here.

use serde::Serialize;
use serde_json::Value;
use std::io::{self, Write};
use std::path::Path;

/// Explains why the JSON report has no wall-time number in it.
pub const WALL_TIME_NOTE: &str =
    "wall time is printed to stderr so stdout stays byte-identical across runs";

/// Serializes every float with 17 significant digits (scientific form),
/// enough to round-trip any f64 exactly.
struct SciFloats;

impl serde_json::ser::Formatter for SciFloats {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Render a JSON value compactly with [`SciFloats`] number formatting.
pub fn render_json(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFloats);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    String::from_utf8(buf).expect("serialized JSON is UTF-8")
}

/// Format one float for a CSV cell, matching the JSON precision.
pub fn csv_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Write a CSV table with a header row.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> io::Result<()> {
    let mut text = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text)
}
