//! CSV and JSON writers shared by the sweep runner and the CLI.
//!
//! Row types start with a `schema_version` field so that every CSV record
//! carries it; JSON documents carry `schema_version`, a `kind` tag and the
//! build id at the top level.

use serde::Serialize;

use super::ExperimentError;

pub const SCHEMA_VERSION: u32 = 1;

/// Build identifier recorded in outputs: `PERCOLAB_BUILD_ID` at compile
/// time, or the package version.
pub fn build_id() -> &'static str {
    option_env!("PERCOLAB_BUILD_ID").unwrap_or(concat!("percolab-", env!("CARGO_PKG_VERSION")))
}

/// CSV with a header row.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| ExperimentError::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| ExperimentError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ExperimentError::Output(e.to_string()))
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    build_id: &'a str,
    data: &'a T,
}

/// Pretty JSON document wrapping `data`.
pub fn to_json<T: Serialize>(kind: &str, data: &T) -> Result<String, ExperimentError> {
    let doc = Document { schema_version: SCHEMA_VERSION, kind, build_id: build_id(), data };
    let mut s =
        serde_json::to_string_pretty(&doc).map_err(|e| ExperimentError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
