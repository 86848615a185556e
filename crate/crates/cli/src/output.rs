use std::io::Write;
use std::path::PathBuf;

use percolab_core::experiments::output::{to_csv, to_json};
use serde::Serialize;

use crate::commands::CliError;
use crate::Format;

/// Where and how a command writes its table.
pub struct Sink {
    format: Format,
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(format: Format, out: Option<PathBuf>) -> Self {
        Sink { format, out }
    }

    /// Rows must start with a `schema_version` field.
    pub fn table<T: Serialize>(&self, kind: &str, rows: &[T]) -> Result<(), CliError> {
        let text = match self.format {
            Format::Csv => to_csv(rows)?,
            Format::Json => to_json(kind, &rows)?,
        };
        self.write(&text)
    }

    pub fn write(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::Io("<stdout>".into(), e))
            }
        }
    }
}
