//! JSON/CSV emission.  Outputs are deterministic: struct field order is fixed
//! and floats use serde_json's shortest-roundtrip formatting.

use crate::{Common, CliError};
use microcosm_core::matcore::CMatrix;
use serde::Serialize;
use std::io::Write;

pub const SCHEMA_VERSION: u32 = 1;

/// Matrix as nested [re, im] pairs.
pub fn mat_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn write_json<T: Serialize>(common: &Common, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::numerical(format!("serialization: {e}")))?;
    match &common.out {
        Some(path) => {
            std::fs::write(path, text + "\n")?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}

/// A sweep row: parameter value, a matrix sample, and the residual of the
/// governing equation at that sample.
pub struct SweepRow {
    pub u: f64,
    pub entries: Vec<(String, f64)>,
    pub residual: Option<f64>,
}

pub fn write_csv(common: &Common, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut text = String::new();
    if let Some(first) = rows.first() {
        text.push('u');
        for (name, _) in &first.entries {
            text.push(',');
            text.push_str(name);
        }
        text.push_str(",residual\n");
    }
    for row in rows {
        text.push_str(&format!("{}", row.u));
        for (_, v) in &row.entries {
            text.push_str(&format!(",{v}"));
        }
        match row.residual {
            Some(r) => text.push_str(&format!(",{r}\n")),
            None => text.push_str(",\n"),
        }
    }
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Flatten a complex matrix into named CSV columns (re/im per entry).
pub fn csv_entries(prefix: &str, m: &CMatrix) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push((format!("{prefix}{}{}_re", i + 1, j + 1), m[(i, j)].re));
            out.push((format!("{prefix}{}{}_im", i + 1, j + 1), m[(i, j)].im));
        }
    }
    out
}
