//! Spec-file parsing: full {n, form, omega, p} documents and the n = 2
//! shorthand {A, B, C, w}.

use crate::CliError;
use microcosm_core::matcore::{re, CMatrix};
use microcosm_core::planewave::{MetricForm, MicrocosmSpec};
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FullSpec {
    n: usize,
    form: String,
    omega: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShortSpec {
    /// optional, must be 2 when present
    n: Option<usize>,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "C")]
    c: f64,
    w: f64,
    form: Option<String>,
}

fn parse_form(s: &str) -> Result<MetricForm, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "brinkmann" => Ok(MetricForm::Brinkmann),
        "alekseevsky" => Ok(MetricForm::Alekseevsky),
        other => Err(CliError::validation(format!(
            "field `form`: expected \"brinkmann\" or \"alekseevsky\", got \"{other}\""
        ))),
    }
}

fn to_matrix(name: &str, n: usize, rows: &[Vec<f64>]) -> Result<CMatrix, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::validation(format!(
            "field `{name}`: expected an {n}×{n} array"
        )));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| re(rows[i][j])))
}

/// Load and validate a spec file; validation failures carry the offending
/// field or invariant in the message.
pub fn load_spec(path: &Path) -> Result<MicrocosmSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        CliError::validation(format!(
            "{}: parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;

    let spec = if value.get("omega").is_some() {
        let full: FullSpec = serde_json::from_value(value)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        let form = parse_form(&full.form)?;
        let omega = to_matrix("omega", full.n, &full.omega)?;
        let p = to_matrix("p", full.n, &full.p)?;
        MicrocosmSpec::new(omega, p, form).map_err(CliError::from)?
    } else {
        let short: ShortSpec = serde_json::from_value(value)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        if let Some(n) = short.n {
            if n != 2 {
                return Err(CliError::validation(
                    "shorthand {A,B,C,w} requires n = 2".to_string(),
                ));
            }
        }
        let form = match &short.form {
            Some(f) => parse_form(f)?,
            None => MetricForm::Alekseevsky,
        };
        let omega = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => re(-short.w),
            (1, 0) => re(short.w),
            _ => re(0.0),
        });
        let p = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => re(short.a + short.b),
            (1, 1) => re(short.a - short.b),
            _ => re(short.c),
        });
        MicrocosmSpec::new(omega, p, form).map_err(CliError::from)?
    };
    Ok(spec)
}
