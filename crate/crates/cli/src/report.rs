//! CSV result rows.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub id: String,
    pub method: String,
    #[serde(rename = "M")]
    pub space_intervals: Option<usize>,
    #[serde(rename = "N")]
    pub time_steps: Option<usize>,
    pub q: Option<usize>,
    #[serde(rename = "N_A")]
    pub aux_intervals: Option<usize>,
    pub price: f64,
    pub reference: Option<f64>,
    #[serde(rename = "relError")]
    pub rel_error: Option<f64>,
    #[serde(rename = "wallMillis")]
    pub wall_millis: Option<f64>,
}

pub fn relative_error(price: f64, reference: Option<f64>) -> Option<f64> {
    reference.map(|r| (price - r) / r)
}

/// Writes `rows` with a header, replacing any existing file.
pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
