//! Machine-readable run reports: structured JSON and a flat CSV of samples.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub coordinates: Vec<String>,
    pub grid: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub analyses: Vec<AnalysisRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub analysis: String,
    pub passed: bool,
    pub entries: Vec<Entry>,
    pub details: serde_json::Value,
    pub samples: Vec<Sample>,
}

/// A reported number. Checks carry the tolerance they were judged against;
/// telemetry has neither tolerance nor verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub passed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub point: Vec<f64>,
    pub quantity: String,
    pub value: f64,
}

impl Report {
    pub fn sample_count(&self) -> usize {
        self.analyses.iter().map(|a| a.samples.len()).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Json(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// One row per sample: scenario, analysis, point coordinates, quantity, value.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        let mut header = vec!["scenario".to_string(), "analysis".to_string()];
        header.extend(self.coordinates.iter().cloned());
        header.extend(["quantity".to_string(), "value".to_string()]);
        w.write_record(&header).map_err(csv_err)?;
        for a in &self.analyses {
            for s in &a.samples {
                let mut row = vec![self.scenario.clone(), a.analysis.clone()];
                row.extend(s.point.iter().map(|x| format!("{x:?}")));
                row.extend([s.quantity.clone(), format!("{:?}", s.value)]);
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}
