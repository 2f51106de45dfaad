use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{ensure_parent, write_json};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub condition: String,
    pub metric: f64,
    pub std: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub config_hash: String,
    pub counts: BTreeMap<String, usize>,
}

/// One metric value per evaluated condition, in configured order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: String,
    pub rows: Vec<ReportRow>,
    pub metadata: ReportMetadata,
}

impl EvalReport {
    pub fn new(metric: impl Into<String>, rows: Vec<ReportRow>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for r in &rows {
            if !seen.insert(r.condition.as_str()) {
                return Err(Error::Config(format!("condition {} reported twice", r.condition)));
            }
        }
        Ok(Self {
            metric: metric.into(),
            rows,
            metadata: ReportMetadata::default(),
        })
    }

    pub fn get(&self, condition: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.condition == condition)
    }

    pub fn conditions(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.condition.as_str()).collect()
    }

    /// `condition,metric,std`, std empty when not applicable.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "condition,metric,std")?;
        for r in &self.rows {
            match r.std {
                Some(s) => writeln!(w, "{},{},{}", r.condition, r.metric, s)?,
                None => writeln!(w, "{},{},", r.condition, r.metric)?,
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn save(&self, json: &Path, csv: &Path) -> Result<()> {
        write_json(json, self)?;
        ensure_parent(csv)?;
        std::fs::write(csv, self.to_csv()).map_err(|e| Error::io(csv, e))
    }
}

/// Label used for a numeric condition (`0.75`, `1`, `1.85`).
pub fn condition_label(v: f64) -> String {
    format!("{v}")
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
