use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Result, TopoError};

/// Metrics and server state after one round of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    /// Communication round, numbered from 1.
    pub round: usize,
    pub method: String,
    pub scenario: String,
    pub seed: u64,
    pub auc_global: Option<f64>,
    pub acc_global: f64,
    pub per_client_auc: Vec<Option<f64>>,
    pub trust: Vec<f64>,
    pub clusters: Vec<usize>,
    pub drift: Vec<f64>,
    /// Kept out of the main CSV so it stays byte-reproducible.
    pub wallclock_ms: u64,
}

pub const RECORD_HEADER: [&str; 10] = [
    "round",
    "method",
    "scenario",
    "seed",
    "auc_global",
    "acc_global",
    "per_client_auc",
    "trust",
    "clusters",
    "drift",
];

/// Written for metrics that are undefined (single-class test data).
pub const MISSING: &str = "NA";

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| MISSING.to_string(), |x| x.to_string())
}

pub(crate) fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

impl RoundRecord {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.round.to_string(),
            self.method.clone(),
            self.scenario.clone(),
            self.seed.to_string(),
            fmt_opt(self.auc_global),
            self.acc_global.to_string(),
            self.per_client_auc.iter().map(|a| fmt_opt(*a)).collect::<Vec<_>>().join(";"),
            join(&self.trust),
            join(&self.clusters),
            join(&self.drift),
        ]
    }
}

/// A header plus string rows, written as one CSV file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Table of records, each prefixed by `lead` columns.
    pub fn records(lead: &[&str]) -> Self {
        let mut header: Vec<&str> = lead.to_vec();
        header.extend(RECORD_HEADER);
        Self::new(&header)
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_record(&mut self, lead: Vec<String>, record: &RoundRecord) {
        let mut row = lead;
        row.extend(record.fields());
        self.push(row);
    }

    fn write_to(&self, path: &Path) -> Result<()> {
        let csv_err = |source| TopoError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| TopoError::io(path, e))
    }

    /// Writes to a temporary sibling and renames it into place.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| TopoError::io(dir, e))?;
        }
        let tmp = path.with_extension("csv.tmp");
        self.write_to(&tmp)?;
        std::fs::rename(&tmp, path).map_err(|e| TopoError::io(path, e))
    }
}

/// `name.partial.csv` next to `name.csv`.
pub fn partial_path(path: &Path) -> PathBuf {
    path.with_extension("partial.csv")
}

/// First round (0-based) whose AUC reaches 95% of the final AUC.
pub fn convergence_round(aucs: &[f64]) -> Option<usize> {
    let last = *aucs.last()?;
    aucs.iter().position(|&a| a >= 0.95 * last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_fields() {
        let r = RoundRecord {
            round: 3,
            method: "fedavg".into(),
            scenario: "healthcare".into(),
            seed: 7,
            auc_global: None,
            acc_global: 0.75,
            per_client_auc: vec![Some(0.5), None],
            trust: vec![1.0, 0.25],
            clusters: vec![0, 1],
            drift: vec![],
            wallclock_ms: 12,
        };
        assert_eq!(
            r.fields(),
            vec!["3", "fedavg", "healthcare", "7", "NA", "0.75", "0.5;NA", "1;0.25", "0;1", ""]
        );
    }

    #[test]
    fn convergence() {
        assert_eq!(convergence_round(&[]), None);
        assert_eq!(convergence_round(&[0.5, 0.7, 0.76, 0.8]), Some(2));
        assert_eq!(convergence_round(&[0.9, 0.8]), Some(0));
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x;y".into()]);
        t.write_atomic(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n1,x;y\n");
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
