use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Point;

/// One line of the long-format report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub checker: String,
    pub limit: String,
    pub basepoint: String,
    /// Family index the row refers to, when it refers to one member.
    pub n: Option<u32>,
    pub metric: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub ok: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub checker: String,
    pub limit: String,
    pub basepoint: Point,
    pub passed: bool,
    pub summary: String,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub outcomes: Vec<CheckOutcome>,
}

impl ConvergenceReport {
    pub fn new(label: impl Into<String>) -> Self {
        ConvergenceReport {
            label: label.into(),
            outcomes: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, checker: &str, limit: &str, basepoint: Point) -> Option<&CheckOutcome> {
        self.outcomes
            .iter()
            .find(|o| o.checker == checker && o.limit == limit && o.basepoint == basepoint)
    }

    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.outcomes.iter().flat_map(|o| &o.rows)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(row)?;
        }
        if self.outcomes.iter().all(|o| o.rows.is_empty()) {
            w.write_record(["checker", "limit", "basepoint", "n", "metric", "value", "stderr", "ok", "note"])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.label);
        for o in &self.outcomes {
            let _ = writeln!(
                s,
                "{:<9} limit={} w={}: {} [{}]",
                o.checker,
                o.limit,
                o.basepoint,
                if o.passed { "PASS" } else { "FAIL" },
                o.summary
            );
        }
        let _ = writeln!(s, "overall: {}", if self.all_passed() { "PASS" } else { "FAIL" });
        s
    }

    /// Writes `report.csv` and `summary.txt` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::fs::File::create(dir.join("report.csv"))?)?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        Ok(())
    }
}
