use std::fmt;
use std::io::Write;

use crate::error::Result;
use crate::space::fmt_sig_f64;

/// One measured case: which field, which ball or pair, the measured
/// quantities and the ratio that enters the aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub field: String,
    pub case: String,
    pub values: Vec<f64>,
    pub ratio: f64,
}

/// An asserted property of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub config: Vec<(String, String)>,
    /// Names of the `values` columns.
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, config: Vec<(String, String)>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            config,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, field: &str, case: impl Into<String>, values: Vec<f64>, ratio: f64) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(ReportRow { field: field.to_string(), case: case.into(), values, ratio });
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, detail));
    }

    /// Largest ratio and the first row attaining it; NaN rows excluded.
    pub fn max(&self) -> Option<(f64, &ReportRow)> {
        self.rows.iter().filter(|r| !r.ratio.is_nan()).fold(None, |best, r| match best {
            Some((v, _)) if !(r.ratio > v) => best,
            _ => Some((r.ratio, r)),
        })
    }

    /// Smallest ratio and the first row attaining it; NaN rows excluded.
    pub fn min(&self) -> Option<(f64, &ReportRow)> {
        self.rows.iter().filter(|r| !r.ratio.is_nan()).fold(None, |best, r| match best {
            Some((v, _)) if !(r.ratio < v) => best,
            _ => Some((r.ratio, r)),
        })
    }

    /// Largest ratio among rows of one field.
    pub fn max_for(&self, field: &str) -> Option<f64> {
        self.rows.iter().filter(|r| r.field == field && !r.ratio.is_nan()).map(|r| r.ratio).reduce(f64::max)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn config_value(&self, key: &str) -> Option<&str> {
        self.config.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Rows as CSV: `field,case,<columns>,ratio`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["field".to_string(), "case".into()];
        header.extend(self.columns.iter().cloned());
        header.push("ratio".into());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.field.clone(), r.case.clone()];
            rec.extend(r.values.iter().map(|&v| fmt_sig_f64(v)));
            rec.push(fmt_sig_f64(r.ratio));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Checks and config as CSV: `kind,name,status,detail`.
    pub fn write_checks_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["kind", "name", "status", "detail"])?;
        for (k, v) in &self.config {
            w.write_record(["config", k, "", v])?;
        }
        for c in &self.checks {
            w.write_record(["check", &c.name, if c.pass { "pass" } else { "fail" }, &c.detail])?;
        }
        w.flush()?;
        Ok(())
    }

    pub(crate) fn summary_record(&self) -> [String; 8] {
        let (max, wf, wc) = match self.max() {
            Some((v, r)) => (fmt_sig_f64(v), r.field.clone(), r.case.clone()),
            None => (String::new(), String::new(), String::new()),
        };
        let min = self.min().map(|(v, _)| fmt_sig_f64(v)).unwrap_or_default();
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        [
            self.name.clone(),
            self.rows.len().to_string(),
            max,
            min,
            wf,
            wc,
            if failed.is_empty() { "pass" } else { "fail" }.to_string(),
            failed.join(";"),
        ]
    }
}

/// `summary.csv`: one line per report.
pub fn write_summary<W: Write>(reports: &[&ExperimentReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["report", "rows", "aggregate_max", "aggregate_min", "witness_field", "witness_case", "status", "failed_checks"])?;
    for r in reports {
        w.write_record(r.summary_record())?;
    }
    w.flush()?;
    Ok(())
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} rows", self.name, self.rows.len())?;
        if let Some((v, r)) = self.max() {
            writeln!(f, "  max ratio {} at {} / {}", fmt_sig_f64(v), r.field, r.case)?;
        }
        if let Some((v, r)) = self.min() {
            writeln!(f, "  min ratio {} at {} / {}", fmt_sig_f64(v), r.field, r.case)?;
        }
        for c in &self.checks {
            writeln!(f, "  [{}] {} {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}
