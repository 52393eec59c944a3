//! Check-report plumbing: every `check` trial emits one [`CheckReport`],
//! and the suite ends with a `<property>-summary` report aggregating the
//! worst residual per name.

use std::collections::BTreeMap;

use serde::Serialize;

/// One JSON report line. Invariant: every key in `residuals` has a matching
/// key in `tolerances`, and `pass` is true iff every residual is at most its
/// paired tolerance (NaN fails). Construction through [`ReportBuilder`]
/// enforces the pairing.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl CheckReport {
    /// Adds a parameter after construction (used by summary decoration).
    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

pub struct ReportBuilder {
    check_name: String,
    params: BTreeMap<String, serde_json::Value>,
    residuals: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
}

impl ReportBuilder {
    pub fn new(check_name: impl Into<String>) -> ReportBuilder {
        ReportBuilder {
            check_name: check_name.into(),
            params: BTreeMap::new(),
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Records a residual together with the tolerance it is judged against.
    pub fn residual(mut self, key: &str, residual: f64, tolerance: f64) -> Self {
        self.residuals
            .insert(key.to_string(), sanitize_residual(residual));
        self.tolerances.insert(key.to_string(), tolerance);
        self
    }

    pub fn finish(self, wall_time_s: f64) -> CheckReport {
        let pass = self
            .residuals
            .iter()
            .all(|(k, &r)| r <= self.tolerances[k]);
        CheckReport {
            check_name: self.check_name,
            params: self.params,
            residuals: self.residuals,
            tolerances: self.tolerances,
            pass,
            wall_time_s,
        }
    }
}

/// Maps non-finite residuals onto the outermost finite values so report
/// JSON stays strictly numeric (serde_json writes non-finite floats as
/// null). NaN and +inf become +MAX (always a failure); -inf becomes -MAX
/// (still below any tolerance), so pass/fail semantics are unchanged.
pub fn sanitize_residual(residual: f64) -> f64 {
    if residual.is_nan() || residual == f64::INFINITY {
        f64::MAX
    } else if residual == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        residual
    }
}

/// Builds the summary report: per-name worst (maximum) residual across all
/// trial reports, same tolerances, pass iff every trial passed.
pub fn summarize(property: &str, reports: &[CheckReport], wall_time_s: f64) -> CheckReport {
    let mut builder = ReportBuilder::new(format!("{property}-summary"))
        .param("trials", reports.len());
    let mut worst: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for report in reports {
        for (key, &residual) in &report.residuals {
            let tolerance = report.tolerances[key];
            worst
                .entry(key.clone())
                .and_modify(|(r, _)| *r = r.max(residual))
                .or_insert((residual, tolerance));
        }
    }
    for (key, (residual, tolerance)) in worst {
        builder = builder.residual(&key, residual, tolerance);
    }
    let mut summary = builder.finish(wall_time_s);
    summary.pass = summary.pass && reports.iter().all(|r| r.pass);
    summary
}

/// Prints one compact JSON object per line.
pub fn emit(report: &CheckReport) {
    println!("{}", serde_json::to_string(report).expect("report serializes"));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_requires_every_residual_within_tolerance() {
        let r = ReportBuilder::new("x")
            .residual("a", 1.0, 2.0)
            .residual("b", 3.0, 2.0)
            .finish(0.0);
        assert!(!r.pass);
        let r = ReportBuilder::new("x").residual("a", 1.0, 2.0).finish(0.0);
        assert!(r.pass);
    }

    #[test]
    fn nan_residual_fails() {
        let r = ReportBuilder::new("x")
            .residual("a", f64::NAN, 2.0)
            .finish(0.0);
        assert!(!r.pass);
    }

    #[test]
    fn summary_takes_worst_residual_per_name() {
        let r1 = ReportBuilder::new("x").residual("a", 1.0, 2.0).finish(0.1);
        let r2 = ReportBuilder::new("x").residual("a", 1.5, 2.0).finish(0.1);
        let s = summarize("x", &[r1, r2], 0.2);
        assert_eq!(s.check_name, "x-summary");
        assert_eq!(s.residuals["a"], 1.5);
        assert!(s.pass);
    }
}
