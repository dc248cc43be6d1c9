use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use qhj_core::Error;

pub const FORMAT_VERSION: &str = "qhj-report/1";

/// How a check's value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    AtMost,
    AtLeast,
    /// Recorded but never fails the run.
    Reported,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub limit: Limit,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value: Some(value),
            tolerance,
            limit: Limit::AtMost,
            pass: value <= tolerance,
            error: None,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value: Some(value),
            tolerance,
            limit: Limit::AtLeast,
            pass: value >= tolerance,
            error: None,
        }
    }

    pub fn reported(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value: Some(value),
            tolerance,
            limit: Limit::Reported,
            pass: true,
            error: None,
        }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Check {
            name: name.into(),
            value: None,
            tolerance,
            limit: Limit::AtMost,
            pass: false,
            error: Some(format!("{}: {err}", error_kind(err))),
        }
    }
}

/// Variant name of a library error, e.g. `ResonantDenominator`.
pub fn error_kind(err: &Error) -> String {
    let debug = format!("{err:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub format_version: &'static str,
    pub suite: String,
    pub scenario: String,
    pub environment: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: &str, scenario: String) -> Self {
        Report {
            format_version: FORMAT_VERSION,
            suite: suite.to_string(),
            scenario,
            environment: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub fn env(&mut self, key: &str, value: f64) {
        self.environment.insert(key.to_string(), value);
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Records the outcome of a fallible check.
    pub fn record(&mut self, name: &str, tolerance: f64, check: qhj_core::Result<Check>) {
        self.checks.push(check.unwrap_or_else(|e| Check::failed(name, tolerance, &e)));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,tolerance,limit,pass\n");
        for c in &self.checks {
            let value = c.value.map(format_number).unwrap_or_default();
            let limit = match c.limit {
                Limit::AtMost => "at_most",
                Limit::AtLeast => "at_least",
                Limit::Reported => "reported",
            };
            let _ = writeln!(out, "{},{value},{},{limit},{}", c.name, format_number(c.tolerance), c.pass);
        }
        out
    }
}

/// Seventeen significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// A sampled table with named real columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub format_version: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            format_version: FORMAT_VERSION,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes") + "\n"
    }
}
