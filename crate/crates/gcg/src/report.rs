//! Verification reports: one record per checked identity, serialized
//! deterministically as JSON or CSV.

use std::fmt;
use std::io::Write;

use serde::Serialize;

/// Output format of reports and tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}, expected json or csv")),
        }
    }
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub suite: String,
    /// Parameters of the instance, e.g. `g=2 tadpoles=false`.
    pub instance: String,
    /// Stable key naming the identity, e.g. `gc.z.maurer-cartan`.
    pub anchor: String,
    /// The identity in words.
    pub identity: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(suite: &str, instance: &str, anchor: &str, identity: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            suite: suite.into(),
            instance: instance.into(),
            anchor: anchor.into(),
            identity: identity.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{}] {} ({}) {}", self.anchor, self.identity, self.instance, self.detail)
    }
}

/// An ordered list of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            passed: bool,
            total: usize,
            failed: usize,
            checks: &'a [Check],
            failures: Vec<&'a str>,
        }
        let failures = self.failures();
        let out = Out {
            passed: self.passed(),
            total: self.checks.len(),
            failed: failures.len(),
            checks: &self.checks,
            failures: failures.iter().map(|c| c.anchor.as_str()).collect(),
        };
        serde_json::to_string_pretty(&out).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        rows_to_csv(&self.checks)
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Serializes rows with a header line.
pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Serializes rows as a pretty JSON array.
pub fn rows_to_json<T: Serialize>(rows: &[T]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"
}

/// Renders rows in the requested format.
pub fn render_rows<T: Serialize>(rows: &[T], format: Format) -> Result<String, csv::Error> {
    match format {
        Format::Json => Ok(rows_to_json(rows)),
        Format::Csv => rows_to_csv(rows),
    }
}

/// Writes to the path, or to stdout for `None` and `-`.
pub fn write_output(path: Option<&std::path::Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, text),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
