//! Deterministic machine-readable result emission.
//!
//! Every run produces a [`Report`]: a header echoing the resolved
//! configuration and tool version, a frozen column list, and typed rows
//! with a provenance column distinguishing certified values from
//! measured ones and Monte Carlo estimates. Rendering uses shortest
//! round-trip float formatting and no timestamps, so identical inputs
//! yield byte-identical files.

use serde::Serialize;

/// Tool version embedded in every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run metadata echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub seed: u64,
    /// Compact JSON echo of the resolved configuration.
    pub config: String,
}

impl Meta {
    pub fn new(subcommand: &str, seed: u64, config: String) -> Self {
        Self { tool: "lyapcert", version: VERSION, subcommand: subcommand.to_string(), seed, config }
    }
}

/// A single typed cell.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Field {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Num(v) => {
                if v.is_finite() {
                    format!("{v}")
                } else {
                    format!("{v:?}")
                }
            }
            Field::Text(s) => s.replace([',', '\n'], ";"),
            Field::Bool(b) => b.to_string(),
        }
    }
}

/// Data provenance of a row or value.
pub const PROV_CERTIFIED: &str = "certified";
pub const PROV_MEASURED: &str = "measured";
pub const PROV_MC: &str = "mc";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
    /// Free-form notes carried into the output header.
    pub notes: Vec<String>,
    /// Overall pass/fail of the run's acceptance condition.
    pub pass: bool,
}

impl Report {
    pub fn new(meta: Meta, columns: Vec<&'static str>) -> Self {
        Self { meta, columns, rows: Vec::new(), notes: Vec::new(), pass: true }
    }

    pub fn push_row(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// CSV with a '#'-prefixed header (tool, version, subcommand, seed,
    /// config echo, notes), then the column line and the data rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool={} version={}\n", self.meta.tool, self.meta.version));
        out.push_str(&format!(
            "# subcommand={} seed={}\n",
            self.meta.subcommand, self.meta.seed
        ));
        out.push_str(&format!("# config={}\n", self.meta.config.replace('\n', " ")));
        for n in &self.notes {
            out.push_str(&format!("# note={}\n", n.replace('\n', " ")));
        }
        out.push_str(&format!("# pass={}\n", self.pass));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Field::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Pretty JSON of the whole report.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Renders in the requested format ("csv" or "json").
    pub fn render(&self, format: &str) -> String {
        match format {
            "json" => self.to_json(),
            _ => self.to_csv(),
        }
    }
}
