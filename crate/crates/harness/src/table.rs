//! Tagged result rows with CSV and JSON serialisation.

use std::io::{Read, Write};
use std::path::Path;

use rootfind_core::growth::Model;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{HarnessError, Result};

/// One result. Fields that do not apply to a row stay empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub experiment: String,
    pub model: String,
    pub d: Option<u32>,
    pub n: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub statistic: String,
    pub value: f64,
    /// Standard error of `value`; empty for exact quantities.
    pub stderr: Option<f64>,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
    pub trials: u64,
    pub seed: u64,
}

impl TrialRow {
    pub fn new(experiment: &str, statistic: &str, value: f64) -> Self {
        TrialRow {
            experiment: experiment.to_string(),
            model: String::new(),
            d: None,
            n: None,
            k: None,
            x: None,
            y: None,
            statistic: statistic.to_string(),
            value,
            stderr: None,
            bound: None,
            pass: None,
            trials: 0,
            seed: 0,
        }
    }

    pub fn model(mut self, model: Model) -> Self {
        self.model = model.label().to_string();
        self.d = model.degree();
        self
    }

    pub fn d(mut self, d: u32) -> Self {
        self.d = Some(d);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn x(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn y(mut self, y: f64) -> Self {
        self.y = Some(y);
        self
    }

    pub fn stderr(mut self, s: f64) -> Self {
        self.stderr = Some(s);
        self
    }

    pub fn bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn pass(mut self, p: bool) -> Self {
        self.pass = Some(p);
        self
    }

    pub fn trials(mut self, t: u64) -> Self {
        self.trials = t;
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialTable {
    pub rows: Vec<TrialRow>,
}

impl TrialTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: TrialRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: TrialTable) {
        self.rows.extend(other.rows);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True if some row carries a failed pass flag.
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.pass == Some(false))
    }

    pub fn with_statistic<'a>(&'a self, statistic: &'a str) -> impl Iterator<Item = &'a TrialRow> + 'a {
        self.rows.iter().filter(move |r| r.statistic == statistic)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(COLUMNS)?;
        }
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.rows)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().ne(COLUMNS.iter().copied()) {
            return Err(HarnessError::Input(format!("unexpected CSV header {:?}", headers)));
        }
        let rows = r.deserialize().collect::<std::result::Result<Vec<TrialRow>, _>>()?;
        Ok(TrialTable { rows })
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let rows: Vec<TrialRow> = serde_json::from_reader(input)?;
        Ok(TrialTable { rows })
    }

    /// Reads a table, choosing the parser from the file extension (JSON for
    /// `.json`, CSV otherwise).
    pub fn read_path(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::read_json(file),
            _ => Self::read_csv(file),
        }
    }
}

pub const COLUMNS: [&str; 14] =
    ["experiment", "model", "d", "n", "K", "x", "y", "statistic", "value", "stderr", "bound", "pass", "trials", "seed"];
