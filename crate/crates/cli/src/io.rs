//! File formats: dataset CSV in, CSV or JSON tables out, plus the JSON
//! inputs of the complexity commands.
//!
//! Floating-point numbers are written with 17 significant digits
//! (`{:.16e}`), which round-trips every finite `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use pvbounds::analytic::AnalyticCurvePoint;
use pvbounds::complexity::{FiniteFunctionClass, FiniteInstance};
use pvbounds::{ConfidenceBand, EmpiricalCurves, LabeledSample, ScoredDataset, ThetaTable, ThresholdChoice};

use crate::error::{CliError, Result};

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// JSON for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_num(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => u8::from(*b).to_string(),
        }
    }

    fn json(&self) -> Result<String> {
        Ok(match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) if v.is_finite() => fmt_num(*v),
            Cell::Num(v) => return Err(CliError::Invalid(format!("cannot write {v} as JSON"))),
            Cell::Text(s) => json_string(s),
            Cell::Bool(b) => b.to_string(),
        })
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// A rectangular result with optional top-level metadata.
///
/// CSV output holds the header and rows only. JSON output is one object with
/// the metadata fields followed by `rows`, an array of objects keyed by the
/// column names.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<(&'static str, Cell)>,
    /// Extra top-level JSON members, already encoded.
    pub meta_json: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Invalid(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("cells are UTF-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut out = String::from("{\n");
        for (key, cell) in &self.meta {
            writeln!(out, "  {}: {},", json_string(key), cell.json()?).unwrap();
        }
        for (key, raw) in &self.meta_json {
            writeln!(out, "  {}: {},", json_string(key), raw).unwrap();
        }
        out.push_str("  \"rows\": [\n");
        for (i, row) in self.rows.iter().enumerate() {
            let fields = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| Ok(format!("{}: {}", json_string(c), v.json()?)))
                .collect::<Result<Vec<_>>>()?;
            let sep = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(out, "    {{{}}}{sep}", fields.join(", ")).unwrap();
        }
        out.push_str("  ]\n}\n");
        Ok(out)
    }
}

pub trait ToTable {
    fn to_table(&self) -> Table;
}

/// Writes `results` to `path`. Empty results are an error rather than an
/// empty file.
pub fn write_results<T: ToTable + ?Sized>(results: &T, path: &Path, format: OutputFormat) -> Result<()> {
    let table = results.to_table();
    if table.rows.is_empty() {
        return Err(CliError::EmptyOutput(path.to_path_buf()));
    }
    let text = match format {
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => table.to_json()?,
    };
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

impl ToTable for ScoredDataset {
    fn to_table(&self) -> Table {
        Table {
            columns: vec!["score", "label"],
            rows: self
                .samples()
                .iter()
                .map(|s| vec![Cell::Num(s.score), Cell::Int(s.label().into())])
                .collect(),
            ..Table::default()
        }
    }
}

pub fn write_dataset_csv(dataset: &ScoredDataset, path: &Path) -> Result<()> {
    write_results(dataset, path, OutputFormat::Csv)
}

impl ToTable for EmpiricalCurves {
    fn to_table(&self) -> Table {
        Table {
            meta: vec![("n", Cell::Int(self.n() as u64)), ("positives", Cell::Int(self.positives() as u64))],
            columns: vec!["k", "alpha", "q_hat", "true_positives", "true_negatives", "ppv_hat", "npv_hat"],
            rows: self
                .points()
                .iter()
                .map(|p| {
                    vec![
                        Cell::Int(p.k as u64),
                        Cell::Num(p.alpha),
                        Cell::Num(p.q_hat),
                        Cell::Int(p.true_positives as u64),
                        Cell::Int(p.true_negatives as u64),
                        Cell::Num(p.ppv_hat),
                        Cell::Num(p.npv_hat),
                    ]
                })
                .collect(),
            ..Table::default()
        }
    }
}

/// One band row as written to disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRecord {
    pub k: usize,
    pub alpha: f64,
    pub ppv_hat: f64,
    pub ppv_lo: f64,
    pub ppv_hi: f64,
    pub npv_hat: f64,
    pub npv_lo: f64,
    pub npv_hi: f64,
}

pub const BAND_COLUMNS: [&str; 8] = ["k", "alpha", "ppv_hat", "ppv_lo", "ppv_hi", "npv_hat", "npv_lo", "npv_hi"];

/// A band as written to disk: possibly trimmed rows plus `n`, `delta` and
/// the mode name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandDocument {
    pub n: usize,
    pub delta: f64,
    pub mode: String,
    pub rows: Vec<BandRecord>,
}

impl BandDocument {
    pub fn from_band(band: &ConfidenceBand, trim: Option<f64>) -> Result<Self> {
        let rows = match trim {
            Some(c) => band.trimmed(c)?,
            None => band.rows.clone(),
        };
        Ok(Self {
            n: band.n,
            delta: band.delta,
            mode: band.mode.name().to_string(),
            rows: rows
                .iter()
                .map(|r| BandRecord {
                    k: r.k,
                    alpha: r.alpha,
                    ppv_hat: r.ppv_hat,
                    ppv_lo: r.ppv_lo,
                    ppv_hi: r.ppv_hi,
                    npv_hat: r.npv_hat,
                    npv_lo: r.npv_lo,
                    npv_hi: r.npv_hi,
                })
                .collect(),
        })
    }
}

impl ToTable for BandDocument {
    fn to_table(&self) -> Table {
        Table {
            meta: vec![
                ("n", Cell::Int(self.n as u64)),
                ("delta", Cell::Num(self.delta)),
                ("mode", Cell::Text(self.mode.clone())),
            ],
            columns: BAND_COLUMNS.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![Cell::Int(r.k as u64)];
                    row.extend(
                        [r.alpha, r.ppv_hat, r.ppv_lo, r.ppv_hi, r.npv_hat, r.npv_lo, r.npv_hi].map(Cell::Num),
                    );
                    row
                })
                .collect(),
            ..Table::default()
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

fn check_header(path: &Path, rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(|e| csv_error(path, e))?;
    let fields: Vec<&str> = header.iter().map(|f| f.trim_start_matches('\u{feff}').trim()).collect();
    if fields != expected {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header `{}`, found `{}`", expected.join(","), fields.join(",")),
        });
    }
    Ok(())
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Reads a `score,label` file, keeping file order.
pub fn load_dataset_csv(path: &Path) -> Result<ScoredDataset> {
    parse_dataset_csv(&read_text(path)?, path)
}

/// Parses `score,label` CSV text; `path` is used in messages only.
pub fn parse_dataset_csv(text: &str, path: &Path) -> Result<ScoredDataset> {
    if text.trim().is_empty() {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            line: 1,
            message: "missing header `score,label`".into(),
        });
    }
    let mut rdr = reader(text);
    check_header(path, &mut rdr, &["score", "label"])?;
    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let value_error = |message: String| CliError::Value {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != 2 {
            return Err(CliError::Format {
                path: path.to_path_buf(),
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let score: f64 = record[0]
            .parse()
            .map_err(|_| value_error(format!("score {:?} is not a number", &record[0])))?;
        if !score.is_finite() {
            return Err(value_error(format!("score {score} is not finite")));
        }
        let label = match &record[1] {
            "0" => 0,
            "1" => 1,
            other => return Err(value_error(format!("label {other:?} is not 0 or 1"))),
        };
        samples.push(LabeledSample::new(score, label)?);
    }
    Ok(ScoredDataset::new(samples)?)
}

pub fn read_band_csv(path: &Path) -> Result<Vec<BandRecord>> {
    let text = read_text(path)?;
    let mut rdr = reader(&text);
    check_header(path, &mut rdr, &BAND_COLUMNS)?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| csv_error(path, e)))
        .collect()
}

pub fn read_band_json(path: &Path) -> Result<BandDocument> {
    parse_json(path, &read_text(path)?)
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads a `k,theta` file listing the order coefficients for
/// `k = 1, ..., n - 1` in order.
pub fn load_theta_table(path: &Path) -> Result<ThetaTable> {
    let text = read_text(path)?;
    let mut rdr = reader(&text);
    check_header(path, &mut rdr, &["k", "theta"])?;
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let value_error = |message: String| CliError::Value {
            path: path.to_path_buf(),
            line,
            message,
        };
        let k: usize = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| value_error("k is not a positive integer".into()))?;
        if k != values.len() + 1 {
            return Err(value_error(format!("expected k = {}, found {k}", values.len() + 1)));
        }
        let theta: BigUint = record
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| value_error("theta is not a non-negative integer".into()))?;
        values.push(theta);
    }
    Ok(ThetaTable::new(values)?)
}

pub fn write_theta_table(table: &[BigUint], path: &Path) -> Result<()> {
    let mut text = String::from("k,theta\n");
    for (i, v) in table.iter().enumerate() {
        writeln!(text, "{},{v}", i + 1).unwrap();
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Deserialize)]
struct ClassFunctionJson {
    id: serde_json::Value,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct ClassJson {
    points: Vec<serde_json::Value>,
    functions: Vec<ClassFunctionJson>,
}

fn id_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Reads `{"points": [ids], "functions": [{"id": ..., "values": [...]}]}`.
pub fn load_function_class(path: &Path) -> Result<FiniteFunctionClass> {
    let doc: ClassJson = parse_json(path, &read_text(path)?)?;
    let points = doc.points.iter().map(id_string).collect();
    let ids = doc.functions.iter().map(|f| id_string(&f.id)).collect();
    let values = doc.functions.into_iter().map(|f| f.values).collect();
    Ok(FiniteFunctionClass::new(points, ids, values)?)
}

#[derive(Deserialize)]
struct InstanceJson {
    mu: Vec<serde_json::Value>,
    eta: Vec<serde_json::Value>,
}

fn rational_text(path: &Path, v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) if n.is_u64() || n.is_i64() => Ok(n.to_string()),
        other => Err(CliError::Json {
            path: path.to_path_buf(),
            message: format!("{other} is not a rational string such as \"1/2\""),
        }),
    }
}

/// Reads `{"mu": ["1/2", ...], "eta": ["4/5", ...]}`.
pub fn load_instance(path: &Path) -> Result<FiniteInstance> {
    let doc: InstanceJson = parse_json(path, &read_text(path)?)?;
    let mu = doc.mu.iter().map(|v| rational_text(path, v)).collect::<Result<Vec<_>>>()?;
    let eta = doc.eta.iter().map(|v| rational_text(path, v)).collect::<Result<Vec<_>>>()?;
    Ok(FiniteInstance::parse(&mu, &eta)?)
}

/// Analytic curves of both scorers on a grid.
pub struct AnalyticTable<'a> {
    pub d: u32,
    pub points: &'a [AnalyticCurvePoint],
}

impl ToTable for AnalyticTable<'_> {
    fn to_table(&self) -> Table {
        Table {
            meta: vec![("d", Cell::Int(self.d.into()))],
            columns: vec!["alpha", "ppv_eta", "npv_eta", "ppv_f1", "npv_f1"],
            rows: self
                .points
                .iter()
                .map(|p| [p.alpha, p.ppv_eta, p.npv_eta, p.ppv_f1, p.npv_f1].map(Cell::Num).to_vec())
                .collect(),
            ..Table::default()
        }
    }
}

impl ToTable for ThresholdChoice {
    fn to_table(&self) -> Table {
        Table {
            columns: vec!["k", "alpha", "rule", "objective_value"],
            rows: vec![vec![
                Cell::Int(self.k as u64),
                Cell::Num(self.alpha),
                Cell::Text(self.rule.name().into()),
                Cell::Num(self.objective_value),
            ]],
            ..Table::default()
        }
    }
}

/// Key-value report, one row per entry.
pub struct Report(pub Vec<(&'static str, Cell)>);

impl ToTable for Report {
    fn to_table(&self) -> Table {
        Table {
            columns: vec!["key", "value"],
            rows: self
                .0
                .iter()
                .map(|(k, v)| vec![Cell::Text((*k).into()), v.clone()])
                .collect(),
            ..Table::default()
        }
    }
}
