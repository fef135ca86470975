//! Dataset ingestion and serialization of result records.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::distributions::TheoreticalCoefficients;
use crate::estimators::BivariateSample;
use crate::experiments::{BiasReport, MetaCorrelationReport, PearsonExtension, SummaryTable};
use crate::error::EstimatorError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("input has no data rows")]
    Empty,
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    /// Undefined value, e.g. Pearson without second moments.
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_nan() {
            Cell::Missing
        } else {
            Cell::Num(v)
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::from)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format_full(*v),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_full(v: f64) -> String {
    format!("{v:?}")
}

/// A self-describing result: enough config to re-run it, and the table.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub experiment: String,
    /// Short descriptive label, e.g. `normal:means-variances`.
    pub tag: String,
    pub tool_version: String,
    /// Ordered `(key, value)` config echo.
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl OutputRecord {
    pub fn new(experiment: &str, tag: &str) -> Self {
        Self {
            experiment: experiment.into(),
            tag: tag.into(),
            tool_version: TOOL_VERSION.into(),
            config: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.push((key.into(), value.to_string()));
        self
    }

    pub fn to_json(&self) -> String {
        let config: Map<String, Value> = self.config.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        let value = json!({
            "experiment": self.experiment,
            "tag": self.tag,
            "tool_version": self.tool_version,
            "config": config,
            "columns": self.columns,
            "rows": rows,
            "notes": self.notes,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("json values always serialize");
        out.push('\n');
        out
    }

    /// Metadata as `# key=value` comment lines, then a header and rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment={}", self.experiment);
        let _ = writeln!(out, "# tag={}", self.tag);
        let _ = writeln!(out, "# tool_version={}", self.tool_version);
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}={v}");
        }
        for note in &self.notes {
            let _ = writeln!(out, "# note={}", note.replace('\n', " "));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input"));
        out
    }

    /// Parses the output of [`OutputRecord::to_csv`]. Numeric-looking cells
    /// become [`Cell::Num`], empty cells [`Cell::Missing`].
    pub fn from_csv(text: &str) -> Result<Self, IoError> {
        let mut rec = OutputRecord::new("", "");
        rec.tool_version.clear();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let Some((k, v)) = line.trim_start_matches('#').trim_start().split_once('=') else {
                continue;
            };
            match k {
                "experiment" => rec.experiment = v.into(),
                "tag" => rec.tag = v.into(),
                "tool_version" => rec.tool_version = v.into(),
                "note" => rec.notes.push(v.into()),
                _ => rec.config.push((k.into(), v.into())),
            }
        }
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        rec.columns = reader
            .headers()
            .map_err(|e| parse_error(&e))?
            .iter()
            .map(String::from)
            .collect();
        for record in reader.records() {
            let record = record.map_err(|e| parse_error(&e))?;
            rec.rows.push(
                record
                    .iter()
                    .map(|s| match s {
                        "" => Cell::Missing,
                        s => s.parse::<f64>().map_or_else(|_| Cell::Text(s.into()), Cell::Num),
                    })
                    .collect(),
            );
        }
        Ok(rec)
    }
}

fn parse_error(e: &csv::Error) -> IoError {
    IoError::Parse {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

/// Reads two numeric columns. With `header`, the first row is skipped.
pub fn read_sample(path: &Path, header: bool) -> Result<BivariateSample, IoError> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| IoError::Read {
            path: path.display().to_string(),
            source,
        })?;
    parse_sample(&text, header)
}

pub fn parse_sample(text: &str, header: bool) -> Result<BivariateSample, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(IoError::Parse {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let num = |i: usize| {
            record[i].parse::<f64>().map_err(|_| IoError::Parse {
                line,
                message: format!("`{}` is not a number", &record[i]),
            })
        };
        x.push(num(0)?);
        y.push(num(1)?);
    }
    if x.is_empty() {
        return Err(IoError::Empty);
    }
    Ok(BivariateSample::new(x, y)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Four decimals, `--` for undefined, no negative zero.
pub fn fmt4(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => {
            let s = format!("{v:.4}");
            if s == "-0.0000" {
                "0.0000".into()
            } else {
                s
            }
        }
        _ => "--".into(),
    }
}

/// Two significant digits in scientific notation.
pub fn fmt_sci(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.1e}")
    } else {
        "--".into()
    }
}

/// Right-aligned plain-text table.
pub fn render_table(columns: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..columns.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([columns[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            + "\n"
    };
    let mut out = line(columns);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn theory_record(family: &str, rows: &[(f64, TheoreticalCoefficients)]) -> OutputRecord {
    let mut rec = OutputRecord::new("theory", &format!("{family}:population"));
    rec.config.push(("family".into(), family.into()));
    rec.columns = strings(&["t", "pearson", "spearman", "kendall", "r"]);
    rec.rows = rows
        .iter()
        .map(|(t, tc)| vec![Cell::Num(*t), tc.pearson.into(), tc.spearman.into(), tc.kendall.into(), tc.r.into()])
        .collect();
    rec
}

pub fn theory_text(rows: &[(f64, TheoreticalCoefficients)]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(t, tc)| {
            vec![
                format!("{t}"),
                fmt4(tc.pearson),
                fmt4(Some(tc.spearman)),
                fmt4(Some(tc.kendall)),
                fmt4(Some(tc.r)),
            ]
        })
        .collect();
    render_table(&strings(&["t", "pearson", "spearman", "kendall", "r"]), &body)
}

const TABLE_COLUMNS: [&str; 16] = [
    "t",
    "pearson_mean",
    "pearson_var",
    "pearson_se",
    "spearman_mean",
    "spearman_var",
    "spearman_se",
    "kendall_mean",
    "kendall_var",
    "kendall_se",
    "r_mean",
    "r_var",
    "r_se",
    "succeeded",
    "failed",
    "tie_redraws",
];

pub fn table_record(table: &SummaryTable, experiment: &str) -> OutputRecord {
    let mut rec = OutputRecord::new(experiment, &format!("{}:means-variances", table.family))
        .config("family", table.family)
        .config("n", table.n)
        .config("reps", table.reps)
        .config("seed", table.master_seed);
    rec.columns = strings(&TABLE_COLUMNS);
    rec.rows = table
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![Cell::Num(row.t)];
            for m in [&row.pearson, &row.spearman, &row.kendall, &row.r] {
                cells.extend([m.mean.into(), m.variance.into(), m.se.into()]);
            }
            cells.extend([row.succeeded.into(), row.failed.into(), row.tie_redraws.into()]);
            cells
        })
        .collect();
    rec
}

pub fn table_text(table: &SummaryTable) -> String {
    let cols = strings(&[
        "t", "mean pearson", "spearman", "kendall", "r", "var pearson", "spearman", "kendall", "r",
    ]);
    let body: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            let ms = [&row.pearson, &row.spearman, &row.kendall, &row.r];
            let mut cells = vec![format!("{}", row.t)];
            cells.extend(ms.iter().map(|m| fmt4(Some(m.mean))));
            cells.extend(ms.iter().map(|m| fmt_sci(m.variance)));
            cells
        })
        .collect();
    render_table(&cols, &body)
}

pub fn meta_record(report: &MetaCorrelationReport) -> OutputRecord {
    let mut rec = OutputRecord::new("meta-correlation", &format!("{}:meta-correlation", report.family))
        .config("family", report.family)
        .config("t", report.t)
        .config("group_size", report.group_size)
        .config("repetitions", report.repetitions);
    rec.columns = strings(&["meta", "a", "b", "mean", "se", "used"]);
    rec.rows = report
        .entries
        .iter()
        .map(|e| {
            vec![
                e.meta.name().into(),
                e.a.name().into(),
                e.b.name().into(),
                e.mean.into(),
                e.se.into(),
                e.used.into(),
            ]
        })
        .collect();
    if report.failed_datasets > 0 {
        rec.notes.push(format!("{} datasets dropped after repeated ties", report.failed_datasets));
    }
    rec
}

pub fn meta_text(report: &MetaCorrelationReport) -> String {
    let body: Vec<Vec<String>> = report
        .entries
        .iter()
        .map(|e| vec![e.meta.name().into(), e.a.name().into(), e.b.name().into(), fmt4(Some(e.mean))])
        .collect();
    render_table(&strings(&["meta", "a", "b", "mean"]), &body)
}

pub fn bias_record(report: &BiasReport, family: &str) -> OutputRecord {
    let mut rec = OutputRecord::new("bias", &format!("{family}:finite-sample-bias")).config("reps", report.reps);
    rec.columns = strings(&["n", "coefficient", "expected", "mean", "se", "z"]);
    for row in &report.rows {
        for (name, c) in [("spearman", &row.spearman), ("kendall", &row.kendall), ("r", &row.r)] {
            rec.rows.push(vec![row.n.into(), name.into(), c.expected.into(), c.mean.into(), c.se.into(), c.z.into()]);
        }
    }
    rec
}

pub fn bias_text(report: &BiasReport) -> String {
    let mut body = Vec::new();
    for row in &report.rows {
        for (name, c) in [("spearman", &row.spearman), ("kendall", &row.kendall), ("r", &row.r)] {
            body.push(vec![
                row.n.to_string(),
                name.into(),
                format!("{:.5}", c.expected),
                format!("{:.5}", c.mean),
                format!("{:.2}", c.z),
            ]);
        }
    }
    render_table(&strings(&["n", "coefficient", "expected", "mean", "z"]), &body)
}

pub fn extension_record(ext: &PearsonExtension, family: &str, t: f64) -> OutputRecord {
    let mut rec = OutputRecord::new("extend-pearson", &format!("{family}:pearson-extension"))
        .config("family", family)
        .config("t", t);
    rec.columns = strings(&[
        "rho_tilde",
        "se",
        "half_mean_1",
        "half_mean_2",
        "stable",
        "spearman_mean",
        "kendall_mean",
        "r_mean",
        "trend",
        "theoretical",
        "gap",
    ]);
    rec.rows = vec![vec![
        ext.rho_tilde.into(),
        ext.se.into(),
        ext.half_means.0.into(),
        ext.half_means.1.into(),
        if ext.stable { "stable" } else { "unstable" }.into(),
        ext.spearman_mean.into(),
        ext.kendall_mean.into(),
        ext.r_mean.into(),
        ext.trend.name().into(),
        ext.theoretical.into(),
        ext.gap.into(),
    ]];
    rec
}

pub fn extension_text(ext: &PearsonExtension) -> String {
    format!(
        "rho_tilde = {} (se {})\nhalf-sample means {} / {} ({})\nrank means: spearman {}, kendall {}, r {}\ndistances {} {} {}\n{}\ntheoretical {}, gap {}\n",
        fmt4(Some(ext.rho_tilde)),
        fmt_sci(ext.se),
        fmt4(Some(ext.half_means.0)),
        fmt4(Some(ext.half_means.1)),
        if ext.stable { "stable" } else { "unstable" },
        fmt4(Some(ext.spearman_mean)),
        fmt4(Some(ext.kendall_mean)),
        fmt4(Some(ext.r_mean)),
        fmt4(Some(ext.distances[0])),
        fmt4(Some(ext.distances[1])),
        fmt4(Some(ext.distances[2])),
        ext.trend.name(),
        fmt4(ext.theoretical),
        fmt4(ext.gap),
    )
}

/// Serializes any serde value as pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> OutputRecord {
        let mut rec = OutputRecord::new("demo", "normal:means-variances").config("seed", 42).config("n", 10);
        rec.columns = strings(&["t", "value", "label"]);
        rec.rows = vec![
            vec![Cell::Num(0.1), Cell::Num(1.0 / 3.0), "a".into()],
            vec![Cell::Num(-0.7), Cell::Missing, "b".into()],
            vec![Cell::Num(2.0), Cell::Num(-1.234_567_890_123_456_7e-300), "c,d".into()],
        ];
        rec.notes.push("two\nlines".into());
        rec
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rec = record();
        let back = OutputRecord::from_csv(&rec.to_csv()).unwrap();
        assert_eq!(back.rows, rec.rows);
        assert_eq!(back.columns, rec.columns);
        assert_eq!(back.config, rec.config);
        assert_eq!(back.tag, rec.tag);
        assert_eq!(back.notes, vec!["two lines".to_string()]);
    }

    #[test]
    fn json_keeps_key_order_and_nulls() {
        let text = record().to_json();
        let v: Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["experiment", "tag", "tool_version", "config", "columns", "rows", "notes"]);
        assert!(v["rows"][1]["value"].is_null());
        assert_eq!(v["rows"][0]["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["config"]["seed"], "42");
    }

    #[test]
    fn sample_parsing() {
        let s = parse_sample("x,y\n1,3\n2,1\r\n3,2\n4,4\n", true).unwrap();
        assert_eq!(s.y(), &[3.0, 1.0, 2.0, 4.0]);
        let s = parse_sample(" 1 , 2\n3,4\n\n", false).unwrap();
        assert_eq!(s.x(), &[1.0, 3.0]);
        assert!(matches!(parse_sample("1,a\n", false), Err(IoError::Parse { .. })));
        assert!(matches!(parse_sample("1,2,3\n", false), Err(IoError::Parse { .. })));
        assert!(matches!(parse_sample("x,y\n", true), Err(IoError::Empty)));
        assert!(matches!(parse_sample("1,nan\n2,3\n", false), Err(IoError::Estimator(_))));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt4(Some(-0.00001)), "0.0000");
        assert_eq!(fmt4(Some(0.095_492)), "0.0955");
        assert_eq!(fmt4(None), "--");
        assert_eq!(fmt4(Some(f64::NAN)), "--");
        assert_eq!(fmt_sci(0.000_41), "4.1e-4");
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(format_full(v).parse::<f64>().unwrap(), v);
        }
    }
}
