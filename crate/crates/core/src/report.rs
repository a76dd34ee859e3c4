//! JSON, CSV and plain-table output.
//!
//! CSV columns are fixed:
//!
//! ```text
//! theorem,variant,a,b,alpha,m,family_params,lhs,rhs,margin,quad_err,hypothesis,verdict
//! ```
//!
//! Numbers in CSV carry 17 significant digits; absent values are empty
//! fields. JSON numbers use the shortest representation that round-trips.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::bounds::ChainValues;
use crate::classify::ClassificationReport;
use crate::verify::{InequalityReport, SearchResult, SweepSummary};

pub const CSV_HEADER: [&str; 13] = [
    "theorem",
    "variant",
    "a",
    "b",
    "alpha",
    "m",
    "family_params",
    "lhs",
    "rhs",
    "margin",
    "quad_err",
    "hypothesis",
    "verdict",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// Anything the tool can print.
pub trait Emit {
    fn json(&self) -> Result<String, serde_json::Error>;
    /// Report rows for CSV and table output.
    fn rows(&self) -> Vec<&InequalityReport>;
    /// Extra lines printed above the table.
    fn table_preamble(&self) -> Vec<String> {
        Vec::new()
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String, serde_json::Error> {
    serde_json::to_string_pretty(v)
}

impl Emit for InequalityReport {
    fn json(&self) -> Result<String, serde_json::Error> {
        pretty(self)
    }

    fn rows(&self) -> Vec<&InequalityReport> {
        vec![self]
    }
}

/// Sweeps serialize as `{"reports": [...], "min_margin": {...}, "counts": {...}}`.
impl Emit for SweepSummary {
    fn json(&self) -> Result<String, serde_json::Error> {
        pretty(self)
    }

    fn rows(&self) -> Vec<&InequalityReport> {
        self.reports.iter().collect()
    }

    fn table_preamble(&self) -> Vec<String> {
        let c = &self.counts;
        let mut lines = vec![format!(
            "{} reports: {} holds, {} violated, {} inapplicable, {} inconclusive",
            self.reports.len(),
            c.holds,
            c.violated,
            c.inapplicable,
            c.inconclusive
        )];
        if let Some(mm) = &self.min_margin {
            lines.push(format!("min margin {:.6e} ({} at a={}, b={}, alpha={}, m={}{})", mm.value, mm.theorem, mm.params.a, mm.params.b, mm.params.alpha, mm.params.m, family_suffix(mm.params.family.as_ref())));
        }
        lines
    }
}

impl Emit for SearchResult {
    fn json(&self) -> Result<String, serde_json::Error> {
        pretty(self)
    }

    fn rows(&self) -> Vec<&InequalityReport> {
        self.report.iter().collect()
    }

    fn table_preamble(&self) -> Vec<String> {
        match self.best_margin {
            Some(m) => vec![format!("best margin {m:.6e} after {} evaluations", self.evaluations)],
            None => vec![format!("no applicable point after {} evaluations", self.evaluations)],
        }
    }
}

fn family_suffix(f: Option<&crate::funcspec::FamilySpec>) -> String {
    f.map(|f| format!(", {f}")).unwrap_or_default()
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_record(r: &InequalityReport) -> [String; 13] {
    [
        r.theorem.name().to_string(),
        r.variant.name().to_string(),
        num(r.params.a),
        num(r.params.b),
        num(r.params.alpha),
        num(r.params.m),
        r.params.family.as_ref().map(ToString::to_string).unwrap_or_default(),
        opt_num(r.lhs),
        opt_num(r.rhs),
        opt_num(r.margin),
        num(r.quad_err),
        serde_json::to_value(r.hypothesis.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        r.verdict.name().to_string(),
    ]
}

pub fn write_csv<W: Write>(rows: &[&InequalityReport], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(csv_record(r))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_table<W: Write>(preamble: &[String], rows: &[&InequalityReport], mut out: W) -> io::Result<()> {
    for line in preamble {
        writeln!(out, "{line}")?;
    }
    let short = |v: Option<f64>| v.map(|x| format!("{x:.10}")).unwrap_or_else(|| "-".into());
    writeln!(
        out,
        "{:<6} {:<9} {:>6} {:>6} {:>6} {:>6} {:>16} {:>16} {:>13} {:<8} {:<12} {}",
        "thm", "variant", "a", "b", "alpha", "m", "lhs", "rhs", "margin", "hyp", "verdict", "family"
    )?;
    for r in rows {
        let hyp = serde_json::to_value(r.hypothesis.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        writeln!(
            out,
            "{:<6} {:<9} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>16} {:>16} {:>13} {:<8} {:<12} {}",
            r.theorem.name(),
            r.variant.name(),
            r.params.a,
            r.params.b,
            r.params.alpha,
            r.params.m,
            short(r.lhs),
            short(r.rhs),
            r.margin.map(|m| format!("{m:.3e}")).unwrap_or_else(|| "-".into()),
            hyp,
            r.verdict.name(),
            r.params.family.as_ref().map(ToString::to_string).unwrap_or_default(),
        )?;
        if let Some(d) = &r.diagnostic {
            writeln!(out, "       ! {d}")?;
        }
    }
    Ok(())
}

/// Renders `item` in `format` to a string.
pub fn render<T: Emit + ?Sized>(item: &T, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Json => {
            let mut s = item.json()?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&item.rows(), &mut buf)?;
            Ok(String::from_utf8(buf).expect("csv output is utf-8"))
        }
        Format::Table => {
            let mut buf = Vec::new();
            write_table(&item.table_preamble(), &item.rows(), &mut buf).expect("writing to a Vec cannot fail");
            Ok(String::from_utf8(buf).expect("table output is utf-8"))
        }
    }
}

/// Writes `item` to `destination`, or to `stdout` when no path is given.
pub fn emit_report<T: Emit + ?Sized>(
    item: &T,
    format: Format,
    destination: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), ReportError> {
    let text = render(item, format)?;
    write_text(&text, destination, stdout)
}

pub(crate) fn write_text(text: &str, destination: Option<&Path>, stdout: &mut dyn Write) -> Result<(), ReportError> {
    match destination {
        Some(path) => {
            let io_err = |source| ReportError::Io { path: path.to_path_buf(), source };
            let file = File::create(path).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes()).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| ReportError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

/// Chain output: the labeled terms plus the verdict report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainOutput {
    pub chain: ChainValues,
    pub report: InequalityReport,
}

impl Emit for ChainOutput {
    fn json(&self) -> Result<String, serde_json::Error> {
        pretty(self)
    }

    fn rows(&self) -> Vec<&InequalityReport> {
        vec![&self.report]
    }

    fn table_preamble(&self) -> Vec<String> {
        self.chain
            .terms
            .iter()
            .map(|t| format!("{:<24} {:.15}  (err {:.1e})", t.label, t.value, t.err_est))
            .collect()
    }
}

/// Classifier output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyOutput {
    pub class: String,
    pub label: String,
    #[serde(flatten)]
    pub report: ClassificationReport,
}

impl ClassifyOutput {
    pub fn render(&self, format: Format) -> Result<String, ReportError> {
        match format {
            Format::Json => Ok(pretty(self)? + "\n"),
            Format::Csv => {
                let mut buf = Vec::new();
                {
                    let mut w = csv::Writer::from_writer(&mut buf);
                    w.write_record(["class", "verdict", "samples", "x", "y", "t", "lhs", "rhs", "deficit"])?;
                    let v = self.report.worst_violation;
                    let field = |f: fn(&crate::classify::Violation) -> f64| v.as_ref().map(|v| num(f(v))).unwrap_or_default();
                    w.write_record([
                        self.class.clone(),
                        self.label.clone(),
                        self.report.samples.to_string(),
                        field(|v| v.x),
                        field(|v| v.y),
                        field(|v| v.t),
                        field(|v| v.lhs),
                        field(|v| v.rhs),
                        field(|v| v.deficit),
                    ])?;
                    w.flush().map_err(csv::Error::from)?;
                }
                Ok(String::from_utf8(buf).expect("csv output is utf-8"))
            }
            Format::Table => {
                let mut s = format!("{}: {} ({} samples)\n", self.class, self.label, self.report.samples);
                if let Some(v) = &self.report.worst_violation {
                    s += &format!(
                        "worst violation at x={:.17}, y={:.17}, t={:.17}: lhs={:.17e} > rhs={:.17e} (deficit {:.3e})\n",
                        v.x, v.y, v.t, v.lhs, v.rhs, v.deficit
                    );
                }
                Ok(s)
            }
        }
    }
}
