//! Deterministic CSV, JSON and SVG writers. Every file starts with the same
//! header block so any output can be traced back to its config and seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub generator: String,
    pub version: String,
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Header {
    pub fn new(experiment: &str, config_hash: &str, seed: u64) -> Self {
        Self {
            generator: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: experiment.to_string(),
            config_hash: config_hash.to_string(),
            seed,
        }
    }

    fn lines(&self) -> [String; 4] {
        [
            format!("{} {}", self.generator, self.version),
            format!("experiment: {}", self.experiment),
            format!("config_hash: {}", self.config_hash),
            format!("seed: {}", self.seed),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Summary of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub header: Header,
    pub files: Vec<FileEntry>,
    pub summary: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn experiment(&self) -> &str {
        &self.header.experiment
    }

    pub fn config_hash(&self) -> &str {
        &self.header.config_hash
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        self.summary.get(key).copied()
    }
}

/// A table of named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self, header: &Header) -> String {
        let mut out = String::new();
        for line in header.lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "nan".to_string()
    }
}

/// One curve of a plot.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub markers: bool,
}

impl Series {
    pub fn line(name: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { name: name.to_string(), x, y, markers: false }
    }

    pub fn scatter(name: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { name: name.to_string(), x, y, markers: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), series: Vec::new() }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn to_svg(&self, header: &Header) -> String {
        let (w, h) = (720.0, 460.0);
        let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
        let finite = |v: &&f64| v.is_finite();
        let xs: Vec<f64> = self.series.iter().flat_map(|s| s.x.iter().filter(finite).copied()).collect();
        let ys: Vec<f64> = self.series.iter().flat_map(|s| s.y.iter().filter(finite).copied()).collect();
        let (x0, x1) = padded_range(&xs);
        let (y0, y1) = padded_range(&ys);
        let pw = w - left - right;
        let ph = h - top - bottom;
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ =
            writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
        let _ = writeln!(out, "<!--");
        for line in header.lines() {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "-->");
        let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
        );
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let xv = x0 + t * (x1 - x0);
            let yv = y0 + t * (y1 - y0);
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                sx(xv),
                top + ph + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                left - 6.0,
                sy(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="22" font-size="14" text-anchor="middle">{}</text>"#,
            left + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            left + pw / 2.0,
            h - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            top + ph / 2.0,
            top + ph / 2.0,
            escape(&self.y_label)
        );
        for (k, s) in self.series.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let pts: Vec<(f64, f64)> =
                s.x.iter()
                    .zip(&s.y)
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .map(|(&x, &y)| (sx(x), sy(y)))
                    .collect();
            if s.markers {
                for (px, py) in &pts {
                    let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5" fill="{colour}"/>"#);
                }
            } else if !pts.is_empty() {
                let path: Vec<String> = pts.iter().map(|(px, py)| format!("{px:.2},{py:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                    path.join(" ")
                );
            }
            let ly = top + 14.0 + 18.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#,
                w - right + 12.0,
                w - right + 32.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                w - right + 38.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        let _ = writeln!(out, "</svg>");
        out
    }
}

fn padded_range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span <= 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5 * lo.abs().max(1.0) * 1e-3 - 0.5, hi + 0.5 * hi.abs().max(1.0) * 1e-3 + 0.5);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Collects the files of one run in an output directory.
#[derive(Debug)]
pub struct OutputSink {
    dir: PathBuf,
    header: Header,
    files: Vec<FileEntry>,
}

impl OutputSink {
    pub fn create(dir: &Path, header: Header) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), header, files: Vec::new() })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
            bytes: contents.len(),
        });
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        let text = table.to_csv(&self.header);
        self.write(name, &text)
    }

    /// JSON document `{"header": …, "data": …}`.
    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            header: &'a Header,
            data: &'a T,
        }
        let mut text = serde_json::to_string_pretty(&Doc { header: &self.header, data })?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn svg(&mut self, name: &str, plot: &Plot) -> Result<()> {
        let text = plot.to_svg(&self.header);
        self.write(name, &text)
    }

    /// Writes `report.json` and returns the report.
    pub fn finish(self, summary: BTreeMap<String, f64>) -> Result<RunReport> {
        let report = RunReport { header: self.header, files: self.files, summary };
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        std::fs::write(self.dir.join("report.json"), text)?;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header::new("unit", "abc123", 7)
    }

    #[test]
    fn csv_starts_with_the_header_block() {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![1.0, 0.5]);
        t.push(vec![2.0, f64::NAN]);
        let csv = t.to_csv(&header());
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# qutritlab-core"));
        assert_eq!(lines[2], "# config_hash: abc123");
        assert_eq!(lines[4], "x,y");
        assert_eq!(lines[6], "2,nan");
        assert_eq!(t.column("y").unwrap()[0], 0.5);
    }

    #[test]
    fn floats_round_trip_through_csv() {
        let v = 0.1 + 0.2;
        assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn svg_is_deterministic_and_carries_the_hash() {
        let plot = Plot::new("t", "x", "y")
            .with(Series::line("a", vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0]))
            .with(Series::scatter("b", vec![0.5], vec![0.5]));
        let a = plot.to_svg(&header());
        assert_eq!(a, plot.to_svg(&header()));
        assert!(a.contains("config_hash: abc123"));
        assert!(a.contains("<polyline") && a.contains("<circle"));
    }

    #[test]
    fn constant_series_still_plots() {
        let plot = Plot::new("flat", "x", "y").with(Series::line("c", vec![0.0, 1.0], vec![2.0, 2.0]));
        assert!(!plot.to_svg(&header()).contains("NaN"));
    }

    #[test]
    fn sink_records_a_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut sink = OutputSink::create(dir.path(), header()).unwrap();
        sink.json("x.json", &vec![1.0, 2.0]).unwrap();
        let report = sink.finish(BTreeMap::from([("k".to_string(), 1.5)])).unwrap();
        assert_eq!(report.files.len(), 1);
        assert_eq!(report.scalar("k"), Some(1.5));
        let text = std::fs::read_to_string(dir.path().join("x.json")).unwrap();
        assert!(text.contains("\"config_hash\": \"abc123\""));
        assert_eq!(report.files[0].sha256, hex::encode(Sha256::digest(text.as_bytes())));
    }
}
