//! Report rows and their deterministic CSV/JSON emission.
//!
//! The row schema is flat so both formats carry identical fields in
//! identical order.  Floats are printed as the shortest text that parses
//! back to the same bits, so a fixed config always produces byte-identical
//! reports.

use std::io::{self, Write};

use serde::Serialize;
use weightlab_core::Interval;

use crate::config::OutputFormat;

/// Fixed CSV column order.
pub const CSV_HEADER: &str =
    "analysis,weight,scale,id,value,value2,witness_lo,witness_hi,depth,panels,floor,verdict";

/// One report line.
///
/// `scale` is the scale bound δ (or box height / narrow width) the value
/// belongs to, when it has one.  `id` names the quantity within the
/// analysis; supremum rows carry their witness interval, quadrature rows
/// their depth/panel metadata.  `floor` is the structural lower bound of
/// the reported functional (0 or 1).
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub analysis: String,
    pub weight: String,
    pub scale: Option<f64>,
    pub id: String,
    pub value: Option<f64>,
    pub value2: Option<f64>,
    pub witness_lo: Option<f64>,
    pub witness_hi: Option<f64>,
    pub depth: Option<usize>,
    pub panels: Option<usize>,
    pub floor: u8,
    pub verdict: String,
}

impl ReportRow {
    /// Bare row: everything optional empty, floor 0, verdict `ok`.
    pub fn new(analysis: &str, weight: &str, id: impl Into<String>) -> Self {
        Self {
            analysis: analysis.to_string(),
            weight: weight.to_string(),
            scale: None,
            id: id.into(),
            value: None,
            value2: None,
            witness_lo: None,
            witness_hi: None,
            depth: None,
            panels: None,
            floor: 0,
            verdict: "ok".to_string(),
        }
    }

    /// Attach a witness interval's endpoints.
    pub fn with_witness(mut self, w: Option<Interval>) -> Self {
        self.witness_lo = w.map(|i| i.lo());
        self.witness_hi = w.map(|i| i.hi());
        self
    }

    fn record(&self) -> [String; 12] {
        [
            self.analysis.clone(),
            self.weight.clone(),
            fmt_opt(self.scale),
            self.id.clone(),
            fmt_opt(self.value),
            fmt_opt(self.value2),
            fmt_opt(self.witness_lo),
            fmt_opt(self.witness_hi),
            self.depth.map(|d| d.to_string()).unwrap_or_default(),
            self.panels.map(|p| p.to_string()).unwrap_or_default(),
            self.floor.to_string(),
            self.verdict.clone(),
        ]
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render rows as CSV with the fixed header.
pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for row in rows {
        wtr.write_record(row.record()).expect("in-memory write");
    }
    let bytes = wtr.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// Render rows as a JSON array mirroring the CSV fields.
pub fn to_json(rows: &[ReportRow]) -> String {
    let mut text = serde_json::to_string_pretty(rows).expect("rows serialize");
    text.push('\n');
    text
}

/// Render rows in the requested format.
pub fn render(rows: &[ReportRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows),
    }
}

/// Write the rendered report to `out` (`-` = stdout).  Refuses an empty
/// row list: every run must report something.
pub fn emit(rows: &[ReportRow], format: OutputFormat, out: &str) -> io::Result<()> {
    if rows.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no report rows to emit"));
    }
    let text = render(rows, format);
    if out == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        lock.write_all(text.as_bytes())?;
        lock.flush()
    } else {
        std::fs::write(out, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportRow {
        let mut r = ReportRow::new("mitsis", "power:0:1", "mitsis")
            .with_witness(Some(Interval::new(-0.125, 0.125)));
        r.scale = Some(0.25);
        r.value = Some(1.3591409142295225);
        r.floor = 1;
        r
    }

    #[test]
    fn csv_has_fixed_header_and_one_line_per_row() {
        let text = to_csv(&[sample()]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(
            row,
            "mitsis,power:0:1,0.25,mitsis,1.3591409142295225,,-0.125,0.125,,,1,ok"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn json_mirrors_the_rows() {
        let text = to_json(&[sample(), ReportRow::new("masses", "constant:1", "mass")]);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        let arr = parsed.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert_eq!(arr[0]["analysis"], "mitsis");
        assert_eq!(arr[0]["scale"], 0.25);
        assert_eq!(arr[1]["value"], serde_json::Value::Null);
        assert_eq!(arr[1]["verdict"], "ok");
    }

    #[test]
    fn rendering_is_deterministic() {
        let rows = [sample(), sample()];
        assert_eq!(to_csv(&rows), to_csv(&rows));
        assert_eq!(to_json(&rows), to_json(&rows));
    }

    #[test]
    fn float_text_is_shortest_round_trip() {
        assert_eq!(fmt_opt(Some(0.1)), "0.1");
        assert_eq!(fmt_opt(Some(2.0)), "2");
        assert_eq!(fmt_opt(Some(1.0 / 3.0)), "0.3333333333333333");
        assert_eq!(fmt_opt(None), "");
        let v = 0.1f64 + 0.2;
        assert_eq!(fmt_opt(Some(v)).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn emit_refuses_empty_reports() {
        let err = emit(&[], OutputFormat::Csv, "-").unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::InvalidInput);
    }

    #[test]
    fn emit_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let rows = [sample()];
        emit(&rows, OutputFormat::Csv, path.to_str().unwrap()).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), to_csv(&rows));
    }
}
