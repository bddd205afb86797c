//! Machine-readable reports and plot data.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::survey::{emit_csv, Schema, SurveyTable};

/// JSON report with the top-level keys `command`, `inputs`, `results`,
/// `warnings` and `version`. Field order and map ordering are fixed, so
/// identical inputs serialize to identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub results: Value,
    pub warnings: Vec<String>,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    pub args: BTreeMap<String, Value>,
    pub tables: Vec<String>,
    /// SHA-256 over the command, its arguments and the rows of every table.
    pub digest: String,
}

impl Report {
    pub fn new(
        command: &str,
        args: BTreeMap<String, Value>,
        tables: &[&SurveyTable],
        results: Value,
    ) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update(b"\n");
        hasher.update(serde_json::to_string(&args).expect("json args").as_bytes());
        for t in tables {
            hasher.update(b"\n");
            let owned = [(*t).clone()];
            hasher.update(emit_csv(&owned, Schema::Long).expect("csv").as_bytes());
        }
        let digest = hasher.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Self {
            command: command.to_string(),
            inputs: Inputs {
                args,
                tables: tables.iter().map(|t| t.label()).collect(),
                digest,
            },
            results,
            warnings: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One named line of `(x, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Matrix as CSV: a header of `row_label` plus column labels, one line per
/// row.
pub fn matrix_csv(row_label: &str, columns: &[String], rows: &[(String, Vec<f64>)]) -> String {
    let mut out = String::new();
    out.push_str(row_label);
    for c in columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (label, values) in rows {
        out.push_str(label);
        for v in values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Minimal SVG line chart.
pub fn svg_line_chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        w / 2.0,
        h - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="black" points="{pad},{pad} {pad},{} {},{}"/>"#,
        h - pad,
        w - pad,
        h - pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{y0:.3}</text>"#,
        pad - 4.0,
        h - pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{y1:.3}</text>"#,
        pad - 4.0,
        pad + 4.0
    );
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{colour}" font-family="sans-serif" font-size="11">{}</text>"#,
            w - pad + 4.0,
            pad + 14.0 * i as f64,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
