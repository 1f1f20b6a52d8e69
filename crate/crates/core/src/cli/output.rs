//! CSV and SVG writers. Numbers are written with 17 significant digits so
//! files round-trip exactly; line endings are LF.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// `{:.16e}`: 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV file assembled in memory and written in one go.
#[derive(Debug, Clone)]
pub struct CsvTable {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn comments<I: IntoIterator<Item = String>>(&mut self, lines: I) -> &mut Self {
        self.comments.extend(lines);
        self
    }

    /// Appends a row of pre-formatted cells.
    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells.join(","));
    }

    pub fn numeric_row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| fmt_num(v)).collect();
        self.row(&cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{r}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

/// Key/value report with a `metric,value` header.
#[derive(Debug, Clone)]
pub struct Report {
    table: CsvTable,
}

impl Report {
    pub fn new(comments: Vec<String>) -> Self {
        let mut table = CsvTable::new(&["metric", "value"]);
        table.comments(comments);
        Report { table }
    }

    pub fn num(&mut self, metric: &str, value: f64) -> &mut Self {
        self.table.row(&[metric.to_string(), fmt_num(value)]);
        self
    }

    pub fn int(&mut self, metric: &str, value: usize) -> &mut Self {
        self.table.row(&[metric.to_string(), value.to_string()]);
        self
    }

    pub fn text(&mut self, metric: &str, value: &str) -> &mut Self {
        self.table.row(&[metric.to_string(), value.to_string()]);
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.table.write(path)
    }
}

/// One polyline in data coordinates.
#[derive(Debug, Clone)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub width: f64,
    pub dashed: bool,
}

/// Plot with `x¹` horizontal and `x⁰` vertical (time upward).
#[derive(Debug, Clone)]
pub struct SpacetimePlot {
    pub title: String,
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub series: Vec<Series>,
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

impl SpacetimePlot {
    fn map(&self, x: f64, t: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range;
        let (t0, t1) = self.t_range;
        let px = MARGIN + (x - x0) / (x1 - x0) * PLOT_W;
        let py = MARGIN + (t1 - t) / (t1 - t0) * PLOT_H;
        (px, py)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let w = PLOT_W + 2.0 * MARGIN;
        let h = PLOT_H + 2.0 * MARGIN;
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<defs><clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_W}" height="{PLOT_H}"/></clipPath></defs>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            w / 2.0,
            MARGIN / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
        );
        for x in nice_ticks(self.x_range.0, self.x_range.1) {
            let (px, _) = self.map(x, self.t_range.0);
            let y = MARGIN + PLOT_H;
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y}" x2="{px:.2}" y2="{}" stroke="black"/>"#, y + 5.0);
            let _ = writeln!(
                s,
                r#"<text x="{px:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{x}</text>"#,
                y + 20.0
            );
        }
        for t in nice_ticks(self.t_range.0, self.t_range.1) {
            let (_, py) = self.map(self.x_range.0, t);
            let _ = writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{MARGIN}" y2="{py:.2}" stroke="black"/>"#, MARGIN - 5.0);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{t}</text>"#,
                MARGIN - 8.0,
                py + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">x1</text>"#,
            w / 2.0,
            h - 12.0
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 16 {})">x0</text>"#,
            h / 2.0,
            h / 2.0
        );
        let _ = writeln!(s, r#"<g clip-path="url(#plot)" fill="none">"#);
        for series in &self.series {
            if series.points.len() < 2 {
                continue;
            }
            let pts: Vec<String> = series
                .points
                .iter()
                .map(|&(x, t)| {
                    let (px, py) = self.map(x, t);
                    format!("{px:.3},{py:.3}")
                })
                .collect();
            let dash = if series.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" stroke="{}" stroke-width="{}"{dash}/>"#,
                pts.join(" "),
                series.color,
                series.width
            );
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, "</svg>");
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `dir/prefix_suffix`.
pub fn output_path(dir: &Path, prefix: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{prefix}_{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.comment("digest=abc");
        t.numeric_row(&[1.0, 2.5]);
        let s = t.render();
        assert_eq!(s, "# digest=abc\na,b\n1.0000000000000000e0,2.5000000000000000e0\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let plot = SpacetimePlot {
            title: "a < b".into(),
            x_range: (-50.0, 50.0),
            t_range: (-600.0, 200.0),
            series: vec![Series {
                points: vec![(-10.0, -600.0), (0.0, 0.0), (10.0, 200.0)],
                color: "black",
                width: 1.0,
                dashed: false,
            }],
        };
        let s = plot.render();
        assert!(s.starts_with("<?xml"));
        assert!(s.contains(r#"version="1.1""#));
        assert!(s.contains("<polyline"));
        assert!(s.contains("a &lt; b"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<svg").count(), 1);
    }

    #[test]
    fn ticks_cover_range() {
        let t = nice_ticks(-600.0, 200.0);
        assert!(t.contains(&0.0) && t.len() >= 4);
        assert!(t.iter().all(|x| (-600.0..=200.0).contains(x)));
    }
}
