//! Minimal SVG line charts from CSV text.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(csv_text: &str) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(csv_text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Table { header, rows })
}

fn column(table: &Table, name: &str) -> Result<Vec<f64>> {
    let idx = table
        .header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| invalid(format!("unknown column {name:?}")))?;
    table
        .rows
        .iter()
        .map(|row| {
            row.get(idx)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("non-numeric value in column {name:?}")))
        })
        .collect()
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line chart of `y_cols` against `x_col`. A CSV with no data rows yields
/// bare axes; a CSV with no header at all is treated the same way.
pub fn emit_svg(csv_text: &str, x_col: &str, y_cols: &[&str]) -> Result<String> {
    let table = read_table(csv_text)?;
    let no_header = table.header.iter().all(|h| h.is_empty());
    let (xs, series) = if no_header {
        (Vec::new(), Vec::new())
    } else {
        let xs = column(&table, x_col)?;
        let series = y_cols
            .iter()
            .map(|&c| column(&table, c).map(|v| (c, v)))
            .collect::<Result<Vec<_>>>()?;
        (xs, series)
    };

    let (x0, x1) = range(xs.iter().copied());
    let (y0, y1) = range(series.iter().flat_map(|(_, v)| v.iter().copied()));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" stroke="black" fill="none"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_col)
    );
    for (x, anchor, label) in [(left, "start", x0), (right, "end", x1)] {
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" font-size="10" text-anchor="{anchor}">{label:.4}</text>"#,
            bottom + 14.0
        );
    }
    for (y, label) in [(bottom, y0), (top, y1)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" font-size="10" text-anchor="end">{label:.4}</text>"#,
            left - 4.0
        );
    }

    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if points.len() == 1 {
            let (cx, cy) = points[0].split_once(',').expect("formatted pair");
            let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        } else if !points.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#,
                points.join(" ")
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            right - 90.0,
            top + 14.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
