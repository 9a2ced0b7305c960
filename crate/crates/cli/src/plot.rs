//! Deterministic SVG line plots from CSV columns.

use std::fmt::Write as _;

use crate::error::CliError;
use crate::table::sig9;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
pub const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

const LEFT: f64 = 70.0;
const RIGHT: f64 = 620.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 440.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct PlotRequest {
    /// Defaults to the first column.
    pub x: Option<String>,
    /// Defaults to every column other than `x` and `group_by`.
    pub columns: Vec<String>,
    /// Splits rows into one series per distinct value of this column.
    pub group_by: Option<String>,
}

/// Parses `csv_text` and extracts the requested series.
pub fn read_series(csv_text: &str, request: &PlotRequest) -> Result<(String, Vec<Series>), CliError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::config(format!("bad CSV header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::config(format!("missing column '{name}'")))
    };
    let x_name = match &request.x {
        Some(x) => x.clone(),
        None => header.first().cloned().ok_or_else(|| CliError::config("no data"))?,
    };
    let x_idx = find(&x_name)?;
    let group_idx = request.group_by.as_deref().map(find).transpose()?;
    let columns: Vec<String> = if request.columns.is_empty() {
        header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != x_idx && Some(i) != group_idx)
            .map(|(_, h)| h.clone())
            .collect()
    } else {
        request.columns.clone()
    };
    if columns.is_empty() {
        return Err(CliError::config("no series columns to plot"));
    }
    let col_idx = columns.iter().map(|c| find(c)).collect::<Result<Vec<_>, _>>()?;

    // Series keyed by (group value, column), in order of first appearance.
    let mut series: Vec<Series> = Vec::new();
    let mut groups: Vec<String> = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::config(format!("bad CSV row {}: {e}", row_no + 2)))?;
        let cell = |i: usize| -> Result<f64, CliError> {
            let raw = record.get(i).unwrap_or("");
            raw.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                CliError::config(format!(
                    "row {}, column '{}': not a finite number: '{raw}'",
                    row_no + 2,
                    header[i]
                ))
            })
        };
        let x = cell(x_idx)?;
        let g = match group_idx {
            Some(gi) => {
                let value = record.get(gi).unwrap_or("").to_string();
                match groups.iter().position(|v| *v == value) {
                    Some(p) => p,
                    None => {
                        groups.push(value);
                        groups.len() - 1
                    }
                }
            }
            None => 0,
        };
        for (c, &ci) in col_idx.iter().enumerate() {
            let y = cell(ci)?;
            let slot = g * col_idx.len() + c;
            while series.len() <= slot {
                let k = series.len();
                let (gk, ck) = (k / col_idx.len(), k % col_idx.len());
                let label = match (&request.group_by, groups.get(gk)) {
                    (Some(name), Some(value)) => format!("{} ({name}={value})", columns[ck]),
                    _ => columns[ck].clone(),
                };
                series.push(Series {
                    label,
                    points: Vec::new(),
                });
            }
            series[slot].points.push((x, y));
        }
    }
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(CliError::config("no data"));
    }
    Ok((x_name, series))
}

/// About five round-numbered ticks covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    };
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    // Strip representation noise such as 0.30000000000000004.
    sig9((v * 1e9).round() / 1e9)
}

pub fn render_svg(x_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| &s.points);
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    let x_ticks = nice_ticks(x_lo, x_hi);
    let y_ticks = nice_ticks(y_lo, y_hi);
    let (x0, x1) = (x_ticks[0], *x_ticks.last().unwrap());
    let (y0, y1) = (y_ticks[0], *y_ticks.last().unwrap());
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
    let py = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let _ = writeln!(svg, r##"<g stroke="#e0e0e0" stroke-width="1">"##);
    for &t in &x_ticks {
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.2}" y1="{TOP:.2}" x2="{0:.2}" y2="{BOTTOM:.2}"/>"#,
            px(t)
        );
    }
    for &t in &y_ticks {
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT:.2}" y1="{0:.2}" x2="{RIGHT:.2}" y2="{0:.2}"/>"#,
            py(t)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    let _ = writeln!(svg, r#"<g text-anchor="middle">"#);
    for &t in &x_ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            px(t),
            BOTTOM + 18.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 42.0,
        escape(x_label)
    );
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g text-anchor="end">"#);
    for &t in &y_ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT - 8.0,
            py(t) + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(svg, "</g>");

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        for (k, &(x, y)) in s.points.iter().enumerate() {
            if k > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", px(x), py(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let y = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            RIGHT + 15.0,
            RIGHT + 35.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            RIGHT + 40.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn render_lineplot(csv_text: &str, request: &PlotRequest) -> Result<String, CliError> {
    let (x_label, series) = read_series(csv_text, request)?;
    Ok(render_svg(&x_label, &series))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(columns: &[&str]) -> PlotRequest {
        PlotRequest {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..PlotRequest::default()
        }
    }

    #[test]
    fn constant_series_is_one_horizontal_polyline() {
        let svg = render_lineplot("t,s\n0,0.5\n1,0.5\n2,0.5\n", &request(&["s"])).unwrap();
        let lines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(lines.len(), 1);
        let points = lines[0].split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        let ys: Vec<&str> = points.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert_eq!(ys.len(), 3);
        assert!(ys.iter().all(|y| *y == ys[0]));
    }

    #[test]
    fn empty_and_missing() {
        let err = render_lineplot("t,s\n", &request(&["s"])).unwrap_err();
        assert_eq!(err.to_string(), "no data");
        let err = render_lineplot("t,s\n0,1\n", &request(&["r"])).unwrap_err();
        assert_eq!(err.to_string(), "missing column 'r'");
        assert_eq!(err.exit_code(), 2);
        assert!(render_lineplot("t,s\n0,abc\n", &request(&["s"])).is_err());
    }

    #[test]
    fn grouping_splits_series() {
        let csv = "epsilon,t,s\n0,0,0.1\n0,1,0.2\ninf,0,0.1\ninf,1,0.05\n";
        let req = PlotRequest {
            x: Some("t".into()),
            group_by: Some("epsilon".into()),
            ..PlotRequest::default()
        };
        let (_, series) = read_series(csv, &req).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].label, "s (epsilon=0)");
        assert_eq!(series[1].points, vec![(0.0, 0.1), (1.0, 0.05)]);
    }

    #[test]
    fn ticks_cover_range() {
        assert_eq!(nice_ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        let t = nice_ticks(0.5, 0.5);
        assert!(t[0] < 0.5 && *t.last().unwrap() > 0.5);
        assert_eq!(tick_label(0.6000000000000001), "0.6");
    }

    #[test]
    fn escapes_labels() {
        let svg = render_svg(
            "a<b",
            &[Series {
                label: "x&y".into(),
                points: vec![(0.0, 0.0), (1.0, 1.0)],
            }],
        );
        assert!(svg.contains("a&lt;b") && svg.contains("x&amp;y"));
    }
}
