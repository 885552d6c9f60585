//! Static SVG renderings of the CSV artifacts: gap profiles as polylines
//! and summary aggregates as grouped bars. Text-only output; no external
//! renderer.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const SERIES_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// One parsed CSV: named columns, numeric-or-text cells by row.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Schema(format!("missing column '{name}'")))
    }

    fn number(&self, row: usize, col: usize) -> Result<f64> {
        self.rows[row][col].parse::<f64>().map_err(|_| Error::Parse {
            // +2: 1-based, plus the header row; comment lines were counted
            // during parsing so this is approximate only for commented files
            line: row + 2,
            msg: format!(
                "column '{}' value '{}' is not numeric",
                self.columns[col], self.rows[row][col]
            ),
        })
    }
}

fn parse_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path)?;
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut width = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
        match &columns {
            None => {
                width = cells.len();
                if width < 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "header needs at least two columns".into(),
                    });
                }
                columns = Some(cells);
            }
            Some(_) => {
                if cells.len() != width {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected {width} cells, found {}", cells.len()),
                    });
                }
                rows.push(cells);
            }
        }
    }
    let columns = columns.ok_or(Error::InvalidInput("CSV has no header".into()))?;
    if rows.is_empty() {
        return Err(Error::InvalidInput("CSV has no data rows".into()));
    }
    Ok(Table { columns, rows })
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Scale {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let span = (self.max - self.min).max(1e-300);
        self.lo_px + (v - self.min) / span * (self.hi_px - self.lo_px)
    }
}

fn axes(out: &mut String, x: &Scale, y: &Scale, x_label: &str, y_label: &str) {
    let x0 = x.lo_px;
    let x1 = x.hi_px;
    let y0 = y.lo_px;
    let y1 = y.hi_px;
    let _ = write!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let vx = x.min + f * (x.max - x.min);
        let vy = y.min + f * (y.max - y.min);
        let px = x.map(vx);
        let py = y.map(vy);
        let _ = write!(
            out,
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{vx:.2}</text>\n\
             <text x=\"{}\" y=\"{py}\" text-anchor=\"end\">{vy:.3}</text>\n",
            y0 + 18.0,
            x0 - 6.0
        );
    }
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>\n",
        (x0 + x1) / 2.0,
        y0 + 38.0,
        xml_escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        xml_escape(y_label)
    );
}

/// Renders one polyline per labeled gap CSV (columns k, s_or_t, E0, E1,
/// gap) into a single SVG. Empty or malformed inputs error before any
/// file is written.
pub fn plot_gap_profiles(inputs: &[(String, std::path::PathBuf)], out: &Path) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::InvalidInput("no gap CSV inputs".into()));
    }
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for (label, path) in inputs {
        let table = parse_csv(path)?;
        let s_col = table.column("s_or_t")?;
        let gap_col = table.column("gap")?;
        let mut pts = Vec::with_capacity(table.rows.len());
        for r in 0..table.rows.len() {
            pts.push((table.number(r, s_col)?, table.number(r, gap_col)?));
        }
        series.push((label.clone(), pts));
    }

    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, pts) in &series {
        for &(x, y) in pts {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let x = Scale { min: x_min, max: x_max, lo_px: MARGIN_L, hi_px: WIDTH - MARGIN_R };
    let y = Scale {
        min: (y_min - 0.05 * (y_max - y_min)).min(0.0),
        max: y_max + 0.05 * (y_max - y_min),
        lo_px: HEIGHT - MARGIN_B,
        hi_px: MARGIN_T,
    };

    let mut svg = svg_open("spectral gap per schedule position");
    axes(&mut svg, &x, &y, "s", "gap");
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(px, py)| format!("{:.2},{:.2}", x.map(px), y.map(py)))
            .collect();
        let _ = write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        );
        let ly = MARGIN_T + 16.0 * i as f64 + 10.0;
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{}\" y=\"{}\">{}</text>\n",
            WIDTH - MARGIN_R + 10.0,
            WIDTH - MARGIN_R + 30.0,
            WIDTH - MARGIN_R + 36.0,
            ly + 4.0,
            xml_escape(label)
        );
    }
    svg.push_str("</svg>\n");
    fs::write(out, svg)?;
    Ok(())
}

/// Renders one summary CSV column (e.g. median_cost_diff) as grouped
/// bars: one group per (n, field_range) cell, one bar per driver.
pub fn plot_summary_bars(input: &Path, out: &Path, value_column: &str) -> Result<()> {
    let table = parse_csv(input)?;
    let n_col = table.column("n")?;
    let range_col = table.column("field_range")?;
    let driver_col = table.column("driver")?;
    let value_col = table.column(value_column)?;

    // stable group order = first appearance; drivers likewise
    let mut groups: Vec<String> = Vec::new();
    let mut drivers: Vec<String> = Vec::new();
    let mut values: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for r in 0..table.rows.len() {
        let group = format!("n{} r{}", table.rows[r][n_col], table.rows[r][range_col]);
        let driver = table.rows[r][driver_col].clone();
        let gi = groups.iter().position(|g| *g == group).unwrap_or_else(|| {
            groups.push(group.clone());
            groups.len() - 1
        });
        let di = drivers.iter().position(|d| *d == driver).unwrap_or_else(|| {
            drivers.push(driver.clone());
            drivers.len() - 1
        });
        values.insert((gi, di), table.number(r, value_col)?);
    }

    let v_max = values.values().fold(0.0f64, |m, v| m.max(*v)).max(1e-12);
    let y = Scale {
        min: 0.0,
        max: v_max * 1.05,
        lo_px: HEIGHT - MARGIN_B,
        hi_px: MARGIN_T,
    };
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let group_w = plot_w / groups.len() as f64;
    let bar_w = group_w * 0.8 / drivers.len() as f64;

    let mut svg = svg_open(&format!("{value_column} per cell"));
    let x_axis = Scale { min: 0.0, max: 1.0, lo_px: MARGIN_L, hi_px: WIDTH - MARGIN_R };
    axes(&mut svg, &x_axis, &y, "", value_column);
    for (gi, group) in groups.iter().enumerate() {
        let gx = MARGIN_L + gi as f64 * group_w;
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            gx + group_w / 2.0,
            HEIGHT - MARGIN_B + 32.0,
            xml_escape(group)
        );
        for (di, _) in drivers.iter().enumerate() {
            if let Some(&v) = values.get(&(gi, di)) {
                let bx = gx + group_w * 0.1 + di as f64 * bar_w;
                let by = y.map(v);
                let color = SERIES_COLORS[di % SERIES_COLORS.len()];
                let _ = write!(
                    svg,
                    "<rect x=\"{bx:.2}\" y=\"{by:.2}\" width=\"{bar_w:.2}\" height=\"{:.2}\" \
                     fill=\"{color}\"/>\n",
                    (HEIGHT - MARGIN_B) - by
                );
            }
        }
    }
    for (di, driver) in drivers.iter().enumerate() {
        let color = SERIES_COLORS[di % SERIES_COLORS.len()];
        let ly = MARGIN_T + 16.0 * di as f64 + 10.0;
        let _ = write!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{}\" y=\"{}\">{}</text>\n",
            WIDTH - MARGIN_R + 10.0,
            ly - 6.0,
            WIDTH - MARGIN_R + 28.0,
            ly + 4.0,
            xml_escape(driver)
        );
    }
    svg.push_str("</svg>\n");
    fs::write(out, svg)?;
    Ok(())
}
