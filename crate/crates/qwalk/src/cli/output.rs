//! CSV emission plus gnuplot-script and SVG renderings.
//!
//! CSV is the single source of numeric truth: the SVG and gnuplot outputs
//! are renderings of data parsed back from the written CSV files, never
//! recomputed. All values use 17-significant-digit scientific notation so
//! files are byte-reproducible and parse back exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::Result;

/// One CSV table: metadata comment lines, column names, numeric rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Writes a table as CSV. Every non-data line is `#`-prefixed (gnuplot
/// skips them as comments); the last comment line names the columns.
pub fn write_csv(path: &Path, metadata: &[String], table: &Table) -> Result<()> {
    let mut s = String::new();
    for line in metadata {
        writeln!(s, "# {line}").unwrap();
    }
    writeln!(s, "# columns: {}", table.columns.join(",")).unwrap();
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Parses a CSV written by [`write_csv`] back into a table.
pub fn read_csv(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)?;
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# columns:") {
            columns = rest.trim().split(',').map(str::to_string).collect();
        } else if line.starts_with('#') || line.trim().is_empty() {
            continue;
        } else {
            let row: Vec<f64> = line
                .split(',')
                .map(|c| {
                    c.trim().parse().map_err(|_| {
                        crate::Error::Config(format!("bad CSV cell `{c}` in {}", path.display()))
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
    }
    Ok(Table { columns, rows })
}

/// One plotted line: a CSV file, the y column index, and a legend label.
/// Column 0 is always the x axis.
#[derive(Debug, Clone)]
pub struct Series {
    pub csv: PathBuf,
    pub y_column: usize,
    pub label: String,
}

/// Series for every non-x column of one CSV.
pub fn series_for(csv: &Path, table: &Table) -> Vec<Series> {
    (1..table.columns.len())
        .map(|i| Series {
            csv: csv.to_path_buf(),
            y_column: i,
            label: table.columns[i].clone(),
        })
        .collect()
}

fn file_name(path: &Path) -> String {
    path.file_name().unwrap().to_string_lossy().into_owned()
}

/// Emits a gnuplot script plotting the given series from their CSVs
/// (referenced by file name; the script lives in the same directory).
pub fn write_gnuplot(path: &Path, title: &str, x_label: &str, series: &[Series]) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set terminal svg size 880,540").unwrap();
    writeln!(
        s,
        "set output '{}'",
        file_name(&path.with_extension("svg"))
    )
    .unwrap();
    writeln!(s, "set title '{title}'").unwrap();
    writeln!(s, "set xlabel '{x_label}'").unwrap();
    writeln!(s, "set key outside right").unwrap();
    let parts: Vec<String> = series
        .iter()
        .map(|sr| {
            format!(
                "'{}' using 1:{} with lines title '{}'",
                file_name(&sr.csv),
                sr.y_column + 1,
                sr.label
            )
        })
        .collect();
    writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
    std::fs::write(path, s)?;
    Ok(())
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#7f7f7f",
];

const W: f64 = 880.0;
const H: f64 = 540.0;
const ML: f64 = 70.0; // left margin
const MR: f64 = 180.0; // right margin (legend)
const MT: f64 = 40.0;
const MB: f64 = 50.0;

fn tick_label(v: f64) -> String {
    // short deterministic tick format
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 10000.0 {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{v:.3e}")
    }
}

/// Renders series (parsed from the CSVs) as a standalone SVG line plot.
/// NaN cells break the polyline into segments.
pub fn write_svg(path: &Path, title: &str, x_label: &str, series: &[Series]) -> Result<()> {
    // load data
    let mut loaded: Vec<(Vec<f64>, Vec<f64>, &Series)> = Vec::new();
    for sr in series {
        let table = read_csv(&sr.csv)?;
        let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = table.rows.iter().map(|r| r[sr.y_column]).collect();
        loaded.push((xs, ys, sr));
    }
    let finite = |it: &mut dyn Iterator<Item = f64>| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in it.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            (0.0, 1.0)
        } else if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x_lo, x_hi) = finite(&mut loaded.iter().flat_map(|(xs, _, _)| xs.iter().copied()));
    let (mut y_lo, mut y_hi) = finite(&mut loaded.iter().flat_map(|(_, ys, _)| ys.iter().copied()));
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    let px = |x: f64| ML + (x - x_lo) / (x_hi - x_lo) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y_lo) / (y_hi - y_lo) * (H - MT - MB);

    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns='http://www.w3.org/2000/svg' viewBox='0 0 {W} {H}' font-family='sans-serif' font-size='13'>"
    )
    .unwrap();
    writeln!(s, "<rect width='{W}' height='{H}' fill='white'/>").unwrap();
    writeln!(
        s,
        "<text x='{:.1}' y='24' text-anchor='middle' font-size='16'>{title}</text>",
        (ML + W - MR) / 2.0
    )
    .unwrap();
    // axes
    writeln!(
        s,
        "<rect x='{ML}' y='{MT}' width='{:.1}' height='{:.1}' fill='none' stroke='black'/>",
        W - ML - MR,
        H - MT - MB
    )
    .unwrap();
    // ticks
    for i in 0..=5 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let fy = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        writeln!(
            s,
            "<line x1='{0:.1}' y1='{1:.1}' x2='{0:.1}' y2='{2:.1}' stroke='black'/>",
            px(fx),
            H - MB,
            H - MB + 5.0
        )
        .unwrap();
        writeln!(
            s,
            "<text x='{:.1}' y='{:.1}' text-anchor='middle'>{}</text>",
            px(fx),
            H - MB + 20.0,
            tick_label(fx)
        )
        .unwrap();
        writeln!(
            s,
            "<line x1='{0:.1}' y1='{1:.1}' x2='{2:.1}' y2='{1:.1}' stroke='black'/>",
            ML - 5.0,
            py(fy),
            ML
        )
        .unwrap();
        writeln!(
            s,
            "<text x='{:.1}' y='{:.1}' text-anchor='end'>{}</text>",
            ML - 8.0,
            py(fy) + 4.0,
            tick_label(fy)
        )
        .unwrap();
    }
    writeln!(
        s,
        "<text x='{:.1}' y='{:.1}' text-anchor='middle'>{x_label}</text>",
        (ML + W - MR) / 2.0,
        H - 12.0
    )
    .unwrap();
    // polylines
    for (idx, (xs, ys, sr)) in loaded.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut segment = String::new();
        let flush = |seg: &mut String, out: &mut String| {
            if !seg.is_empty() {
                writeln!(
                    out,
                    "<polyline fill='none' stroke='{color}' stroke-width='1.5' points='{seg}'/>"
                )
                .unwrap();
                seg.clear();
            }
        };
        for (&x, &y) in xs.iter().zip(ys) {
            if x.is_finite() && y.is_finite() {
                write!(segment, "{:.2},{:.2} ", px(x), py(y)).unwrap();
            } else {
                flush(&mut segment, &mut s);
            }
        }
        flush(&mut segment, &mut s);
        // legend entry
        let ly = MT + 18.0 * idx as f64 + 10.0;
        writeln!(
            s,
            "<line x1='{0:.1}' y1='{ly:.1}' x2='{1:.1}' y2='{ly:.1}' stroke='{color}' stroke-width='2'/>",
            W - MR + 10.0,
            W - MR + 40.0
        )
        .unwrap();
        writeln!(
            s,
            "<text x='{:.1}' y='{:.1}'>{}</text>",
            W - MR + 46.0,
            ly + 4.0,
            sr.label
        )
        .unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    std::fs::write(path, s)?;
    Ok(())
}
