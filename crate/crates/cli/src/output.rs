//! CSV, JSON summary and SVG emission.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::run::{Check, Curve, Output, WindowInfo};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const UNITS: &str = "Hartree atomic units (hbar = e = m_e = 1); temperatures in K";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub column: String,
    pub min: f64,
    pub max: f64,
    pub t_at_min: f64,
    pub t_at_max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub name: String,
    pub file: String,
    pub rows: usize,
    pub stats: Vec<ColumnStats>,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub version: &'static str,
    pub units: &'static str,
    pub scenario: &'a Value,
    pub curves: Vec<CurveSummary>,
    pub windows: &'a [WindowInfo],
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Min, max (first occurrence) and mean of every column after t.
pub fn column_stats(columns: &[String], rows: &[Vec<f64>]) -> Vec<ColumnStats> {
    (1..columns.len())
        .map(|c| {
            let mut s = ColumnStats {
                column: columns[c].clone(),
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
                t_at_min: f64::NAN,
                t_at_max: f64::NAN,
                mean: 0.0,
            };
            for row in rows {
                if row[c] < s.min {
                    s.min = row[c];
                    s.t_at_min = row[0];
                }
                if row[c] > s.max {
                    s.max = row[c];
                    s.t_at_max = row[0];
                }
                s.mean += row[c];
            }
            s.mean /= rows.len() as f64;
            s
        })
        .collect()
}

fn header(scenario: &Value, name: &str) -> String {
    format!(
        "# qfield {VERSION}\n# units: {UNITS}\n# scenario: {}\n# curve: {name}\n",
        serde_json::to_string(scenario).expect("scenario serializes")
    )
}

pub fn format_csv(scenario: &Value, c: &Curve) -> String {
    let mut s = header(scenario, &c.name);
    s.push_str(&c.columns.join(","));
    s.push('\n');
    for row in &c.rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Reads a CSV written by [`format_csv`]: skips `#` lines, returns header and rows.
pub fn read_csv(path: &Path) -> io::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns: Vec<String> = lines
        .next()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "empty csv"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|x| x.parse::<f64>().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
                .collect()
        })
        .collect::<io::Result<Vec<Vec<f64>>>>()?;
    Ok((columns, rows))
}

/// Static line plot of every column against t.
pub fn svg(c: &Curve) -> String {
    const W: f64 = 720.0;
    const H: f64 = 440.0;
    const M: f64 = 60.0;
    const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let t0 = c.rows.first().map_or(0.0, |r| r[0]);
    let t1 = c.rows.last().map_or(1.0, |r| r[0]);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in &c.rows {
        for &y in &row[1..] {
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    if !(hi > lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    let sx = |t: f64| M + (t - t0) / (t1 - t0).max(f64::MIN_POSITIVE) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - lo) / (hi - lo) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        W - 2.0 * M,
        H - 2.0 * M
    );
    if lo < 0.0 && hi > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(s, r##"<line x1="{M}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#aaa" stroke-dasharray="4 3"/>"##, W - M);
    }
    for (k, col) in c.columns.iter().enumerate().skip(1) {
        let pts: Vec<String> = c.rows.iter().map(|r| format!("{:.2},{:.2}", sx(r[0]), sy(r[k]))).collect();
        let colour = COLOURS[(k - 1) % COLOURS.len()];
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{colour}">{col}</text>"#,
            W - M - 150.0,
            M + 16.0 * k as f64
        );
    }
    let text = |s: &mut String, x: f64, y: f64, anchor: &str, v: String| {
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{v}</text>"#);
    };
    text(&mut s, M - 6.0, M + 4.0, "end", format!("{hi:.3e}"));
    text(&mut s, M - 6.0, H - M + 4.0, "end", format!("{lo:.3e}"));
    text(&mut s, M, H - M + 18.0, "middle", format!("{t0:.4}"));
    text(&mut s, W - M, H - M + 18.0, "middle", format!("{t1:.4}"));
    text(&mut s, W / 2.0, H - 16.0, "middle", "t (a.u.)".into());
    text(&mut s, W / 2.0, 30.0, "middle", c.name.clone());
    s.push_str("</svg>\n");
    s
}

/// Writes every curve, reloads it, recomputes its statistics and records the
/// comparison as a check, then writes summary.json. Returns the checks.
pub fn write_all(dir: &Path, scenario: &Value, out: &Output, plots: bool) -> io::Result<Vec<Check>> {
    fs::create_dir_all(dir)?;
    let mut curves = Vec::with_capacity(out.curves.len());
    let mut reload_ok = true;
    let mut mismatched = Vec::new();
    for c in &out.curves {
        let file = format!("{}.csv", c.name);
        let path: PathBuf = dir.join(&file);
        fs::write(&path, format_csv(scenario, c))?;
        if plots {
            fs::write(dir.join(format!("{}.svg", c.name)), svg(c))?;
        }
        let stats = column_stats(&c.columns, &c.rows);
        let (cols, rows) = read_csv(&path)?;
        if cols != c.columns || !same_stats(&column_stats(&cols, &rows), &stats) {
            reload_ok = false;
            mismatched.push(file.clone());
        }
        curves.push(CurveSummary {
            name: c.name.clone(),
            file,
            rows: c.rows.len(),
            stats,
        });
    }
    for (name, body) in &out.extra {
        let mut text = header(scenario, name);
        text.push_str(body);
        fs::write(dir.join(format!("{name}.csv")), text)?;
    }
    let mut checks = out.checks.clone();
    checks.push(Check {
        name: "reload_and_recompute".into(),
        passed: reload_ok,
        detail: if reload_ok {
            format!("{} file(s)", curves.len())
        } else {
            format!("mismatch in {}", mismatched.join(", "))
        },
    });
    let summary = Summary {
        version: VERSION,
        units: UNITS,
        scenario,
        curves,
        windows: &out.windows,
        passed: checks.iter().all(|c| c.passed),
        checks: checks.clone(),
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    Ok(checks)
}

/// Bitwise equality, with NaN equal to NaN.
fn same_stats(a: &[ColumnStats], b: &[ColumnStats]) -> bool {
    let eq = |x: f64, y: f64| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan());
    a.len() == b.len()
        && a.iter().zip(b).all(|(p, q)| {
            p.column == q.column
                && eq(p.min, q.min)
                && eq(p.max, q.max)
                && eq(p.t_at_min, q.t_at_min)
                && eq(p.t_at_max, q.t_at_max)
                && eq(p.mean, q.mean)
        })
}
