//! Plain SVG charts of the sweep results together with their data as CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{write_csv, Detection, TableRow};
use crate::algorithms::AlgorithmKind;
use crate::error::Result;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Inputs of [`emit_figures`].
pub struct FigureData<'a> {
    pub rows: &'a [TableRow],
    pub detections: &'a [Detection],
    /// Prime whose individual periods are scattered against `D`.
    pub scatter_p: u64,
}

#[derive(Serialize)]
struct CountPoint {
    p: u64,
    algorithm: AlgorithmKind,
    periodic_count: usize,
}

#[derive(Serialize)]
struct MeanPoint {
    p: u64,
    algorithm: AlgorithmKind,
    mean_period: f64,
}

#[derive(Serialize)]
struct PeriodPoint {
    d: u64,
    algorithm: AlgorithmKind,
    period: usize,
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

/// Writes three charts and their CSVs into `out_dir`, returning the paths.
pub fn emit_figures(out_dir: &Path, data: &FigureData<'_>) -> Result<Vec<PathBuf>> {
    let algs = algorithms_in(data.rows.iter().map(|r| r.algorithm));
    let mut written = Vec::new();

    let counts: Vec<CountPoint> = data
        .rows
        .iter()
        .map(|r| CountPoint { p: r.p, algorithm: r.algorithm, periodic_count: r.periodic_count })
        .collect();
    let series = per_algorithm(&algs, |a| {
        counts.iter().filter(|c| c.algorithm == a).map(|c| (c.p as f64, c.periodic_count as f64)).collect()
    });
    written.extend(save(out_dir, "periodic_counts", &counts, &chart(
        "Number of periodic square roots", "p", "periodic", &series, true,
    ))?);

    let means: Vec<MeanPoint> = data
        .rows
        .iter()
        .map(|r| MeanPoint { p: r.p, algorithm: r.algorithm, mean_period: r.mean_period })
        .collect();
    let series = per_algorithm(&algs, |a| {
        means.iter().filter(|c| c.algorithm == a).map(|c| (c.p as f64, c.mean_period)).collect()
    });
    written.extend(save(out_dir, "mean_periods", &means, &chart(
        "Mean periods of periodic square roots", "p", "mean period", &series, true,
    ))?);

    let periods: Vec<PeriodPoint> = data
        .detections
        .iter()
        .filter(|d| d.p == data.scatter_p)
        .filter_map(|d| d.period().map(|k| PeriodPoint { d: d.d, algorithm: d.algorithm, period: k }))
        .collect();
    let scatter_algs = algorithms_in(periods.iter().map(|p| p.algorithm));
    let series = per_algorithm(&scatter_algs, |a| {
        periods.iter().filter(|c| c.algorithm == a).map(|c| (c.d as f64, c.period as f64)).collect()
    });
    let title = format!("Period lengths of periodic square roots, p = {}", data.scatter_p);
    let name = format!("periods_p{}", data.scatter_p);
    written.extend(save(out_dir, &name, &periods, &chart(&title, "D", "period", &series, false))?);
    Ok(written)
}

fn algorithms_in(it: impl Iterator<Item = AlgorithmKind>) -> Vec<AlgorithmKind> {
    let mut v: Vec<AlgorithmKind> = it.collect();
    v.sort();
    v.dedup();
    v
}

fn per_algorithm(algs: &[AlgorithmKind], f: impl Fn(AlgorithmKind) -> Vec<(f64, f64)>) -> Vec<Series> {
    algs.iter().map(|&a| Series { name: a.to_string(), points: f(a) }).collect()
}

fn save<T: Serialize>(dir: &Path, name: &str, rows: &[T], svg: &str) -> Result<[PathBuf; 2]> {
    let csv = dir.join(format!("{name}.csv"));
    let svg_path = dir.join(format!("{name}.svg"));
    write_csv(&csv, rows)?;
    fs::write(&svg_path, svg)?;
    Ok([svg_path, csv])
}

fn chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series], lines: bool) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| HEIGHT - MARGIN - y / y1 * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, title);
    let (bx, by) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{bx} {MARGIN} L{bx} {by} L{} {by}" fill="none" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y1 * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(fx), by + 16.0, tick(fx));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, bx - 6.0, sy(fy) + 4.0, tick(fy));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 14.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if lines && ser.points.len() > 1 {
            let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, pts.join(" "));
        }
        for &(x, y) in &ser.points {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, WIDTH - MARGIN - 90.0, ly - 9.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, WIDTH - MARGIN - 74.0, ser.name);
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.1}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_valid_files() {
        let dir = tempfile::tempdir().unwrap();
        let data = FigureData { rows: &[], detections: &[], scatter_p: 5 };
        let files = emit_figures(dir.path(), &data).unwrap();
        assert_eq!(files.len(), 6);
        for f in files.iter().filter(|f| f.extension().unwrap() == "svg") {
            let s = fs::read_to_string(f).unwrap();
            assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        }
    }
}
