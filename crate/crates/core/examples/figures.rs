//! Writes SVG charts of a small sweep into a directory (default `figures/`).

use std::path::PathBuf;

use padic_cf::experiments::{emit_figures, run_sweep, table_rows, FigureData, Profile, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "figures".into()).into();
    std::fs::create_dir_all(&out)?;

    let mut cfg = SweepConfig::profile(Profile::Desk);
    cfg.d_max = 300;
    cfg.max_steps = 500;
    cfg.parallelism = std::thread::available_parallelism().map_or(1, |n| n.get());

    let detections = run_sweep(&cfg)?;
    let rows = table_rows(&detections);
    let data = FigureData { rows: &rows, detections: &detections, scatter_p: 5 };
    for path in emit_figures(&out, &data)? {
        println!("{}", path.display());
    }
    Ok(())
}
