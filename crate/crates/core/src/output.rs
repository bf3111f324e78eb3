//! CSV artifacts of a run.
//!
//! Series files have columns `t_seconds,value`. Snapshot files have columns
//! `x_m,y_m,rho,v,f_1..f_N`, with `rho` and `f_i` as fractions of capacity
//! and `v` in m/s. `manifest.txt` lists every file written, one per line.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::metrics::MetricSeries;
use crate::scenario::Experiment;
use crate::solver::{Snapshot, Trace};

pub const MANIFEST: &str = "manifest.txt";

pub fn write_series(path: &Path, series: &MetricSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t_seconds", "value"])?;
    for (t, v) in series.times().iter().zip(series.values()) {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshot(path: &Path, exp: &Experiment, snap: &Snapshot) -> Result<()> {
    let grid = &exp.solver.grid;
    let d = exp.refs.length_m;
    let nd = snap.field.n_dirs();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["x_m".to_string(), "y_m".into(), "rho".into(), "v".into()];
    header.extend((1..=nd).map(|i| format!("f_{i}")));
    w.write_record(&header)?;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.index(i, j);
            let x = grid.center(i, j) * d;
            let mut row = vec![
                x.x.to_string(),
                x.y.to_string(),
                snap.field.density_at(c).to_string(),
                (snap.speed[c] * exp.refs.speed_mps).to_string(),
            ];
            row.extend(snap.field.cell(c).iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes all series, all snapshots and the manifest into `dir`; returns
/// the written paths relative to `dir`.
pub fn write_trace(dir: &Path, exp: &Experiment, trace: &Trace) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join("series"))?;
    fs::create_dir_all(dir.join("snapshots"))?;
    let mut written = Vec::new();
    for s in &trace.series {
        let rel = PathBuf::from("series").join(format!("{}.csv", s.label));
        write_series(&dir.join(&rel), s)?;
        written.push(rel);
    }
    for (k, snap) in trace.snapshots.iter().enumerate() {
        let rel = PathBuf::from("snapshots").join(format!("snapshot_{k:04}.csv"));
        write_snapshot(&dir.join(&rel), exp, snap)?;
        written.push(rel);
    }
    let mut manifest = String::new();
    for p in &written {
        manifest.push_str(&p.to_string_lossy());
        manifest.push('\n');
    }
    fs::write(dir.join(MANIFEST), manifest)?;
    Ok(written)
}
