//! CSV and plain-text report writers.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::diagnostics::{DiagnosticsRecord, SeriesRecord};
use crate::error::Result;
use crate::grid::{cell_velocity, Grid, State};
use crate::integrator::{Monitors, StopReason};

pub const SNAPSHOT_COLUMNS: [&str; 6] = ["x", "rho", "momentum", "u", "dF_drho", "eta"];
pub const SERIES_COLUMNS: [&str; 8] = [
    "t",
    "mass",
    "momentum",
    "kinetic",
    "free_energy",
    "total_energy",
    "center_of_mass",
    "dissipation",
];

/// Round-trippable double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_snapshot(path: &Path, g: &Grid, s: &State, rec: &DiagnosticsRecord, eps_vac: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SNAPSHOT_COLUMNS)?;
    for i in 0..g.len() {
        let variation = rec.variation[i].map(num).unwrap_or_default();
        w.write_record([
            num(g.centers()[i]),
            num(s.rho[i]),
            num(s.mom[i]),
            num(cell_velocity(s.rho[i], s.mom[i], eps_vac)),
            variation,
            num(rec.entropy[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Time series; a failed run ends with an `error` marker row.
pub fn write_series(path: &Path, series: &[SeriesRecord], error: Option<&str>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_path(path)?;
    w.write_record(SERIES_COLUMNS)?;
    for r in series {
        w.write_record([
            num(r.time),
            num(r.mass),
            num(r.momentum),
            num(r.kinetic),
            num(r.free_energy),
            num(r.total_energy),
            num(r.center_of_mass),
            num(r.dissipation),
        ])?;
    }
    if let Some(e) = error {
        w.write_record(["error", e])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` under `header` with every value round-trippable.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| if x.is_nan() { String::new() } else { num(*x) }))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn snapshot_path(dir: &Path, name: &str, k: usize) -> PathBuf {
    dir.join(format!("{name}_snapshot_{k:04}.csv"))
}

pub fn describe_run(
    name: &str,
    cells: usize,
    last: &DiagnosticsRecord,
    m: &Monitors,
    stop: StopReason,
    steps: usize,
) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "scenario {name}: {cells} cells, {steps} steps, stopped at t = {} ({stop:?})",
        last.time
    );
    let _ = writeln!(s, "  mass            {}", num(last.mass));
    let _ = writeln!(s, "  momentum        {}", num(last.momentum));
    let _ = writeln!(s, "  kinetic energy  {}", num(last.kinetic));
    let _ = writeln!(s, "  free energy     {}", num(last.free_energy));
    let _ = writeln!(s, "  total energy    {}", num(last.total_energy));
    let _ = writeln!(s, "  centre of mass  {}", num(last.center_of_mass));
    let _ = writeln!(s, "  min density     {}", num(m.min_density));
    let _ = writeln!(s, "  mass drift      {}", num(m.max_mass_drift));
    if m.max_energy_increase.is_finite() {
        let _ = writeln!(s, "  energy increase {}", num(m.max_energy_increase));
        let _ = writeln!(s, "  dissipation max {}", num(m.max_dissipation));
    }
    s
}
