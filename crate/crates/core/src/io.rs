//! Snapshots, CSV plot data and JSON reports.
//!
//! Snapshot format: one JSON header line
//! `{"grid":{"L":..,"N":..},"order":"row-major-x-fastest","dtype":"f64-le"}`
//! followed by `N³` little-endian `f64` values. CSV numbers carry 9
//! significant digits; JSON numbers use the shortest round-trip form.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunManifest;
use crate::error::{Error, Result};
use crate::flow::FlowReport;
use crate::gaussian::{BoundsReport, CurvePoint};
use crate::grid::{Field3D, GridSpec, RadialBin};
use crate::scan::{BifurcationRecord, ThetaComparison};

const ORDER: &str = "row-major-x-fastest";
const DTYPE: &str = "f64-le";

#[derive(Serialize, Deserialize)]
struct SnapshotHeader {
    grid: GridSpec,
    order: String,
    dtype: String,
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_snapshot(path: &Path, field: &Field3D) -> Result<()> {
    let mut w = create(path)?;
    let header = SnapshotHeader {
        grid: *field.grid(),
        order: ORDER.into(),
        dtype: DTYPE.into(),
    };
    let io = |e| Error::io(path, e);
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n").map_err(io)?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_snapshot(path: &Path) -> Result<Field3D> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line).map_err(|e| Error::io(path, e))?;
    let header: SnapshotHeader =
        serde_json::from_slice(&line).map_err(|e| Error::Snapshot(format!("bad header: {e}")))?;
    if header.order != ORDER || header.dtype != DTYPE {
        return Err(Error::Snapshot(format!(
            "unsupported layout {}/{}",
            header.order, header.dtype
        )));
    }
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    let n = header.grid.len();
    if bytes.len() != 8 * n {
        return Err(Error::Snapshot(format!(
            "expected {} bytes of data for {}, found {}",
            8 * n,
            header.grid,
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of 8")))
        .collect();
    Field3D::new(header.grid, values)
}

/// Writes `header` and rows of numbers with 9 significant digits.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|v| format!("{v:.8e}")).collect();
        writeln!(w, "{}", cells.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join("manifest.json");
    write_json(&path, manifest)?;
    Ok(path)
}

/// `t,energy,residual,h`.
pub fn write_energy_trace(path: &Path, report: &FlowReport) -> Result<()> {
    write_csv(
        path,
        &["t", "energy", "residual", "h"],
        report.energy_trace.iter().map(|p| [p.t, p.energy, p.residual, p.h]),
    )
}

/// `r,mean,max_dev`.
pub fn write_radial_profile(path: &Path, bins: &[RadialBin]) -> Result<()> {
    write_csv(
        path,
        &["r", "mean", "max_dev"],
        bins.iter().map(|b| [b.radius, b.mean, b.max_deviation]),
    )
}

/// `x,density`: `|u(x, 0, 0)|²` along the x-axis.
pub fn write_section(path: &Path, section: &[(f64, f64)]) -> Result<()> {
    write_csv(path, &["x", "density"], section.iter().map(|&(x, d)| [x, d]))
}

/// `c,sigma_bar,e_min`.
pub fn write_emin_curve(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    write_csv(
        path,
        &["c", "sigma_bar", "e_min"],
        curve.iter().map(|p| [p.c, p.sigma_bar, p.e_min]),
    )
}

/// `c,lower,upper_gaussian` plus `upper_p73` when every report has it.
/// Infinite lower bounds are written as `-inf`.
pub fn write_bounds_curve(path: &Path, reports: &[BoundsReport]) -> Result<()> {
    let p73 = !reports.is_empty() && reports.iter().all(|r| r.upper_p73.is_some());
    let mut header = vec!["c", "lower", "upper_gaussian"];
    if p73 {
        header.push("upper_p73");
    }
    write_csv(
        path,
        &header,
        reports.iter().map(|r| {
            let mut row = vec![r.c, r.lower, r.upper_gaussian];
            row.extend(r.upper_p73.filter(|_| p73));
            row
        }),
    )
}

/// Aggregate scan table `p,c_g,best_c_m,largest_c_p,c_lo,c_hi`. Missing
/// values are written as `nan`.
pub fn write_scan_table(path: &Path, records: &[BifurcationRecord]) -> Result<()> {
    write_csv(
        path,
        &["p", "c_g", "best_c_m", "largest_c_p", "c_lo", "c_hi"],
        records.iter().map(|r| {
            [
                r.p,
                r.c_g,
                r.c_m.iter().copied().reduce(f64::min).unwrap_or(f64::NAN),
                r.largest_positive().unwrap_or(f64::NAN),
                r.bracket.0,
                r.bracket.1,
            ]
        }),
    )
}

/// Scatter data `p,c,outcome,final_energy`, with outcome coded
/// 0 = minimizer, 1 = positive steady state, 2 = vanishing,
/// 3 = inconclusive.
pub fn write_scan_scatter(path: &Path, records: &[BifurcationRecord]) -> Result<()> {
    use crate::flow::Outcome;
    let code = |o: Outcome| match o {
        Outcome::Minimizer => 0.0,
        Outcome::PositiveSteadyState => 1.0,
        Outcome::Vanishing => 2.0,
        Outcome::Inconclusive => 3.0,
    };
    write_csv(
        path,
        &["p", "c", "outcome", "final_energy"],
        records
            .iter()
            .flat_map(|r| r.trail.iter().map(move |t| [r.p, t.c, code(t.outcome), t.final_energy])),
    )
}

/// Everything that can be turned into plot data.
#[derive(Debug, Default)]
pub struct FigureData<'a> {
    /// `(p, curve)` pairs for the `e_min(c)` plot.
    pub curves: Vec<(f64, Vec<CurvePoint>)>,
    pub comparison: Option<&'a ThetaComparison>,
    pub records: &'a [BifurcationRecord],
}

/// `3.3333` -> `3_3333`, for file names.
pub fn p_tag(p: f64) -> String {
    format!("{:.4}", p).replace('.', "_")
}

/// Writes every non-empty part of `data` under `dir` and returns the paths.
/// Empty input writes nothing.
pub fn emit_figure_data(dir: &Path, data: &FigureData<'_>) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if data.curves.is_empty() && data.comparison.is_none() && data.records.is_empty() {
        return Ok(written);
    }
    ensure_dir(dir)?;
    for (p, curve) in &data.curves {
        let path = dir.join(format!("emin_p{}.csv", p_tag(*p)));
        write_emin_curve(&path, curve)?;
        written.push(path);
    }
    if let Some(cmp) = data.comparison {
        for (name, section) in [
            ("section_theta0.csv", &cmp.section_semilinear),
            ("section_theta1.csv", &cmp.section_quasilinear),
        ] {
            let path = dir.join(name);
            write_section(&path, section)?;
            written.push(path);
        }
    }
    if !data.records.is_empty() {
        let path = dir.join("scan_table.csv");
        write_scan_table(&path, data.records)?;
        written.push(path);
        let path = dir.join("scan_scatter.csv");
        write_scan_scatter(&path, data.records)?;
        written.push(path);
    }
    Ok(written)
}
