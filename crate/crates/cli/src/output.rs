//! Plot-ready text outputs: line-delimited trajectory records, CSV tables,
//! the transition-matrix file, comparison reports, and run manifests.
//!
//! Everything is plain text and deterministic for a given configuration and
//! seed; timings live only in manifests and reports, never in data files.

use crate::CliError;
use gatesim_core::dynamics::TrajRecord;
use gatesim_core::experiments::CellResult;
use gatesim_core::landscape::{LandscapeGrid, OverlayPoint};
use gatesim_core::lattice::{FinalHistogram, IX_MIN, LatticeRecord};
use gatesim_core::markov::{EstimationDiag, InputBox, MatrixRow, TransitionMatrix, input_catalog};
use gatesim_core::model::InteractionMode;
use gatesim_core::num::Vec2;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

fn create(path: &Path) -> Result<BufWriter<std::fs::File>, CliError> {
    if let Some(parent) = path.parent()
        && !parent.as_os_str().is_empty()
    {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::io(&format!("creating {}", parent.display()), e))?;
    }
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::io(&format!("creating {}", path.display()), e))?;
    Ok(BufWriter::new(file))
}

#[derive(Debug, Serialize, Deserialize)]
struct TrajLine {
    t: f64,
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    theta1: f64,
    omega1: f64,
    theta2: f64,
    omega2: f64,
    mode1: String,
    mode2: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ix: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iy: Option<i32>,
}

impl TrajLine {
    fn of(rec: &TrajRecord, gate: Option<(i32, i32)>) -> TrajLine {
        TrajLine {
            t: rec.t,
            x: rec.pos.x,
            y: rec.pos.y,
            vx: rec.vel.x,
            vy: rec.vel.y,
            theta1: rec.theta[0],
            omega1: rec.omega[0],
            theta2: rec.theta[1],
            omega2: rec.omega[1],
            mode1: rec.mode[0].code().to_string(),
            mode2: rec.mode[1].code().to_string(),
            ix: gate.map(|g| g.0),
            iy: gate.map(|g| g.1),
        }
    }

    fn into_record(self) -> Result<TrajRecord, CliError> {
        let mode = |code: &str| {
            InteractionMode::from_code(code)
                .ok_or_else(|| CliError::Config(format!("unknown mode code `{code}`")))
        };
        Ok(TrajRecord {
            t: self.t,
            pos: Vec2::new(self.x, self.y),
            vel: Vec2::new(self.vx, self.vy),
            theta: [self.theta1, self.theta2],
            omega: [self.omega1, self.omega2],
            mode: [mode(&self.mode1)?, mode(&self.mode2)?],
        })
    }
}

/// One JSON object per sampled step.
pub fn write_trajectory(path: &Path, records: &[TrajRecord]) -> Result<(), CliError> {
    let mut w = create(path)?;
    for rec in records {
        serde_json::to_writer(&mut w, &TrajLine::of(rec, None))
            .map_err(|e| CliError::Io(format!("serializing trajectory: {e}")))?;
        writeln!(w).map_err(|e| CliError::io("writing trajectory", e))?;
    }
    w.flush()
        .map_err(|e| CliError::io("flushing trajectory", e))
}

/// Lattice variant: the dynamics record plus gate-index columns.
pub fn write_lattice_trajectory(path: &Path, records: &[LatticeRecord]) -> Result<(), CliError> {
    let mut w = create(path)?;
    for rec in records {
        let line = TrajLine::of(&rec.rec, Some((rec.gate.ix, rec.gate.iy)));
        serde_json::to_writer(&mut w, &line)
            .map_err(|e| CliError::Io(format!("serializing trajectory: {e}")))?;
        writeln!(w).map_err(|e| CliError::io("writing trajectory", e))?;
    }
    w.flush()
        .map_err(|e| CliError::io("flushing trajectory", e))
}

/// Read a single-gate trajectory back (for landscape overlays).
pub fn read_trajectory(path: &Path) -> Result<Vec<TrajRecord>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(&format!("opening {}", path.display()), e))?;
    let mut records = Vec::new();
    for (n, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io("reading trajectory", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TrajLine = serde_json::from_str(&line)
            .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        records.push(parsed.into_record()?);
    }
    Ok(records)
}

/// Sweep table: one row per cell, stable column order.
pub fn write_sweep_csv(path: &Path, cells: &[CellResult]) -> Result<(), CliError> {
    let mut w = create(path)?;
    writeln!(
        w,
        "f_prop,rm,k_l,k_r,trials,traversed,exit_left,exit_right,trapped,aborted,left_type,right_type,p_traverse,right_ratio"
    )
    .map_err(|e| CliError::io("writing sweep", e))?;
    for cell in cells {
        let c = &cell.counts;
        let ratio = c.right_ratio().map(|r| r.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            cell.cell.f_prop,
            cell.cell.rm,
            cell.cell.k_l,
            cell.cell.k_r,
            c.trials,
            c.traversed,
            c.exited_left,
            c.exited_right,
            c.trapped,
            c.aborted,
            c.left_type,
            c.right_type,
            c.p_traverse(),
            ratio
        )
        .map_err(|e| CliError::io("writing sweep", e))?;
    }
    w.flush().map_err(|e| CliError::io("flushing sweep", e))
}

/// 9 x 9 final-location histogram: header carries the ix values, one row
/// per iy.
pub fn write_histogram_csv(path: &Path, hist: &FinalHistogram) -> Result<(), CliError> {
    let mut w = create(path)?;
    let header: Vec<String> = (0..9).map(|i| (IX_MIN + i).to_string()).collect();
    writeln!(w, "iy\\ix,{}", header.join(",")).map_err(|e| CliError::io("writing histogram", e))?;
    for (iy, row) in hist.counts.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{},{}", iy, cells.join(","))
            .map_err(|e| CliError::io("writing histogram", e))?;
    }
    w.flush().map_err(|e| CliError::io("flushing histogram", e))
}

pub fn read_histogram_csv(path: &Path) -> Result<FinalHistogram, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut hist = FinalHistogram::default();
    let mut lines = text.lines();
    let _header = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty histogram", path.display())))?;
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let iy: usize = fields.next().and_then(|f| f.parse().ok()).ok_or_else(|| {
            CliError::Config(format!("{}:{}: bad row label", path.display(), n + 2))
        })?;
        if iy > 8 {
            return Err(CliError::Config(format!(
                "{}:{}: iy out of range",
                path.display(),
                n + 2
            )));
        }
        for (ix, field) in fields.enumerate() {
            if ix > 8 {
                return Err(CliError::Config(format!(
                    "{}:{}: too many columns",
                    path.display(),
                    n + 2
                )));
            }
            hist.counts[iy][ix] = field.trim().parse().map_err(|_| {
                CliError::Config(format!("{}:{}: bad count `{field}`", path.display(), n + 2))
            })?;
        }
    }
    Ok(hist)
}

/// Landscape grid: one row per node.
pub fn write_landscape_csv(path: &Path, grid: &LandscapeGrid) -> Result<(), CliError> {
    let mut w = create(path)?;
    writeln!(w, "x,y,e_left,e_right,e_prop,e_total")
        .map_err(|e| CliError::io("writing grid", e))?;
    for (xi, &x) in grid.xs.iter().enumerate() {
        for (yi, &y) in grid.ys.iter().enumerate() {
            let s = grid.at(xi, yi);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                x,
                y,
                s.elastic_left,
                s.elastic_right,
                s.propulsive,
                s.total()
            )
            .map_err(|e| CliError::io("writing grid", e))?;
        }
    }
    w.flush().map_err(|e| CliError::io("flushing grid", e))
}

/// Trajectory-energy overlay series.
pub fn write_overlay_csv(path: &Path, points: &[OverlayPoint]) -> Result<(), CliError> {
    let mut w = create(path)?;
    writeln!(w, "t,x,y,e_full,e_active").map_err(|e| CliError::io("writing overlay", e))?;
    for p in points {
        writeln!(w, "{},{},{},{},{}", p.t, p.pos.x, p.pos.y, p.full, p.active)
            .map_err(|e| CliError::io("writing overlay", e))?;
    }
    w.flush().map_err(|e| CliError::io("flushing overlay", e))
}

/// Transition-matrix file: bin catalog, per-row visit counts and
/// probabilities, estimation diagnostics, and the config fingerprint.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub config_fingerprint: String,
    pub trials_per_state: u32,
    pub initialization: String,
    pub inputs: Vec<InputBox>,
    pub rows: Vec<MatrixRow>,
    pub diagnostics: EstimationDiag,
}

impl MatrixFile {
    pub fn from_matrix(matrix: &TransitionMatrix, initialization: &str) -> MatrixFile {
        MatrixFile {
            config_fingerprint: format!("{:016x}", matrix.config_fingerprint),
            trials_per_state: matrix.trials_per_state,
            initialization: initialization.to_string(),
            inputs: input_catalog(),
            rows: matrix.rows.clone(),
            diagnostics: matrix.diag,
        }
    }

    pub fn into_matrix(self) -> Result<TransitionMatrix, CliError> {
        if self.rows.len() != gatesim_core::markov::NUM_INPUTS as usize {
            return Err(CliError::Config(format!(
                "matrix file has {} rows, expected {}",
                self.rows.len(),
                gatesim_core::markov::NUM_INPUTS
            )));
        }
        let fingerprint = u64::from_str_radix(&self.config_fingerprint, 16)
            .map_err(|_| CliError::Config("bad config fingerprint".into()))?;
        Ok(TransitionMatrix {
            trials_per_state: self.trials_per_state,
            config_fingerprint: fingerprint,
            rows: self.rows,
            diag: self.diagnostics,
        })
    }
}

pub fn write_matrix(path: &Path, matrix: &TransitionMatrix, init: &str) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &MatrixFile::from_matrix(matrix, init))
        .map_err(|e| CliError::Io(format!("serializing matrix: {e}")))?;
    writeln!(w).map_err(|e| CliError::io("writing matrix", e))?;
    w.flush().map_err(|e| CliError::io("flushing matrix", e))
}

pub fn read_matrix(path: &Path) -> Result<TransitionMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let file: MatrixFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    file.into_matrix()
}

/// Comparison report between two histograms.
#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub corrcoef: Option<f64>,
    pub rmse: f64,
    pub total_a: u64,
    pub total_b: u64,
    pub hist_a: FinalHistogram,
    pub hist_b: FinalHistogram,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_a_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_b_ms: Option<f64>,
}

pub fn write_report(path: &Path, report: &CompareReport) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, report)
        .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    writeln!(w).map_err(|e| CliError::io("writing report", e))?;
    w.flush().map_err(|e| CliError::io("flushing report", e))
}

/// What a run produced: inputs fingerprint, seed, outputs, timings.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_fingerprint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub outputs: Vec<String>,
    pub timings_ms: Vec<(String, f64)>,
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, manifest)
        .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
    writeln!(w).map_err(|e| CliError::io("writing manifest", e))?;
    w.flush().map_err(|e| CliError::io("flushing manifest", e))
}
