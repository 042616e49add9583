//! Rayon drivers for the batch workloads. Each parallel driver partitions
//! work by index and derives per-unit seeds exactly like the sequential
//! reference in the core crate, so results are identical regardless of
//! thread count or scheduling.

use gatesim_core::ConfigError;
use gatesim_core::experiments::{
    BatchCounts, CellResult, SweepAxes, cell_seed, run_batch_trial, sweep_cells,
};
use gatesim_core::lattice::{EntryState, FinalHistogram, LatticeOptions, run_lattice_trial};
use gatesim_core::markov::{BinInit, TransitionMatrix, estimate_row, input_catalog, state_seed};
use gatesim_core::model::SimConfig;
use gatesim_core::rng::derive_seed;
use rayon::prelude::*;

/// Parallel equivalent of `experiments::run_batch`.
pub fn par_batch(cfg: &SimConfig, n: u32, batch_seed: u64) -> Result<BatchCounts, ConfigError> {
    let results: Result<Vec<BatchCounts>, ConfigError> = (0..n)
        .into_par_iter()
        .map(|index| {
            let result = run_batch_trial(cfg, batch_seed, index as u64)?;
            let mut counts = BatchCounts::default();
            counts.record(&result);
            Ok(counts)
        })
        .collect();
    let mut total = BatchCounts::default();
    for counts in results? {
        total.merge(&counts);
    }
    Ok(total)
}

/// Parallel sweep over cells and trials.
pub fn par_sweep(
    template: &SimConfig,
    axes: &SweepAxes,
    trials: u32,
    master_seed: u64,
) -> Result<Vec<CellResult>, ConfigError> {
    let cells = sweep_cells(template, axes)?;
    cells
        .par_iter()
        .enumerate()
        .map(|(index, cell)| {
            let cfg = cell.apply(template);
            let counts = par_batch(&cfg, trials, cell_seed(master_seed, index as u64))?;
            Ok(CellResult {
                cell: *cell,
                counts,
            })
        })
        .collect()
}

/// Parallel transition-matrix estimation, rows across input states.
pub fn par_estimate(
    cfg: &SimConfig,
    trials_per_state: u32,
    master_seed: u64,
    init: BinInit,
) -> Result<TransitionMatrix, ConfigError> {
    let catalog = input_catalog();
    let rows: Result<Vec<_>, ConfigError> = catalog
        .par_iter()
        .map(|input_box| {
            estimate_row(
                cfg,
                input_box,
                trials_per_state,
                state_seed(master_seed, input_box.index),
                init,
            )
        })
        .collect();
    let mut matrix_rows = Vec::with_capacity(catalog.len());
    let mut diag = gatesim_core::markov::EstimationDiag::default();
    for (row, row_diag) in rows? {
        diag.merge(&row_diag);
        matrix_rows.push(row);
    }
    Ok(TransitionMatrix {
        trials_per_state,
        config_fingerprint: cfg.fingerprint(),
        rows: matrix_rows,
        diag,
    })
}

/// Parallel lattice batch; histogram merged in trial order.
pub fn par_lattice_batch(
    cfg: &SimConfig,
    n: u32,
    master_seed: u64,
    entry: EntryState,
) -> Result<FinalHistogram, ConfigError> {
    let gates: Result<Vec<_>, ConfigError> = (0..n)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(master_seed, index as u64);
            let result = run_lattice_trial(cfg, seed, entry, LatticeOptions::default())?;
            Ok(result.final_gate)
        })
        .collect();
    let mut hist = FinalHistogram::default();
    for gate in gates? {
        hist.add(gate);
    }
    Ok(hist)
}
