//! Estimation of the 87 x 88 gate transition matrix from single-gate
//! Monte Carlo trials.
//!
//! Each input state is sampled by starting trials on its boundary segment,
//! uniformly within the state's (d, vx, vy) box, and running the gate
//! dynamics until a boundary crossing or the step budget. Row
//! probabilities are output frequencies.

use super::bins::{self, InputBox, NUM_INPUTS, NUM_OUTPUTS, OUTPUT_TRAPPED};
use crate::dynamics::step::Engine;
use crate::error::ConfigError;
use crate::lattice::{Crossing, GateRunner, TransitEnd};
use crate::model::{SimConfig, SystemState};
use crate::num::Vec2;
use crate::rng::{OscillatingForce, TrialRng, derive_seed};
use alloc::vec;
use alloc::vec::Vec;

/// How estimation trials are initialized within an input-state box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinInit {
    /// Uniform over the (d, vx, vy) box: represents the continuum of entry
    /// states a bin aggregates.
    #[default]
    Uniform,
    /// The box midpoint for every trial.
    Center,
}

/// One estimated matrix row.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MatrixRow {
    /// Trials that produced an output (aborts excluded).
    pub visits: u32,
    /// Output counts, index `o - 1` for output `o`.
    pub counts: Vec<u32>,
    /// Row probabilities; always sums to 1.
    pub probs: Vec<f64>,
    /// True when the row had no usable trials and was routed to the
    /// trapped output.
    pub unreachable: bool,
}

/// Estimation diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EstimationDiag {
    /// Output states whose components clamped into the bin range.
    pub clamped_outputs: u64,
    pub aborted_trials: u64,
    pub bottom_exits: u64,
    pub trapped_trials: u64,
}

impl EstimationDiag {
    pub fn merge(&mut self, other: &EstimationDiag) {
        self.clamped_outputs += other.clamped_outputs;
        self.aborted_trials += other.aborted_trials;
        self.bottom_exits += other.bottom_exits;
        self.trapped_trials += other.trapped_trials;
    }
}

/// Row-stochastic transition table from the 87 input states to the 88
/// output states.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TransitionMatrix {
    pub trials_per_state: u32,
    /// Fingerprint of the configuration the matrix was estimated under.
    pub config_fingerprint: u64,
    pub rows: Vec<MatrixRow>,
    pub diag: EstimationDiag,
}

impl TransitionMatrix {
    /// Row of input state `input` (1-based).
    pub fn row(&self, input: u16) -> &MatrixRow {
        &self.rows[(input - 1) as usize]
    }

    /// Check row stochasticity; returns the largest deviation from 1.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| crate::num::abs(r.probs.iter().sum::<f64>() - 1.0))
            .fold(0.0, f64::max)
    }
}

/// Seed of the estimation stream for one input state.
pub fn state_seed(master_seed: u64, input: u16) -> u64 {
    derive_seed(master_seed, input as u64)
}

/// Run the estimation trials of one input state and tally its row.
pub fn estimate_row(
    cfg: &SimConfig,
    input_box: &InputBox,
    trials: u32,
    row_seed: u64,
    init: BinInit,
) -> Result<(MatrixRow, EstimationDiag), ConfigError> {
    let engine = Engine::new(cfg)?;
    let mut counts = vec![0u32; NUM_OUTPUTS as usize];
    let mut diag = EstimationDiag::default();
    let mut visits = 0u32;

    for trial in 0..trials {
        let trial_seed = derive_seed(row_seed, trial as u64);
        let start = match init {
            BinInit::Center => input_box.center(),
            BinInit::Uniform => {
                let mut rng = TrialRng::seed_from_u64(derive_seed(trial_seed, 0));
                bins::BoundaryState {
                    boundary: input_box.boundary,
                    d: rng.uniform_in(input_box.d[0], input_box.d[1]),
                    vx: rng.uniform_in(input_box.vx[0], input_box.vx[1]),
                    vy: rng.uniform_in(input_box.vy[0], input_box.vy[1]),
                }
            }
        };
        let pos = bins::entry_position(start.boundary, start.d, &engine.geom);
        let mut state = SystemState::new(pos, Vec2::new(start.vx, start.vy));

        let force_seed = derive_seed(trial_seed, 1);
        let force =
            OscillatingForce::new(cfg.random_magnitude, cfg.oscillator_hz, cfg.dt, force_seed)?;
        let mut runner = GateRunner::new(&engine, force);
        let transit = runner.run_transit(&mut state, cfg.max_steps, None);

        let crossing = match transit.end {
            TransitEnd::Aborted => {
                diag.aborted_trials += 1;
                continue;
            }
            TransitEnd::Trapped => {
                diag.trapped_trials += 1;
                None
            }
            TransitEnd::Crossed(c) => {
                if c == Crossing::Bottom {
                    diag.bottom_exits += 1;
                }
                Some(c)
            }
        };
        let (output, clamped) = bins::classify_output(crossing, state.pos, state.vel, &engine.geom);
        if clamped {
            diag.clamped_outputs += 1;
        }
        counts[(output - 1) as usize] += 1;
        visits += 1;
    }

    let mut probs = vec![0.0f64; NUM_OUTPUTS as usize];
    let unreachable = visits == 0;
    if unreachable {
        // No usable trial: route the row to the trapped output.
        probs[(OUTPUT_TRAPPED - 1) as usize] = 1.0;
    } else {
        for (p, &c) in probs.iter_mut().zip(&counts) {
            *p = c as f64 / visits as f64;
        }
    }

    Ok((
        MatrixRow {
            visits,
            counts,
            probs,
            unreachable,
        },
        diag,
    ))
}

/// Estimate the full matrix sequentially, `trials_per_state` trials per
/// input state.
pub fn estimate_matrix(
    cfg: &SimConfig,
    trials_per_state: u32,
    master_seed: u64,
    init: BinInit,
) -> Result<TransitionMatrix, ConfigError> {
    let catalog = bins::input_catalog();
    let mut rows = Vec::with_capacity(NUM_INPUTS as usize);
    let mut diag = EstimationDiag::default();
    for input_box in &catalog {
        let (row, row_diag) = estimate_row(
            cfg,
            input_box,
            trials_per_state,
            state_seed(master_seed, input_box.index),
            init,
        )?;
        diag.merge(&row_diag);
        rows.push(row);
    }
    Ok(TransitionMatrix {
        trials_per_state,
        config_fingerprint: cfg.fingerprint(),
        rows,
        diag,
    })
}
