//! Markov-chain Monte Carlo terrain prediction: sample gate-to-gate
//! transitions from the estimated matrix instead of integrating dynamics.
//!
//! Each trial starts from a one-hot input state in gate (0, 0), repeatedly
//! samples an output from the current row, and maps it to the adjacent
//! gate's input until it traps, leaves the lattice, or exhausts the
//! transition budget. Only the final gate is recorded.

use super::bins::{OUTPUT_TRAPPED, output_to_next_input};
use super::matrix::TransitionMatrix;
use crate::lattice::{FinalHistogram, GateIndex};
use crate::rng::TrialRng;

/// Transition budget per trial; 13 steps reach the furthest gate of the
/// 9 x 9 field.
pub const DEFAULT_MAX_TRANSITIONS: u32 = 13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcOptions {
    pub max_transitions: u32,
}

impl Default for McmcOptions {
    fn default() -> Self {
        McmcOptions {
            max_transitions: DEFAULT_MAX_TRANSITIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct McmcDiag {
    /// Trials stopped on a row with no estimation visits.
    pub unreachable_row_stops: u64,
    pub trapped: u64,
    pub lattice_exits: u64,
    pub budget_stops: u64,
}

/// Sample one output from a row given a uniform variate.
fn sample_output(probs: &[f64], u: f64) -> u16 {
    let mut acc = 0.0;
    let mut last_nonzero = OUTPUT_TRAPPED;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_nonzero = (i + 1) as u16;
            if u < acc {
                return last_nonzero;
            }
        }
    }
    // Rounding in the cumulative sum; take the last populated output.
    last_nonzero
}

/// Run `trials` chain samples from `initial_input` and histogram the final
/// gates.
pub fn mcmc_run(
    matrix: &TransitionMatrix,
    initial_input: u16,
    trials: u32,
    master_seed: u64,
    options: McmcOptions,
) -> (FinalHistogram, McmcDiag) {
    let mut hist = FinalHistogram::default();
    let mut diag = McmcDiag::default();
    // One stream for the whole run: chain sampling is so cheap that
    // per-trial generator setup would dominate the runtime.
    let mut rng = TrialRng::seed_from_u64(master_seed);

    for _trial in 0..trials {
        let mut gate = GateIndex::ORIGIN;
        let mut input = initial_input;
        let mut ended = false;

        for _ in 0..options.max_transitions {
            let row = matrix.row(input);
            if row.unreachable {
                diag.unreachable_row_stops += 1;
                ended = true;
                break;
            }
            let output = sample_output(&row.probs, rng.uniform01());
            if output == OUTPUT_TRAPPED {
                diag.trapped += 1;
                ended = true;
                break;
            }
            let ((dx, dy), next_input) =
                output_to_next_input(output).expect("non-trapped output maps to an input");
            let next = GateIndex {
                ix: gate.ix + dx,
                iy: gate.iy + dy,
            };
            if !next.in_lattice() {
                diag.lattice_exits += 1;
                ended = true;
                break;
            }
            gate = next;
            input = next_input;
        }
        if !ended {
            diag.budget_stops += 1;
        }
        hist.add(gate);
    }

    (hist, diag)
}
