//! Discrete-state coarse-graining of gate traversal: boundary-state
//! discretization, transition-matrix estimation, Markov-chain Monte Carlo
//! terrain prediction, and distribution comparison.

pub mod bins;
pub mod compare;
pub mod matrix;
pub mod mcmc;

pub use bins::{
    Boundary, BoundaryState, InputBox, NUM_INPUTS, NUM_OUTPUTS, OUTPUT_TRAPPED, classify_output,
    discretize_input, input_catalog, output_to_next_input,
};
pub use compare::{Comparison, compare};
pub use matrix::{
    BinInit, EstimationDiag, MatrixRow, TransitionMatrix, estimate_matrix, estimate_row, state_seed,
};
pub use mcmc::{DEFAULT_MAX_TRANSITIONS, McmcDiag, McmcOptions, mcmc_run};
