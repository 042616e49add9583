//! Monte Carlo harness over single-gate trials: batches, parameter sweeps,
//! and left/right classification of successful traversals.
//!
//! Seeds are derived per cell and per trial from one master seed, so any
//! cell or trial can be reproduced in isolation and aggregation is
//! independent of execution order. The sequential drivers here are the
//! reference; the CLI parallelizes over the same seed derivation.

use crate::dynamics::{Outcome, TrialOptions, TrialResult, run_trial};
use crate::error::ConfigError;
use crate::model::SimConfig;
use crate::rng::derive_seed;
use alloc::vec::Vec;
use core::fmt;

/// Which barrier side a successful traversal pushed across.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideClass {
    Left,
    Right,
}

/// Rejection for side classification of a non-traversing trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotATraversal;

impl fmt::Display for NotATraversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "side classification requires a traversed trial")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NotATraversal {}

/// Classify a traversal by comparing the maximal deflection of the two
/// beams; exact ties go right.
pub fn classify_side(max_theta: [f64; 2]) -> SideClass {
    if max_theta[0] > max_theta[1] {
        SideClass::Left
    } else {
        SideClass::Right
    }
}

/// Side classification of a finished trial.
pub fn classify_trial(result: &TrialResult) -> Result<SideClass, NotATraversal> {
    if result.outcome != Outcome::Traversed {
        return Err(NotATraversal);
    }
    Ok(classify_side(result.max_theta))
}

/// Aggregated outcome counts of a batch of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct BatchCounts {
    pub trials: u32,
    pub traversed: u32,
    pub exited_left: u32,
    pub exited_right: u32,
    pub trapped: u32,
    pub aborted: u32,
    pub left_type: u32,
    pub right_type: u32,
}

impl BatchCounts {
    pub fn record(&mut self, result: &TrialResult) {
        self.trials += 1;
        match result.outcome {
            Outcome::Traversed => {
                self.traversed += 1;
                match classify_side(result.max_theta) {
                    SideClass::Left => self.left_type += 1,
                    SideClass::Right => self.right_type += 1,
                }
            }
            Outcome::ExitedLeft => self.exited_left += 1,
            Outcome::ExitedRight => self.exited_right += 1,
            Outcome::Trapped => self.trapped += 1,
            Outcome::Aborted => self.aborted += 1,
        }
    }

    pub fn merge(&mut self, other: &BatchCounts) {
        self.trials += other.trials;
        self.traversed += other.traversed;
        self.exited_left += other.exited_left;
        self.exited_right += other.exited_right;
        self.trapped += other.trapped;
        self.aborted += other.aborted;
        self.left_type += other.left_type;
        self.right_type += other.right_type;
    }

    /// Traversal probability. Aborted trials are excluded from the
    /// denominator (they are reported separately).
    pub fn p_traverse(&self) -> f64 {
        let valid = self.trials - self.aborted;
        if valid == 0 {
            0.0
        } else {
            self.traversed as f64 / valid as f64
        }
    }

    /// Fraction of successful traversals classified right; `None` without
    /// any traversal.
    pub fn right_ratio(&self) -> Option<f64> {
        let total = self.left_type + self.right_type;
        if total == 0 {
            None
        } else {
            Some(self.right_type as f64 / total as f64)
        }
    }
}

/// Seed of trial `index` within a batch.
pub fn trial_seed(batch_seed: u64, index: u64) -> u64 {
    derive_seed(batch_seed, index)
}

/// Run one trial of a batch.
pub fn run_batch_trial(
    cfg: &SimConfig,
    batch_seed: u64,
    index: u64,
) -> Result<TrialResult, ConfigError> {
    run_trial(cfg, trial_seed(batch_seed, index), TrialOptions::default())
}

/// Run `n` independent trials and aggregate the outcome counts.
pub fn run_batch(cfg: &SimConfig, n: u32, batch_seed: u64) -> Result<BatchCounts, ConfigError> {
    let mut counts = BatchCounts::default();
    for index in 0..n {
        counts.record(&run_batch_trial(cfg, batch_seed, index as u64)?);
    }
    Ok(counts)
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SweepCell {
    pub f_prop: f64,
    pub rm: f64,
    pub k_l: f64,
    pub k_r: f64,
}

impl SweepCell {
    pub fn apply(&self, template: &SimConfig) -> SimConfig {
        SimConfig {
            f_prop: Some(self.f_prop),
            random_magnitude: self.rm,
            stiffness_left: self.k_l,
            stiffness_right: self.k_r,
            ..template.clone()
        }
    }
}

/// Axis values for a sweep; an empty axis keeps the template's value.
#[derive(Debug, Clone, Default)]
pub struct SweepAxes {
    pub f_prop: Vec<f64>,
    pub rm: Vec<f64>,
    pub k_l: Vec<f64>,
}

/// Cartesian product of the axes over the template, `f_prop` outermost,
/// then `rm`, then `k_l`. Cell order defines cell seeds.
pub fn sweep_cells(template: &SimConfig, axes: &SweepAxes) -> Result<Vec<SweepCell>, ConfigError> {
    let f_prop_axis = if axes.f_prop.is_empty() {
        alloc::vec![template.propulsion()?]
    } else {
        axes.f_prop.clone()
    };
    let rm_axis = if axes.rm.is_empty() {
        alloc::vec![template.random_magnitude]
    } else {
        axes.rm.clone()
    };
    let k_l_axis = if axes.k_l.is_empty() {
        alloc::vec![template.stiffness_left]
    } else {
        axes.k_l.clone()
    };
    let mut cells = Vec::new();
    for &f_prop in &f_prop_axis {
        for &rm in &rm_axis {
            for &k_l in &k_l_axis {
                cells.push(SweepCell {
                    f_prop,
                    rm,
                    k_l,
                    k_r: template.stiffness_right,
                });
            }
        }
    }
    Ok(cells)
}

/// Seed of a sweep cell.
pub fn cell_seed(master_seed: u64, cell_index: u64) -> u64 {
    derive_seed(master_seed, cell_index)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CellResult {
    pub cell: SweepCell,
    pub counts: BatchCounts,
}

/// Run a full sweep sequentially: `trials` per cell, cells in order.
pub fn run_sweep(
    template: &SimConfig,
    axes: &SweepAxes,
    trials: u32,
    master_seed: u64,
) -> Result<Vec<CellResult>, ConfigError> {
    let cells = sweep_cells(template, axes)?;
    let mut results = Vec::with_capacity(cells.len());
    for (index, cell) in cells.iter().enumerate() {
        let cfg = cell.apply(template);
        let counts = run_batch(&cfg, trials, cell_seed(master_seed, index as u64))?;
        results.push(CellResult {
            cell: *cell,
            counts,
        });
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_classification_and_tie_break() {
        assert_eq!(classify_side([0.9, 0.3]), SideClass::Left);
        assert_eq!(classify_side([0.3, 0.9]), SideClass::Right);
        assert_eq!(classify_side([0.5, 0.5]), SideClass::Right);
    }

    #[test]
    fn non_traversal_rejected() {
        let cfg = SimConfig {
            f_prop: Some(4.0),
            ..SimConfig::default()
        };
        let result = run_trial(&cfg, 1, TrialOptions::default()).unwrap();
        assert_eq!(result.outcome, Outcome::Trapped);
        assert_eq!(classify_trial(&result), Err(NotATraversal));
    }

    #[test]
    fn zero_noise_batch_is_degenerate() {
        // Rm = 0: the dynamics ignore the seed, so every outcome matches.
        let cfg = SimConfig {
            f_prop: Some(9.0),
            ..SimConfig::default()
        };
        let counts = run_batch(&cfg, 8, 123).unwrap();
        assert_eq!(counts.trials, 8);
        assert_eq!(counts.traversed, 8);
    }

    #[test]
    fn batches_are_reproducible() {
        let cfg = SimConfig {
            f_prop: Some(7.0),
            random_magnitude: 10.0,
            ..SimConfig::default()
        };
        let a = run_batch(&cfg, 20, 9).unwrap();
        let b = run_batch(&cfg, 20, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.trials,
            a.traversed + a.exited_left + a.exited_right + a.trapped + a.aborted
        );
    }

    #[test]
    fn sweep_enumerates_the_cartesian_product() {
        let template = SimConfig::default();
        let axes = SweepAxes {
            f_prop: alloc::vec![4.0, 5.0, 6.0, 7.0, 8.0, 9.0],
            rm: alloc::vec![0.0, 10.0, 20.0, 30.0, 40.0],
            k_l: Vec::new(),
        };
        let cells = sweep_cells(&template, &axes).unwrap();
        assert_eq!(cells.len(), 30);
        assert_eq!(cells[0].f_prop, 4.0);
        assert_eq!(cells[0].rm, 0.0);
        assert_eq!(cells[1].rm, 10.0);
        assert!(cells.iter().all(|c| c.k_l == 400.0 && c.k_r == 400.0));
        // A sweep without an f_prop axis needs it in the template.
        assert!(sweep_cells(&template, &SweepAxes::default()).is_err());
    }

    #[test]
    fn sweep_results_follow_cell_order() {
        let template = SimConfig::default();
        let axes = SweepAxes {
            f_prop: alloc::vec![6.0, 9.0],
            rm: alloc::vec![0.0],
            k_l: Vec::new(),
        };
        let results = run_sweep(&template, &axes, 2, 5).unwrap();
        assert_eq!(results.len(), 2);
        assert_eq!(results[0].cell.f_prop, 6.0);
        assert_eq!(results[1].cell.f_prop, 9.0);
        // Deterministic dynamics: the strong cell traverses both trials.
        assert_eq!(results[1].counts.traversed, 2);
    }
}
