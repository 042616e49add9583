//! Multi-gate obstacle field: a 9 x 9 lattice of identical gates with
//! local/global coordinate bookkeeping and final-location histograms.
//!
//! A trial simulates one gate at a time. When the body leaves the gate
//! region the state is remapped into the neighbor (positions shifted by the
//! region size, velocities kept, the new gate's beams starting at rest).
//! Leaving the lattice ends the trial at the last gate inside. The region is
//! 50 m wide, so side crossings shift x by the full width; 9 gates then span
//! the global x range [-225, 225].

use crate::dynamics::step::{Engine, StepStats, TrajRecord};
use crate::error::ConfigError;
use crate::model::{BeamState, SimConfig, SystemState};
use crate::num::Vec2;
use crate::rng::{LateralForce, OscillatingForce};
use alloc::vec::Vec;

pub const LATTICE_NX: i32 = 9;
pub const LATTICE_NY: i32 = 9;
pub const IX_MIN: i32 = -4;
pub const IX_MAX: i32 = 4;
pub const IY_MIN: i32 = 0;
pub const IY_MAX: i32 = 8;

/// Index of a gate cell in the obstacle field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct GateIndex {
    pub ix: i32,
    pub iy: i32,
}

impl GateIndex {
    pub const ORIGIN: GateIndex = GateIndex { ix: 0, iy: 0 };

    pub fn in_lattice(self) -> bool {
        (IX_MIN..=IX_MAX).contains(&self.ix) && (IY_MIN..=IY_MAX).contains(&self.iy)
    }

    /// Gate-local position to global terrain coordinates.
    pub fn to_global(self, local: Vec2, region_width: f64, region_height: f64) -> Vec2 {
        Vec2::new(
            local.x + region_width * self.ix as f64,
            local.y + region_height * self.iy as f64,
        )
    }
}

/// Which region boundary the body crossed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Left,
    Right,
    Top,
    Bottom,
}

/// Boundary crossing test, strict inequalities: a state exactly on the
/// boundary is still inside.
pub fn detect_crossing(pos: Vec2, half_width: f64, region_height: f64) -> Option<Crossing> {
    if pos.x < -half_width {
        Some(Crossing::Left)
    } else if pos.x > half_width {
        Some(Crossing::Right)
    } else if pos.y > region_height {
        Some(Crossing::Top)
    } else if pos.y < 0.0 {
        Some(Crossing::Bottom)
    } else {
        None
    }
}

/// Remap a crossed state into the adjacent gate: position shifted by the
/// region size, velocity kept, beams restarted at rest. Returns the new
/// gate index (which may lie outside the lattice; the caller decides).
/// Bottom crossings have no forward-model neighbor state and are not
/// remapped here.
pub fn remap_crossing(
    state: &mut SystemState,
    index: GateIndex,
    crossing: Crossing,
    half_width: f64,
    region_height: f64,
) -> GateIndex {
    let new_index = match crossing {
        Crossing::Left => {
            state.pos.x += 2.0 * half_width;
            GateIndex {
                ix: index.ix - 1,
                iy: index.iy,
            }
        }
        Crossing::Right => {
            state.pos.x -= 2.0 * half_width;
            GateIndex {
                ix: index.ix + 1,
                iy: index.iy,
            }
        }
        Crossing::Top => {
            state.pos.y -= region_height;
            GateIndex {
                ix: index.ix,
                iy: index.iy + 1,
            }
        }
        Crossing::Bottom => return index,
    };
    state.beams = [BeamState::at_rest(), BeamState::at_rest()];
    new_index
}

/// How a single-gate transit ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitEnd {
    Crossed(Crossing),
    /// Budget exhausted inside the gate.
    Trapped,
    /// Numerical blow-up.
    Aborted,
}

/// Runs gate transits while carrying the lateral-force stream and step
/// counter across gate boundaries.
pub struct GateRunner<'a, F: LateralForce> {
    pub engine: &'a Engine,
    pub force: F,
    pub global_step: u64,
    pub stats: StepStats,
}

/// Result of one transit.
#[derive(Debug, Clone, Copy)]
pub struct Transit {
    pub end: TransitEnd,
    pub steps: u32,
    /// Largest deflection of each beam during the transit.
    pub max_theta: [f64; 2],
}

impl<'a, F: LateralForce> GateRunner<'a, F> {
    pub fn new(engine: &'a Engine, force: F) -> Self {
        GateRunner {
            engine,
            force,
            global_step: 0,
            stats: StepStats::default(),
        }
    }

    /// Step until the state leaves the gate region, the per-gate budget runs
    /// out, or the state stops being finite. Records into `recorder` every
    /// `record_every` steps when given.
    pub fn run_transit(
        &mut self,
        state: &mut SystemState,
        budget: u32,
        mut recorder: Option<(&mut Vec<TrajRecord>, u32)>,
    ) -> Transit {
        let geom = self.engine.geom;
        let mut max_theta = [state.beams[0].theta.max(0.0), state.beams[1].theta.max(0.0)];
        for step in 0..budget {
            let f_rand = self.force.at_step(self.global_step);
            self.engine.step(state, f_rand, &mut self.stats);
            self.global_step += 1;
            max_theta[0] = max_theta[0].max(state.beams[0].theta);
            max_theta[1] = max_theta[1].max(state.beams[1].theta);
            if let Some((records, every)) = recorder.as_mut()
                && self.global_step.is_multiple_of((*every).max(1) as u64)
            {
                records.push(TrajRecord::of(state));
            }
            if !state.is_finite() {
                return Transit {
                    end: TransitEnd::Aborted,
                    steps: step + 1,
                    max_theta,
                };
            }
            if let Some(crossing) = detect_crossing(state.pos, geom.half_width, geom.region_height)
            {
                return Transit {
                    end: TransitEnd::Crossed(crossing),
                    steps: step + 1,
                    max_theta,
                };
            }
        }
        Transit {
            end: TransitEnd::Trapped,
            steps: budget,
            max_theta,
        }
    }
}

/// Entry state on the bottom boundary of the first gate: position `(d, 0)`
/// with velocity `(vx, vy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryState {
    pub d: f64,
    pub vx: f64,
    pub vy: f64,
}

impl EntryState {
    pub fn to_state(self) -> SystemState {
        SystemState::new(Vec2::new(self.d, 0.0), Vec2::new(self.vx, self.vy))
    }
}

/// Why a lattice trial ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LatticeEnd {
    /// Crossed out of the 9 x 9 field; the trial ends at the last gate.
    LatticeExit,
    /// Per-gate step budget exhausted without a crossing.
    TrappedInGate,
    /// Fell back through the bottom boundary of its gate; terminal, counted
    /// like a trapping (there is no backward entry state in the model).
    BottomExit,
    /// Global step budget exhausted.
    GlobalBudget,
    Aborted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeRecord {
    pub gate: GateIndex,
    pub rec: TrajRecord,
}

#[derive(Debug, Clone)]
pub struct LatticeTrialResult {
    pub final_gate: GateIndex,
    pub end: LatticeEnd,
    /// Number of gate-to-gate transitions taken.
    pub transitions: u32,
    pub total_steps: u64,
    pub stats: StepStats,
    pub trajectory: Vec<LatticeRecord>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LatticeOptions {
    /// Record every n-th step with gate indices.
    pub record_every: Option<u32>,
    /// Cap on total steps across gates; defaults to 13 gate budgets.
    pub global_budget: Option<u64>,
}

/// Run one trial across the obstacle field from `entry` in gate (0, 0).
pub fn run_lattice_trial(
    cfg: &SimConfig,
    seed: u64,
    entry: EntryState,
    options: LatticeOptions,
) -> Result<LatticeTrialResult, ConfigError> {
    let engine = Engine::new(cfg)?;
    let force = OscillatingForce::new(cfg.random_magnitude, cfg.oscillator_hz, cfg.dt, seed)?;
    let mut runner = GateRunner::new(&engine, force);
    let mut state = entry.to_state();
    let mut gate = GateIndex::ORIGIN;
    let global_budget = options.global_budget.unwrap_or(13 * cfg.max_steps as u64);

    let mut trajectory = Vec::new();
    let mut records = Vec::new();
    if options.record_every.is_some() {
        records.push(TrajRecord::of(&state));
    }
    let mut transitions = 0u32;

    let end = loop {
        let transit = runner.run_transit(
            &mut state,
            cfg.max_steps,
            options.record_every.map(|every| (&mut records, every)),
        );
        for rec in records.drain(..) {
            trajectory.push(LatticeRecord { gate, rec });
        }
        match transit.end {
            TransitEnd::Aborted => break LatticeEnd::Aborted,
            TransitEnd::Trapped => break LatticeEnd::TrappedInGate,
            TransitEnd::Crossed(Crossing::Bottom) => break LatticeEnd::BottomExit,
            TransitEnd::Crossed(crossing) => {
                let next = remap_crossing(
                    &mut state,
                    gate,
                    crossing,
                    engine.geom.half_width,
                    engine.geom.region_height,
                );
                if !next.in_lattice() {
                    break LatticeEnd::LatticeExit;
                }
                gate = next;
                transitions += 1;
            }
        }
        if runner.global_step >= global_budget {
            break LatticeEnd::GlobalBudget;
        }
    };

    Ok(LatticeTrialResult {
        final_gate: gate,
        end,
        transitions,
        total_steps: runner.global_step,
        stats: runner.stats,
        trajectory,
    })
}

/// Final-location counts over the 9 x 9 field, indexed `[iy][ix + 4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
pub struct FinalHistogram {
    pub counts: [[u32; 9]; 9],
}

impl FinalHistogram {
    pub fn add(&mut self, gate: GateIndex) {
        debug_assert!(gate.in_lattice());
        self.counts[gate.iy as usize][(gate.ix - IX_MIN) as usize] += 1;
    }

    pub fn merge(&mut self, other: &FinalHistogram) {
        for iy in 0..9 {
            for ix in 0..9 {
                self.counts[iy][ix] += other.counts[iy][ix];
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts
            .iter()
            .map(|row| row.iter().map(|&c| c as u64).sum::<u64>())
            .sum()
    }

    pub fn get(&self, gate: GateIndex) -> u32 {
        self.counts[gate.iy as usize][(gate.ix - IX_MIN) as usize]
    }

    /// Flattened row-major counts (iy outer, ix inner), 81 cells.
    pub fn flattened(&self) -> Vec<f64> {
        self.counts
            .iter()
            .flat_map(|row| row.iter().map(|&c| c as f64))
            .collect()
    }
}

/// Run `n` lattice trials with per-trial derived seeds and histogram the
/// final gates.
pub fn run_lattice_batch(
    cfg: &SimConfig,
    n: u32,
    master_seed: u64,
    entry: EntryState,
) -> Result<FinalHistogram, ConfigError> {
    let mut hist = FinalHistogram::default();
    for index in 0..n {
        let seed = crate::rng::derive_seed(master_seed, index as u64);
        let result = run_lattice_trial(cfg, seed, entry, LatticeOptions::default())?;
        hist.add(result.final_gate);
    }
    Ok(hist)
}
