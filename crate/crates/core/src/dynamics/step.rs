//! Time integration: forward Euler with per-contact switching between the
//! impulse (collision) method and the constraint method.
//!
//! Each step:
//! 1. accelerations — constrained contacts through the constraint solve
//!    (dropping any contact whose force turns tensile), everything else
//!    under propulsion/random/drag and joint torques alone;
//! 2. forward Euler update (positions with the pre-step velocities);
//! 3. collision passes — contacts are detected and closing ones receive
//!    impulses, fastest-closing first with exact ties resolved
//!    simultaneously (which keeps mirror-symmetric states exactly on the
//!    axis); a contact whose momentum exchange falls below `epsilon`
//!    switches to the constraint method, projecting the beam angular
//!    velocity onto the velocity constraint;
//! 4. positional projection of the body to exact contact along the contact
//!    normals (beams hold their angles), except for overlaps whose bounce
//!    cascade is still playing out within the step scale;
//! 5. re-projection of constrained beam angular velocities so the velocity
//!    constraint holds to rounding at the step boundary.

use super::collision::{collide_point, collide_tangential};
use super::constraint::{self, ActiveContact, ConstraintSolve};
use super::contact::{self, ContactGeom, ContactQuery, beam_normal};
use crate::error::ConfigError;
use crate::model::{BEAM_SIDES, BeamSide, GateGeometry, InteractionMode, SimConfig, SystemState};
use crate::num::{self, Vec2};
use crate::rng::{LateralForce, OscillatingForce};
use alloc::vec::Vec;

const MAX_COLLISION_PASSES: u32 = 10;
const MAX_PROJECTION_ROUNDS: u32 = 6;
/// Overlap left in place by the positional projection so that maintained
/// contacts survive re-detection `[m]`.
const CONTACT_SLACK: f64 = 1e-9;
/// Gap width across which a constrained contact is still considered live;
/// covers the second-order drift of one Euler step `[m]`.
const CONTACT_KEEP_BAND: f64 = 1e-6;

/// Diagnostics and energy-audit accumulators for a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    /// Number of collision impulses applied.
    pub impulses: u64,
    /// Kinetic energy removed by restitution, summed exactly per pass.
    pub collision_loss: f64,
    /// Kinetic-energy change absorbed when a contact switches to the
    /// constraint method (signed; part of the collision losses).
    pub switch_loss: f64,
    /// Steps on which the body center came within `R` of a joint.
    pub joint_overlap_events: u64,
    /// Constraint solves abandoned for degenerate geometry.
    pub degenerate_fallbacks: u64,
    /// Steps whose positional projection did not fully converge.
    pub projection_overflow: u64,
    /// Collision bounces kept inside the overlap (cascade capture).
    pub captures: u64,
    /// Largest post-projection normal relative velocity seen in
    /// constrained mode `[m/s]`.
    pub max_constraint_residual: f64,
    /// Largest penetration left after projection `[m]`.
    pub residual_penetration: f64,
    /// Work done by the propulsive force.
    pub work_propulsion: f64,
    /// Work done by the lateral random force.
    pub work_random: f64,
    /// Energy dissipated by body-plane drag.
    pub drag_dissipation: f64,
    /// Energy dissipated by the viscous joints.
    pub joint_dissipation: f64,
}

impl StepStats {
    pub fn merge(&mut self, other: &StepStats) {
        self.impulses += other.impulses;
        self.collision_loss += other.collision_loss;
        self.switch_loss += other.switch_loss;
        self.joint_overlap_events += other.joint_overlap_events;
        self.degenerate_fallbacks += other.degenerate_fallbacks;
        self.projection_overflow += other.projection_overflow;
        self.captures += other.captures;
        self.max_constraint_residual = self
            .max_constraint_residual
            .max(other.max_constraint_residual);
        self.residual_penetration = self.residual_penetration.max(other.residual_penetration);
        self.work_propulsion += other.work_propulsion;
        self.work_random += other.work_random;
        self.drag_dissipation += other.drag_dissipation;
        self.joint_dissipation += other.joint_dissipation;
    }
}

/// Immutable parameters of a gate simulation, resolved from a validated
/// configuration.
#[derive(Debug, Clone)]
pub struct Engine {
    pub body_mass: f64,
    pub body_radius: f64,
    pub beam_length: f64,
    pub beam_inertia: f64,
    pub stiffness: [f64; 2],
    pub damping: [f64; 2],
    pub f_prop: f64,
    pub drag: f64,
    pub cor: f64,
    pub dt: f64,
    pub epsilon: f64,
    pub geom: GateGeometry,
}

impl Engine {
    pub fn new(cfg: &SimConfig) -> Result<Engine, ConfigError> {
        cfg.validate()?;
        Ok(Engine {
            body_mass: cfg.body_mass,
            body_radius: cfg.body_radius,
            beam_length: cfg.beam_length,
            beam_inertia: cfg.beam_inertia,
            stiffness: [cfg.stiffness_left, cfg.stiffness_right],
            damping: [cfg.damping_left, cfg.damping_right],
            f_prop: cfg.propulsion()?,
            drag: cfg.drag,
            cor: cfg.cor,
            dt: cfg.dt,
            epsilon: cfg.epsilon,
            geom: cfg.geometry(),
        })
    }

    fn classify(&self, state: &SystemState, side: BeamSide) -> ContactQuery {
        self.classify_banded(state, side, 0.0)
    }

    fn classify_banded(&self, state: &SystemState, side: BeamSide, band: f64) -> ContactQuery {
        let p = side.point_to_local(&self.geom, state.pos);
        contact::classify_with_band(
            p,
            state.beams[side.index()].theta,
            self.beam_length,
            self.body_radius,
            band,
        )
    }

    /// Kinetic energy of body plus beams.
    pub fn kinetic_energy(&self, state: &SystemState) -> f64 {
        let body = 0.5 * self.body_mass * state.vel.norm_sq();
        let beams = 0.5
            * self.beam_inertia
            * (state.beams[0].omega * state.beams[0].omega
                + state.beams[1].omega * state.beams[1].omega);
        body + beams
    }

    /// Kinetic plus elastic potential energy.
    pub fn mechanical_energy(&self, state: &SystemState) -> f64 {
        let elastic = 0.5
            * (self.stiffness[0] * state.beams[0].theta * state.beams[0].theta
                + self.stiffness[1] * state.beams[1].theta * state.beams[1].theta);
        self.kinetic_energy(state) + elastic
    }

    /// Advance one time step under the given held lateral force.
    pub fn step(&self, state: &mut SystemState, f_rand: f64, stats: &mut StepStats) {
        let dt = self.dt;

        // -- Phase 1: accelerations ---------------------------------------
        // Refresh constrained-contact geometry; a separated or degenerate
        // contact reverts to free motion before the solve.
        let mut constrained: [Option<ContactGeom>; 2] = [None, None];
        for side in BEAM_SIDES {
            let i = side.index();
            if let InteractionMode::Constrained(_) = state.beams[i].mode {
                match self.classify_banded(state, side, CONTACT_KEEP_BAND) {
                    ContactQuery::Contact(g) => {
                        state.beams[i].mode = InteractionMode::Constrained(g.kind());
                        constrained[i] = Some(g);
                    }
                    ContactQuery::Clear => state.beams[i].mode = InteractionMode::Free,
                    ContactQuery::JointOverlap => {
                        stats.joint_overlap_events += 1;
                        state.beams[i].mode = InteractionMode::Free;
                    }
                }
            }
        }

        let external = Vec2::new(
            f_rand - self.drag * state.vel.x,
            self.f_prop - self.drag * state.vel.y,
        );

        let mut accel = external * (1.0 / self.body_mass);
        let mut beta = [0.0_f64; 2];
        for (i, b) in beta.iter_mut().enumerate() {
            *b = (-self.stiffness[i] * state.beams[i].theta
                - self.damping[i] * state.beams[i].omega)
                / self.beam_inertia;
        }

        // Solve with the active set, dropping tensile or degenerate
        // contacts until the remaining forces are compressive.
        loop {
            let contacts: Vec<ActiveContact> = (0..2)
                .filter_map(|i| constrained[i].map(|geom| ActiveContact { beam: i, geom }))
                .collect();
            if contacts.is_empty() {
                break;
            }
            let env = constraint::ConstraintEnv {
                state,
                geom: &self.geom,
                body_mass: self.body_mass,
                beam_inertia: self.beam_inertia,
                stiffness: self.stiffness,
                damping: self.damping,
                external_force: external,
            };
            match constraint::solve(&env, &contacts) {
                ConstraintSolve::Degenerate { beam } => {
                    stats.degenerate_fallbacks += 1;
                    constrained[beam] = None;
                    state.beams[beam].mode = InteractionMode::Free;
                }
                ConstraintSolve::Ok { accel: a, beams } => {
                    // Find the most tensile contact, if any.
                    let mut worst: Option<(usize, f64)> = None;
                    for (i, sol) in beams.iter().enumerate() {
                        if let Some(sol) = sol
                            && sol.force < 0.0
                            && worst.is_none_or(|(_, f)| sol.force < f)
                        {
                            worst = Some((i, sol.force));
                        }
                    }
                    if let Some((i, _)) = worst {
                        constrained[i] = None;
                        state.beams[i].mode = InteractionMode::Free;
                        continue;
                    }
                    accel = a;
                    for (i, sol) in beams.iter().enumerate() {
                        if let Some(sol) = sol {
                            beta[i] = sol.beta;
                        }
                    }
                    break;
                }
            }
        }

        // -- Phase 2: forward Euler ----------------------------------------
        // Audit uses the exact discrete displacement v_old * dt.
        stats.work_propulsion += self.f_prop * state.vel.y * dt;
        stats.work_random += f_rand * state.vel.x * dt;
        stats.drag_dissipation += self.drag * state.vel.norm_sq() * dt;
        stats.joint_dissipation += (self.damping[0] * state.beams[0].omega * state.beams[0].omega
            + self.damping[1] * state.beams[1].omega * state.beams[1].omega)
            * dt;

        state.pos += state.vel * dt;
        state.vel += accel * dt;
        for (beam, b) in state.beams.iter_mut().zip(beta) {
            beam.theta += beam.omega * dt;
            beam.omega += b * dt;
        }
        state.t += dt;

        // -- Phase 3: collision passes --------------------------------------
        // Contacts are resolved one collision at a time, the faster-closing
        // contact first, re-examining the other against the updated state
        // (its closing often disappears once the first impulse lands). An
        // exact tie in closing speed - the mirror-symmetric configuration -
        // resolves both contacts simultaneously from the same state, which
        // keeps symmetric trajectories exactly on the axis.
        for _pass in 0..MAX_COLLISION_PASSES {
            let mut delta_v = [Vec2::ZERO; 2];
            let mut delta_omega = [0.0_f64; 2];
            let mut impulse = [None::<f64>; 2];
            let mut closing = [0.0_f64; 2];

            for side in BEAM_SIDES {
                let i = side.index();
                if matches!(state.beams[i].mode, InteractionMode::Constrained(_)) {
                    continue;
                }
                match self.classify(state, side) {
                    ContactQuery::Clear => state.beams[i].mode = InteractionMode::Free,
                    ContactQuery::JointOverlap => {
                        stats.joint_overlap_events += 1;
                        state.beams[i].mode = InteractionMode::Free;
                    }
                    ContactQuery::Contact(g) => {
                        state.beams[i].mode = InteractionMode::Colliding;
                        let v_local = side.vec_to_local(state.vel);
                        let theta = state.beams[i].theta;
                        let omega = state.beams[i].omega;
                        match g {
                            ContactGeom::Tangential { r, side: face, .. } => {
                                let n = beam_normal(theta);
                                let v_n = v_local.dot(n);
                                if face * (v_n - omega * r) < 0.0 {
                                    let out = collide_tangential(
                                        v_n,
                                        omega,
                                        r,
                                        self.body_mass,
                                        self.beam_inertia,
                                        self.cor,
                                    );
                                    delta_v[i] = side.vec_to_global(n * (out.v_n - v_n));
                                    delta_omega[i] = out.omega - omega;
                                    impulse[i] = Some(out.impulse);
                                    closing[i] = num::abs(v_n - omega * r);
                                }
                            }
                            ContactGeom::Point { normal, c, .. } => {
                                let rel = v_local.dot(normal) - omega * c;
                                if rel < 0.0 {
                                    let out = collide_point(
                                        v_local,
                                        omega,
                                        normal,
                                        c,
                                        self.body_mass,
                                        self.beam_inertia,
                                    );
                                    delta_v[i] = side.vec_to_global(out.vel - v_local);
                                    delta_omega[i] = out.omega - omega;
                                    impulse[i] = Some(out.impulse);
                                    closing[i] = -rel;
                                }
                            }
                        }
                    }
                }
            }

            if impulse[0].is_none() && impulse[1].is_none() {
                break;
            }
            if impulse[0].is_some() && impulse[1].is_some() && closing[0] != closing[1] {
                // Defer the slower contact to the next pass.
                let slower = if closing[0] < closing[1] { 0 } else { 1 };
                delta_v[slower] = Vec2::ZERO;
                delta_omega[slower] = 0.0;
                impulse[slower] = None;
            }

            let ke_before = self.kinetic_energy(state);
            state.vel += delta_v[0] + delta_v[1];
            state.beams[0].omega += delta_omega[0];
            state.beams[1].omega += delta_omega[1];
            stats.collision_loss += ke_before - self.kinetic_energy(state);
            stats.impulses += impulse.iter().flatten().count() as u64;

            // Per-contact switch to the constraint method once the exchange
            // is small; the beam angular velocity is projected onto the
            // velocity constraint.
            for side in BEAM_SIDES {
                let i = side.index();
                let Some(dp) = impulse[i] else { continue };
                if dp >= self.epsilon {
                    continue;
                }
                if let ContactQuery::Contact(g) = self.classify(state, side) {
                    let v_local = side.vec_to_local(state.vel);
                    match constraint::project_omega(
                        v_local,
                        &g,
                        state.beams[i].theta,
                        self.beam_length,
                    ) {
                        Some(w) => {
                            let old = state.beams[i].omega;
                            stats.switch_loss += 0.5 * self.beam_inertia * (old * old - w * w);
                            state.beams[i].omega = w;
                            state.beams[i].mode = InteractionMode::Constrained(g.kind());
                        }
                        None => stats.degenerate_fallbacks += 1,
                    }
                }
            }
        }

        // -- Phase 4: positional projection ---------------------------------
        // The body moves to exact contact along the contact normals; beams
        // hold their angles. The projection targets CONTACT_SLACK of overlap
        // so a maintained contact stays detectable instead of sitting on the
        // rounding knife edge of exact tangency. Constrained contacts are
        // stabilized both ways (micro-gaps from one step's drift are closed
        // again); colliding contacts are only ever pushed apart.
        //
        // A colliding overlap whose relative normal speed cannot carry it
        // out of the overlap within one step is a live repeated-collision
        // cascade: it is left in place so the bounces decay inside the
        // penetration zone (CoR per re-contact) until the momentum exchange
        // falls below epsilon and the contact switches to the constraint
        // method.
        //
        // With both beams active, half steps applied jointly keep the
        // update mirror symmetric and convergent.
        let mut leftover = 0.0_f64;
        for round in 0..MAX_PROJECTION_ROUNDS {
            let mut push = [Vec2::ZERO; 2];
            let mut excess = [0.0_f64; 2];
            for side in BEAM_SIDES {
                let i = side.index();
                let constrained_mode =
                    matches!(state.beams[i].mode, InteractionMode::Constrained(_));
                if !state.beams[i].mode.in_contact() {
                    continue;
                }
                let band = if constrained_mode {
                    CONTACT_KEEP_BAND
                } else {
                    0.0
                };
                if let ContactQuery::Contact(g) = self.classify_banded(state, side, band) {
                    if !constrained_mode {
                        let v_local = side.vec_to_local(state.vel);
                        let rel = constraint::velocity_residual(
                            v_local,
                            state.beams[i].theta,
                            state.beams[i].omega,
                            &g,
                        );
                        if num::abs(rel) * dt <= g.depth() {
                            if round == 0 {
                                stats.captures += 1;
                            }
                            continue;
                        }
                    }
                    let over = g.depth() - CONTACT_SLACK;
                    let active = if constrained_mode {
                        num::abs(over) > CONTACT_SLACK
                    } else {
                        over > CONTACT_SLACK
                    };
                    if active {
                        excess[i] = over;
                        push[i] = side.vec_to_global(g.push_dir(state.beams[i].theta)) * over;
                    }
                }
            }
            leftover = num::abs(excess[0]).max(num::abs(excess[1]));
            if leftover <= CONTACT_SLACK {
                break;
            }
            if round == MAX_PROJECTION_ROUNDS - 1 {
                stats.projection_overflow += 1;
                break;
            }
            let w = if excess[0] != 0.0 && excess[1] != 0.0 {
                0.5
            } else {
                1.0
            };
            state.pos += (push[0] + push[1]) * w;
        }
        stats.residual_penetration = stats.residual_penetration.max(leftover);

        // -- Phase 5: constraint velocity projection ------------------------
        for side in BEAM_SIDES {
            let i = side.index();
            if !matches!(state.beams[i].mode, InteractionMode::Constrained(_)) {
                continue;
            }
            match self.classify_banded(state, side, CONTACT_KEEP_BAND) {
                ContactQuery::Contact(g) => {
                    state.beams[i].mode = InteractionMode::Constrained(g.kind());
                    let v_local = side.vec_to_local(state.vel);
                    match constraint::project_omega(
                        v_local,
                        &g,
                        state.beams[i].theta,
                        self.beam_length,
                    ) {
                        Some(w) => {
                            state.beams[i].omega = w;
                            let res = constraint::velocity_residual(
                                v_local,
                                state.beams[i].theta,
                                state.beams[i].omega,
                                &g,
                            );
                            stats.max_constraint_residual =
                                stats.max_constraint_residual.max(num::abs(res));
                        }
                        None => {
                            stats.degenerate_fallbacks += 1;
                            state.beams[i].mode = InteractionMode::Free;
                        }
                    }
                }
                ContactQuery::Clear => state.beams[i].mode = InteractionMode::Free,
                ContactQuery::JointOverlap => {
                    stats.joint_overlap_events += 1;
                    state.beams[i].mode = InteractionMode::Free;
                }
            }
        }
    }
}

/// One sampled trajectory record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajRecord {
    pub t: f64,
    pub pos: Vec2,
    pub vel: Vec2,
    pub theta: [f64; 2],
    pub omega: [f64; 2],
    pub mode: [InteractionMode; 2],
}

impl TrajRecord {
    pub fn of(state: &SystemState) -> TrajRecord {
        TrajRecord {
            t: state.t,
            pos: state.pos,
            vel: state.vel,
            theta: [state.beams[0].theta, state.beams[1].theta],
            omega: [state.beams[0].omega, state.beams[1].omega],
            mode: [state.beams[0].mode, state.beams[1].mode],
        }
    }
}

/// Terminal classification of a single-gate trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Outcome {
    /// Reached the success line (`y >= success_y`).
    Traversed,
    /// Left through the side boundary (`x <= -half_width`).
    ExitedLeft,
    /// Left through the side boundary (`x >= half_width`).
    ExitedRight,
    /// Step budget exhausted.
    Trapped,
    /// Numerical blow-up; the step index is in `TrialResult::steps`.
    Aborted,
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub outcome: Outcome,
    pub steps: u32,
    pub final_state: SystemState,
    /// Mechanical energy at start and end (kinetic + elastic), for ledgers.
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Largest deflection of each beam over the trial.
    pub max_theta: [f64; 2],
    pub stats: StepStats,
    /// Sampled records; empty unless recording was requested.
    pub trajectory: Vec<TrajRecord>,
}

/// Options for [`run_trial`].
#[derive(Debug, Clone, Copy, Default)]
pub struct TrialOptions {
    /// Record every n-th step (plus initial and final states).
    pub record_every: Option<u32>,
}

/// Run one single-gate trial from the standard start: body on the
/// centerline `d_acc` below first beam reach, beams at rest, lateral force
/// stream seeded by `seed`.
pub fn run_trial(
    cfg: &SimConfig,
    seed: u64,
    options: TrialOptions,
) -> Result<TrialResult, ConfigError> {
    let engine = Engine::new(cfg)?;
    let start_y = engine.geom.joint_y - cfg.body_radius - cfg.d_acc;
    let state = SystemState::new(Vec2::new(0.0, start_y), Vec2::new(0.0, cfg.v0));
    let force = OscillatingForce::new(cfg.random_magnitude, cfg.oscillator_hz, cfg.dt, seed)?;
    run_trial_from(cfg, state, force, options)
}

/// As [`run_trial`] but with an explicit initial state and force source
/// (tests use scripted sequences).
pub fn run_trial_from<F: LateralForce>(
    cfg: &SimConfig,
    mut state: SystemState,
    mut force: F,
    options: TrialOptions,
) -> Result<TrialResult, ConfigError> {
    let engine = Engine::new(cfg)?;
    let mut stats = StepStats::default();
    let initial_energy = engine.mechanical_energy(&state);
    let mut max_theta = [state.beams[0].theta.max(0.0), state.beams[1].theta.max(0.0)];
    let mut trajectory = Vec::new();
    if options.record_every.is_some() {
        trajectory.push(TrajRecord::of(&state));
    }

    let mut outcome = Outcome::Trapped;
    let mut steps = 0u32;
    for step in 0..cfg.max_steps {
        let f_rand = force.at_step(step as u64);
        engine.step(&mut state, f_rand, &mut stats);
        steps = step + 1;
        max_theta[0] = max_theta[0].max(state.beams[0].theta);
        max_theta[1] = max_theta[1].max(state.beams[1].theta);
        if let Some(every) = options.record_every
            && steps.is_multiple_of(every.max(1))
        {
            trajectory.push(TrajRecord::of(&state));
        }
        if !state.is_finite() {
            outcome = Outcome::Aborted;
            break;
        }
        if state.pos.y >= cfg.success_y {
            outcome = Outcome::Traversed;
            break;
        }
        if state.pos.x <= -engine.geom.half_width {
            outcome = Outcome::ExitedLeft;
            break;
        }
        if state.pos.x >= engine.geom.half_width {
            outcome = Outcome::ExitedRight;
            break;
        }
    }
    if options.record_every.is_some() && trajectory.last().map(|r| r.t) != Some(state.t) {
        trajectory.push(TrajRecord::of(&state));
    }

    Ok(TrialResult {
        outcome,
        steps,
        initial_energy,
        final_energy: engine.mechanical_energy(&state),
        final_state: state,
        max_theta,
        stats,
        trajectory,
    })
}

/// Energy-ledger residual of a completed trial with the audit accumulators:
/// input work minus dissipation minus the mechanical energy change. Shrinks
/// linearly with the time step (first-order integration).
pub fn energy_ledger_residual(result: &TrialResult) -> f64 {
    let s = &result.stats;
    let input = s.work_propulsion + s.work_random;
    let lost = s.drag_dissipation + s.joint_dissipation + s.collision_loss + s.switch_loss;
    input - lost - (result.final_energy - result.initial_energy)
}
