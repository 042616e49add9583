//! Independent oracle for the constraint-mode dynamics: a stiff penalty
//! method (contact spring 1e6 N/m) integrated at dt = 1e-5. Over a second
//! of sustained single-beam contact the constrained body path must track
//! the penalty path within a centimeter.
//!
//! The scenario presses the body firmly into the left beam (25 N of
//! propulsion, sliding toward the joint) so the contact force stays far
//! from zero: grazing contact is scheme-sensitive and would not compare
//! two discretizations meaningfully. The constrained run uses a time step
//! fine enough that its own truncation error is subdominant to the
//! tolerance; step-size behavior itself is covered by the energy-ledger
//! convergence test.

use gatesim_core::dynamics::step::{Engine, StepStats};
use gatesim_core::model::{
    BeamSide, BeamState, ContactKind, InteractionMode, SimConfig, SystemState,
};
use gatesim_core::num::Vec2;

const PENALTY_STIFFNESS: f64 = 1e6;
const PENALTY_DT: f64 = 1e-5;

fn beam_dir(theta: f64) -> Vec2 {
    Vec2::new(theta.cos(), theta.sin())
}

fn beam_normal(theta: f64) -> Vec2 {
    Vec2::new(-theta.sin(), theta.cos())
}

struct PenaltySim {
    pos: Vec2,
    vel: Vec2,
    theta: f64,
    omega: f64,
    joint: Vec2,
}

impl PenaltySim {
    /// One forward-Euler step with a linear-spring contact force at the
    /// foot of the perpendicular (lever = distance along the beam).
    fn step(&mut self, cfg: &SimConfig, f_prop: f64) {
        let p = self.pos - self.joint;
        let u = beam_dir(self.theta);
        let n = beam_normal(self.theta);
        let h = p.dot(n);
        let along = p.dot(u);

        let mut body_force = Vec2::new(0.0, f_prop);
        let mut torque = -cfg.stiffness_left * self.theta - cfg.damping_left * self.omega;
        let depth = cfg.body_radius - h.abs();
        if depth > 0.0 && along > 0.0 && along <= cfg.beam_length {
            let side = if h >= 0.0 { 1.0 } else { -1.0 };
            let f = PENALTY_STIFFNESS * depth;
            body_force += n * (side * f);
            torque += -side * f * along;
        }

        self.pos += self.vel * PENALTY_DT;
        self.theta += self.omega * PENALTY_DT;
        self.vel += body_force * (PENALTY_DT / cfg.body_mass);
        self.omega += torque * (PENALTY_DT / cfg.beam_inertia);
    }
}

#[test]
fn constrained_contact_tracks_stiff_penalty_oracle() {
    let f_prop = 25.0;
    let cfg = SimConfig {
        f_prop: Some(f_prop),
        dt: 4e-4,
        ..SimConfig::default()
    };
    let engine = Engine::new(&cfg).unwrap();
    let geom = cfg.geometry();
    let joint = geom.joint(BeamSide::Left);

    // Tangential contact with the left beam at theta = 0.35, 12 m from the
    // joint, sliding 4 m/s toward the joint; the velocity satisfies the
    // constraint (zero normal component relative to the resting beam).
    let theta0 = 0.35;
    let r0 = 12.0;
    let p_local = beam_dir(theta0) * r0 - beam_normal(theta0) * (cfg.body_radius - 1e-9);
    let v_local = beam_dir(theta0) * -4.0;

    let mut state = SystemState::new(
        BeamSide::Left.point_to_global(&geom, p_local),
        BeamSide::Left.vec_to_global(v_local),
    );
    state.beams[0] = BeamState {
        theta: theta0,
        omega: 0.0,
        mode: InteractionMode::Constrained(ContactKind::Tangential),
    };

    let mut oracle = PenaltySim {
        pos: state.pos,
        vel: state.vel,
        theta: theta0,
        omega: 0.0,
        joint,
    };

    let mut stats = StepStats::default();
    let steps = (1.0 / cfg.dt) as usize;
    let substeps = (cfg.dt / PENALTY_DT) as usize;
    let mut worst = 0.0_f64;
    for step in 0..steps {
        engine.step(&mut state, 0.0, &mut stats);
        for _ in 0..substeps {
            oracle.step(&cfg, f_prop);
        }
        let gap = (state.pos - oracle.pos).norm();
        worst = worst.max(gap);
        assert!(
            gap <= 1e-2,
            "paths diverged to {gap} m at step {step} (t = {})",
            state.t
        );
        // The whole window exercises the constraint method on the left
        // beam only.
        assert!(
            matches!(state.beams[0].mode, InteractionMode::Constrained(_)),
            "left contact lost at t = {}",
            state.t
        );
        assert_eq!(state.beams[1].mode, InteractionMode::Free);
    }
    assert!(worst > 1e-7, "trajectories suspiciously identical");
    assert!(stats.max_constraint_residual <= 1e-9);
}
