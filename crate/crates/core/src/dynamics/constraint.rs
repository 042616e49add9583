//! Constraint-mode dynamics: body and beam share the normal velocity at the
//! contact, and the contact force becomes an unknown of the equations of
//! motion instead of an impulse.
//!
//! For each constrained contact the differentiated velocity constraint gives
//! the beam angular acceleration as an affine function of the body
//! acceleration; the beam rotational equation then gives the contact force,
//! also affine in the body acceleration. Substituting both into the body's
//! Newton equation leaves a 2x2 linear system in the body acceleration
//! alone, which is solved in closed form. Beam torques use the joint-to-
//! contact lever of the collision equations.
//!
//! Per-beam math runs in the canonical beam frame (see `contact`); beam
//! contributions enter the global system through the side mirror, summed
//! pairwise so that mirror-symmetric states produce bitwise-symmetric
//! solutions.

use super::contact::{ContactGeom, beam_dir, beam_normal};
use crate::model::{BEAM_SIDES, GateGeometry, SystemState};
use crate::num::{self, Vec2};

/// Denominators smaller than this (relative to the geometry scale) make a
/// contact degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

/// A contact currently handled by the constraint method.
#[derive(Debug, Clone, Copy)]
pub struct ActiveContact {
    /// Beam index: 0 left, 1 right.
    pub beam: usize,
    /// Contact geometry in that beam's canonical frame.
    pub geom: ContactGeom,
}

/// Accelerations and contact force for one constrained beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSolution {
    pub beta: f64,
    /// Contact force magnitude; negative means the solution needs tension,
    /// i.e. the contact must be released.
    pub force: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSolve {
    Ok {
        accel: Vec2,
        beams: [Option<BeamSolution>; 2],
    },
    /// The geometry makes the system singular; the offending contact should
    /// fall back to free motion.
    Degenerate { beam: usize },
}

/// Everything the solve needs besides the contact set.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintEnv<'a> {
    pub state: &'a SystemState,
    pub geom: &'a GateGeometry,
    pub body_mass: f64,
    pub beam_inertia: f64,
    pub stiffness: [f64; 2],
    pub damping: [f64; 2],
    /// Net non-contact force on the body (propulsion + random + drag).
    pub external_force: Vec2,
}

/// Affine reduction of one contact: `beta = (grad . a_local - bias) / den`,
/// `force = kappa * (grad . a_local) + phi`, force on the body along `push`.
struct ContactRow {
    beam: usize,
    /// Gradient of the constraint in global body acceleration.
    grad_global: Vec2,
    bias: f64,
    den: f64,
    kappa: f64,
    phi: f64,
    /// Contact force direction on the body, global frame.
    push_global: Vec2,
}

fn build_row(env: &ConstraintEnv<'_>, contact: &ActiveContact) -> Result<ContactRow, usize> {
    let side = BEAM_SIDES[contact.beam];
    let beam = &env.state.beams[contact.beam];
    let p = side.point_to_local(env.geom, env.state.pos);
    let v = side.vec_to_local(env.state.vel);
    let theta = beam.theta;
    let omega = beam.omega;
    let inertia = env.beam_inertia;

    let (grad, bias, den, torque_arm, push) = match contact.geom {
        ContactGeom::Tangential { r, side: face, .. } => {
            let n = beam_normal(theta);
            let u = beam_dir(theta);
            // Differentiated tangential constraint:
            // beta r = n . a - [(x/r + cos t) w vx + (y/r + sin t) w vy]
            let bias = (p.x / r + u.x) * omega * v.x + (p.y / r + u.y) * omega * v.y;
            (n, bias, r, -face * r, n * face)
        }
        ContactGeom::Point { normal, c, .. } => {
            let u = beam_dir(theta);
            let length = env.geom.half_width;
            let tip = u * length;
            let q = tip - p;
            // beta g = q . a - V with g = L (sin t x - cos t y)
            let g = length * (u.y * p.x - u.x * p.y);
            let v_sq = v.norm_sq();
            let bias = v_sq - 2.0 * length * omega * (u.x * v.y - u.y * v.x)
                + length * omega * omega * (u.x * p.x + u.y * p.y);
            (q, bias, g, -c, normal)
        }
    };

    let scale = env.geom.half_width;
    if num::abs(den) <= DEGENERACY_TOL * scale || num::abs(torque_arm) <= DEGENERACY_TOL * scale {
        return Err(contact.beam);
    }

    let kappa = inertia / (torque_arm * den);
    let spring = env.stiffness[contact.beam] * theta + env.damping[contact.beam] * omega;
    let phi = (spring - inertia * bias / den) / torque_arm;

    Ok(ContactRow {
        beam: contact.beam,
        grad_global: side.vec_to_global(grad),
        bias,
        den,
        kappa,
        phi,
        push_global: side.vec_to_global(push),
    })
}

/// Solve the constrained equations of motion for the active contact set.
/// Contact forces are reported as-is; the caller deactivates any contact
/// whose force comes out tensile and re-solves.
pub fn solve(env: &ConstraintEnv<'_>, contacts: &[ActiveContact]) -> ConstraintSolve {
    debug_assert!(contacts.len() <= 2);
    let mut rows: [Option<ContactRow>; 2] = [None, None];
    for contact in contacts {
        match build_row(env, contact) {
            Ok(row) => rows[contact.beam] = Some(row),
            Err(beam) => return ConstraintSolve::Degenerate { beam },
        }
    }

    // A = M I - sum_j kappa_j push_j grad_j^T,  b = F_ext + sum_j phi_j push_j.
    // Beam terms are summed pairwise (left + right) so mirror-symmetric
    // inputs cancel exactly in the off-axis components.
    let term = |f: &dyn Fn(&ContactRow) -> f64| -> f64 {
        let l = rows[0].as_ref().map_or(0.0, f);
        let r = rows[1].as_ref().map_or(0.0, f);
        l + r
    };
    let m = env.body_mass;
    let a11 = m - term(&|r| r.kappa * r.push_global.x * r.grad_global.x);
    let a12 = -term(&|r| r.kappa * r.push_global.x * r.grad_global.y);
    let a21 = -term(&|r| r.kappa * r.push_global.y * r.grad_global.x);
    let a22 = m - term(&|r| r.kappa * r.push_global.y * r.grad_global.y);
    let b1 = env.external_force.x + term(&|r| r.phi * r.push_global.x);
    let b2 = env.external_force.y + term(&|r| r.phi * r.push_global.y);

    let det = a11 * a22 - a12 * a21;
    if num::abs(det) <= DEGENERACY_TOL * m * m {
        let beam = contacts.first().map_or(0, |c| c.beam);
        return ConstraintSolve::Degenerate { beam };
    }
    let accel = Vec2::new((b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det);

    let mut beams: [Option<BeamSolution>; 2] = [None, None];
    for row in rows.iter().flatten() {
        let grad_dot_a = row.grad_global.dot(accel);
        let beta = (grad_dot_a - row.bias) / row.den;
        let force = row.kappa * grad_dot_a + row.phi;
        beams[row.beam] = Some(BeamSolution { beta, force });
    }

    ConstraintSolve::Ok { accel, beams }
}

/// Normal relative velocity at the contact (the quantity the constraint
/// drives to zero), canonical frame inputs.
pub fn velocity_residual(v: Vec2, theta: f64, omega: f64, geom: &ContactGeom) -> f64 {
    match *geom {
        ContactGeom::Tangential { r, .. } => v.dot(beam_normal(theta)) - omega * r,
        ContactGeom::Point { normal, c, .. } => v.dot(normal) - omega * c,
    }
}

/// Beam angular velocity that satisfies the velocity constraint for the
/// given body velocity. `None` when the geometry is degenerate.
pub fn project_omega(v: Vec2, geom: &ContactGeom, theta: f64, scale: f64) -> Option<f64> {
    match *geom {
        ContactGeom::Tangential { r, .. } => {
            if num::abs(r) <= DEGENERACY_TOL * scale {
                None
            } else {
                Some(v.dot(beam_normal(theta)) / r)
            }
        }
        ContactGeom::Point { normal, c, .. } => {
            if num::abs(c) <= DEGENERACY_TOL * scale {
                None
            } else {
                Some(v.dot(normal) / c)
            }
        }
    }
}

/// Residual of the differentiated constraint at a solution, canonical frame.
/// Zero (to rounding) for any output of [`solve`].
#[allow(clippy::too_many_arguments)]
pub fn accel_residual(
    p: Vec2,
    v: Vec2,
    theta: f64,
    omega: f64,
    geom: &ContactGeom,
    accel_local: Vec2,
    beta: f64,
    beam_length: f64,
) -> f64 {
    match *geom {
        ContactGeom::Tangential { r, .. } => {
            let u = beam_dir(theta);
            let n = beam_normal(theta);
            let bias = (p.x / r + u.x) * omega * v.x + (p.y / r + u.y) * omega * v.y;
            beta * r - n.dot(accel_local) + bias
        }
        ContactGeom::Point { .. } => {
            let u = beam_dir(theta);
            let tip = u * beam_length;
            let q = tip - p;
            let g = beam_length * (u.y * p.x - u.x * p.y);
            let bias = v.norm_sq() - 2.0 * beam_length * omega * (u.x * v.y - u.y * v.x)
                + beam_length * omega * omega * (u.x * p.x + u.y * p.y);
            beta * g - q.dot(accel_local) + bias
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::contact::{self, ContactQuery};
    use crate::model::{BeamState, InteractionMode, SimConfig};
    use crate::rng::TrialRng;

    fn env_for<'a>(
        cfg: &SimConfig,
        state: &'a SystemState,
        geom: &'a GateGeometry,
        external: Vec2,
    ) -> ConstraintEnv<'a> {
        ConstraintEnv {
            state,
            geom,
            body_mass: cfg.body_mass,
            beam_inertia: cfg.beam_inertia,
            stiffness: [cfg.stiffness_left, cfg.stiffness_right],
            damping: [cfg.damping_left, cfg.damping_right],
            external_force: external,
        }
    }

    /// Body at (0, 30) with both beams at the tangency angle: a state in
    /// simultaneous two-beam tangential contact.
    fn symmetric_two_beam_state(cfg: &SimConfig) -> (SystemState, [ActiveContact; 2]) {
        let geom = cfg.geometry();
        // Tangency angle at rho = 25, backed off a hair so the disc
        // penetrates rather than exactly touches.
        let theta = num::asin(cfg.body_radius / 25.0) - 1e-12;
        let mut state = SystemState::new(Vec2::new(0.0, 30.0), Vec2::ZERO);
        for b in &mut state.beams {
            b.theta = theta;
            b.mode = InteractionMode::Constrained(crate::model::ContactKind::Tangential);
        }
        let mut contacts = [None, None];
        for side in BEAM_SIDES {
            let p = side.point_to_local(&geom, state.pos);
            match contact::classify(p, theta, cfg.beam_length, cfg.body_radius) {
                ContactQuery::Contact(g) => {
                    contacts[side.index()] = Some(ActiveContact {
                        beam: side.index(),
                        geom: g,
                    })
                }
                other => panic!("expected contact, got {other:?}"),
            }
        }
        (state, [contacts[0].unwrap(), contacts[1].unwrap()])
    }

    #[test]
    fn symmetric_contact_has_no_lateral_acceleration() {
        let cfg = SimConfig::default();
        let geom = cfg.geometry();
        let (state, contacts) = symmetric_two_beam_state(&cfg);
        let env = env_for(&cfg, &state, &geom, Vec2::new(0.0, 7.0));
        match solve(&env, &contacts) {
            ConstraintSolve::Ok { accel, beams } => {
                // Bitwise zero, not just small: symmetric inputs must cancel.
                assert_eq!(accel.x, 0.0);
                let (b1, b2) = (beams[0].unwrap(), beams[1].unwrap());
                // Both beams deflect forward identically (canonical angles).
                assert_eq!(b1.beta, b2.beta);
                assert_eq!(b1.force, b2.force);
            }
            other => panic!("expected solution, got {other:?}"),
        }
    }

    #[test]
    fn solution_satisfies_newton_and_constraint() {
        // Randomized constrained states: place the body exactly tangent on a
        // beam, give it a constraint-compatible velocity, and check that the
        // returned accelerations satisfy both the differentiated constraint
        // and the body Newton equation.
        let cfg = SimConfig::default();
        let geom = cfg.geometry();
        let mut rng = TrialRng::seed_from_u64(17);
        for case in 0..300 {
            let beam_idx = (case % 2) as usize;
            let side = BEAM_SIDES[beam_idx];
            let theta = rng.uniform_in(-0.2, 1.1);
            let r = rng.uniform_in(3.0, 24.0);
            let face = if rng.uniform01() < 0.5 { -1.0 } else { 1.0 };
            let p_local = contact::beam_dir(theta) * r
                + contact::beam_normal(theta) * (face * (cfg.body_radius - 1e-9));
            let omega = rng.uniform_in(-1.5, 1.5);
            let v_t = rng.uniform_in(-10.0, 10.0);
            // Velocity satisfying the tangential constraint: v.n = omega r.
            let v_local =
                contact::beam_dir(theta) * v_t + contact::beam_normal(theta) * (omega * r);

            let mut state = SystemState::new(
                side.point_to_global(&geom, p_local),
                side.vec_to_global(v_local),
            );
            state.beams[beam_idx] = BeamState {
                theta,
                omega,
                mode: InteractionMode::Constrained(crate::model::ContactKind::Tangential),
            };

            let geom_q = match contact::classify(p_local, theta, cfg.beam_length, cfg.body_radius) {
                ContactQuery::Contact(g) => g,
                other => panic!("case {case}: no contact ({other:?})"),
            };
            let contacts = [ActiveContact {
                beam: beam_idx,
                geom: geom_q,
            }];
            let external = Vec2::new(rng.uniform_in(-30.0, 30.0), rng.uniform_in(-10.0, 20.0));
            let env = env_for(&cfg, &state, &geom, external);
            let ConstraintSolve::Ok { accel, beams } = solve(&env, &contacts) else {
                panic!("case {case}: degenerate");
            };
            let sol = beams[beam_idx].unwrap();

            // Differentiated-constraint residual at the solution.
            let res = accel_residual(
                p_local,
                v_local,
                theta,
                omega,
                &geom_q,
                side.vec_to_local(accel),
                sol.beta,
                cfg.beam_length,
            );
            assert!(res.abs() <= 1e-9, "case {case}: residual {res}");

            // Body Newton: M a = F_ext + push * force.
            let push = side.vec_to_global(geom_q.push_dir(theta));
            let newton = Vec2::new(
                cfg.body_mass * accel.x - external.x - push.x * sol.force,
                cfg.body_mass * accel.y - external.y - push.y * sol.force,
            );
            assert!(newton.norm() <= 1e-9, "case {case}: newton {newton:?}");

            // Beam equation: I beta = arm * force - k theta - d omega.
            let arm = match geom_q {
                ContactGeom::Tangential { r, side: f, .. } => -f * r,
                ContactGeom::Point { c, .. } => -c,
            };
            let k = [cfg.stiffness_left, cfg.stiffness_right][beam_idx];
            let d = [cfg.damping_left, cfg.damping_right][beam_idx];
            let beam_res = cfg.beam_inertia * sol.beta - (arm * sol.force - k * theta - d * omega);
            assert!(beam_res.abs() <= 1e-9, "case {case}: beam {beam_res}");
        }
    }

    #[test]
    fn pushing_scenario_is_compressive() {
        // Body under propulsion pressed from below into a deflected beam:
        // the contact force must be compressive.
        let cfg = SimConfig::default();
        let geom = cfg.geometry();
        let theta = 0.3;
        let r = 12.0;
        let p_local =
            contact::beam_dir(theta) * r - contact::beam_normal(theta) * (cfg.body_radius - 1e-9);
        let side = BEAM_SIDES[0];
        let mut state = SystemState::new(side.point_to_global(&geom, p_local), Vec2::ZERO);
        state.beams[0] = BeamState {
            theta,
            omega: 0.0,
            mode: InteractionMode::Constrained(crate::model::ContactKind::Tangential),
        };
        let ContactQuery::Contact(g) =
            contact::classify(p_local, theta, cfg.beam_length, cfg.body_radius)
        else {
            panic!("no contact");
        };
        let env = env_for(&cfg, &state, &geom, Vec2::new(0.0, 7.0));
        let ConstraintSolve::Ok { beams, .. } = solve(&env, &[ActiveContact { beam: 0, geom: g }])
        else {
            panic!("degenerate");
        };
        assert!(beams[0].unwrap().force > 0.0);
    }

    #[test]
    fn omega_projection_zeros_the_velocity_residual() {
        let cfg = SimConfig::default();
        let mut rng = TrialRng::seed_from_u64(23);
        for _ in 0..100 {
            let theta = rng.uniform_in(-0.3, 1.2);
            let r = rng.uniform_in(2.0, 24.0);
            let p = contact::beam_dir(theta) * r
                - contact::beam_normal(theta) * (cfg.body_radius - 1e-9);
            let v = Vec2::new(rng.uniform_in(-20.0, 20.0), rng.uniform_in(-20.0, 20.0));
            let ContactQuery::Contact(g) =
                contact::classify(p, theta, cfg.beam_length, cfg.body_radius)
            else {
                panic!("no contact")
            };
            let omega = project_omega(v, &g, theta, cfg.beam_length).unwrap();
            let res = velocity_residual(v, theta, omega, &g);
            assert!(res.abs() <= 1e-12, "residual {res}");
        }
    }
}
