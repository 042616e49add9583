//! Potential energy landscape over body position.
//!
//! At every position each beam is assumed deflected forward just enough to
//! touch the disc (tangent line while the tangent point lies on the beam,
//! tip-on-disc beyond that, rest angle when out of reach), giving the
//! elastic energy surface; the propulsive term is the work left to reach
//! the forward region boundary.

use crate::dynamics::step::TrajRecord;
use crate::error::ConfigError;
use crate::model::{BEAM_SIDES, GateGeometry, SimConfig};
use crate::num::{self, Vec2};
use alloc::vec::Vec;

/// Deflection angles of both beams for a body position, with the
/// out-of-range cap flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deflection {
    pub theta: [f64; 2],
    /// True when the body center overlapped a joint corridor and the angle
    /// was capped at pi/2.
    pub capped: bool,
}

/// Forward deflection angle of one beam in its canonical frame.
fn deflect_one(p: Vec2, length: f64, body_radius: f64) -> (f64, bool) {
    let rho_sq = p.norm_sq();
    if rho_sq <= body_radius * body_radius {
        // Body center overlapping the joint corridor; cap instead of
        // excluding so surfaces stay total.
        return (core::f64::consts::FRAC_PI_2, true);
    }
    let rho = num::sqrt(rho_sq);
    let tangent = num::sqrt(rho_sq - body_radius * body_radius);
    let heading = num::atan2(p.y, p.x);
    let theta = if tangent <= length {
        // Beam line tangent to the disc on the forward side.
        heading + num::asin(body_radius / rho)
    } else if rho <= length + body_radius {
        // Tip regime: place the free tip on the disc boundary.
        let w = (rho_sq + length * length - body_radius * body_radius) / (2.0 * length);
        heading + num::acos((w / rho).clamp(-1.0, 1.0))
    } else {
        return (0.0, false);
    };
    (theta.max(0.0), false)
}

/// Deflection angles of both beams ("beams always deflected forward").
pub fn deflection_angles(pos: Vec2, geom: &GateGeometry, body_radius: f64) -> Deflection {
    let mut theta = [0.0; 2];
    let mut capped = false;
    for side in BEAM_SIDES {
        let p = side.point_to_local(geom, pos);
        let (t, c) = deflect_one(p, geom.half_width, body_radius);
        theta[side.index()] = t;
        capped |= c;
    }
    Deflection { theta, capped }
}

/// Energy components at one position.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct EnergySample {
    pub elastic_left: f64,
    pub elastic_right: f64,
    pub propulsive: f64,
}

impl EnergySample {
    pub fn elastic(&self) -> f64 {
        self.elastic_left + self.elastic_right
    }

    pub fn total(&self) -> f64 {
        self.elastic() + self.propulsive
    }
}

/// Component energies at `pos`. The propulsive zero level sits at the
/// forward region boundary (`y = region_height`).
pub fn energy_components(
    pos: Vec2,
    geom: &GateGeometry,
    body_radius: f64,
    stiffness: [f64; 2],
    f_prop: f64,
) -> EnergySample {
    let d = deflection_angles(pos, geom, body_radius);
    EnergySample {
        elastic_left: 0.5 * stiffness[0] * d.theta[0] * d.theta[0],
        elastic_right: 0.5 * stiffness[1] * d.theta[1] * d.theta[1],
        propulsive: f_prop * (geom.region_height - pos.y),
    }
}

/// Potential energy at `pos`: elastic terms plus, when flagged, the
/// propulsive term.
pub fn landscape_energy(
    pos: Vec2,
    geom: &GateGeometry,
    body_radius: f64,
    stiffness: [f64; 2],
    f_prop: f64,
    include_propulsion: bool,
) -> f64 {
    let s = energy_components(pos, geom, body_radius, stiffness, f_prop);
    if include_propulsion {
        s.total()
    } else {
        s.elastic()
    }
}

/// Energy sampled on a regular mesh over the gate region.
#[derive(Debug, Clone)]
pub struct LandscapeGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// x-major: `samples[xi * ys.len() + yi]`.
    pub samples: Vec<EnergySample>,
    pub capped_nodes: u32,
}

impl LandscapeGrid {
    pub fn at(&self, xi: usize, yi: usize) -> &EnergySample {
        &self.samples[xi * self.ys.len() + yi]
    }
}

/// Sample the landscape on a `step`-spaced mesh (0.5 m in the experiments).
/// Requires `F_prop` for the propulsive component.
pub fn compute_grid(cfg: &SimConfig, step: f64) -> Result<LandscapeGrid, ConfigError> {
    cfg.validate()?;
    let f_prop = cfg.propulsion()?;
    if step.is_nan() || step <= 0.0 {
        return Err(ConfigError::Invalid {
            field: "step",
            what: "grid spacing",
            reason: "must be > 0",
        });
    }
    let geom = cfg.geometry();
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        let n = num::round((hi - lo) / step) as usize + 1;
        (0..n).map(|i| lo + i as f64 * step).collect()
    };
    let xs = axis(-geom.half_width, geom.half_width);
    let ys = axis(0.0, geom.region_height);
    let stiffness = [cfg.stiffness_left, cfg.stiffness_right];
    let mut samples = Vec::with_capacity(xs.len() * ys.len());
    let mut capped_nodes = 0;
    for &x in &xs {
        for &y in &ys {
            let pos = Vec2::new(x, y);
            if deflection_angles(pos, &geom, cfg.body_radius).capped {
                capped_nodes += 1;
            }
            samples.push(energy_components(
                pos,
                &geom,
                cfg.body_radius,
                stiffness,
                f_prop,
            ));
        }
    }
    Ok(LandscapeGrid {
        xs,
        ys,
        samples,
        capped_nodes,
    })
}

/// One point of a trajectory-energy overlay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayPoint {
    pub t: f64,
    pub pos: Vec2,
    /// Landscape energy with both barriers assumed active.
    pub full: f64,
    /// Same, with the elastic term of any beam not in contact removed.
    pub active: f64,
}

/// Evaluate the landscape along a trajectory, masking inactive barriers
/// using the per-beam contact modes recorded with it.
pub fn trajectory_overlay(
    records: &[TrajRecord],
    cfg: &SimConfig,
    include_propulsion: bool,
) -> Result<Vec<OverlayPoint>, ConfigError> {
    cfg.validate()?;
    let f_prop = cfg.propulsion()?;
    let geom = cfg.geometry();
    let stiffness = [cfg.stiffness_left, cfg.stiffness_right];
    Ok(records
        .iter()
        .map(|r| {
            let s = energy_components(r.pos, &geom, cfg.body_radius, stiffness, f_prop);
            let prop = if include_propulsion {
                s.propulsive
            } else {
                0.0
            };
            let masked = [
                if r.mode[0].in_contact() {
                    s.elastic_left
                } else {
                    0.0
                },
                if r.mode[1].in_contact() {
                    s.elastic_right
                } else {
                    0.0
                },
            ];
            OverlayPoint {
                t: r.t,
                pos: r.pos,
                full: s.elastic() + prop,
                active: masked[0] + masked[1] + prop,
            }
        })
        .collect())
}
