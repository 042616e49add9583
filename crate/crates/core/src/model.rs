//! Domain types, parameter validation, and the JSON configuration schema.
//!
//! All quantities are SI. The gate-local frame has its origin at the
//! bottom-center of the gate region, `+y` forward (the traversal direction).
//! The region spans `[-half_width, half_width] x [0, region_height]`; the two
//! beam joints sit on the side walls at height `joint_y`, each beam pointing
//! inward toward `x = 0` when unloaded so that the pair closes the gate.

use crate::error::ConfigError;
use crate::num::Vec2;
use alloc::string::String;
use serde::{Deserialize, Serialize};

/// Full simulation configuration. Field names in the JSON schema mirror the
/// conventional symbols (`M`, `R`, `k_L`, `Rm`, ...); see the serde renames.
///
/// `F_prop` has no default and must be set before dynamics can run; every
/// other field defaults to the symmetric test configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Body mass `[kg]`.
    #[serde(rename = "M")]
    pub body_mass: f64,
    /// Body radius `[m]`.
    #[serde(rename = "R")]
    pub body_radius: f64,
    /// Beam mass `[kg]`. Enters the dynamics only through `I`.
    #[serde(rename = "m")]
    pub beam_mass: f64,
    /// Beam length `[m]`.
    #[serde(rename = "L")]
    pub beam_length: f64,
    /// Beam moment of inertia about its joint `[kg m^2]`.
    #[serde(rename = "I")]
    pub beam_inertia: f64,
    /// Left joint torsional stiffness `[N m/rad]`.
    #[serde(rename = "k_L")]
    pub stiffness_left: f64,
    /// Right joint torsional stiffness `[N m/rad]`.
    #[serde(rename = "k_R")]
    pub stiffness_right: f64,
    /// Left joint damping `[N m s/rad]` (torque per angular rate).
    #[serde(rename = "d_1")]
    pub damping_left: f64,
    /// Right joint damping `[N m s/rad]`.
    #[serde(rename = "d_2")]
    pub damping_right: f64,
    /// Constant forward propulsive force `[N]`. Required for any dynamics run.
    #[serde(rename = "F_prop")]
    pub f_prop: Option<f64>,
    /// Magnitude scale of the lateral random force `[N]`.
    #[serde(rename = "Rm")]
    pub random_magnitude: f64,
    /// Resampling frequency of the random force `[Hz]`.
    #[serde(rename = "f")]
    pub oscillator_hz: f64,
    /// Viscous drag coefficient between body and plane `[N s/m]`.
    #[serde(rename = "D")]
    pub drag: f64,
    /// Coefficient of restitution for tangential collisions.
    #[serde(rename = "CoR")]
    pub cor: f64,
    /// Integration time step `[s]`.
    pub dt: f64,
    /// Impulse threshold for the collision-to-constraint switch `[kg m/s]`.
    pub epsilon: f64,
    /// Step budget of a trial (also the per-gate budget in the lattice).
    pub max_steps: u32,
    /// Initial forward speed `[m/s]`.
    pub v0: f64,
    /// Acceleration run-up distance before the body can first touch the
    /// beams `[m]`; the trial starts at `y = joint_y - R - d_acc`.
    pub d_acc: f64,
    /// Forward position that counts as a successful single-gate traversal `[m]`.
    pub success_y: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            body_mass: 1.0,
            body_radius: 10.0,
            beam_mass: 0.1,
            beam_length: 25.0,
            beam_inertia: 20.83,
            stiffness_left: 400.0,
            stiffness_right: 400.0,
            damping_left: 50.0,
            damping_right: 50.0,
            f_prop: None,
            random_magnitude: 0.0,
            oscillator_hz: 50.0,
            drag: 0.0,
            cor: 0.8,
            dt: 0.004,
            epsilon: 0.04,
            max_steps: 3000,
            v0: 0.0,
            d_acc: 20.0,
            success_y: 65.0,
        }
    }
}

impl SimConfig {
    /// Parse a JSON document, applying defaults for absent fields, and
    /// validate every invariant. An empty document (`{}`) is valid but
    /// leaves `F_prop` unset.
    pub fn from_json(text: &str) -> Result<SimConfig, ConfigError> {
        let cfg: SimConfig = serde_json::from_str(text).map_err(|_| ConfigError::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serialize to the canonical JSON form (fixed field order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Check every field invariant. `F_prop` may stay unset here; operations
    /// that integrate dynamics demand it via [`SimConfig::propulsion`].
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn finite(v: f64, field: &'static str, what: &'static str) -> Result<(), ConfigError> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    field,
                    what,
                    reason: "must be a finite number",
                })
            }
        }
        fn positive(v: f64, field: &'static str, what: &'static str) -> Result<(), ConfigError> {
            finite(v, field, what)?;
            if v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    field,
                    what,
                    reason: "must be > 0",
                })
            }
        }
        fn non_negative(
            v: f64,
            field: &'static str,
            what: &'static str,
        ) -> Result<(), ConfigError> {
            finite(v, field, what)?;
            if v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    field,
                    what,
                    reason: "must be >= 0",
                })
            }
        }

        positive(self.body_mass, "M", "mass")?;
        positive(self.body_radius, "R", "body radius")?;
        non_negative(self.beam_mass, "m", "beam mass")?;
        positive(self.beam_length, "L", "beam length")?;
        positive(self.beam_inertia, "I", "beam inertia")?;
        non_negative(self.stiffness_left, "k_L", "left beam stiffness")?;
        non_negative(self.stiffness_right, "k_R", "right beam stiffness")?;
        non_negative(self.damping_left, "d_1", "left joint damping")?;
        non_negative(self.damping_right, "d_2", "right joint damping")?;
        if let Some(fp) = self.f_prop {
            non_negative(fp, "F_prop", "propulsive force")?;
        }
        non_negative(self.random_magnitude, "Rm", "random force magnitude")?;
        positive(self.oscillator_hz, "f", "oscillator frequency")?;
        non_negative(self.drag, "D", "drag coefficient")?;
        finite(self.cor, "CoR", "coefficient of restitution")?;
        if !(self.cor > 0.0 && self.cor <= 1.0) {
            return Err(ConfigError::Invalid {
                field: "CoR",
                what: "coefficient of restitution",
                reason: "must satisfy 0 < CoR <= 1",
            });
        }
        positive(self.dt, "dt", "time step")?;
        positive(self.epsilon, "epsilon", "impulse threshold")?;
        if self.max_steps == 0 {
            return Err(ConfigError::Invalid {
                field: "max_steps",
                what: "step budget",
                reason: "must be > 0",
            });
        }
        non_negative(self.v0, "v0", "initial forward velocity")?;
        non_negative(self.d_acc, "d_acc", "acceleration distance")?;
        positive(self.success_y, "success_y", "traversal threshold")?;
        if self.oscillator_hz * self.dt > 1.0 {
            return Err(ConfigError::Invalid {
                field: "f",
                what: "oscillator frequency",
                reason: "f * dt must be <= 1 so the hold interval is at least one step",
            });
        }
        Ok(())
    }

    /// The propulsive force, or an error naming the missing field.
    pub fn propulsion(&self) -> Result<f64, ConfigError> {
        self.f_prop.ok_or(ConfigError::Missing {
            field: "F_prop",
            what: "propulsive force",
        })
    }

    /// Gate geometry implied by this configuration. Beam lengths sum to the
    /// gate width, so the half-width equals the beam length.
    pub fn geometry(&self) -> GateGeometry {
        GateGeometry {
            half_width: self.beam_length,
            joint_y: 30.0,
            region_height: 60.0,
        }
    }

    /// Stiffness of the given beam.
    pub fn stiffness(&self, side: BeamSide) -> f64 {
        match side {
            BeamSide::Left => self.stiffness_left,
            BeamSide::Right => self.stiffness_right,
        }
    }

    /// Joint damping of the given beam.
    pub fn damping(&self, side: BeamSide) -> f64 {
        match side {
            BeamSide::Left => self.damping_left,
            BeamSide::Right => self.damping_right,
        }
    }

    /// Stable 64-bit fingerprint of every numeric field, independent of the
    /// serialized text form. Used to tie derived artifacts (transition
    /// matrices, manifests) back to the exact configuration.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf29ce484222325;
        const PRIME: u64 = 0x100000001b3;
        let mut h = OFFSET;
        let mut eat = |bits: u64| {
            for byte in bits.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        for v in [
            self.body_mass,
            self.body_radius,
            self.beam_mass,
            self.beam_length,
            self.beam_inertia,
            self.stiffness_left,
            self.stiffness_right,
            self.damping_left,
            self.damping_right,
            self.f_prop.unwrap_or(f64::NAN),
            self.random_magnitude,
            self.oscillator_hz,
            self.drag,
            self.cor,
            self.dt,
            self.epsilon,
            self.v0,
            self.d_acc,
            self.success_y,
        ] {
            eat(v.to_bits());
        }
        eat(self.max_steps as u64);
        h
    }
}

/// Geometry of one gate region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateGeometry {
    /// Half of the region width; also the beam length.
    pub half_width: f64,
    /// Height of the beam joints above the region bottom.
    pub joint_y: f64,
    /// Region height; the top boundary of a gate cell.
    pub region_height: f64,
}

impl GateGeometry {
    pub fn joint(&self, side: BeamSide) -> Vec2 {
        match side {
            BeamSide::Left => Vec2::new(-self.half_width, self.joint_y),
            BeamSide::Right => Vec2::new(self.half_width, self.joint_y),
        }
    }
}

/// Which beam of the gate.
///
/// Beam-local ("canonical") coordinates put the joint at the origin with the
/// unloaded beam along `+x` and forward deflection toward `+y`. The left beam
/// is a pure translation of the gate frame; the right beam additionally
/// mirrors `x`. Doing all per-beam math in this canonical frame makes the
/// dynamics exactly mirror-symmetric in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamSide {
    Left,
    Right,
}

pub const BEAM_SIDES: [BeamSide; 2] = [BeamSide::Left, BeamSide::Right];

impl BeamSide {
    #[inline(always)]
    pub fn index(self) -> usize {
        match self {
            BeamSide::Left => 0,
            BeamSide::Right => 1,
        }
    }

    /// Gate-frame position to canonical beam frame.
    #[inline(always)]
    pub fn point_to_local(self, geom: &GateGeometry, p: Vec2) -> Vec2 {
        let j = geom.joint(self);
        match self {
            BeamSide::Left => Vec2::new(p.x - j.x, p.y - j.y),
            BeamSide::Right => Vec2::new(j.x - p.x, p.y - j.y),
        }
    }

    /// Canonical beam frame position back to the gate frame.
    #[inline(always)]
    pub fn point_to_global(self, geom: &GateGeometry, p: Vec2) -> Vec2 {
        let j = geom.joint(self);
        match self {
            BeamSide::Left => Vec2::new(j.x + p.x, j.y + p.y),
            BeamSide::Right => Vec2::new(j.x - p.x, j.y + p.y),
        }
    }

    /// Mirror a direction-like quantity (velocity, force) between frames.
    /// The transform is its own inverse.
    #[inline(always)]
    pub fn vec_to_local(self, v: Vec2) -> Vec2 {
        match self {
            BeamSide::Left => v,
            BeamSide::Right => Vec2::new(-v.x, v.y),
        }
    }

    #[inline(always)]
    pub fn vec_to_global(self, v: Vec2) -> Vec2 {
        self.vec_to_local(v)
    }
}

/// How a beam currently interacts with the body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteractionMode {
    /// No contact; the beam swings freely under its joint torque.
    Free,
    /// In contact, resolved by discrete impulses.
    Colliding,
    /// In contact with the normal-velocity constraint enforced algebraically.
    Constrained(ContactKind),
}

/// Geometric contact class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactKind {
    /// Beam edge tangent to the disc; normal perpendicular to the beam.
    Tangential,
    /// Beam free tip on the disc; normal along tip-to-center.
    Point,
}

impl InteractionMode {
    /// Short code used in trajectory exports.
    pub fn code(self) -> &'static str {
        match self {
            InteractionMode::Free => "free",
            InteractionMode::Colliding => "colliding",
            InteractionMode::Constrained(ContactKind::Tangential) => "tangential",
            InteractionMode::Constrained(ContactKind::Point) => "point",
        }
    }

    pub fn in_contact(self) -> bool {
        !matches!(self, InteractionMode::Free)
    }

    pub fn from_code(code: &str) -> Option<InteractionMode> {
        match code {
            "free" => Some(InteractionMode::Free),
            "colliding" => Some(InteractionMode::Colliding),
            "tangential" => Some(InteractionMode::Constrained(ContactKind::Tangential)),
            "point" => Some(InteractionMode::Constrained(ContactKind::Point)),
            _ => None,
        }
    }
}

/// State of one beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamState {
    /// Deflection angle `[rad]`; 0 at rest, positive deflected forward.
    pub theta: f64,
    /// Angular velocity `[rad/s]`.
    pub omega: f64,
    pub mode: InteractionMode,
}

impl BeamState {
    pub fn at_rest() -> BeamState {
        BeamState {
            theta: 0.0,
            omega: 0.0,
            mode: InteractionMode::Free,
        }
    }
}

/// Full mechanical state of one gate system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    pub t: f64,
    /// Body center, gate frame `[m]`.
    pub pos: Vec2,
    /// Body velocity `[m/s]`.
    pub vel: Vec2,
    pub beams: [BeamState; 2],
}

impl SystemState {
    /// Body at the given position/velocity, beams unloaded.
    pub fn new(pos: Vec2, vel: Vec2) -> SystemState {
        SystemState {
            t: 0.0,
            pos,
            vel,
            beams: [BeamState::at_rest(), BeamState::at_rest()],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.pos.is_finite()
            && self.vel.is_finite()
            && self
                .beams
                .iter()
                .all(|b| b.theta.is_finite() && b.omega.is_finite())
    }
}
