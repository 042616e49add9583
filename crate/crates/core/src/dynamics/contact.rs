//! Contact geometry between the disc and one beam.
//!
//! All quantities here live in the canonical beam frame: joint at the
//! origin, unloaded beam along `+x`, deflection angle `theta` measured
//! counterclockwise so positive is "forward". `u = (cos t, sin t)` is the
//! beam direction and `n = (-sin t, cos t)` its forward normal.
//!
//! Following the collision equations, the tangential lever arm is the
//! tangent-line construction `r = sqrt(x^2 + y^2 - R^2)`, which coincides
//! with the true contact point whenever the disc touches the beam exactly
//! (the integrator projects penetration away each step, so it always nearly
//! does).

use crate::model::ContactKind;
use crate::num::{self, Vec2};

/// Resolved contact of the disc against one beam, canonical frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactGeom {
    Tangential {
        /// Joint-to-contact distance along the beam, `sqrt(rho^2 - R^2)`.
        r: f64,
        /// Which face of the beam the body center is on: `+1` forward of the
        /// beam line, `-1` behind it. The contact force on the body acts
        /// along `side * n`.
        side: f64,
        /// Penetration depth `R - |distance to beam line|`, >= 0 in contact.
        depth: f64,
    },
    Point {
        /// Unit normal from the beam tip toward the body center.
        normal: Vec2,
        /// Lever of the contact normal about the joint, `tip x normal`.
        c: f64,
        /// Penetration depth `R - |center - tip|`.
        depth: f64,
    },
}

impl ContactGeom {
    pub fn kind(&self) -> ContactKind {
        match self {
            ContactGeom::Tangential { .. } => ContactKind::Tangential,
            ContactGeom::Point { .. } => ContactKind::Point,
        }
    }

    pub fn depth(&self) -> f64 {
        match *self {
            ContactGeom::Tangential { depth, .. } => depth,
            ContactGeom::Point { depth, .. } => depth,
        }
    }

    /// Direction of the contact force on the body, canonical frame.
    pub fn push_dir(&self, theta: f64) -> Vec2 {
        match *self {
            ContactGeom::Tangential { side, .. } => beam_normal(theta) * side,
            ContactGeom::Point { normal, .. } => normal,
        }
    }
}

/// Outcome of a contact query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactQuery {
    Clear,
    Contact(ContactGeom),
    /// The body center is within `R` of the joint; no meaningful beam
    /// contact can be constructed there. Counted as a diagnostic.
    JointOverlap,
}

#[inline(always)]
pub fn beam_dir(theta: f64) -> Vec2 {
    Vec2::new(num::cos(theta), num::sin(theta))
}

#[inline(always)]
pub fn beam_normal(theta: f64) -> Vec2 {
    Vec2::new(-num::sin(theta), num::cos(theta))
}

/// Classify the contact of a disc of radius `body_radius` centered at `p`
/// (canonical frame) against a beam of length `length` at angle `theta`.
///
/// Tangential contact requires the distance to the beam line to be at most
/// `R` with the tangent point on the segment (`r <= L`) and the body ahead
/// of the joint; otherwise the free tip is tested against the disc.
pub fn classify(p: Vec2, theta: f64, length: f64, body_radius: f64) -> ContactQuery {
    classify_with_band(p, theta, length, body_radius, 0.0)
}

/// As [`classify`], accepting separations up to `band` beyond touching
/// (reported as negative depth). The integrator uses a small band to keep a
/// maintained constraint contact detectable across the sub-micrometer gap
/// drift of one Euler step.
pub fn classify_with_band(
    p: Vec2,
    theta: f64,
    length: f64,
    body_radius: f64,
    band: f64,
) -> ContactQuery {
    let rho_sq = p.norm_sq();
    let r_sq = rho_sq - body_radius * body_radius;
    if r_sq <= 0.0 {
        return ContactQuery::JointOverlap;
    }

    let u = beam_dir(theta);
    let n = beam_normal(theta);
    let h = p.dot(n);
    let along = p.dot(u);
    let r = num::sqrt(r_sq);

    if num::abs(h) <= body_radius + band && r <= length && along > 0.0 {
        return ContactQuery::Contact(ContactGeom::Tangential {
            r,
            side: if h >= 0.0 { 1.0 } else { -1.0 },
            depth: body_radius - num::abs(h),
        });
    }

    let tip = u * length;
    let offset = p - tip;
    let dist = offset.norm();
    if dist <= body_radius + band && dist > 0.0 {
        let normal = offset * (1.0 / dist);
        return ContactQuery::Contact(ContactGeom::Point {
            normal,
            c: tip.cross(normal),
            depth: body_radius - dist,
        });
    }

    ContactQuery::Clear
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BeamSide, SimConfig};

    const R: f64 = 10.0;
    const L: f64 = 25.0;

    fn local(side: BeamSide, p: Vec2) -> Vec2 {
        side.point_to_local(&SimConfig::default().geometry(), p)
    }

    #[test]
    fn tangential_contact_below_beam_line() {
        // Body at (0, 24), left joint (-25, 30), rest beam: the beam line is
        // 6 m above the center, within R.
        let p = local(BeamSide::Left, Vec2::new(0.0, 24.0));
        assert_eq!(p, Vec2::new(25.0, -6.0));
        match classify(p, 0.0, L, R) {
            ContactQuery::Contact(ContactGeom::Tangential { r, side, depth }) => {
                // r = sqrt(25^2 + 6^2 - 10^2) = sqrt(561)
                assert!((r - 561_f64.sqrt()).abs() < 1e-12);
                assert!((r - 23.69).abs() < 0.01);
                assert_eq!(side, -1.0);
                assert!((depth - 4.0).abs() < 1e-12);
            }
            other => panic!("expected tangential contact, got {other:?}"),
        }
    }

    #[test]
    fn far_body_is_clear() {
        // Body at (0, 5): 25 m below the beam line.
        let p = local(BeamSide::Left, Vec2::new(0.0, 5.0));
        assert_eq!(classify(p, 0.0, L, R), ContactQuery::Clear);
    }

    #[test]
    fn tip_inside_disc_is_point_contact() {
        // Body at (6, 32); left beam tip at (0, 30): |center - tip| = sqrt(40).
        let p = local(BeamSide::Left, Vec2::new(6.0, 32.0));
        match classify(p, 0.0, L, R) {
            ContactQuery::Contact(ContactGeom::Point { normal, c, depth }) => {
                let dist = 40_f64.sqrt();
                assert!((depth - (R - dist)).abs() < 1e-12);
                // Normal points from tip toward center: (6, 2)/sqrt(40).
                assert!((normal.x - 6.0 / dist).abs() < 1e-12);
                assert!((normal.y - 2.0 / dist).abs() < 1e-12);
                // c = tip x normal = 25 * n_y.
                assert!((c - 25.0 * 2.0 / dist).abs() < 1e-12);
            }
            other => panic!("expected point contact, got {other:?}"),
        }
    }

    #[test]
    fn constructed_tangency_classifies_exactly() {
        // Place the body a nanometer inside tangency at distance r along the
        // beam for a spread of configurations and check the classification
        // returns the constructed r.
        let mut k = 0u32;
        for &theta in &[-0.3, 0.0, 0.2, 0.7, 1.2] {
            for &r in &[2.0, 10.0, 18.0, 24.9] {
                for &side in &[-1.0, 1.0] {
                    k += 1;
                    let p = beam_dir(theta) * r + beam_normal(theta) * (side * (R - 1e-9));
                    match classify(p, theta, L, R) {
                        ContactQuery::Contact(ContactGeom::Tangential {
                            r: r_out,
                            side: side_out,
                            depth,
                        }) => {
                            assert!((r_out - r).abs() < 1e-6, "case {k}");
                            assert_eq!(side_out, side, "case {k}");
                            assert!(depth.abs() < 1e-8, "case {k}");
                        }
                        other => panic!("case {k}: expected tangential, got {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn behind_joint_is_not_contact() {
        // Center behind the joint, beam pointing away.
        let p = Vec2::new(-12.0, 3.0);
        assert_eq!(classify(p, 0.0, L, R), ContactQuery::Clear);
    }

    #[test]
    fn joint_overlap_is_flagged() {
        let p = Vec2::new(3.0, 4.0); // rho = 5 < R
        assert_eq!(classify(p, 0.0, L, R), ContactQuery::JointOverlap);
    }

    #[test]
    fn past_tip_transitions_to_point() {
        // Just beyond the tip along the beam, within R of it.
        let p = Vec2::new(L + 8.0, 3.0);
        match classify(p, 0.0, L, R) {
            ContactQuery::Contact(g) => assert_eq!(g.kind(), crate::model::ContactKind::Point),
            other => panic!("expected point contact, got {other:?}"),
        }
    }
}
