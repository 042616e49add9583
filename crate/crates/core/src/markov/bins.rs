//! Discretization of gate boundary-crossing states.
//!
//! The gate boundary is split into six segments: EN (bottom, input only),
//! MT (top, output only), LD/RD (side walls below the joints) and LT/RT
//! (side walls above the joints). A crossing state is `[B, d, vx, vy]`
//! where `d` is the position along the segment measured from its benchmark
//! point (EN: (0,0), LT/LD: (-25,30), RT/RD: (25,30), MT: (0,60)).
//!
//! EN, RD and LD carry a full (d, vx, vy) bin grid; LT and RT are single
//! aggregate states. That yields 87 input states. Outputs reuse the input
//! grids of the neighbor gate they feed: a top crossing becomes the EN
//! input of the gate above, a right-deflect crossing becomes the LD input
//! of the right neighbor, and so on, plus one absorbing "trapped" output,
//! 88 in total. Enumeration is lexicographic, d slowest, then vx, then vy.
//!
//! Out-of-range components clamp to the nearest bin; clamps are counted by
//! the callers that observe them.

use crate::error::MarkovError;
use crate::lattice::Crossing;
use crate::model::GateGeometry;
use crate::num::Vec2;
use alloc::vec::Vec;

/// Boundary segment labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Boundary {
    En,
    Rd,
    Ld,
    Rt,
    Lt,
    Mt,
}

/// A continuous boundary-crossing state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryState {
    pub boundary: Boundary,
    /// Position along the segment from its benchmark point `[m]`.
    pub d: f64,
    pub vx: f64,
    pub vy: f64,
}

pub const NUM_INPUTS: u16 = 87;
pub const NUM_OUTPUTS: u16 = 88;
/// The absorbing trapped output.
pub const OUTPUT_TRAPPED: u16 = 88;

const EN_D_EDGES: [f64; 6] = [-25.0, -15.0, -5.0, 5.0, 15.0, 25.0];
const EN_VX_EDGES: [f64; 6] = [-25.0, -15.0, -5.0, 5.0, 15.0, 25.0];
const EN_VY_EDGES: [f64; 2] = [10.0, 20.0];
const SIDE_D_EDGES: [f64; 3] = [10.0, 20.0, 30.0];
const RD_VX_EDGES: [f64; 4] = [-30.0, -20.0, -10.0, 0.0];
const LD_VX_EDGES: [f64; 4] = [0.0, 10.0, 20.0, 30.0];
const SIDE_VY_EDGES: [f64; 6] = [-20.0, -10.0, 0.0, 10.0, 20.0, 30.0];

const EN_BASE: u16 = 1; // 25 states: 1..=25
const RD_BASE: u16 = 26; // 30 states: 26..=55
const LD_BASE: u16 = 56; // 30 states: 56..=85
const RT_INDEX: u16 = 86;
const LT_INDEX: u16 = 87;

/// Bin index within `edges` (n+1 edges for n bins, last bin closed above),
/// clamping out-of-range values to the nearest bin.
fn bin_of(value: f64, edges: &[f64]) -> (u16, bool) {
    let n = edges.len() - 1;
    if value < edges[0] {
        return (0, true);
    }
    if value >= edges[n] {
        return ((n - 1) as u16, value > edges[n]);
    }
    for i in 0..n {
        if value < edges[i + 1] {
            return (i as u16, false);
        }
    }
    ((n - 1) as u16, false)
}

fn grid_index(
    d: f64,
    vx: f64,
    vy: f64,
    d_edges: &[f64],
    vx_edges: &[f64],
    vy_edges: &[f64],
) -> (u16, bool) {
    let (di, c1) = bin_of(d, d_edges);
    let (vxi, c2) = bin_of(vx, vx_edges);
    let (vyi, c3) = bin_of(vy, vy_edges);
    let nx = (vx_edges.len() - 1) as u16;
    let ny = (vy_edges.len() - 1) as u16;
    (di * nx * ny + vxi * ny + vyi, c1 || c2 || c3)
}

/// Discretize an input crossing state to its index in `1..=87`. MT is
/// output-only. The `bool` reports whether any component clamped.
pub fn discretize_input(q: &BoundaryState) -> Result<(u16, bool), MarkovError> {
    match q.boundary {
        Boundary::En => {
            let (i, clamped) = grid_index(q.d, q.vx, q.vy, &EN_D_EDGES, &EN_VX_EDGES, &EN_VY_EDGES);
            Ok((EN_BASE + i, clamped))
        }
        Boundary::Rd => {
            let (i, clamped) =
                grid_index(q.d, q.vx, q.vy, &SIDE_D_EDGES, &RD_VX_EDGES, &SIDE_VY_EDGES);
            Ok((RD_BASE + i, clamped))
        }
        Boundary::Ld => {
            let (i, clamped) =
                grid_index(q.d, q.vx, q.vy, &SIDE_D_EDGES, &LD_VX_EDGES, &SIDE_VY_EDGES);
            Ok((LD_BASE + i, clamped))
        }
        Boundary::Rt => Ok((RT_INDEX, false)),
        Boundary::Lt => Ok((LT_INDEX, false)),
        Boundary::Mt => Err(MarkovError::OutputOnlyBoundary),
    }
}

/// Classify the end of a gate transit as an output state in `1..=88`.
///
/// Outputs are identified with the input state of the adjacent gate they
/// become: top crossings use the EN grid, right-deflect crossings the LD
/// grid of the right neighbor, left-deflect crossings the RD grid of the
/// left neighbor. Bottom exits have no forward entry state and count as
/// trapped.
pub fn classify_output(
    crossing: Option<Crossing>,
    pos: Vec2,
    vel: Vec2,
    geom: &GateGeometry,
) -> (u16, bool) {
    match crossing {
        None | Some(Crossing::Bottom) => (OUTPUT_TRAPPED, false),
        Some(Crossing::Top) => {
            let (i, clamped) =
                grid_index(pos.x, vel.x, vel.y, &EN_D_EDGES, &EN_VX_EDGES, &EN_VY_EDGES);
            (EN_BASE + i, clamped)
        }
        Some(Crossing::Right) => {
            if pos.y > geom.joint_y {
                (RT_INDEX, false)
            } else {
                let d = geom.joint_y - pos.y;
                let (i, clamped) =
                    grid_index(d, vel.x, vel.y, &SIDE_D_EDGES, &LD_VX_EDGES, &SIDE_VY_EDGES);
                (RD_BASE + i, clamped)
            }
        }
        Some(Crossing::Left) => {
            if pos.y > geom.joint_y {
                (LT_INDEX, false)
            } else {
                let d = geom.joint_y - pos.y;
                let (i, clamped) =
                    grid_index(d, vel.x, vel.y, &SIDE_D_EDGES, &RD_VX_EDGES, &SIDE_VY_EDGES);
                (LD_BASE + i, clamped)
            }
        }
    }
}

/// Map an output state to the gate shift and input index it becomes in the
/// adjacent gate. `None` for the trapped output.
pub fn output_to_next_input(output: u16) -> Option<((i32, i32), u16)> {
    match output {
        o if (EN_BASE..RD_BASE).contains(&o) => Some(((0, 1), o)),
        o if (RD_BASE..LD_BASE).contains(&o) => Some(((1, 0), LD_BASE + (o - RD_BASE))),
        o if (LD_BASE..RT_INDEX).contains(&o) => Some(((-1, 0), RD_BASE + (o - LD_BASE))),
        o if o == RT_INDEX => Some(((1, 0), LT_INDEX)),
        o if o == LT_INDEX => Some(((-1, 0), RT_INDEX)),
        _ => None,
    }
}

/// Sampling box of an input state: intervals of d, vx, vy, plus the
/// boundary. For LT/RT (aggregate states) the box spans the segment away
/// from the joint corridor and the inbound velocity range.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InputBox {
    pub index: u16,
    pub boundary: Boundary,
    pub d: [f64; 2],
    pub vx: [f64; 2],
    pub vy: [f64; 2],
}

impl InputBox {
    /// Midpoint representative of the box.
    pub fn center(&self) -> BoundaryState {
        BoundaryState {
            boundary: self.boundary,
            d: 0.5 * (self.d[0] + self.d[1]),
            vx: 0.5 * (self.vx[0] + self.vx[1]),
            vy: 0.5 * (self.vy[0] + self.vy[1]),
        }
    }
}

fn push_grid(
    catalog: &mut Vec<InputBox>,
    boundary: Boundary,
    base: u16,
    d_edges: &[f64],
    vx_edges: &[f64],
    vy_edges: &[f64],
) {
    let mut index = base;
    for di in 0..d_edges.len() - 1 {
        for vxi in 0..vx_edges.len() - 1 {
            for vyi in 0..vy_edges.len() - 1 {
                catalog.push(InputBox {
                    index,
                    boundary,
                    d: [d_edges[di], d_edges[di + 1]],
                    vx: [vx_edges[vxi], vx_edges[vxi + 1]],
                    vy: [vy_edges[vyi], vy_edges[vyi + 1]],
                });
                index += 1;
            }
        }
    }
}

/// The full input-state catalog, ordered by index `1..=87`.
pub fn input_catalog() -> Vec<InputBox> {
    let mut catalog = Vec::with_capacity(NUM_INPUTS as usize);
    push_grid(
        &mut catalog,
        Boundary::En,
        EN_BASE,
        &EN_D_EDGES,
        &EN_VX_EDGES,
        &EN_VY_EDGES,
    );
    push_grid(
        &mut catalog,
        Boundary::Rd,
        RD_BASE,
        &SIDE_D_EDGES,
        &RD_VX_EDGES,
        &SIDE_VY_EDGES,
    );
    push_grid(
        &mut catalog,
        Boundary::Ld,
        LD_BASE,
        &SIDE_D_EDGES,
        &LD_VX_EDGES,
        &SIDE_VY_EDGES,
    );
    // RT and LT aggregate their whole segment; the joint corridor (d < R)
    // is excluded from sampling like the LD/RD grids do.
    catalog.push(InputBox {
        index: RT_INDEX,
        boundary: Boundary::Rt,
        d: [10.0, 30.0],
        vx: [-30.0, 0.0],
        vy: [-20.0, 30.0],
    });
    catalog.push(InputBox {
        index: LT_INDEX,
        boundary: Boundary::Lt,
        d: [10.0, 30.0],
        vx: [0.0, 30.0],
        vy: [-20.0, 30.0],
    });
    catalog
}

/// Gate-local position of an entry on `boundary` at offset `d`.
pub fn entry_position(boundary: Boundary, d: f64, geom: &GateGeometry) -> Vec2 {
    match boundary {
        Boundary::En => Vec2::new(d, 0.0),
        Boundary::Rd => Vec2::new(geom.half_width, geom.joint_y - d),
        Boundary::Ld => Vec2::new(-geom.half_width, geom.joint_y - d),
        Boundary::Rt => Vec2::new(geom.half_width, geom.joint_y + d),
        Boundary::Lt => Vec2::new(-geom.half_width, geom.joint_y + d),
        Boundary::Mt => Vec2::new(d, geom.region_height),
    }
}
