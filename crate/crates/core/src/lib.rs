//! Core library: single-gate contact dynamics of a self-propelled disc
//! against a pair of torsion-sprung beams, potential energy landscapes,
//! gate-lattice simulation, and a discrete-state Markov coarse-graining of
//! gate-to-gate transitions.
//!
//! The crate is `no_std`-compatible (with `alloc`); all file formats, IO,
//! and parallel batch drivers live in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("gatesim-core needs either the `std` or the `libm` feature");

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod landscape;
pub mod lattice;
pub mod markov;
pub mod model;
pub mod num;
pub mod rng;

pub use error::{ConfigError, MarkovError};
pub use model::{
    BeamSide, BeamState, ContactKind, GateGeometry, InteractionMode, SimConfig, SystemState,
};
pub use num::Vec2;
