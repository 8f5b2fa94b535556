//! Exact verification of the level-r transfer identity for the endoscopic
//! pair (U(3), U(2) x U(1)) at an inert place, by brute-force enumeration of
//! self-dual lattices over truncated local rings, together with the exact
//! congruence-index and character-counting pipeline behind the 3/8
//! cohomology-growth exponent.
//!
//! The crate is organized as a library; see the `examples/` directory for
//! one runnable example per capability and `src/bin/endoscope.rs` for a thin
//! command-line wrapper.

pub mod error;
pub mod lattice;
pub mod local;
pub mod orbital;

pub use error::{Error, Result};
