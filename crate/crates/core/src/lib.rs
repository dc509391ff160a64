//! Compiler back-end for zoned neutral-atom architectures.
//!
//! A circuit of CZ and single-qubit gates is layered, each two-qubit layer is
//! placed into the entanglement zone with a routing-aware A* search, and the
//! transitions between placements are routed into parallel rearrangement steps.

pub mod arch;
pub mod bench;
pub mod circuit;
pub mod compat;
pub mod compile;
pub mod error;
pub mod placer;
pub mod program;
pub mod router;
pub mod schedule;

pub use error::{Error, Result};
