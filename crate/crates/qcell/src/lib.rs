//! Standard-cell layout compiler for tiled quantum circuits.
//!
//! Toffoli cells are tiled onto cubic qubit lattices and a multiplier schedule is
//! generated on the tiled layout. Schedules are checked by simulation.

pub mod cells;
pub mod circuit_ir;
pub mod decomp;
pub mod lattice;
pub mod lsx;
pub mod router;
pub mod scheduler;
pub mod sim;
pub mod tiler;

mod error;

pub use error::{Error, Result};
