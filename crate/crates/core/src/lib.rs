//! Hydra maps and their dynamics: orbit censuses, set-series and virtual
//! residues, and the dreamcatcher operator on finitely supported functions
//! over Q/Z, computed with exact cyclotomic arithmetic.

pub mod error;
pub mod exact;

pub use error::{HydraError, Result};
pub mod checks;
pub mod cli;
pub mod dreamcatcher;
pub mod hydra;
pub mod linalg;
pub mod orbit;
pub mod series;
