//! Orbit dynamics: trajectories and cycles, orbit-class censuses, counting
//! functions and density estimates, and searches for finite invariant sets.

pub mod census;
pub mod invariant;
pub mod sections;
pub mod trajectory;
pub mod union_find;

pub use census::{census, census_cached, CensusParams, ClassSummary, OrbitCensus};
pub use invariant::{cycles_within, finite_invariant_search};
pub use sections::{
    cross_sections, density_estimates, eventually_periodic_detect, geometric_grid, CrossSectionCounts, DensityEstimate,
    PeriodicPattern,
};
pub use trajectory::{is_closed_cycle, iterate_orbit, Trajectory, Verdict};
