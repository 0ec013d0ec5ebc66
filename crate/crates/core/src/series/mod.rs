//! Set-series of subsets of `N0`: evaluation, multisection, the permutation
//! operator on coefficients, virtual residues and related estimators.

pub mod eval;
pub mod meromorphic;
pub mod multisection;
pub mod residue;
pub mod setspec;

pub use eval::{eval_series, fourier_at, Base, SeriesKind, SeriesValue};
pub use meromorphic::{meromorphic_dreamcatcher, Meromorphic};
pub use multisection::{permutation_op, permuted, Multisection};
pub use residue::{
    cross_section_signature, default_norm_schedule, default_schedule, exact_residue, geometric_schedule,
    hltt_cross_check, semi_hardy_norm, ssl_check, virtual_residue, virtual_residue_with, ConvergenceConfig, Diagnostic,
    HlttValue, ResidueEstimate, SemiHardyEstimate, SignaturePoint, SslReport,
};
pub use setspec::{Generator, PeriodicForm, Progression, SetSpec};
