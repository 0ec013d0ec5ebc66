//! The dreamcatcher operator `Q_H` on finitely supported functions over Q/Z:
//! exact images, functional-equation residuals, support predicates, the
//! support-growth walk and the truncated fixed-point kernel.

pub mod kernel;
pub mod operator;
pub mod qz;
pub mod walk;

pub use kernel::{kernel_variables, truncated_kernel, KernelComponent, KernelConfig, KernelResult};
pub use operator::{
    afe_residual, default_probes, duality_bracket_int, fixed_residual, off_support_check, orfe_residual, qh_apply,
    qh_apply_basis, qh_check_profinite, support_rho_invariance, ProfiniteCheck,
};
pub use qz::{ImageSet, QZFunction};
pub use walk::{saul_walk, PadicMagnitude, WalkReport, WalkStep};
