//! Exact rationals, classes of Q/Z, p-adic absolute values and cyclotomic numbers.

pub mod cyclo;
pub mod padic;
pub mod rat;

pub use cyclo::{cyclo_is_zero, Cyclo, CycloOp};
pub use padic::{factorize, is_off, is_on, is_prime, padic_abs, valuation};
pub use rat::{format_rat, parse_rat, rat, rat_int, rat_mod1, Rat, RatMod1};
