//! Virtual residues `lim_{y -> 0} y psi_V(x + i y)` and their cross-checks.
//!
//! Exact values are carried in units of `2 pi`: a [`Cyclo`] `c` stands for the
//! residue `c / (2 pi)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::eval::fourier_at;
use super::setspec::SetSpec;
use crate::error::{HydraError, Result};
use crate::exact::{rat, Cyclo, Rat, RatMod1};
use crate::orbit::{cross_sections, density_estimates, geometric_grid};

/// Generator tails beyond this are treated as negligible for `psi_V`.
const TAIL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    Converged,
    Oscillatory,
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    /// Relative agreement required over the last `window` samples.
    pub rtol: f64,
    /// Absolute slack, so residues tending to 0 count as converged.
    pub atol: f64,
    pub window: usize,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig { rtol: 1e-3, atol: 1e-4, window: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueEstimate {
    pub x: RatMod1,
    pub y_schedule: Vec<f64>,
    pub samples: Vec<Complex64>,
    pub value: Complex64,
    /// `2 pi * value`.
    pub value_2pi: Complex64,
    pub diagnostic: Diagnostic,
    /// Largest `y * tail` left out of any sample.
    pub tail_bound: f64,
}

/// `count` points geometric from `hi` down to `lo`.
pub fn geometric_schedule(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let step = (lo / hi).ln() / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { lo } else { hi * (step * i as f64).exp() }).collect()
}

/// `1e-1 ... 1e-5`, 17 points.
pub fn default_schedule() -> Vec<f64> {
    geometric_schedule(1e-1, 1e-5, 17)
}

/// `1e-1 ... 1e-10`, 37 points; zero-density sets need the longer run.
pub fn default_norm_schedule() -> Vec<f64> {
    geometric_schedule(1e-1, 1e-10, 37)
}

fn check_schedule(ys: &[f64]) -> Result<()> {
    if ys.is_empty() || ys.iter().any(|&y| !y.is_finite() || y <= 0.0) {
        return Err(HydraError::Domain("y schedule must be nonempty and positive".into()));
    }
    if ys.windows(2).any(|w| w[1] >= w[0]) {
        return Err(HydraError::Domain("y schedule must be strictly decreasing".into()));
    }
    Ok(())
}

pub fn diagnose(samples: &[Complex64], cfg: &ConvergenceConfig) -> Diagnostic {
    let w = cfg.window.max(2).min(samples.len());
    let tail = &samples[samples.len() - w..];
    let scale = tail.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let agree = tail.iter().all(|a| tail.iter().all(|b| (a - b).norm() <= cfg.rtol * scale + cfg.atol));
    if agree {
        return Diagnostic::Converged;
    }
    let mags: Vec<f64> = tail.iter().map(|s| s.norm()).collect();
    if mags.windows(2).all(|m| m[1] > m[0]) {
        Diagnostic::Divergent
    } else {
        Diagnostic::Oscillatory
    }
}

pub fn virtual_residue_with(
    set: &SetSpec,
    x: &RatMod1,
    ys: &[f64],
    cfg: &ConvergenceConfig,
) -> Result<ResidueEstimate> {
    check_schedule(ys)?;
    let mut samples = Vec::with_capacity(ys.len());
    let mut tail_bound: f64 = 0.0;
    for &y in ys {
        let s = fourier_at(set, x, y, TAIL_TOL)?;
        samples.push(s.value * y);
        tail_bound = tail_bound.max(s.tail_bound * y);
    }
    let value = *samples.last().expect("nonempty schedule");
    Ok(ResidueEstimate {
        x: x.clone(),
        y_schedule: ys.to_vec(),
        diagnostic: diagnose(&samples, cfg),
        samples,
        value,
        value_2pi: value * TAU,
        tail_bound,
    })
}

pub fn virtual_residue(set: &SetSpec, x: &RatMod1, ys: &[f64]) -> Result<ResidueEstimate> {
    virtual_residue_with(set, x, ys, &ConvergenceConfig::default())
}

/// Exact virtual residue of a rational set at `x`, in units of `2 pi`:
/// with period `L` and pattern from `T`, it is `(1/L) sum_r e^(2 pi i (T + r) x)`
/// when `L x ∈ Z` and `0` otherwise.
pub fn exact_residue(set: &SetSpec, x: &RatMod1) -> Result<Cyclo> {
    if !set.is_rational() {
        return Err(HydraError::Capability("exact residues need a rational set".into()));
    }
    let form = set.periodic_form();
    if !form.period.is_multiple_of(x.denom_u64()) {
        return Ok(Cyclo::zero());
    }
    let mut acc = Cyclo::zero();
    for (r, _) in form.pattern.iter().enumerate().filter(|(_, &b)| b) {
        acc = acc.add(&Cyclo::from_exponent(&x.mul_int((form.threshold + r as u64) as i64)));
    }
    Ok(acc.scale(&rat(1, form.period as i64)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignaturePoint {
    pub n: u64,
    /// `(1/N) sum_k |V_{alpha,k}(N)| xi_alpha^(beta k)`, exactly.
    pub exact: Cyclo,
    pub value: Complex64,
}

fn check_fraction(alpha: u64, beta: u64) -> Result<()> {
    if alpha == 0 || beta >= alpha {
        return Err(HydraError::Domain(format!("need 0 <= beta < alpha, got ({alpha},{beta})")));
    }
    if num_integer::gcd(alpha, beta) != 1 {
        return Err(HydraError::Domain(format!("{beta}/{alpha} is not reduced")));
    }
    Ok(())
}

pub fn cross_section_signature(set: &SetSpec, alpha: u64, beta: u64, grid: &[u64]) -> Result<Vec<SignaturePoint>> {
    check_fraction(alpha, beta)?;
    if set.known_bound() < grid.iter().copied().max().unwrap_or(0) {
        return Err(HydraError::Domain(format!("set membership only known up to {}", set.known_bound())));
    }
    let counts = cross_sections(|n| set.contains(n), alpha, grid)?;
    counts
        .grid
        .iter()
        .zip(&counts.counts)
        .filter(|(&n, _)| n >= 1)
        .map(|(&n, by_k)| {
            let terms = by_k.iter().enumerate().map(|(k, &c)| ((beta * k as u64) as i64, Rat::from_integer(c.into())));
            let exact = Cyclo::from_terms(alpha, terms).scale(&rat(1, n as i64));
            Ok(SignaturePoint { n, value: exact.approx(), exact })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HlttValue {
    pub x: RatMod1,
    pub n: u64,
    /// `2 pi * value`, exactly.
    pub exact_2pi: Cyclo,
    pub value: Complex64,
}

/// `(1/2pi)(1/N) sum_k xi_alpha^(k beta) |V_{alpha,k}(N)|` at `x = beta/alpha`.
pub fn hltt_cross_check(set: &SetSpec, x: &RatMod1, n: u64) -> Result<HlttValue> {
    let alpha = x.denom_u64();
    if n < alpha {
        return Err(HydraError::Domain(format!("need N >= {alpha}")));
    }
    let point = cross_section_signature(set, alpha, x.numer_u64(), &[n])?.remove(0);
    Ok(HlttValue { x: x.clone(), n, value: point.value / TAU, exact_2pi: point.exact })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SslReport {
    pub support: Vec<(RatMod1, Complex64)>,
    /// `sum_t |R(t)|^2`.
    pub sum: f64,
    /// Upper density estimate used for the bound.
    pub upper_density: f64,
    /// `upper_density / (2 pi)^2`.
    pub bound: f64,
    /// Residues came from the closed form rather than from y-sampling.
    pub exact: bool,
    pub holds: bool,
}

/// Residue support is searched among denominators up to this for non-rational sets.
const SSL_DENOM_SEARCH: u64 = 12;

/// Square-sum check `sum_t |R(t)|^2 <= d(V) / (2 pi)^2`.
///
/// Rational sets use exact residues and exact density. Otherwise residues are
/// sampled down to `y_min` at every `t` with small denominator, and the density
/// is the sup of `|V(n)|/n` over a grid on `[N/2, N]`.
pub fn ssl_check(set: &SetSpec, n: u64, y_min: f64) -> Result<SslReport> {
    if n < 2 {
        return Err(HydraError::Domain("ssl_check needs N >= 2".into()));
    }
    let mut support = Vec::new();
    let (sum, upper_density, exact) = if set.is_rational() {
        let form = set.periodic_form();
        let mut exact_sum = Cyclo::zero();
        for beta in 0..form.period {
            let t = RatMod1::new(beta as i64, form.period as i64)?;
            let c = exact_residue(set, &t)?;
            if !c.is_zero() {
                exact_sum = exact_sum.add(&c.mul(&c.conj()));
                support.push((t, c.approx() / TAU));
            }
        }
        let total = exact_sum.as_rational().map_or(exact_sum.approx().re, |q| q.to_f64().unwrap_or(f64::NAN));
        (total / (4.0 * PI * PI), form.density(), true)
    } else {
        let ys = geometric_schedule(1e-1, y_min, 17);
        let mut total = 0.0;
        for q in 1..=SSL_DENOM_SEARCH {
            for p in (0..q).filter(|&p| num_integer::gcd(p, q) == 1) {
                let t = RatMod1::new(p as i64, q as i64)?;
                let r = virtual_residue(set, &t, &ys)?;
                if r.diagnostic == Diagnostic::Converged && r.value.norm() > 1e-3 / TAU {
                    total += r.value.norm_sqr();
                    support.push((t, r.value));
                }
            }
        }
        let grid: Vec<u64> =
            geometric_grid(n / 2, n, 2).into_iter().chain((1..=16).map(|i| n / 2 + i * n / 32)).collect();
        let d = density_estimates(|m| set.contains(m), &grid)?;
        (total, d.upper, false)
    };
    let bound = upper_density / (4.0 * PI * PI);
    let slack = if exact { 1e-12 } else { 1e-6 };
    Ok(SslReport { support, sum, upper_density, bound, exact, holds: sum <= bound + slack })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiHardyEstimate {
    pub y_schedule: Vec<f64>,
    pub samples: Vec<f64>,
    pub value: f64,
    pub diagnostic: Diagnostic,
}

/// `||psi_V||_{2,1/y}` estimated by `sqrt(y sum_{v in V} e^(-4 pi v y))`
/// (`kappa = 1/(4 pi)`, so `N0` gives `sqrt(1/(4 pi))`).
pub fn semi_hardy_norm(set: &SetSpec, ys: &[f64]) -> Result<SemiHardyEstimate> {
    check_schedule(ys)?;
    let zero = RatMod1::zero();
    let samples = ys
        .iter()
        .map(|&y| Ok((y * fourier_at(set, &zero, 2.0 * y, TAIL_TOL)?.value.re).max(0.0).sqrt()))
        .collect::<Result<Vec<f64>>>()?;
    let as_complex: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    Ok(SemiHardyEstimate {
        y_schedule: ys.to_vec(),
        value: *samples.last().expect("nonempty schedule"),
        diagnostic: diagnose(&as_complex, &ConvergenceConfig::default()),
        samples,
    })
}
