//! Evaluation of `sum_{v in V} q^v` for the three set-series kinds.
//!
//! Rational parts use the closed form
//! `sum_{n < T} [n in V] q^n + q^T sum_{r < L} [T + r in V] q^r / (1 - q^L)`;
//! generator parts are summed directly with the tail bound `|q|^(M+1)/(1-|q|)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::setspec::SetSpec;
use crate::error::{HydraError, Result};
use crate::exact::RatMod1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `sum z^v`, `|z| < 1`.
    Ordinary,
    /// `sum e^(2 pi i v z)`, `Im z > 0`.
    Fourier,
    /// `sum e^(-v z)`, `Re z > 0`.
    Exponential,
}

/// The base `q = exp(w)` of a series, with an optional exact phase `x` so that
/// `arg q^n = 2 pi [n x]_1` is reduced exactly.
#[derive(Clone, Debug)]
pub struct Base {
    w: Complex64,
    phase: Option<RatMod1>,
}

impl Base {
    pub fn new(kind: SeriesKind, point: Complex64) -> Result<Self> {
        let w = match kind {
            SeriesKind::Ordinary => {
                if point.norm().is_nan() || point.norm() >= 1.0 {
                    return Err(HydraError::Domain(format!("ordinary set-series needs |z| < 1, got {point}")));
                }
                if point == Complex64::new(0.0, 0.0) {
                    Complex64::new(f64::NEG_INFINITY, 0.0)
                } else {
                    point.ln()
                }
            }
            SeriesKind::Fourier => {
                if point.im.is_nan() || point.im <= 0.0 {
                    return Err(HydraError::Domain(format!("Fourier set-series needs Im z > 0, got {point}")));
                }
                Complex64::new(0.0, TAU) * point
            }
            SeriesKind::Exponential => {
                if point.re.is_nan() || point.re <= 0.0 {
                    return Err(HydraError::Domain(format!("exponential set-series needs Re z > 0, got {point}")));
                }
                -point
            }
        };
        Ok(Base { w, phase: None })
    }

    /// Fourier base at `x + i y` with `x` kept exact.
    pub fn fourier_exact(x: &RatMod1, y: f64) -> Result<Self> {
        if y.is_nan() || y <= 0.0 {
            return Err(HydraError::Domain(format!("Fourier set-series needs y > 0, got {y}")));
        }
        Ok(Base { w: Complex64::new(-TAU * y, TAU * x.to_f64()), phase: Some(x.clone()) })
    }

    /// Real base `e^(-s)` (used for `sum e^(-s v)`).
    pub fn real_decay(s: f64) -> Self {
        Base { w: Complex64::new(-s, 0.0), phase: Some(RatMod1::zero()) }
    }

    pub fn modulus(&self) -> f64 {
        self.w.re.exp()
    }

    fn angle(&self, n: u64) -> f64 {
        match &self.phase {
            Some(x) => {
                let frac = x.mul_int(n as i64);
                TAU * frac.to_f64()
            }
            None => n as f64 * self.w.im,
        }
    }

    pub fn pow(&self, n: u64) -> Complex64 {
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar((n as f64 * self.w.re).exp(), self.angle(n))
    }

    /// `1 - q^n` computed without cancellation near `q^n = 1`.
    pub fn one_minus_pow(&self, n: u64) -> Complex64 {
        let a = n as f64 * self.w.re;
        let b = self.angle(n);
        let half = (b / 2.0).sin();
        let re = -(a.exp_m1() * b.cos() - 2.0 * half * half);
        let im = -a.exp() * b.sin();
        Complex64::new(re, im)
    }

    /// Tail bound `|q|^(m+1) / (1 - |q|)` for members beyond `m`.
    pub fn tail_after(&self, m: u64) -> f64 {
        let r = self.w.re;
        ((m as f64 + 1.0) * r).exp() / -r.exp_m1()
    }

    /// Smallest `m` with `tail_after(m) <= tol`.
    pub fn cutoff_for(&self, tol: f64) -> u64 {
        let r = -self.w.re;
        if r <= 0.0 {
            return u64::MAX;
        }
        let need = ((tol * -(-r).exp_m1()).ln() / -r).ceil();
        if need <= 0.0 {
            0
        } else if need >= 1e18 {
            u64::MAX
        } else {
            need as u64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: u64,
}

/// Sums the series on `base` with generator members truncated at `n_max`.
pub fn eval_on_base(set: &SetSpec, base: &Base, n_max: u64) -> Result<SeriesValue> {
    let form = set.periodic_form();
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for (n, _) in form.prefix.iter().enumerate().filter(|(_, &b)| b) {
        value += base.pow(n as u64);
        terms += 1;
    }
    if !form.is_empty_tail() {
        let mut head = Complex64::new(0.0, 0.0);
        for (r, _) in form.pattern.iter().enumerate().filter(|(_, &b)| b) {
            head += base.pow(form.threshold + r as u64);
        }
        value += head / base.one_minus_pow(form.period);
    }
    let mut tail_bound = 0.0;
    if !set.generators.is_empty() {
        let limit = n_max.min(set.known_bound());
        for m in set.extra_members(limit)? {
            value += base.pow(m);
            terms += 1;
        }
        tail_bound = base.tail_after(limit);
    }
    Ok(SeriesValue { value, tail_bound, terms })
}

pub fn eval_series(
    set: &SetSpec,
    kind: SeriesKind,
    point: Complex64,
    n_max: u64,
    tail_tol: f64,
) -> Result<SeriesValue> {
    let base = Base::new(kind, point)?;
    let out = eval_on_base(set, &base, n_max)?;
    if out.tail_bound > tail_tol {
        return Err(HydraError::Tolerance { achieved: out.tail_bound, requested: tail_tol });
    }
    Ok(out)
}

/// `psi_V(x + i y)` with exact phase reduction, truncating generator parts
/// where their tail drops below `tail_tol`.
pub fn fourier_at(set: &SetSpec, x: &RatMod1, y: f64, tail_tol: f64) -> Result<SeriesValue> {
    let base = Base::fourier_exact(x, y)?;
    let n_max = base.cutoff_for(tail_tol);
    eval_on_base(set, &base, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn geometric_closed_forms() {
        let v = eval_series(&SetSpec::progression(3, 0, 0), SeriesKind::Ordinary, c(0.5, 0.0), 100, 1e-12).unwrap();
        assert!((v.value - c(8.0 / 7.0, 0.0)).norm() < 1e-14);
        assert_eq!(v.tail_bound, 0.0);
        let v = eval_series(&SetSpec::naturals(), SeriesKind::Fourier, c(0.0, 0.1), 100, 1e-12).unwrap();
        // mpmath: 1/(1 - exp(-0.2 pi))
        assert!((v.value.re - 2.143_568_000_951_688).abs() < 1e-12);
        let v = eval_series(&SetSpec::naturals(), SeriesKind::Exponential, c(1.0, 0.0), 100, 1e-12).unwrap();
        assert!((v.value.re - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn lacunary_powers() {
        let v = eval_series(&SetSpec::powers(2), SeriesKind::Ordinary, c(0.9, 0.0), 1 << 10, 1e-12).unwrap();
        // mpmath nsum of 0.9^(2^n)
        assert!((v.value.re - 3.017_386_475_632_339_5).abs() < 1e-12);
        assert!(v.tail_bound < 1e-12);
        let err = eval_series(&SetSpec::powers(2), SeriesKind::Ordinary, c(0.999, 0.0), 64, 1e-12).unwrap_err();
        assert!(matches!(err, HydraError::Tolerance { .. }));
    }

    #[test]
    fn domain_errors() {
        let s = SetSpec::naturals();
        assert!(matches!(eval_series(&s, SeriesKind::Ordinary, c(1.0, 0.0), 10, 1.0), Err(HydraError::Domain(_))));
        assert!(matches!(eval_series(&s, SeriesKind::Fourier, c(0.3, 0.0), 10, 1.0), Err(HydraError::Domain(_))));
        assert!(matches!(eval_series(&s, SeriesKind::Exponential, c(-0.1, 2.0), 10, 1.0), Err(HydraError::Domain(_))));
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        let s: SetSpec = "finite:1,2,30;ap:4,3,2;ap:6,1".parse().unwrap();
        let z = c(0.3, 0.55);
        let closed = eval_series(&s, SeriesKind::Ordinary, z, 0, 1.0).unwrap().value;
        let direct: Complex64 = (0..2000u64).filter(|&n| s.contains(n)).map(|n| z.powu(n as u32)).sum();
        assert!((closed - direct).norm() < 1e-12);
    }

    #[test]
    fn one_minus_pow_is_accurate_near_one() {
        let b = Base::fourier_exact(&RatMod1::zero(), 1e-9).unwrap();
        let v = b.one_minus_pow(3);
        let exact = -(-6.0 * std::f64::consts::PI * 1e-9f64).exp_m1();
        assert!((v.re - exact).abs() / exact < 1e-12);
    }
}
