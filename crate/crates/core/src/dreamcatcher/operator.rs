//! The dreamcatcher operator on finitely supported functions over Q/Z and
//! its functional equations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::qz::{ImageSet, QZFunction};
use crate::error::{HydraError, Result};
use crate::exact::{factorize, is_off, rat, rat_int, Cyclo, Rat, RatMod1};
use crate::hydra::HydraMap;

fn require_prime(map: &HydraMap) -> Result<()> {
    if map.is_prime_map() {
        Ok(())
    } else {
        Err(HydraError::Capability("the basis formula is only available for prime hydra maps".into()))
    }
}

fn regulated_index(map: &HydraMap) -> Result<usize> {
    map.regulated_indices()
        .first()
        .copied()
        .ok_or_else(|| HydraError::Capability("map has no regulated branch (mu_j = 1)".into()))
}

/// Image of `1_t`: coefficient `(1/rho) e^(-2 pi i (b_j/d_j) t) xi_rho^(jk)` at
/// `(mu_j t + k)/rho` for every branch `j` and `0 <= k < rho`.
pub fn qh_apply_basis(map: &HydraMap, t: &RatMod1) -> Result<ImageSet> {
    require_prime(map)?;
    let inv_rho = rat(1, map.rho() as i64);
    let mut points = QZFunction::new();
    for (x, phase) in image_terms(map, t)? {
        points.add_at(x, &Cyclo::from_exponent(&phase).scale(&inv_rho));
    }
    Ok(ImageSet { source: t.clone(), points })
}

/// `(point, phase)` for every term of the image of `1_t`, before collecting.
fn image_terms(map: &HydraMap, t: &RatMod1) -> Result<Vec<(RatMod1, RatMod1)>> {
    let rho = map.rho();
    let inv_rho = rat(1, rho as i64);
    let mut out = Vec::with_capacity(map.branches().len() * rho as usize);
    for (j, br) in map.branches().iter().enumerate() {
        let mu = rat_int(map.mu()[j] as i64);
        let twist = t.scale(&rat(-br.b, br.d as i64));
        for k in 0..rho {
            let x = RatMod1::from_rat(&((&mu * t.value() + rat_int(k as i64)) * &inv_rho));
            let phase = twist.add(&RatMod1::new((j as u64 * k) as i64, rho as i64)?);
            out.push((x, phase));
        }
    }
    Ok(out)
}

/// Whether the image of `1_t` has a nonzero coefficient at `x`. Only the terms
/// landing on `x` are summed, and a single term needs no arithmetic at all.
pub(crate) fn reaches(map: &HydraMap, t: &RatMod1, x: &RatMod1) -> Result<bool> {
    require_prime(map)?;
    let phases: Vec<RatMod1> = image_terms(map, t)?.into_iter().filter(|(p, _)| p == x).map(|(_, ph)| ph).collect();
    Ok(match phases.len() {
        0 => false,
        1 => true,
        _ => !phases.iter().fold(Cyclo::zero(), |acc, ph| acc.add(&Cyclo::from_exponent(ph))).is_zero(),
    })
}

pub fn qh_apply(map: &HydraMap, f: &QZFunction) -> Result<QZFunction> {
    require_prime(map)?;
    let mut out = QZFunction::new();
    for (t, c) in f.iter() {
        for (x, v) in qh_apply_basis(map, t)?.points.iter() {
            out.add_at(x.clone(), &v.mul(c));
        }
    }
    Ok(out)
}

/// Default probes: the support of `f` and of its image.
pub fn default_probes(map: &HydraMap, f: &QZFunction) -> Result<Vec<RatMod1>> {
    let mut probes: Vec<RatMod1> = f.support();
    probes.extend(qh_apply(map, f)?.support());
    probes.sort();
    probes.dedup();
    Ok(probes)
}

/// Nonzero values of `(Q_H f - f)(x)` over the probes; empty when every probe passes.
pub fn fixed_residual(map: &HydraMap, f: &QZFunction, probes: &[RatMod1]) -> Result<BTreeMap<RatMod1, Cyclo>> {
    let image = qh_apply(map, f)?;
    Ok(probes
        .iter()
        .filter_map(|x| {
            let r = image.get(x).sub(&f.get(x));
            (!r.is_zero()).then(|| (x.clone(), r))
        })
        .collect())
}

/// `e^(2 pi i (b_iota / a_iota) x)` for the smallest regulated index.
fn regulated_twist(map: &HydraMap, x: &RatMod1) -> Result<(usize, Cyclo)> {
    let iota = regulated_index(map)?;
    let br = map.branches()[iota];
    let ratio: Rat = rat(br.b, br.a as i64);
    Ok((iota, Cyclo::from_exponent(&x.scale(&ratio))))
}

/// `R(rho x) - e^(2 pi i (b_i/a_i) x) sum_n xi_rho^(-n i) R(x + n/rho)`.
pub fn afe_residual(map: &HydraMap, f: &QZFunction, x: &RatMod1) -> Result<Cyclo> {
    let (iota, twist) = regulated_twist(map, x)?;
    let rho = map.rho() as i64;
    let lhs = f.get(&x.mul_int(rho));
    let mut sum = Cyclo::zero();
    for n in 0..rho {
        let shifted = x.add(&RatMod1::new(n, rho)?);
        let value = f.get(&shifted);
        if !value.is_zero() {
            sum = sum.add(&value.mul(&Cyclo::zeta(rho as u64, -n * iota as i64)));
        }
    }
    Ok(lhs.sub(&twist.mul(&sum)))
}

/// `R(rho x) - e^(2 pi i (b_i/a_i) x) R(x)` at an off-`rho` point for an off-`rho` supported `R`.
pub fn orfe_residual(map: &HydraMap, f: &QZFunction, x: &RatMod1) -> Result<Cyclo> {
    let rho = map.rho();
    if !is_off(x.value(), rho) {
        return Err(HydraError::Precondition(format!("{x} is on {rho}")));
    }
    if let Some(t) = f.support().into_iter().find(|t| !is_off(t.value(), rho)) {
        return Err(HydraError::Precondition(format!("support point {t} is on {rho}")));
    }
    let (_, twist) = regulated_twist(map, x)?;
    Ok(f.get(&x.mul_int(rho as i64)).sub(&twist.mul(&f.get(x))))
}

/// Support points with `|t|_q > 1` for some prime `q | rho`.
pub fn off_support_check(f: &QZFunction, rho: u64) -> Vec<RatMod1> {
    f.support().into_iter().filter(|t| !is_off(t.value(), rho)).collect()
}

/// Whether `t ∈ supp f` implies `[rho t]_1 ∈ supp f`.
pub fn support_rho_invariance(f: &QZFunction, rho: u64) -> bool {
    f.iter().all(|(t, _)| f.points().contains_key(&t.mul_int(rho as i64)))
}

/// `<t, n> = [t n]_1`.
pub fn duality_bracket_int(t: &Rat, n: i64) -> RatMod1 {
    RatMod1::from_rat(&(t * rat_int(n)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfiniteCheck {
    pub t: RatMod1,
    pub n: i64,
    pub branch: usize,
    pub lhs: Cyclo,
    pub rhs: Cyclo,
    pub equal: bool,
}

/// Compares `e^(2 pi i t (a_j n - b_j)/d_j)`, `j ≡ -n (mod rho)`, with
/// `sum_{x in S_H(t)} coeff(x) e^(2 pi i x n)`.
pub fn qh_check_profinite(map: &HydraMap, t: &RatMod1, n: i64) -> Result<ProfiniteCheck> {
    require_prime(map)?;
    let rho = map.rho() as i64;
    let j = (-n).rem_euclid(rho) as usize;
    let br = map.branches()[j];
    let num = br.a as i128 * n as i128 - br.b as i128;
    if num.rem_euclid(br.d as i128) != 0 {
        return Err(HydraError::Domain(format!("branch {j} is not integral at {n}")));
    }
    let z = i64::try_from(num / br.d as i128).map_err(|_| HydraError::Resource("exponent overflow".into()))?;
    let lhs = Cyclo::from_exponent(&duality_bracket_int(t.value(), z));
    let mut rhs = Cyclo::zero();
    for (x, c) in qh_apply_basis(map, t)?.points.iter() {
        rhs = rhs.add(&c.mul(&Cyclo::from_exponent(&duality_bracket_int(x.value(), n))));
    }
    let equal = lhs == rhs;
    Ok(ProfiniteCheck { t: t.clone(), n, branch: j, lhs, rhs, equal })
}

/// Primes dividing `m`.
pub(crate) fn prime_divisors(m: u64) -> Vec<u64> {
    factorize(m).into_iter().map(|(p, _)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydra::catalog;

    fn t(s: &str) -> RatMod1 {
        s.parse().unwrap()
    }

    fn half_e(k: i64) -> Cyclo {
        Cyclo::zeta(10, k).scale(&rat(1, 2))
    }

    #[test]
    fn collatz_image_of_one_fifth() {
        let img = qh_apply_basis(&catalog("H3").unwrap(), &t("1/5")).unwrap();
        let half = Cyclo::from_rat(rat(1, 2));
        assert_eq!(img.support(), vec![t("1/10"), t("3/10"), t("3/5"), t("4/5")]);
        assert_eq!(img.points.get(&t("1/10")), half);
        assert_eq!(img.points.get(&t("3/5")), half);
        // e^(-pi i/5) = zeta_10^9
        assert_eq!(img.points.get(&t("3/10")), half_e(9));
        assert_eq!(img.points.get(&t("4/5")), half_e(9).neg());
    }

    #[test]
    fn zero_is_fixed() {
        for name in ["H3", "H5", "H7", "T+1"] {
            let map = catalog(name).unwrap();
            let img = qh_apply_basis(&map, &RatMod1::zero()).unwrap();
            assert_eq!(img.points, QZFunction::indicator(RatMod1::zero()), "{name}");
        }
        let composite = crate::hydra::build_map(4, &[(1, 0, 4), (1, 3, 4), (1, 6, 4), (1, 9, 4)]).unwrap();
        assert!(matches!(qh_apply_basis(&composite, &t("0")), Err(HydraError::Capability(_))));
        assert!(qh_apply(&catalog("H3").unwrap(), &QZFunction::new()).unwrap().is_empty());
    }

    #[test]
    fn residuals() {
        let h3 = catalog("H3").unwrap();
        let one0 = QZFunction::indicator(t("0"));
        assert!(fixed_residual(&h3, &one0, &[t("0"), t("1/2"), t("1/3")]).unwrap().is_empty());
        let r = fixed_residual(&h3, &QZFunction::indicator(t("1/5")), &[t("1/10")]).unwrap();
        assert_eq!(r[&t("1/10")], Cyclo::from_rat(rat(1, 2)));

        assert!(afe_residual(&h3, &one0, &t("1/2")).unwrap().is_zero());
        assert!(afe_residual(&h3, &one0, &t("0")).unwrap().is_zero());
        let third = QZFunction::indicator(t("1/3"));
        assert_eq!(afe_residual(&h3, &third, &t("1/3")).unwrap(), Cyclo::from_int(-1));

        assert!(orfe_residual(&h3, &one0, &t("1/5")).unwrap().is_zero());
        let pair = QZFunction::from_points([(t("1/3"), Cyclo::one()), (t("2/3"), Cyclo::one())]);
        assert!(orfe_residual(&h3, &pair, &t("1/3")).unwrap().is_zero());
        assert!(matches!(orfe_residual(&h3, &one0, &t("1/2")), Err(HydraError::Precondition(_))));
        let on = QZFunction::indicator(t("1/6"));
        assert!(matches!(orfe_residual(&h3, &on, &t("1/3")), Err(HydraError::Precondition(_))));
    }

    #[test]
    fn support_predicates() {
        assert_eq!(off_support_check(&QZFunction::indicator(t("1/10")), 2), vec![t("1/10")]);
        let f = QZFunction::from_points([(t("1/5"), Cyclo::one()), (t("0"), Cyclo::one())]);
        assert!(off_support_check(&f, 2).is_empty());
        assert_eq!(off_support_check(&QZFunction::indicator(t("1/6")), 2), vec![t("1/6")]);

        let orbit: QZFunction = ["1/5", "2/5", "4/5", "3/5"].iter().map(|s| (t(s), Cyclo::one())).collect();
        assert!(support_rho_invariance(&orbit, 2));
        assert!(!support_rho_invariance(&QZFunction::indicator(t("1/5")), 2));
        assert!(support_rho_invariance(&QZFunction::indicator(t("0")), 2));
    }

    #[test]
    fn brackets_and_profinite() {
        assert_eq!(duality_bracket_int(&rat(1, 5), 2), t("2/5"));
        assert_eq!(duality_bracket_int(&rat(3, 4), 4), t("0"));
        assert_eq!(duality_bracket_int(&rat(1, 3), 7), t("1/3"));
        let h3 = catalog("H3").unwrap();
        for (s, n) in [("1/5", 2), ("0", 1), ("1/5", 1)] {
            let c = qh_check_profinite(&h3, &t(s), n).unwrap();
            assert!(c.equal, "{s} {n}: {} vs {}", c.lhs, c.rhs);
        }
        assert_eq!(qh_check_profinite(&h3, &t("1/5"), 2).unwrap().lhs, Cyclo::zeta(5, 1));
        for n in 0..40 {
            for s in ["1/7", "3/8", "5/12"] {
                assert!(qh_check_profinite(&catalog("T+1").unwrap(), &t(s), n).unwrap().equal);
            }
        }
    }
}
