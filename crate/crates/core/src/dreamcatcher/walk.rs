//! Support-growth walk: an off-`rho` point `t` sends mass to the on-`rho` point
//! `t/rho`, which the fixed-point equation can only cancel with the image of
//! another point. Each step solves for those points and moves to one of them.

use serde::{Deserialize, Serialize};

use super::operator::{prime_divisors, reaches};
use crate::error::{HydraError, Result};
use crate::exact::{is_on, padic_abs, rat, rat_int, Rat, RatMod1};
use crate::hydra::HydraMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicMagnitude {
    pub p: u64,
    #[serde(with = "rat_string")]
    pub abs: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub from: RatMod1,
    /// The on-`rho` point `from / rho` to be cancelled.
    pub target: RatMod1,
    /// Solutions `(rho x - k)/mu_j` other than `from` whose image reaches the target.
    pub candidates: Vec<RatMod1>,
    /// Every class mapped onto the target with nonzero coefficient, `from` excluded.
    pub all_preimages: Vec<RatMod1>,
    pub chosen: RatMod1,
    pub mu_index: usize,
    pub magnitudes: Vec<PadicMagnitude>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkReport {
    pub tau: RatMod1,
    pub steps: Vec<WalkStep>,
    pub note: Option<String>,
    pub warnings: Vec<String>,
}

impl WalkReport {
    /// `|chosen|_p` per step for the prime `p`.
    pub fn magnitudes_for(&self, p: u64) -> Vec<Rat> {
        self.steps.iter().filter_map(|s| s.magnitudes.iter().find(|m| m.p == p).map(|m| m.abs.clone())).collect()
    }
}

mod rat_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exact::{format_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        parse_rat(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

fn height_sorted(mut v: Vec<RatMod1>) -> Vec<RatMod1> {
    v.sort_by(crate::exact::rat::height_order);
    v.dedup();
    v
}

pub fn saul_walk(map: &HydraMap, tau: &RatMod1, steps: usize) -> Result<WalkReport> {
    if !map.is_prime_map() || !map.is_regulated() {
        return Err(HydraError::Capability("the walk needs a prime, regulated map".into()));
    }
    let rho = map.rho();
    let mut warnings = Vec::new();
    if prime_divisors(rho).iter().any(|&p| padic_abs(tau.value(), p).map_or(true, |a| a != rat_int(1))) {
        warnings.push(format!("|{tau}|_{rho} != 1"));
    }
    let inv_rho = rat(1, rho as i64);
    let mut current = tau.clone();
    let mut out = Vec::new();
    let mut note = None;
    for _ in 0..steps {
        let target = current.scale(&inv_rho);
        if !is_on(target.value(), rho) {
            note = Some(format!("{target} = {current}/{rho} is not on {rho}; nothing to cancel"));
            break;
        }
        // literal solutions tau = (rho x - k) / mu_j, with rho x = current
        let mut literal: Vec<(RatMod1, usize)> = Vec::new();
        for (j, &mu) in map.mu().iter().enumerate() {
            for k in 0..rho {
                let sol = RatMod1::from_rat(&((current.value() - rat_int(k as i64)) / rat_int(mu as i64)));
                if sol != current && reaches(map, &sol, &target)? {
                    literal.push((sol, j));
                }
            }
        }
        // all classes mod 1: mu_j tau ≡ current + i (mod rho) for 0 <= i < mu_j
        let mut all = Vec::new();
        for &mu in map.mu() {
            for i in 0..mu {
                let sol = RatMod1::from_rat(&((current.value() + rat_int(i as i64)) / rat_int(mu as i64)));
                if sol != current && reaches(map, &sol, &target)? {
                    all.push(sol);
                }
            }
        }
        let candidates = height_sorted(literal.iter().map(|(t, _)| t.clone()).collect());
        let Some(chosen) = candidates.first().cloned() else {
            note = Some(format!("no point other than {current} reaches {target}"));
            break;
        };
        let mu_index = literal.iter().find(|(t, _)| *t == chosen).map(|(_, j)| *j).expect("chosen is literal");
        let magnitudes = prime_divisors(map.mu()[mu_index])
            .into_iter()
            .map(|p| Ok(PadicMagnitude { p, abs: padic_abs(chosen.value(), p)? }))
            .collect::<Result<Vec<_>>>()?;
        out.push(WalkStep {
            from: current.clone(),
            target,
            candidates,
            all_preimages: height_sorted(all),
            chosen: chosen.clone(),
            mu_index,
            magnitudes,
        });
        current = chosen;
    }
    Ok(WalkReport { tau: tau.clone(), steps: out, note, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydra::catalog;

    fn t(s: &str) -> RatMod1 {
        s.parse().unwrap()
    }

    #[test]
    fn first_step_from_one_fifth() {
        let w = saul_walk(&catalog("H3").unwrap(), &t("1/5"), 1).unwrap();
        let s = &w.steps[0];
        assert_eq!(s.target, t("1/10"));
        assert_eq!(s.candidates, vec![t("1/15"), t("11/15")]);
        assert_eq!(s.all_preimages, vec![t("2/5"), t("1/15"), t("11/15")]);
        assert_eq!(s.chosen, t("1/15"));
        assert_eq!(s.magnitudes, vec![PadicMagnitude { p: 3, abs: rat_int(3) }]);
        assert!(w.warnings.is_empty());
    }

    #[test]
    fn magnitudes_grow_by_three() {
        let w = saul_walk(&catalog("H3").unwrap(), &t("1/5"), 6).unwrap();
        let mags = w.magnitudes_for(3);
        assert_eq!(mags, (1..=6).map(|k| rat_int(3i64.pow(k))).collect::<Vec<_>>());
        assert!(w.note.is_none());
    }

    #[test]
    fn zero_terminates() {
        let w = saul_walk(&catalog("H3").unwrap(), &t("0"), 1).unwrap();
        assert!(w.steps.is_empty());
        assert!(w.note.is_some());
        assert!(!w.warnings.is_empty());
    }
}
