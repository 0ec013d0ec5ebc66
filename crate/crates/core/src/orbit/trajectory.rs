use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{HydraError, Result};
use crate::hydra::HydraMap;

/// Length of the strictly increasing tail required before an escaping
/// trajectory is flagged as (heuristically) divergent.
pub const GROWTH_TAIL: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    EnteredCycle { cycle: Vec<u64>, entry_index: usize },
    ExceededBound { max_reached: u64, monotone_growth: bool },
    ExceededSteps,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: u64,
    pub steps: Vec<u64>,
    pub verdict: Verdict,
}

impl Trajectory {
    pub fn cycle(&self) -> Option<&[u64]> {
        match &self.verdict {
            Verdict::EnteredCycle { cycle, .. } => Some(cycle),
            _ => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.verdict, Verdict::ExceededBound { monotone_growth: true, .. })
    }
}

fn strictly_increasing_tail(steps: &[u64]) -> bool {
    steps.len() >= GROWTH_TAIL && steps[steps.len() - GROWTH_TAIL..].windows(2).all(|w| w[0] < w[1])
}

/// Iterates `H` from `n` until a value repeats, the value leaves `[0, max_value]`,
/// or `max_steps` applications have been made.
pub fn iterate_orbit(map: &HydraMap, n: u64, max_steps: usize, max_value: u64) -> Trajectory {
    let mut steps = vec![n];
    let mut seen: HashMap<u64, usize> = HashMap::from([(n, 0)]);
    let mut current = n;
    for _ in 0..max_steps {
        let next = match map.checked_apply(current) {
            Some(v) if v <= max_value => v,
            other => {
                let max_reached = other.unwrap_or(u64::MAX).max(*steps.iter().max().unwrap());
                let mut probe = steps.clone();
                probe.push(other.unwrap_or(u64::MAX));
                return Trajectory {
                    start: n,
                    verdict: Verdict::ExceededBound { max_reached, monotone_growth: strictly_increasing_tail(&probe) },
                    steps,
                };
            }
        };
        if let Some(&entry) = seen.get(&next) {
            let mut cycle = steps[entry..].to_vec();
            cycle.sort_unstable();
            return Trajectory { start: n, steps, verdict: Verdict::EnteredCycle { cycle, entry_index: entry } };
        }
        seen.insert(next, steps.len());
        steps.push(next);
        current = next;
    }
    Trajectory { start: n, steps, verdict: Verdict::ExceededSteps }
}

/// Checks that `cycle` is a single periodic orbit of `map`.
pub fn verify_cycle(map: &HydraMap, cycle: &[u64]) -> Result<BTreeSet<u64>> {
    let set: BTreeSet<u64> = cycle.iter().copied().collect();
    let start = *set.iter().next().ok_or_else(|| HydraError::Domain("empty cycle".into()))?;
    let mut current = start;
    for step in 1..=set.len() {
        current = map.checked_apply(current).ok_or_else(|| HydraError::Domain("cycle overflows".into()))?;
        if !set.contains(&current) {
            return Err(HydraError::Domain(format!("{cycle:?} is not a cycle: leaves to {current}")));
        }
        if current == start && step < set.len() {
            return Err(HydraError::Domain(format!("{cycle:?} is a union of shorter cycles")));
        }
    }
    if current != start {
        return Err(HydraError::Domain(format!("{cycle:?} does not close up")));
    }
    Ok(set)
}

/// A cycle is closed when its preimage under `H` is itself.
pub fn is_closed_cycle(map: &HydraMap, cycle: &[u64]) -> Result<bool> {
    let set = verify_cycle(map, cycle)?;
    Ok(set.iter().all(|&v| map.preimages(v).iter().all(|p| set.contains(p))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydra::catalog;

    #[test]
    fn collatz_from_three() {
        let t = iterate_orbit(&catalog("H3").unwrap(), 3, 100, 1_000_000);
        assert_eq!(t.steps, vec![3, 5, 8, 4, 2, 1]);
        assert_eq!(t.verdict, Verdict::EnteredCycle { cycle: vec![1, 2], entry_index: 4 });
    }

    #[test]
    fn matthews_negative_branch() {
        let t = iterate_orbit(&catalog("T-1").unwrap(), 10, 100, 1_000_000);
        assert_eq!(t.steps, vec![10, 4, 2]);
        assert_eq!(t.cycle(), Some(&[2u64, 4][..]));
    }

    #[test]
    fn doubling_escapes() {
        let t = iterate_orbit(&catalog("T+1").unwrap(), 3, 50, 1_000_000);
        assert_eq!(&t.steps[..4], &[3, 6, 12, 24]);
        match t.verdict {
            Verdict::ExceededBound { max_reached, monotone_growth } => {
                assert!(max_reached > 1_000_000);
                assert!(monotone_growth);
            }
            other => panic!("unexpected verdict {other:?}"),
        }
        let short = iterate_orbit(&catalog("T+1").unwrap(), 3, 5, u64::MAX);
        assert_eq!(short.verdict, Verdict::ExceededSteps);
    }

    #[test]
    fn closed_cycles() {
        let h3 = catalog("H3").unwrap();
        assert!(!is_closed_cycle(&h3, &[1, 2]).unwrap());
        assert!(is_closed_cycle(&h3, &[0]).unwrap());
        assert!(!is_closed_cycle(&catalog("T-1").unwrap(), &[2, 4]).unwrap());
        assert!(matches!(is_closed_cycle(&h3, &[1, 3]), Err(HydraError::Domain(_))));
        assert!(matches!(is_closed_cycle(&h3, &[0, 1, 2]), Err(HydraError::Domain(_))));
    }
}
