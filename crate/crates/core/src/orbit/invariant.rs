use crate::error::{HydraError, Result};
use crate::hydra::HydraMap;

/// Cycles of `H` lying inside `[0, bound]`, each sorted, ordered by smallest element.
pub fn cycles_within(map: &HydraMap, bound: u64) -> Result<Vec<Vec<u64>>> {
    if bound >= u32::MAX as u64 {
        return Err(HydraError::Resource(format!("bound {bound} too large")));
    }
    const UNSEEN: u32 = 0;
    const DONE: u32 = u32::MAX;
    // state: 0 unseen, walk id + 1 while on the current path, DONE afterwards
    let len = bound as usize + 1;
    let mut state = vec![UNSEEN; len];
    let mut cycles = Vec::new();
    let mut path = Vec::new();
    for start in 0..len {
        if state[start] != UNSEEN {
            continue;
        }
        let walk = start as u32 + 1;
        path.clear();
        let mut x = start;
        loop {
            state[x] = walk;
            path.push(x);
            let next = match map.checked_apply(x as u64) {
                Some(v) if v <= bound => v as usize,
                _ => break,
            };
            if state[next] == walk {
                let pos = path.iter().position(|&p| p == next).expect("on path");
                let mut cycle: Vec<u64> = path[pos..].iter().map(|&p| p as u64).collect();
                cycle.sort_unstable();
                cycles.push(cycle);
                break;
            }
            if state[next] != UNSEEN {
                break;
            }
            x = next;
        }
        for &p in &path {
            state[p] = DONE;
        }
    }
    cycles.sort();
    Ok(cycles)
}

/// Finite nonempty invariant sets (`H(V) = V = H^-1(V)`) found inside `[0, bound]`.
/// A finite invariant set is a union of closed cycles, so the minimal ones are
/// exactly the closed cycles.
pub fn finite_invariant_search(map: &HydraMap, bound: u64) -> Result<Vec<Vec<u64>>> {
    if bound < 1 {
        return Err(HydraError::Domain("bound must be positive".into()));
    }
    Ok(cycles_within(map, bound)?
        .into_iter()
        .filter(|cycle| cycle.iter().all(|&v| map.preimages(v).iter().all(|p| cycle.binary_search(p).is_ok())))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydra::catalog;

    #[test]
    fn known_cycles() {
        let h3 = catalog("H3").unwrap();
        assert_eq!(cycles_within(&h3, 100).unwrap(), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn invariant_sets() {
        assert_eq!(finite_invariant_search(&catalog("H3").unwrap(), 10_000).unwrap(), vec![vec![0]]);
        assert_eq!(finite_invariant_search(&catalog("T-1").unwrap(), 1_000).unwrap(), vec![vec![0], vec![1]]);
        assert!(finite_invariant_search(&catalog("T+1").unwrap(), 10_000).unwrap().is_empty());
    }
}
