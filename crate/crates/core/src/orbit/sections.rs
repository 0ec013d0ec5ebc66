use serde::{Deserialize, Serialize};

use crate::error::{HydraError, Result};

/// Counts `|V_{alpha,k}(N)|` of `V ∩ [0, N]` split by residue mod `alpha`, at each grid point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossSectionCounts {
    pub alpha: u64,
    pub grid: Vec<u64>,
    pub counts: Vec<Vec<u64>>,
}

impl CrossSectionCounts {
    pub fn total(&self, g: usize) -> u64 {
        self.counts[g].iter().sum()
    }
}

fn sorted_grid(grid: &[u64]) -> Vec<u64> {
    let mut g = grid.to_vec();
    g.sort_unstable();
    g.dedup();
    g
}

pub fn cross_sections(member: impl Fn(u64) -> bool, alpha: u64, grid: &[u64]) -> Result<CrossSectionCounts> {
    if alpha < 1 {
        return Err(HydraError::Domain("alpha must be positive".into()));
    }
    let grid = sorted_grid(grid);
    let mut counts = Vec::with_capacity(grid.len());
    let mut running = vec![0u64; alpha as usize];
    let mut n = 0u64;
    for &g in &grid {
        while n <= g {
            if member(n) {
                running[(n % alpha) as usize] += 1;
            }
            n += 1;
        }
        counts.push(running.clone());
    }
    Ok(CrossSectionCounts { alpha, grid, counts })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub n: u64,
    pub count: u64,
    pub ratio: f64,
    pub running_sup: f64,
    pub running_inf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub points: Vec<DensityPoint>,
    /// Sup of `|V(N)|/N` over the upper half of the grid.
    pub upper: f64,
    /// Inf of `|V(N)|/N` over the upper half of the grid.
    pub lower: f64,
}

/// Partial densities `|V(N)|/N` where `V(N) = V ∩ [0, N]`.
pub fn density_estimates(member: impl Fn(u64) -> bool, grid: &[u64]) -> Result<DensityEstimate> {
    let grid: Vec<u64> = sorted_grid(grid).into_iter().filter(|&g| g >= 1).collect();
    if grid.is_empty() {
        return Err(HydraError::Domain("density grid needs a point N >= 1".into()));
    }
    let sections = cross_sections(member, 1, &grid)?;
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let points: Vec<DensityPoint> = grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let count = sections.total(i);
            let ratio = count as f64 / n as f64;
            sup = sup.max(ratio);
            inf = inf.min(ratio);
            DensityPoint { n, count, ratio, running_sup: sup, running_inf: inf }
        })
        .collect();
    let tail = &points[points.len() / 2..];
    let upper = tail.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
    let lower = tail.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    Ok(DensityEstimate { points, upper, lower })
}

/// Geometric grid `start, start*ratio, ...` up to and including `end`.
pub fn geometric_grid(start: u64, end: u64, ratio: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut g = start.max(1);
    while g < end {
        out.push(g);
        g = g.saturating_mul(ratio.max(2));
    }
    out.push(end);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPattern {
    pub alpha: u64,
    pub nu: u64,
    /// Residues mod `alpha` occupied on `[nu*alpha, N]`.
    pub residues: Vec<u64>,
    /// Members below `nu*alpha` outside the periodic residues.
    pub finite_part: Vec<u64>,
    /// Non-members below `nu*alpha` inside the periodic residues.
    pub gaps: Vec<u64>,
}

/// Smallest `(alpha, nu)` with `alpha*nu <= N/2` such that the indicator is
/// `alpha`-periodic on `[nu*alpha, N]`, with at least two full periods in view.
pub fn eventually_periodic_detect(indicator: &[bool]) -> Result<Option<PeriodicPattern>> {
    if indicator.len() < 5 {
        return Err(HydraError::Domain("need N >= 4".into()));
    }
    let n = indicator.len() as u64 - 1;
    for alpha in 1..=n / 2 {
        // smallest start s with ind[m] == ind[m + alpha] for all m in [s, N - alpha]
        let last_mismatch = (0..=n - alpha).rev().find(|&m| indicator[m as usize] != indicator[(m + alpha) as usize]);
        let start = last_mismatch.map_or(0, |m| m + 1);
        let nu = start.div_ceil(alpha);
        let s = nu * alpha;
        if s > n / 2 || n + 1 - s < 2 * alpha {
            continue;
        }
        let mut residues: Vec<u64> = (s..s + alpha).filter(|&m| indicator[m as usize]).map(|m| m % alpha).collect();
        residues.sort_unstable();
        let in_pattern = |m: u64| residues.binary_search(&(m % alpha)).is_ok();
        let finite_part = (0..s).filter(|&m| indicator[m as usize] && !in_pattern(m)).collect();
        let gaps = (0..s).filter(|&m| !indicator[m as usize] && in_pattern(m)).collect();
        return Ok(Some(PeriodicPattern { alpha, nu, residues, finite_part, gaps }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_section_examples() {
        let c = cross_sections(|n| n % 3 == 0, 3, &[10]).unwrap();
        assert_eq!(c.counts[0], vec![4, 0, 0]);
        let c = cross_sections(|n| n % 3 == 1, 3, &[10]).unwrap();
        assert_eq!(c.counts[0], vec![0, 4, 0]);
        let c = cross_sections(|_| true, 2, &[9]).unwrap();
        assert_eq!(c.counts[0], vec![5, 5]);
        assert!(cross_sections(|_| true, 0, &[9]).is_err());
    }

    #[test]
    fn densities() {
        let d = density_estimates(|n| n % 3 == 0, &geometric_grid(10, 1_000_000, 10)).unwrap();
        assert!((d.points.last().unwrap().ratio - 1.0 / 3.0).abs() < 1e-5);
        assert!(d.upper - 1.0 / 3.0 < 1e-3 && d.lower <= 1.0 / 3.0 + 1e-3);
        let pow2 = |n: u64| n.is_power_of_two();
        let d = density_estimates(pow2, &[1 << 20]).unwrap();
        assert_eq!(d.points[0].count, 21);
        assert!(d.points[0].ratio <= 21.0 / (1u64 << 20) as f64);
    }

    #[test]
    fn periodic_detection() {
        let ind: Vec<bool> = (0..=100).map(|n| n % 3 == 0).collect();
        let p = eventually_periodic_detect(&ind).unwrap().unwrap();
        assert_eq!((p.alpha, p.nu, p.residues.clone()), (3, 0, vec![0]));

        let ind: Vec<bool> = (0..=200).map(|n| n == 1 || n % 5 == 2).collect();
        let p = eventually_periodic_detect(&ind).unwrap().unwrap();
        assert_eq!((p.alpha, p.nu, p.residues.clone()), (5, 1, vec![2]));
        assert_eq!(p.finite_part, vec![1]);
        assert!(p.gaps.is_empty());

        let ind: Vec<bool> = (0..=1024u64).map(|n| n.is_power_of_two()).collect();
        assert_eq!(eventually_periodic_detect(&ind).unwrap(), None);
        assert!(eventually_periodic_detect(&[true, false]).is_err());
    }
}
