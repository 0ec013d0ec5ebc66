//! Exact fixed points of the dreamcatcher operator among functions supported
//! on points of bounded denominator.
//!
//! Unknowns are the values `f(t)`; with `f` zero elsewhere, `Q_H f = f` is a
//! finite set of linear equations, one per point of `variables ∪ images`. The
//! equations split into connected components; each is expanded into rational
//! coordinates over a common cyclotomic field and solved exactly.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::operator::{fixed_residual, qh_apply_basis};
use super::qz::QZFunction;
use crate::error::{HydraError, Result};
use crate::exact::cyclo::basis_exponents;
use crate::exact::{is_off, Cyclo, Rat, RatMod1};
use crate::hydra::HydraMap;
use crate::linalg::{nullspace, RowSpace};
use crate::orbit::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Largest cyclotomic conductor a component may need.
    pub conductor_cap: u64,
    /// Largest number of rational unknowns in one component.
    pub max_unknowns: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { conductor_cap: 2_520, max_unknowns: 20_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelComponent {
    pub variables: Vec<RatMod1>,
    pub constraints: usize,
    pub conductor: u64,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelResult {
    pub denom_bound: u64,
    pub off_rho_only: bool,
    pub variable_points: Vec<RatMod1>,
    pub constraint_points: Vec<RatMod1>,
    pub constraint_count: usize,
    pub dimension: usize,
    pub basis: Vec<QZFunction>,
    /// lcm of the component conductors.
    pub conductor: u64,
    pub components: Vec<KernelComponent>,
    /// Every basis element was re-checked against all constraints with exact arithmetic.
    pub verified: bool,
    /// Every basis element is supported on `{0}`.
    pub supported_at_zero: bool,
    pub counterexamples: Vec<QZFunction>,
}

pub fn kernel_variables(map: &HydraMap, denom_bound: u64, off_rho_only: bool) -> Vec<RatMod1> {
    let rho = map.rho();
    let mut vars: Vec<RatMod1> = (1..=denom_bound)
        .filter(|q| !off_rho_only || q.gcd(&rho) == 1)
        .flat_map(|q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q)))
        .map(|(p, q)| RatMod1::new(p as i64, q as i64).expect("q >= 1"))
        .collect();
    vars.sort();
    vars
}

type Equations = BTreeMap<RatMod1, BTreeMap<usize, Cyclo>>;

fn assemble(map: &HydraMap, vars: &[RatMod1]) -> Result<Equations> {
    let mut eqs: Equations = BTreeMap::new();
    let mut add = |x: RatMod1, v: usize, c: &Cyclo| {
        let row = eqs.entry(x).or_default();
        let sum = row.get(&v).cloned().unwrap_or_default().add(c);
        if sum.is_zero() {
            row.remove(&v);
        } else {
            row.insert(v, sum);
        }
    };
    for (v, t) in vars.iter().enumerate() {
        add(t.clone(), v, &Cyclo::from_int(-1));
        for (x, c) in qh_apply_basis(map, t)?.points.iter() {
            add(x.clone(), v, c);
        }
    }
    Ok(eqs)
}

/// Coordinates of `c` in the basis of `Q(zeta_n)` listed by `exps`.
fn coords(c: &Cyclo, n: u64, exps: &[u64]) -> Vec<Rat> {
    let dense = c.dense_in(n);
    exps.iter().map(|&e| dense[e as usize].clone()).collect()
}

fn flatten(w: &[Cyclo], n: u64, exps: &[u64]) -> Vec<Rat> {
    w.iter().flat_map(|c| coords(c, n, exps)).collect()
}

/// Reduced echelon form over `Q(zeta)`: pivots scaled to 1 and cleared elsewhere.
fn cyclo_echelon(mut vecs: Vec<Vec<Cyclo>>) -> Result<Vec<Vec<Cyclo>>> {
    let width = vecs.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..vecs.len()).find(|&i| !vecs[i][col].is_zero()) else {
            continue;
        };
        vecs.swap(r, p);
        let inv = vecs[r][col].inverse()?;
        vecs[r] = vecs[r].iter().map(|c| c.mul(&inv)).collect();
        let pivot = vecs[r].clone();
        for (i, row) in vecs.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = x.sub(&y.mul(&f));
                }
            }
        }
        r += 1;
        if r == vecs.len() {
            break;
        }
    }
    Ok(vecs)
}

fn solve_component(
    vars: &[usize],
    eqs: &[&BTreeMap<usize, Cyclo>],
    cfg: &KernelConfig,
) -> Result<(u64, Vec<Vec<Cyclo>>)> {
    let n = eqs.iter().flat_map(|row| row.values()).fold(1u64, |acc, c| acc.lcm(&c.conductor()));
    if n > cfg.conductor_cap {
        return Err(HydraError::Resource(format!(
            "component needs conductor {n}, above the cap {}",
            cfg.conductor_cap
        )));
    }
    let exps = basis_exponents(n);
    let phi = exps.len();
    let width = vars.len() * phi;
    if width > cfg.max_unknowns {
        return Err(HydraError::Resource(format!("{width} rational unknowns exceed {}", cfg.max_unknowns)));
    }
    let slot: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let basis: Vec<Cyclo> = exps.iter().map(|&e| Cyclo::zeta(n, e as i64)).collect();

    let mut rows = Vec::with_capacity(eqs.len() * phi);
    for row in eqs {
        let mut block = vec![vec![Rat::zero(); width]; phi];
        for (v, c) in row.iter() {
            let s = slot[v];
            for (i, b) in basis.iter().enumerate() {
                for (r, q) in coords(&c.mul(b), n, &exps).into_iter().enumerate() {
                    block[r][s * phi + i] = q;
                }
            }
        }
        rows.extend(block);
    }
    let null = nullspace(&rows, width);
    debug_assert_eq!(null.len() % phi, 0);

    // pick a Q(zeta)-basis of the kernel among the rational kernel vectors
    let mut span = RowSpace::new(width);
    let mut chosen = Vec::new();
    let zeta = Cyclo::zeta(n, 1);
    for u in &null {
        if span.dim() == null.len() {
            break;
        }
        if span.contains(u) {
            continue;
        }
        let w: Vec<Cyclo> = u
            .chunks(phi)
            .map(|chunk| Cyclo::from_terms(n, exps.iter().zip(chunk).map(|(&e, q)| (e as i64, q.clone()))))
            .collect();
        let mut rotated = w.clone();
        for _ in 0..phi {
            span.insert(&flatten(&rotated, n, &exps));
            rotated = rotated.iter().map(|c| c.mul(&zeta)).collect();
        }
        chosen.push(w);
    }
    Ok((n, cyclo_echelon(chosen)?))
}

pub fn truncated_kernel(
    map: &HydraMap,
    denom_bound: u64,
    off_rho_only: bool,
    cfg: &KernelConfig,
) -> Result<KernelResult> {
    if !map.is_prime_map() || !map.is_regulated() {
        return Err(HydraError::Capability("the kernel solver needs a prime, regulated map".into()));
    }
    if denom_bound < 1 {
        return Err(HydraError::Domain("denominator bound must be positive".into()));
    }
    let vars = kernel_variables(map, denom_bound, off_rho_only);
    let eqs = assemble(map, &vars)?;

    let mut uf = UnionFind::new(vars.len());
    for row in eqs.values() {
        let mut it = row.keys();
        if let Some(&first) = it.next() {
            for &v in it {
                uf.union(first as u32, v as u32);
            }
        }
    }
    let labels = uf.min_labels();
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(v);
    }
    let mut rows_of: BTreeMap<u32, Vec<&BTreeMap<usize, Cyclo>>> = BTreeMap::new();
    for row in eqs.values() {
        if let Some(&first) = row.keys().next() {
            rows_of.entry(labels[first]).or_default().push(row);
        }
    }

    let mut components = Vec::new();
    let mut basis = Vec::new();
    let mut conductor = 1u64;
    for (label, members) in &groups {
        let rows = rows_of.get(label).map(Vec::as_slice).unwrap_or(&[]);
        let (n, vecs) = solve_component(members, rows, cfg)?;
        conductor = conductor.lcm(&n);
        components.push(KernelComponent {
            variables: members.iter().map(|&v| vars[v].clone()).collect(),
            constraints: rows.len(),
            conductor: n,
            dimension: vecs.len(),
        });
        for w in vecs {
            basis.push(members.iter().zip(w).map(|(&v, c)| (vars[v].clone(), c)).collect::<QZFunction>());
        }
    }

    let constraint_points: Vec<RatMod1> = eqs.keys().cloned().collect();
    let mut verified = true;
    for f in &basis {
        verified &= fixed_residual(map, f, &constraint_points)?.is_empty();
    }
    let zero = RatMod1::zero();
    let counterexamples: Vec<QZFunction> =
        basis.iter().filter(|f| f.support().iter().any(|t| *t != zero)).cloned().collect();
    Ok(KernelResult {
        denom_bound,
        off_rho_only,
        variable_points: vars,
        constraint_count: constraint_points.len(),
        constraint_points,
        dimension: basis.len(),
        basis,
        conductor,
        components,
        verified,
        supported_at_zero: counterexamples.is_empty(),
        counterexamples,
    })
}

/// Whether every support point of `f` is off `rho`.
pub fn is_off_rho(f: &QZFunction, rho: u64) -> bool {
    f.support().iter().all(|t| is_off(t.value(), rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydra::catalog;

    #[test]
    fn trivial_bound() {
        let k = truncated_kernel(&catalog("H3").unwrap(), 1, false, &KernelConfig::default()).unwrap();
        assert_eq!(k.dimension, 1);
        assert_eq!(k.basis, vec![QZFunction::indicator(RatMod1::zero())]);
        assert!(k.verified && k.supported_at_zero);
    }

    #[test]
    fn small_bounds_are_exact() {
        for (name, d) in [("H3", 5), ("H5", 3), ("T+1", 4)] {
            let map = catalog(name).unwrap();
            let k = truncated_kernel(&map, d, true, &KernelConfig::default()).unwrap();
            assert!(k.verified, "{name}");
            assert!(k.dimension >= 1);
            assert!(k.basis.iter().all(|f| is_off_rho(f, map.rho())));
        }
    }

    #[test]
    fn guards() {
        let cfg = KernelConfig { conductor_cap: 2, max_unknowns: 10 };
        assert!(matches!(truncated_kernel(&catalog("H3").unwrap(), 9, true, &cfg), Err(HydraError::Resource(_))));
        let composite = crate::hydra::build_map(4, &[(1, 0, 4), (1, 3, 4), (1, 6, 4), (1, 9, 4)]).unwrap();
        assert!(matches!(
            truncated_kernel(&composite, 3, false, &KernelConfig::default()),
            Err(HydraError::Capability(_))
        ));
    }
}
