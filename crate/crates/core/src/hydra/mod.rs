//! Hydra maps: affine branches on residue classes mod `rho`.
//!
//! Branch `j` sends `n = rho*m + j` to `(a_j n + b_j)/d_j = mu_j m + H(j)` with
//! `mu_j = rho a_j / d_j`. A map is well formed when every branch lands in the
//! non-negative integers; `b_j` may be negative as long as `H(j) >= 0`.

mod catalog;

use std::collections::BTreeSet;
use std::path::Path;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HydraError, Result};
use crate::exact::is_prime;

pub use catalog::{catalog, CATALOG_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub a: u64,
    pub b: i64,
    pub d: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HydraMap {
    rho: u64,
    branches: Vec<Branch>,
    mu: Vec<u64>,
    h_of_j: Vec<u64>,
    is_prime_map: bool,
    regulated: Vec<usize>,
}

/// On-disk map description: `{"rho": 2, "branches": [{"a":1,"b":0,"d":2}, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapConfig {
    pub rho: i64,
    pub branches: Vec<RawBranch>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawBranch {
    pub a: i64,
    pub b: i64,
    pub d: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub well_formed: bool,
    pub surjective: bool,
    pub prime: bool,
    pub regulated: bool,
    pub regulated_indices: Vec<usize>,
    pub mu: Vec<u64>,
    pub h_of_j: Vec<u64>,
    pub uncovered: Option<u64>,
    pub witnesses: Vec<String>,
}

/// Outcome of the exact surjectivity decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityVerdict {
    pub surjective: bool,
    pub uncovered: Option<u64>,
    pub period: u64,
    pub offset: u64,
}

pub fn build_map(rho: i64, branches: &[(i64, i64, i64)]) -> Result<HydraMap> {
    if rho < 2 {
        return Err(HydraError::Malformed(format!("rho must be at least 2, got {rho}")));
    }
    if branches.len() != rho as usize {
        return Err(HydraError::Malformed(format!("expected {rho} branches, got {}", branches.len())));
    }
    let rho_u = rho as u64;
    let mut out = Vec::with_capacity(branches.len());
    let mut mu = Vec::with_capacity(branches.len());
    let mut h_of_j = Vec::with_capacity(branches.len());
    for (j, &(a, b, d)) in branches.iter().enumerate() {
        let fail = |reason: String| HydraError::Validation { index: j, reason };
        if a < 1 {
            return Err(fail(format!("a must be positive, got {a}")));
        }
        if d < 1 {
            return Err(fail(format!("d must be positive, got {d}")));
        }
        if a.gcd(&d) != 1 {
            return Err(fail(format!("gcd(a, d) = {} != 1", a.gcd(&d))));
        }
        let (a_u, d_u) = (a as u64, d as u64);
        if !(rho_u * a_u).is_multiple_of(d_u) {
            return Err(fail(format!("d = {d} does not divide rho*a = {}", rho_u * a_u)));
        }
        let top = a as i128 * j as i128 + b as i128;
        if top % d as i128 != 0 {
            return Err(fail(format!("d = {d} does not divide a*j + b = {top}")));
        }
        let h = top / d as i128;
        if h < 0 {
            return Err(fail(format!("H({j}) = {h} is negative")));
        }
        out.push(Branch { a: a_u, b, d: d_u });
        mu.push(rho_u * a_u / d_u);
        h_of_j.push(h as u64);
    }
    let is_prime_map = is_prime(rho_u) && out.iter().all(|br| br.a == 1 || is_prime(br.a));
    let regulated = mu.iter().enumerate().filter(|(_, &m)| m == 1).map(|(j, _)| j).collect();
    Ok(HydraMap { rho: rho_u, branches: out, mu, h_of_j, is_prime_map, regulated })
}

impl HydraMap {
    pub fn from_config(cfg: &MapConfig) -> Result<Self> {
        let triples: Vec<(i64, i64, i64)> = cfg.branches.iter().map(|b| (b.a, b.b, b.d)).collect();
        build_map(cfg.rho, &triples)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: MapConfig =
            serde_json::from_str(text).map_err(|e| HydraError::Malformed(format!("map config: {e}")))?;
        Self::from_config(&cfg)
    }

    /// A catalog name, or a path to a JSON map config.
    pub fn resolve(source: &str) -> Result<Self> {
        match catalog(source) {
            Ok(map) => Ok(map),
            Err(lookup) => {
                let path = Path::new(source);
                if path.is_file() {
                    Self::from_json(&std::fs::read_to_string(path)?)
                } else {
                    Err(lookup)
                }
            }
        }
    }

    pub fn config(&self) -> MapConfig {
        MapConfig {
            rho: self.rho as i64,
            branches: self.branches.iter().map(|b| RawBranch { a: b.a as i64, b: b.b, d: b.d as i64 }).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.config()).expect("map config serializes")
    }

    /// SHA-256 of the canonical JSON config, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn rho(&self) -> u64 {
        self.rho
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn mu(&self) -> &[u64] {
        &self.mu
    }

    pub fn h_of_j(&self) -> &[u64] {
        &self.h_of_j
    }

    pub fn is_prime_map(&self) -> bool {
        self.is_prime_map
    }

    pub fn regulated_indices(&self) -> &[usize] {
        &self.regulated
    }

    pub fn is_regulated(&self) -> bool {
        !self.regulated.is_empty()
    }

    pub fn checked_apply(&self, n: u64) -> Option<u64> {
        let j = (n % self.rho) as usize;
        let m = n / self.rho;
        self.mu[j].checked_mul(m)?.checked_add(self.h_of_j[j])
    }

    /// `H(n)`. Panics if the image overflows `u64`; use [`HydraMap::checked_apply`] near the limit.
    pub fn apply(&self, n: u64) -> u64 {
        self.checked_apply(n).expect("hydra map image overflows u64")
    }

    /// All `n >= 0` with `H(n) = v`, increasing.
    pub fn preimages(&self, v: u64) -> Vec<u64> {
        let mut out = BTreeSet::new();
        for j in 0..self.rho as usize {
            let h = self.h_of_j[j];
            if v < h || !(v - h).is_multiple_of(self.mu[j]) {
                continue;
            }
            let m = (v - h) / self.mu[j];
            if let Some(n) = m.checked_mul(self.rho).and_then(|x| x.checked_add(j as u64)) {
                out.insert(n);
            }
        }
        out.into_iter().collect()
    }

    /// Decides surjectivity exactly. The image is the union of the progressions
    /// `H(j) + mu_j N0`; past `B = max H(j)` their coverage repeats with period
    /// `L = lcm(mu_j)`, so checking `[0, B + L)` is conclusive.
    pub fn check_surjective(&self) -> SurjectivityVerdict {
        let period = self.mu.iter().fold(1u64, |acc, &m| acc.lcm(&m));
        let offset = *self.h_of_j.iter().max().unwrap_or(&0);
        let covered = |n: u64| {
            (0..self.rho as usize).any(|j| n >= self.h_of_j[j] && (n - self.h_of_j[j]).is_multiple_of(self.mu[j]))
        };
        let uncovered = (0..offset + period).find(|&n| !covered(n));
        SurjectivityVerdict { surjective: uncovered.is_none(), uncovered, period, offset }
    }

    pub fn validate(&self) -> ValidationReport {
        let verdict = self.check_surjective();
        let mut witnesses = Vec::new();
        match verdict.uncovered {
            Some(n) => witnesses.push(format!("{n} has no preimage")),
            None => witnesses.push(format!(
                "every residue class mod {} above {} is hit by some branch",
                verdict.period, verdict.offset
            )),
        }
        if !self.is_prime_map {
            witnesses.push("not a prime map: rho or some a_j is composite".into());
        }
        if self.regulated.is_empty() {
            witnesses.push("no branch has mu_j = 1".into());
        }
        ValidationReport {
            well_formed: true,
            surjective: verdict.surjective,
            prime: self.is_prime_map,
            regulated: !self.regulated.is_empty(),
            regulated_indices: self.regulated.clone(),
            mu: self.mu.clone(),
            h_of_j: self.h_of_j.clone(),
            uncovered: verdict.uncovered,
            witnesses,
        }
    }
}
