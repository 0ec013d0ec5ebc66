use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{HydraError, Result};
use crate::orbit::OrbitCensus;

/// `{alpha n + beta : n >= nu}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Progression {
    pub alpha: u64,
    pub beta: u64,
    pub nu: u64,
}

impl Progression {
    pub fn new(alpha: u64, beta: u64, nu: u64) -> Result<Self> {
        if alpha == 0 || beta >= alpha {
            return Err(HydraError::Domain(format!("progression needs 0 <= beta < alpha, got ({alpha},{beta})")));
        }
        Ok(Progression { alpha, beta, nu })
    }

    pub fn first(&self) -> u64 {
        self.alpha * self.nu + self.beta
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.first() && n % self.alpha == self.beta
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `{d^n : n >= 0}`.
    Powers { base: u64 },
    /// A census class not yet resolved against a census.
    ClassRef { id: u64 },
    /// Known members, complete up to `bound` and unknown beyond it.
    Members { label: String, members: Vec<u64>, bound: u64 },
}

impl Generator {
    fn members_upto(&self, limit: u64) -> Result<Vec<u64>> {
        match self {
            Generator::Powers { base } => {
                let mut out = Vec::new();
                let mut p = 1u64;
                while p <= limit {
                    out.push(p);
                    match p.checked_mul(*base) {
                        Some(next) => p = next,
                        None => break,
                    }
                }
                Ok(out)
            }
            Generator::ClassRef { id } => {
                Err(HydraError::Precondition(format!("class:{id} must be resolved against a census first")))
            }
            Generator::Members { members, .. } => Ok(members.iter().copied().take_while(|&m| m <= limit).collect()),
        }
    }

    fn contains(&self, n: u64) -> bool {
        match self {
            Generator::Powers { base } => {
                let mut p = 1u64;
                loop {
                    if p == n {
                        return true;
                    }
                    if p > n {
                        return false;
                    }
                    match p.checked_mul(*base) {
                        Some(next) => p = next,
                        None => return false,
                    }
                }
            }
            Generator::ClassRef { .. } => false,
            Generator::Members { members, .. } => members.binary_search(&n).is_ok(),
        }
    }

    /// Largest index up to which membership is known exactly.
    fn known_bound(&self) -> u64 {
        match self {
            Generator::Members { bound, .. } => *bound,
            _ => u64::MAX,
        }
    }
}

/// A subset of `N0` given as a union of a finite set, progressions and generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSpec {
    pub finite_part: BTreeSet<u64>,
    pub ap_parts: Vec<Progression>,
    pub generators: Vec<Generator>,
}

/// The rational part of a set in eventually periodic form: membership below
/// `threshold` is listed; from `threshold` on it repeats with `period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicForm {
    pub threshold: u64,
    pub prefix: Vec<bool>,
    pub period: u64,
    pub pattern: Vec<bool>,
}

impl PeriodicForm {
    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.prefix[n as usize]
        } else {
            self.pattern[((n - self.threshold) % self.period) as usize]
        }
    }

    pub fn density(&self) -> f64 {
        self.pattern.iter().filter(|&&b| b).count() as f64 / self.period as f64
    }

    pub fn is_empty_tail(&self) -> bool {
        self.pattern.iter().all(|b| !b)
    }
}

impl SetSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn naturals() -> Self {
        Self::progression(1, 0, 0)
    }

    pub fn progression(alpha: u64, beta: u64, nu: u64) -> Self {
        SetSpec { ap_parts: vec![Progression::new(alpha, beta, nu).expect("valid progression")], ..Self::default() }
    }

    pub fn finite(members: impl IntoIterator<Item = u64>) -> Self {
        SetSpec { finite_part: members.into_iter().collect(), ..Self::default() }
    }

    pub fn powers(base: u64) -> Self {
        SetSpec { generators: vec![Generator::Powers { base }], ..Self::default() }
    }

    pub fn union(mut self, other: SetSpec) -> Self {
        self.finite_part.extend(other.finite_part);
        self.ap_parts.extend(other.ap_parts);
        self.generators.extend(other.generators);
        self
    }

    /// True when the set is a finite set plus finitely many progressions.
    pub fn is_rational(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.finite_part.contains(&n)
            || self.ap_parts.iter().any(|ap| ap.contains(n))
            || self.generators.iter().any(|g| g.contains(n))
    }

    /// Exact membership is known on `[0, known_bound()]`.
    pub fn known_bound(&self) -> u64 {
        self.generators.iter().map(Generator::known_bound).min().unwrap_or(u64::MAX)
    }

    pub fn indicator(&self, limit: u64) -> Vec<bool> {
        (0..=limit).map(|n| self.contains(n)).collect()
    }

    pub fn periodic_form(&self) -> PeriodicForm {
        let period = self.ap_parts.iter().fold(1u64, |acc, ap| acc.lcm(&ap.alpha));
        let finite_end = self.finite_part.iter().next_back().map_or(0, |&m| m + 1);
        let ap_start = self.ap_parts.iter().map(Progression::first).max().unwrap_or(0);
        let threshold = finite_end.max(ap_start);
        let rational_contains = |n: u64| self.finite_part.contains(&n) || self.ap_parts.iter().any(|ap| ap.contains(n));
        PeriodicForm {
            threshold,
            prefix: (0..threshold).map(rational_contains).collect(),
            period,
            pattern: (threshold..threshold + period).map(rational_contains).collect(),
        }
    }

    /// Generator members up to `limit` that the rational part does not already contain.
    pub fn extra_members(&self, limit: u64) -> Result<Vec<u64>> {
        let form = self.periodic_form();
        let mut out = BTreeSet::new();
        for g in &self.generators {
            for m in g.members_upto(limit)? {
                if !form.contains(m) {
                    out.insert(m);
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Replaces `class:<id>` references by the members recorded in `census`.
    pub fn resolve_classes(&self, census: &OrbitCensus) -> Result<SetSpec> {
        let mut out = self.clone();
        for g in &mut out.generators {
            if let Generator::ClassRef { id } = *g {
                let class =
                    census.class(id).ok_or_else(|| HydraError::Lookup(format!("no census class with id {id}")))?;
                *g = Generator::Members {
                    label: format!("class:{id}"),
                    members: class.members.clone(),
                    bound: census.n,
                };
            }
        }
        Ok(out)
    }

    pub fn class_refs(&self) -> Vec<u64> {
        self.generators
            .iter()
            .filter_map(|g| match g {
                Generator::ClassRef { id } => Some(*id),
                _ => None,
            })
            .collect()
    }
}

fn parse_list(body: &str) -> Result<Vec<u64>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u64>().map_err(|_| HydraError::Parse(format!("bad integer {s:?}"))))
        .collect()
}

impl FromStr for SetSpec {
    type Err = HydraError;

    /// Mini-language: `finite:1,2,4`, `ap:3,0`, `ap:3,1,2`, `powers:2`,
    /// `class:<id>`, joined into unions by `;`.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = SetSpec::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (kind, body) =
                part.split_once(':').ok_or_else(|| HydraError::Parse(format!("set part {part:?} lacks a kind")))?;
            match kind.trim() {
                "finite" => spec.finite_part.extend(parse_list(body)?),
                "ap" => {
                    let v = parse_list(body)?;
                    let ap = match v.as_slice() {
                        [a, b] => Progression::new(*a, *b, 0)?,
                        [a, b, nu] => Progression::new(*a, *b, *nu)?,
                        _ => return Err(HydraError::Parse(format!("ap needs 2 or 3 integers: {part:?}"))),
                    };
                    spec.ap_parts.push(ap);
                }
                "powers" => match parse_list(body)?.as_slice() {
                    [d] if *d >= 2 => spec.generators.push(Generator::Powers { base: *d }),
                    _ => return Err(HydraError::Parse(format!("powers needs a base >= 2: {part:?}"))),
                },
                "class" | "census-class" => match parse_list(body)?.as_slice() {
                    [id] => spec.generators.push(Generator::ClassRef { id: *id }),
                    _ => return Err(HydraError::Parse(format!("class needs one id: {part:?}"))),
                },
                other => return Err(HydraError::Parse(format!("unknown set kind {other:?}"))),
            }
        }
        if spec.finite_part.is_empty() && spec.ap_parts.is_empty() && spec.generators.is_empty() {
            return Err(HydraError::Parse("empty set description".into()));
        }
        Ok(spec)
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.finite_part.is_empty() {
            let list: Vec<String> = self.finite_part.iter().map(u64::to_string).collect();
            parts.push(format!("finite:{}", list.join(",")));
        }
        for ap in &self.ap_parts {
            if ap.nu == 0 {
                parts.push(format!("ap:{},{}", ap.alpha, ap.beta));
            } else {
                parts.push(format!("ap:{},{},{}", ap.alpha, ap.beta, ap.nu));
            }
        }
        for g in &self.generators {
            parts.push(match g {
                Generator::Powers { base } => format!("powers:{base}"),
                Generator::ClassRef { id } => format!("class:{id}"),
                Generator::Members { label, .. } => label.clone(),
            });
        }
        write!(f, "{}", parts.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_mini_language() {
        let s: SetSpec = "finite:1,2,4;ap:3,1,2;powers:2".parse().unwrap();
        assert!(s.contains(1) && s.contains(4) && s.contains(7) && s.contains(1024));
        assert!(!s.contains(3) && !s.contains(5));
        assert!(s.contains(2));
        assert_eq!(s.to_string(), "finite:1,2,4;ap:3,1,2;powers:2");
        assert!("ap:3,3".parse::<SetSpec>().is_err());
        assert!("bogus:1".parse::<SetSpec>().is_err());
        assert!("".parse::<SetSpec>().is_err());
        assert_eq!("class:7".parse::<SetSpec>().unwrap().class_refs(), vec![7]);
    }

    #[test]
    fn periodic_form_matches_membership() {
        let s: SetSpec = "finite:1,20;ap:4,1,3;ap:6,0".parse().unwrap();
        let form = s.periodic_form();
        assert_eq!(form.period, 12);
        for n in 0..500 {
            assert_eq!(form.contains(n), s.contains(n), "n = {n}");
        }
    }

    #[test]
    fn extra_members_skip_overlap() {
        let s: SetSpec = "ap:2,0;powers:2".parse().unwrap();
        assert_eq!(s.extra_members(1000).unwrap(), vec![1]);
    }
}
