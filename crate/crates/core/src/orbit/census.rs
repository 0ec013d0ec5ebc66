use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::{iterate_orbit, Verdict};
use super::union_find::UnionFind;
use crate::error::{HydraError, Result};
use crate::hydra::HydraMap;

pub const CACHE_ENV: &str = "HYDRA_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".hydra-cache";

const OUT_OF_RANGE: u32 = u32::MAX;
const CHUNK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusParams {
    pub n: u64,
    pub max_steps: usize,
    pub max_value: u64,
}

impl CensusParams {
    /// Working domain defaults to `64 N`.
    pub fn new(n: u64) -> Self {
        CensusParams { n, max_steps: 10_000, max_value: 64 * n.max(1) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub id: u64,
    pub size: u64,
    pub members: Vec<u64>,
    pub cycle: Option<Vec<u64>>,
    pub diverging: bool,
    pub truncated: bool,
}

/// Orbit classes of `{0, ..., N}` as seen inside the working domain `[0, max_value]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCensus {
    pub n: u64,
    pub max_steps: usize,
    pub max_value: u64,
    pub map_digest: String,
    pub class_of: Vec<u64>,
    pub classes: Vec<ClassSummary>,
    pub truncation_note: String,
}

impl OrbitCensus {
    pub fn class(&self, id: u64) -> Option<&ClassSummary> {
        self.classes.binary_search_by_key(&id, |c| c.id).ok().map(|i| &self.classes[i])
    }

    pub fn class_of(&self, n: u64) -> Option<u64> {
        self.class_of.get(n as usize).copied()
    }

    pub fn same_class(&self, a: u64, b: u64) -> bool {
        matches!((self.class_of(a), self.class_of(b)), (Some(x), Some(y)) if x == y)
    }

    fn from_classes(map_digest: String, params: CensusParams, classes: Vec<ClassSummary>) -> Self {
        let mut class_of = vec![0u64; params.n as usize + 1];
        for class in &classes {
            for &m in &class.members {
                class_of[m as usize] = class.id;
            }
        }
        let touched = classes.iter().filter(|c| c.truncated).count();
        let truncation_note = format!(
            "classes relative to bound: union-find domain [0, {}]; {} of {} classes have members whose image leaves it",
            params.max_value,
            touched,
            classes.len()
        );
        OrbitCensus {
            n: params.n,
            max_steps: params.max_steps,
            max_value: params.max_value,
            map_digest,
            class_of,
            classes,
            truncation_note,
        }
    }
}

/// Merges `n` with `H(n)` for every `n` in `[0, max_value]` and reports the
/// induced partition of `{0, ..., N}`. Images are computed by `threads` workers
/// over disjoint chunks; the merge runs in index order, so the result does not
/// depend on the thread count.
pub fn census(map: &HydraMap, params: CensusParams, threads: usize) -> Result<OrbitCensus> {
    if params.n < 1 {
        return Err(HydraError::Domain("census needs N >= 1".into()));
    }
    if params.max_value < params.n {
        return Err(HydraError::Domain("max_value must be at least N".into()));
    }
    if params.max_value >= OUT_OF_RANGE as u64 {
        return Err(HydraError::Resource(format!("domain bound {} too large", params.max_value)));
    }
    let domain = params.max_value as usize + 1;
    let image_of = |n: usize| match map.checked_apply(n as u64) {
        Some(v) if v <= params.max_value => v as u32,
        _ => OUT_OF_RANGE,
    };
    let mut images = vec![0u32; domain];
    if threads <= 1 {
        images.iter_mut().enumerate().for_each(|(n, slot)| *slot = image_of(n));
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HydraError::Resource(e.to_string()))?;
        pool.install(|| {
            images.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = image_of(c * CHUNK + i);
                }
            })
        });
    }

    let mut uf = UnionFind::new(domain);
    for (n, &m) in images.iter().enumerate() {
        if m != OUT_OF_RANGE {
            uf.union(n as u32, m);
        }
    }
    let labels = uf.min_labels();

    let mut truncated_label = BTreeMap::new();
    for (n, &m) in images.iter().enumerate() {
        if m == OUT_OF_RANGE {
            truncated_label.insert(labels[n], true);
        }
    }

    let mut members: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for (n, &label) in labels.iter().enumerate().take(params.n as usize + 1) {
        members.entry(label).or_default().push(n as u64);
    }
    let classes = members
        .into_iter()
        .map(|(id, members)| {
            let traj = iterate_orbit(map, id as u64, params.max_steps, params.max_value);
            let (cycle, diverging) = match &traj.verdict {
                Verdict::EnteredCycle { cycle, .. } => (Some(cycle.clone()), false),
                Verdict::ExceededBound { monotone_growth, .. } => (None, *monotone_growth),
                Verdict::ExceededSteps => (None, false),
            };
            ClassSummary {
                id: id as u64,
                size: members.len() as u64,
                members,
                cycle,
                diverging,
                truncated: truncated_label.contains_key(&id),
            }
        })
        .collect();
    Ok(OrbitCensus::from_classes(map.digest(), params, classes))
}

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

pub fn cache_file(dir: &Path, digest: &str, params: CensusParams) -> PathBuf {
    dir.join(format!(
        "census-{}-N{}-V{}-S{}.jsonl",
        &digest[..16.min(digest.len())],
        params.n,
        params.max_value,
        params.max_steps
    ))
}

pub fn write_cache(path: &Path, census: &OrbitCensus) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("jsonl.tmp");
    let mut out = std::io::BufWriter::new(fs::File::create(&tmp)?);
    for class in &census.classes {
        serde_json::to_writer(&mut out, class)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    drop(out);
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_cache(path: &Path, digest: &str, params: CensusParams) -> Result<OrbitCensus> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut classes = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            classes.push(serde_json::from_str::<ClassSummary>(&line)?);
        }
    }
    let covered: u64 = classes.iter().map(|c| c.size).sum();
    if covered != params.n + 1 {
        return Err(HydraError::Parse(format!("cache {} covers {covered} points", path.display())));
    }
    Ok(OrbitCensus::from_classes(digest.to_string(), params, classes))
}

/// Cached census: returns the census and whether it came from the cache.
pub fn census_cached(map: &HydraMap, params: CensusParams, threads: usize, dir: &Path) -> Result<(OrbitCensus, bool)> {
    let digest = map.digest();
    let path = cache_file(dir, &digest, params);
    if path.is_file() {
        if let Ok(hit) = read_cache(&path, &digest, params) {
            return Ok((hit, true));
        }
    }
    let fresh = census(map, params, threads)?;
    write_cache(&path, &fresh)?;
    Ok((fresh, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydra::catalog;

    #[test]
    fn matthews_negative_classes() {
        let tm = catalog("T-1").unwrap();
        let c = census(&tm, CensusParams::new(100), 1).unwrap();
        assert!(c.same_class(10, 2));
        for k in 1..=4 {
            assert!(c.same_class(3u64.pow(k) + 1, 2));
        }
        assert_eq!(c.class(0).unwrap().size, 1);
        assert_eq!(c.class(0).unwrap().cycle, Some(vec![0]));
        let total: u64 = c.classes.iter().map(|k| k.size).sum();
        assert_eq!(total, 101);
    }

    #[test]
    fn collatz_small() {
        let c = census(&catalog("H3").unwrap(), CensusParams::new(20), 1).unwrap();
        assert!(c.same_class(1, 20));
        assert_eq!(c.class(1).unwrap().cycle, Some(vec![1, 2]));
        let ten = census(&catalog("T-1").unwrap(), CensusParams::new(10), 1).unwrap();
        assert_eq!(ten.class(0).unwrap().members, vec![0]);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let map = catalog("T+1").unwrap();
        let params = CensusParams { n: 5_000, max_steps: 500, max_value: 200_000 };
        let one = census(&map, params, 1).unwrap();
        let four = census(&map, params, 4).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let map = catalog("H3").unwrap();
        let params = CensusParams::new(300);
        let (cold, hit) = census_cached(&map, params, 1, dir.path()).unwrap();
        assert!(!hit);
        let (warm, hit) = census_cached(&map, params, 1, dir.path()).unwrap();
        assert!(hit);
        assert_eq!(serde_json::to_string(&cold).unwrap(), serde_json::to_string(&warm).unwrap());
    }

    #[test]
    fn bad_params() {
        let map = catalog("H3").unwrap();
        assert!(census(&map, CensusParams { n: 0, max_steps: 1, max_value: 1 }, 1).is_err());
        assert!(census(&map, CensusParams { n: 10, max_steps: 1, max_value: 5 }, 1).is_err());
    }
}
