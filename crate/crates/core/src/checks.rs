//! Seeded invariant suites over the exact, series and dreamcatcher layers.
//! Each check reports how many cases it ran and the first failure, if any.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dreamcatcher::{qh_apply, qh_apply_basis, qh_check_profinite, QZFunction};
use crate::error::{HydraError, Result};
use crate::exact::{padic_abs, rat, Cyclo, Rat, RatMod1};
use crate::hydra::{catalog, HydraMap};
use crate::series::{
    default_schedule, exact_residue, hltt_cross_check, permutation_op, virtual_residue, Multisection, SetSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Cyclo,
    Padic,
    Multisection,
    Permutation,
    Profinite,
    Dreamcatcher,
    Residue,
}

impl FromStr for Suite {
    type Err = HydraError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "cyclo" => Suite::Cyclo,
            "padic" => Suite::Padic,
            "multisection" => Suite::Multisection,
            "permutation" => Suite::Permutation,
            "profinite" => Suite::Profinite,
            "dreamcatcher" => Suite::Dreamcatcher,
            "residue" => Suite::Residue,
            _ => return Err(HydraError::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: u64,
    pub passed: bool,
    pub worst: f64,
    pub failure: Option<String>,
}

struct Tally {
    name: &'static str,
    cases: u64,
    worst: f64,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, worst: 0.0, failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn error(&mut self, err: f64, tol: f64, what: impl FnOnce() -> String) {
        self.worst = self.worst.max(err);
        self.check(err <= tol, what);
    }

    fn done(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name.into(),
            cases: self.cases,
            passed: self.failure.is_none(),
            worst: self.worst,
            failure: self.failure,
        }
    }
}

pub const BUILTIN_MAPS: &[&str] = &["H3", "H5", "H7", "T+1", "T-1"];
pub const PRIME_MAPS: &[&str] = &["H3", "H5", "T+1"];

fn random_rat(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

pub fn random_cyclo(rng: &mut ChaCha8Rng) -> Cyclo {
    const CONDUCTORS: &[u64] = &[1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 16, 20, 21, 24];
    let n = CONDUCTORS[rng.gen_range(0..CONDUCTORS.len())];
    let terms: Vec<(i64, Rat)> =
        (0..rng.gen_range(1..=4)).map(|_| (rng.gen_range(0..n as i64), random_rat(rng, 9, 7))).collect();
    Cyclo::from_terms(n, terms)
}

fn random_class(rng: &mut ChaCha8Rng, max_den: i64) -> RatMod1 {
    let d = rng.gen_range(1..=max_den);
    RatMod1::new(rng.gen_range(0..d), d).expect("positive denominator")
}

pub fn check_cyclo(rng: &mut ChaCha8Rng, cases: usize) -> CheckOutcome {
    const TOL: f64 = 1e-10;
    let mut t = Tally::new("cyclo canonicalization and homomorphism");
    for _ in 0..cases {
        let a = random_cyclo(rng);
        let b = random_cyclo(rng);
        let terms = a.coords().iter().map(|(k, q)| (*k as i64, q.clone()));
        let again = Cyclo::from_terms(a.conductor(), terms);
        t.check(again == a, || format!("re-canonicalizing {a} changed it"));
        t.check(a.to_string().parse::<Cyclo>().ok() == Some(a.clone()), || format!("text round trip of {a}"));
        let sum = a.add(&b).approx() - (a.approx() + b.approx());
        let prod = a.mul(&b).approx() - a.approx() * b.approx();
        t.error(sum.norm().max(prod.norm()), TOL, || format!("{a} and {b}"));
        t.check(a.sub(&a).is_zero(), || format!("{a} - {a} != 0"));
        t.check(a.mul(&b) == b.mul(&a), || format!("{a} * {b} not commutative"));
    }
    t.done()
}

pub fn check_padic(rng: &mut ChaCha8Rng, cases: usize) -> CheckOutcome {
    let mut t = Tally::new("p-adic strong triangle and multiplicativity");
    for _ in 0..cases {
        let p = [2u64, 3, 5, 7, 11][rng.gen_range(0..5)];
        let x = random_rat(rng, 10_000, 10_000);
        let y = random_rat(rng, 10_000, 10_000);
        let abs = |r: &Rat| padic_abs(r, p).expect("prime");
        let (ax, ay) = (abs(&x), abs(&y));
        let max = if ax > ay { ax.clone() } else { ay.clone() };
        t.check(abs(&(&x + &y)) <= max, || format!("|{x} + {y}|_{p}"));
        t.check(abs(&(&x * &y)) == &ax * &ay, || format!("|{x} * {y}|_{p}"));
    }
    t.done()
}

fn poly(coeffs: &[u8], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
}

pub fn check_multisection(rng: &mut ChaCha8Rng, cases: usize) -> CheckOutcome {
    const TOL: f64 = 1e-12;
    let mut t = Tally::new("multisection partition and automorphy");
    for _ in 0..cases {
        let coeffs: Vec<u8> = (0..64).map(|_| rng.gen_range(0..2)).collect();
        let z = Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..std::f64::consts::TAU));
        let f = |w: Complex64| poly(&coeffs, w);
        for a in 1..=6u64 {
            let xi = Complex64::from_polar(1.0, std::f64::consts::TAU / a as f64);
            let mut total = Complex64::new(0.0, 0.0);
            for b in 0..a {
                let m = Multisection::new(a, b).expect("b < a");
                let here = m.ordinary(f, z);
                total += here;
                let rotated = m.ordinary(f, xi * z);
                let direct = poly(&m.stream(&coeffs), z);
                t.error((rotated - xi.powu(b as u32) * here).norm(), TOL, || format!("automorphy a={a} b={b}"));
                t.error((here - direct).norm(), TOL, || format!("stream vs evaluator a={a} b={b}"));
            }
            t.error((total - f(z)).norm(), TOL, || format!("partition a={a}"));
        }
    }
    t.done()
}

pub fn check_permutation(rng: &mut ChaCha8Rng, maps: &[&str], limit: u64) -> Result<CheckOutcome> {
    let mut t = Tally::new("permutation operator equals preimage indicator");
    for name in maps {
        let map = catalog(name)?;
        let top = (0..=limit).map(|n| map.apply(n)).max().unwrap_or(0) as usize;
        let ind: Vec<bool> = (0..=top).map(|_| rng.gen_bool(0.3)).collect();
        let permuted = permutation_op(&map, &ind, limit as usize + 1)?;
        let mut expected = vec![false; limit as usize + 1];
        for v in (0..=top as u64).filter(|&v| ind[v as usize]) {
            for p in map.preimages(v).into_iter().filter(|&p| p <= limit) {
                expected[p as usize] = true;
            }
        }
        for n in 0..=limit as usize {
            t.check(permuted[n] == expected[n], || format!("{name} at {n}"));
        }
    }
    Ok(t.done())
}

pub fn check_profinite(rng: &mut ChaCha8Rng, maps: &[&str], cases: usize) -> Result<CheckOutcome> {
    let mut t = Tally::new("profinite basis formula consistency");
    for name in maps {
        let map = catalog(name)?;
        for _ in 0..cases {
            let x = random_class(rng, 30);
            let n = rng.gen_range(0..=1000);
            let c = qh_check_profinite(&map, &x, n)?;
            t.check(c.equal, || format!("{name} t={x} n={n}: {} vs {}", c.lhs, c.rhs));
        }
    }
    Ok(t.done())
}

fn random_function(rng: &mut ChaCha8Rng) -> QZFunction {
    (0..rng.gen_range(0..4)).map(|_| (random_class(rng, 12), random_cyclo(rng))).collect()
}

pub fn check_dreamcatcher(rng: &mut ChaCha8Rng, maps: &[&str], cases: usize) -> Result<CheckOutcome> {
    let mut t = Tally::new("dreamcatcher fixed point at 0, linearity, periodicity");
    for name in maps {
        let map: HydraMap = catalog(name)?;
        let zero = QZFunction::indicator(RatMod1::zero());
        t.check(qh_apply(&map, &zero)? == zero, || format!("{name}: 1_0 not fixed"));
        for _ in 0..cases {
            let f = random_function(rng);
            let g = random_function(rng);
            let (a, b) = (random_cyclo(rng), random_cyclo(rng));
            let lhs = qh_apply(&map, &f.scale(&a).add(&g.scale(&b)))?;
            let rhs = qh_apply(&map, &f)?.scale(&a).add(&qh_apply(&map, &g)?.scale(&b));
            t.check(lhs == rhs, || format!("{name}: linearity"));
            let x = random_class(rng, 20);
            let shifted = RatMod1::from_rat(&(x.value() + rat(1, 1)));
            t.check(qh_apply_basis(&map, &x)? == qh_apply_basis(&map, &shifted)?, || format!("{name}: period at {x}"));
        }
    }
    Ok(t.done())
}

/// Sampled virtual residues against exact cross-section sums for progressions with `alpha <= 6`.
pub fn check_residue(n: u64) -> Result<CheckOutcome> {
    const TOL: f64 = 3e-3;
    let mut t = Tally::new("virtual residue vs cross-section sum");
    let ys = default_schedule();
    for alpha in 1..=6u64 {
        for beta in 0..alpha {
            let set = SetSpec::progression(alpha, beta, 0);
            for q in 1..=6i64 {
                for p in (0..q).filter(|&p| num_integer::gcd(p, q) == 1) {
                    let x = RatMod1::new(p, q)?;
                    let sampled = virtual_residue(&set, &x, &ys)?.value;
                    let counted = hltt_cross_check(&set, &x, n)?.value;
                    let exact = exact_residue(&set, &x)?.approx() / std::f64::consts::TAU;
                    t.error((sampled - counted).norm(), TOL, || format!("ap:{alpha},{beta} at {x}"));
                    t.error((counted - exact).norm(), TOL, || format!("ap:{alpha},{beta} at {x} (exact)"));
                }
            }
        }
    }
    Ok(t.done())
}

pub fn run_suite(suite: Suite, seed: u64, maps: Option<&[&str]>) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = maps.unwrap_or(BUILTIN_MAPS);
    let prime: Vec<&str> = match maps {
        Some(m) => m.to_vec(),
        None => PRIME_MAPS.to_vec(),
    };
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut out = Vec::new();
    if want(Suite::Cyclo) {
        out.push(check_cyclo(&mut rng, 500));
    }
    if want(Suite::Padic) {
        out.push(check_padic(&mut rng, 1000));
    }
    if want(Suite::Multisection) {
        out.push(check_multisection(&mut rng, 50));
    }
    if want(Suite::Permutation) {
        out.push(check_permutation(&mut rng, all, 10_000)?);
    }
    if want(Suite::Profinite) {
        out.push(check_profinite(&mut rng, &prime, 100)?);
    }
    if want(Suite::Dreamcatcher) {
        out.push(check_dreamcatcher(&mut rng, &prime, 20)?);
    }
    if want(Suite::Residue) {
        out.push(check_residue(60_000)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for o in [
            check_cyclo(&mut rng, 40),
            check_padic(&mut rng, 100),
            check_multisection(&mut rng, 5),
            check_permutation(&mut rng, &["H3", "T-1"], 500).unwrap(),
            check_profinite(&mut rng, &["H3"], 20).unwrap(),
            check_dreamcatcher(&mut rng, &["H3"], 3).unwrap(),
        ] {
            assert!(o.passed, "{o:?}");
            assert!(o.cases > 0);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
