//! Exact arithmetic in the universal cyclotomic field.
//!
//! An element of `Q(zeta_n)` is stored by its coordinates in a fixed rational
//! basis of roots of unity. For `n = prod p^k`, write the exponent of
//! `zeta_n^e` through CRT as a tuple of exponents modulo each `p^k`; the digit
//! at place `p^(k-1)` of each component selects one of `p` roots sharing the
//! relation `sum_y zeta_{p^k}^(x + y p^(k-1)) = 0`. The basis drops digit `0`
//! for odd `p` and digit `1` for `p = 2`. With every element reduced to this
//! basis at its minimal conductor, equality and zero-testing are structural.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::padic::factorize;
use super::rat::{format_rat, parse_rat, Rat, RatMod1};
use crate::error::{HydraError, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    conductor: u64,
    coords: BTreeMap<u64, Rat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycloOp {
    Add,
    Sub,
    Mul,
}

struct PrimePart {
    p: u64,
    pk: u64,
    place: u64,
    unit: u64,
    step: u64,
    excluded: u64,
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let g = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(m as i128) as u64
}

fn prime_parts(n: u64) -> Vec<PrimePart> {
    factorize(n)
        .into_iter()
        .map(|(p, k)| {
            let pk = p.pow(k);
            PrimePart {
                p,
                pk,
                place: pk / p,
                unit: mod_inverse((n / pk) % pk, pk),
                step: n / p,
                excluded: if p == 2 { 1 } else { 0 },
            }
        })
        .collect()
}

impl PrimePart {
    fn digit(&self, e: u64) -> u64 {
        ((e % self.pk) * self.unit % self.pk) / self.place
    }
}

/// True when `zeta_n^e` belongs to the canonical basis of `Q(zeta_n)`.
pub fn is_basis_exponent(n: u64, e: u64) -> bool {
    prime_parts(n).iter().all(|part| part.digit(e) != part.excluded)
}

/// Canonical basis exponents of `Q(zeta_n)`, increasing. Its length is `phi(n)`.
pub fn basis_exponents(n: u64) -> Vec<u64> {
    let parts = prime_parts(n);
    (0..n).filter(|&e| parts.iter().all(|part| part.digit(e) != part.excluded)).collect()
}

/// Rewrites a dense coordinate vector over all `n` powers of `zeta_n` into the basis.
fn reduce_dense(n: u64, v: &mut [Rat]) {
    for part in prime_parts(n) {
        for e in 0..n {
            if part.digit(e) != part.excluded || v[e as usize].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut v[e as usize], Rat::zero());
            for delta in 1..part.p {
                let idx = ((e + delta * part.step) % n) as usize;
                v[idx] -= &c;
            }
        }
    }
}

/// Shrinks the conductor while the element lies in a smaller cyclotomic field.
fn minimize(mut n: u64, mut v: Vec<Rat>) -> (u64, Vec<Rat>) {
    'outer: loop {
        if n == 1 {
            break;
        }
        for (p, k) in factorize(n) {
            let m = n / p;
            if k >= 2 || p == 2 {
                let fits = v.iter().enumerate().all(|(e, c)| c.is_zero() || (e as u64).is_multiple_of(p));
                if fits {
                    let mut w = vec![Rat::zero(); m as usize];
                    for (e, c) in v.into_iter().enumerate() {
                        if !c.is_zero() {
                            w[e / p as usize] = c;
                        }
                    }
                    n = m;
                    v = w;
                    reduce_dense(n, &mut v);
                    continue 'outer;
                }
            } else {
                // p exactly divides n: each subfield root zeta_n^(p e') expands to
                // minus the p-1 basis roots of its group, all with equal weight.
                let step = m;
                let mut w = vec![Rat::zero(); m as usize];
                let mut fits = true;
                for e in (0..n).step_by(p as usize) {
                    let first = &v[((e + step) % n) as usize];
                    if (2..p).any(|d| &v[((e + d * step) % n) as usize] != first) {
                        fits = false;
                        break;
                    }
                    w[(e / p) as usize] = -first.clone();
                }
                if fits {
                    n = m;
                    v = w;
                    reduce_dense(n, &mut v);
                    continue 'outer;
                }
            }
        }
        break;
    }
    (n, v)
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo { conductor: 1, coords: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(q: Rat) -> Self {
        let mut coords = BTreeMap::new();
        if !q.is_zero() {
            coords.insert(0, q);
        }
        Cyclo { conductor: 1, coords }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(n.into()))
    }

    /// `zeta_n^k = e^(2 pi i k / n)`.
    pub fn zeta(n: u64, k: i64) -> Self {
        assert!(n >= 1, "conductor must be positive");
        let e = k.rem_euclid(n as i64) as usize;
        let mut v = vec![Rat::zero(); n as usize];
        v[e] = Rat::one();
        Self::from_dense(n, v)
    }

    /// `e^(2 pi i r)` for a class `r` of Q/Z.
    pub fn from_exponent(r: &RatMod1) -> Self {
        Self::zeta(r.denom_u64(), r.numer_u64() as i64)
    }

    fn from_dense(n: u64, mut v: Vec<Rat>) -> Self {
        reduce_dense(n, &mut v);
        let (n, v) = minimize(n, v);
        let coords: BTreeMap<u64, Rat> =
            v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e as u64, c)).collect();
        if coords.is_empty() {
            return Self::zero();
        }
        Cyclo { conductor: n, coords }
    }

    /// Builds an element from arbitrary (not necessarily basis) powers of `zeta_n`.
    pub fn from_terms(n: u64, terms: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut v = vec![Rat::zero(); n as usize];
        for (k, q) in terms {
            v[k.rem_euclid(n as i64) as usize] += q;
        }
        Self::from_dense(n, v)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coords(&self) -> &BTreeMap<u64, Rat> {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rat> {
        match (self.conductor, self.coords.len()) {
            (_, 0) => Some(Rat::zero()),
            (1, 1) => self.coords.get(&0).cloned(),
            _ => None,
        }
    }

    /// Dense coordinates over all `n` powers of `zeta_n`, in the basis of `Q(zeta_n)`.
    /// `n` must be a multiple of the conductor.
    pub fn dense_in(&self, n: u64) -> Vec<Rat> {
        assert!(n.is_multiple_of(self.conductor), "{} does not divide {}", self.conductor, n);
        let scale = n / self.conductor;
        let mut v = vec![Rat::zero(); n as usize];
        for (k, q) in &self.coords {
            v[(k * scale) as usize] = q.clone();
        }
        reduce_dense(n, &mut v);
        v
    }

    pub fn add(&self, rhs: &Cyclo) -> Cyclo {
        let n = self.conductor.lcm(&rhs.conductor);
        let mut v = self.dense_in(n);
        for (a, b) in v.iter_mut().zip(rhs.dense_in(n)) {
            *a += b;
        }
        Self::from_dense(n, v)
    }

    pub fn sub(&self, rhs: &Cyclo) -> Cyclo {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { conductor: self.conductor, coords: self.coords.iter().map(|(k, q)| (*k, -q)).collect() }
    }

    pub fn mul(&self, rhs: &Cyclo) -> Cyclo {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if let Some(q) = rhs.as_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(&q);
        }
        let n = self.conductor.lcm(&rhs.conductor);
        let a = self.dense_in(n);
        let b = rhs.dense_in(n);
        let nz_b: Vec<(usize, &Rat)> = b.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let mut w = vec![Rat::zero(); n as usize];
        for (i, x) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for &(j, y) in &nz_b {
                w[(i + j) % n as usize] += x * y;
            }
        }
        Self::from_dense(n, w)
    }

    pub fn apply(&self, rhs: &Cyclo, op: CycloOp) -> Cyclo {
        match op {
            CycloOp::Add => self.add(rhs),
            CycloOp::Sub => self.sub(rhs),
            CycloOp::Mul => self.mul(rhs),
        }
    }

    pub fn scale(&self, q: &Rat) -> Cyclo {
        if q.is_zero() {
            return Self::zero();
        }
        Cyclo { conductor: self.conductor, coords: self.coords.iter().map(|(k, c)| (*k, c * q)).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Cyclo {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Complex conjugate (the Galois automorphism `zeta -> zeta^-1`).
    pub fn conj(&self) -> Cyclo {
        let n = self.conductor;
        Self::from_terms(n, self.coords.iter().map(|(k, q)| (-(*k as i64), q.clone())))
    }

    /// Image under the automorphism `zeta_n -> zeta_n^k`, `gcd(k, n) = 1`.
    pub fn galois(&self, k: u64) -> Result<Cyclo> {
        let n = self.conductor;
        if k.gcd(&n) != 1 {
            return Err(HydraError::Domain(format!("{k} is not a unit mod {n}")));
        }
        Ok(Self::from_terms(n, self.coords.iter().map(|(e, q)| (((e * k) % n) as i64, q.clone()))))
    }

    /// Multiplicative inverse through the product of the other Galois conjugates.
    pub fn inverse(&self) -> Result<Cyclo> {
        if self.is_zero() {
            return Err(HydraError::Domain("zero has no inverse".into()));
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rat(q.recip()));
        }
        let n = self.conductor;
        let mut others = Self::one();
        for k in (2..n).filter(|k| k.gcd(&n) == 1) {
            others = others.mul(&self.galois(k)?);
        }
        let norm = self.mul(&others).as_rational().expect("field norm is rational");
        Ok(others.scale(&norm.recip()))
    }

    pub fn approx(&self) -> Complex64 {
        let n = self.conductor as f64;
        self.coords
            .iter()
            .map(|(k, q)| {
                let theta = std::f64::consts::TAU * (*k as f64) / n;
                Complex64::from_polar(q.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }
}

pub fn cyclo_is_zero(c: &Cyclo) -> bool {
    c.is_zero()
}

impl Default for Cyclo {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> =
            self.coords.iter().map(|(k, q)| format!("{}*E({},{})", format_rat(q), self.conductor, k)).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"E(n,k)"`.
pub fn parse_root(s: &str) -> Result<(u64, i64)> {
    let inner = s
        .trim()
        .strip_prefix("E(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| HydraError::Parse(format!("bad root {s:?}")))?;
    let (n, k) = inner.split_once(',').ok_or_else(|| HydraError::Parse(format!("bad root {s:?}")))?;
    let n: u64 = n.trim().parse().map_err(|_| HydraError::Parse(format!("bad root {s:?}")))?;
    let k: i64 = k.trim().parse().map_err(|_| HydraError::Parse(format!("bad root {s:?}")))?;
    if n == 0 {
        return Err(HydraError::Parse(format!("zero conductor in {s:?}")));
    }
    Ok((n, k))
}

impl FromStr for Cyclo {
    type Err = HydraError;

    /// Accepts the report form `q*E(n,k) + q*E(n,k) ...`, or `0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Cyclo::zero());
        }
        let mut acc = Cyclo::zero();
        for term in s.split(" + ") {
            let (q, root) = term.split_once('*').ok_or_else(|| HydraError::Parse(format!("bad term {term:?}")))?;
            let (n, k) = parse_root(root)?;
            acc = acc.add(&Cyclo::zeta(n, k).scale(&parse_rat(q)?));
        }
        Ok(acc)
    }
}

/// Pairs `(rational, "E(n,k)")` used by the JSON exchange format.
pub fn to_pairs(c: &Cyclo) -> Vec<(String, String)> {
    c.coords.iter().map(|(k, q)| (format_rat(q), format!("E({},{})", c.conductor, k))).collect()
}

pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Cyclo> {
    let mut acc = Cyclo::zero();
    for (q, root) in pairs {
        let (n, k) = parse_root(root.as_ref())?;
        acc = acc.add(&Cyclo::zeta(n, k).scale(&parse_rat(q.as_ref())?));
    }
    Ok(acc)
}

impl serde::Serialize for Cyclo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_pairs(self).serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Cyclo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(String, String)>::deserialize(d)?;
        from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// Sum of `|q|` over coordinates; used for floating error bounds.
pub fn coord_l1(c: &Cyclo) -> f64 {
    c.coords.values().map(|q| q.abs().to_f64().unwrap_or(f64::INFINITY)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    fn z(n: u64, k: i64) -> Cyclo {
        Cyclo::zeta(n, k)
    }

    #[test]
    fn inverses() {
        let c = z(5, 1).add(&Cyclo::from_int(2)).add(&z(15, 4).scale(&rat(1, 3)));
        assert_eq!(c.mul(&c.inverse().unwrap()), Cyclo::one());
        assert_eq!(Cyclo::from_int(4).inverse().unwrap(), Cyclo::from_rat(rat(1, 4)));
        assert!(Cyclo::zero().inverse().is_err());
        assert_eq!(z(7, 2).galois(3).unwrap(), z(7, 6));
    }

    #[test]
    fn roots_from_exponents() {
        assert_eq!(Cyclo::from_exponent(&RatMod1::zero()), Cyclo::one());
        assert_eq!(Cyclo::from_exponent(&RatMod1::new(1, 2).unwrap()), Cyclo::from_int(-1));
        let sixth = Cyclo::from_exponent(&RatMod1::new(1, 6).unwrap());
        assert_eq!(sixth, z(3, 2).neg());
        assert_eq!(sixth.conductor(), 3);
    }

    #[test]
    fn basic_identities() {
        let s = Cyclo::one().add(&z(3, 1)).add(&z(3, 2));
        assert!(s.is_zero());
        assert_eq!(z(8, 1).mul(&z(8, 1)), z(4, 1));
        let lhs = Cyclo::one().add(&z(5, 1)).mul(&Cyclo::one().add(&z(5, -1)));
        let rhs = Cyclo::from_int(2).add(&z(5, 1)).add(&z(5, 4));
        assert_eq!(lhs, rhs);
        assert!((lhs.approx() - rhs.approx()).norm() < 1e-12);
        let expected = 2.0 + 2.0 * (std::f64::consts::TAU / 5.0).cos();
        assert!((lhs.approx().re - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_tests() {
        let full = Cyclo::from_terms(7, (0..7).map(|k| (k, Rat::one())));
        assert!(full.is_zero());
        assert!(z(3, 1).sub(&z(3, 1)).is_zero());
        let c = Cyclo::one().add(&z(5, 1));
        assert!(!c.is_zero());
        assert!((c.approx().norm() - 1.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn approximations() {
        assert_eq!(Cyclo::from_int(-1).approx(), Complex64::new(-1.0, 0.0));
        let i = z(4, 1).approx();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let zero = Cyclo::one().add(&z(3, 1)).add(&z(3, 2)).approx();
        assert!(zero.norm() < 1e-15);
    }

    #[test]
    fn minimal_conductor() {
        // zeta_12^3 = i
        assert_eq!(z(12, 3), z(4, 1));
        // sqrt(-3) = zeta_3 - zeta_3^2 lives in conductor 3 even when built at 12
        let s = Cyclo::from_terms(12, [(4, Rat::one()), (8, -Rat::one())]);
        assert_eq!(s.conductor(), 3);
        // zeta_5 + zeta_5^4 is real but still needs conductor 5
        assert_eq!(z(5, 1).add(&z(5, 4)).conductor(), 5);
        // products of conjugates collapse to Q
        let norm = z(7, 2).mul(&z(7, 2).conj());
        assert_eq!(norm, Cyclo::one());
    }

    #[test]
    fn basis_sizes_are_totients() {
        for (n, phi) in [(1, 1), (2, 1), (3, 2), (4, 2), (8, 4), (9, 6), (12, 4), (15, 8), (60, 16), (315, 144)] {
            assert_eq!(basis_exponents(n).len(), phi, "n = {n}");
        }
    }

    #[test]
    fn text_round_trip() {
        let c = z(5, 1).scale(&rat(-1, 2)).add(&z(15, 4));
        let parsed: Cyclo = c.to_string().parse().unwrap();
        assert_eq!(parsed, c);
        assert_eq!(from_pairs(&to_pairs(&c)).unwrap(), c);
        assert_eq!("0".parse::<Cyclo>().unwrap(), Cyclo::zero());
    }
}
