use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use super::rat::Rat;
use crate::error::{HydraError, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation as `(p, exponent)` pairs in increasing order of `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn valuation_int(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)`; `None` for `x = 0`.
pub fn valuation(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(valuation_int(x.numer(), p) - valuation_int(x.denom(), p))
}

/// `|x|_p = p^(-v_p(x))`, with `|0|_p = 0`.
pub fn padic_abs(x: &Rat, p: u64) -> Result<Rat> {
    if !is_prime(p) {
        return Err(HydraError::Domain(format!("{p} is not prime")));
    }
    Ok(match valuation(x, p) {
        None => Rat::zero(),
        Some(v) => {
            let base = BigInt::from(p);
            let mag = Pow::pow(&base, v.unsigned_abs());
            if v >= 0 {
                Rat::new(BigInt::one(), mag)
            } else {
                Rat::from_integer(mag)
            }
        }
    })
}

/// True when the reduced denominator of `x` is coprime to `a`.
pub fn is_off(x: &Rat, a: u64) -> bool {
    x.denom().gcd(&BigInt::from(a)).is_one()
}

pub fn is_on(x: &Rat, a: u64) -> bool {
    !is_off(x, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{rat, rat_int};

    #[test]
    fn absolute_values() {
        assert_eq!(padic_abs(&rat(1, 10), 2).unwrap(), rat_int(2));
        assert_eq!(padic_abs(&rat_int(12), 2).unwrap(), rat(1, 4));
        assert_eq!(padic_abs(&rat(3, 5), 2).unwrap(), rat_int(1));
        assert_eq!(padic_abs(&rat_int(0), 3).unwrap(), rat_int(0));
        assert!(matches!(padic_abs(&rat(1, 2), 4), Err(HydraError::Domain(_))));
    }

    #[test]
    fn off_and_on() {
        assert!(is_off(&rat(1, 5), 2));
        assert!(!is_off(&rat(1, 10), 2));
        assert!(is_off(&rat_int(0), 6));
        assert!(is_on(&rat(1, 9), 6));
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }
}
