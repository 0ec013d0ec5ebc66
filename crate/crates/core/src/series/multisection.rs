use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{HydraError, Result};
use crate::hydra::HydraMap;

/// The `(a, b)` roots-of-unity filter keeping the coefficients with index `≡ b (mod a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Multisection {
    pub a: u64,
    pub b: u64,
}

fn root(a: u64, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (k.rem_euclid(a as i64)) as f64 / a as f64)
}

impl Multisection {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 || b >= a {
            return Err(HydraError::Domain(format!("multisection needs 0 <= b < a, got ({a},{b})")));
        }
        Ok(Multisection { a, b })
    }

    /// `(1/a) sum_k xi_a^(-bk) f(xi_a^k z)`.
    pub fn ordinary(&self, f: impl Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
        let a = self.a as i64;
        let b = self.b as i64;
        let sum: Complex64 = (0..a).map(|k| root(self.a, -b * k) * f(root(self.a, k) * z)).sum();
        sum / self.a as f64
    }

    /// `(1/a) sum_k xi_a^(-bk) psi(z + k/a)`.
    pub fn fourier(&self, psi: impl Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
        let a = self.a as i64;
        let b = self.b as i64;
        let sum: Complex64 =
            (0..a).map(|k| root(self.a, -b * k) * psi(z + Complex64::new(k as f64 / self.a as f64, 0.0))).sum();
        sum / self.a as f64
    }

    /// Keeps `c_n` for `n ≡ b (mod a)` and zeroes the rest.
    pub fn stream<T: Clone + Default>(&self, coeffs: &[T]) -> Vec<T> {
        coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if n as u64 % self.a == self.b { c.clone() } else { T::default() })
            .collect()
    }
}

/// Reindexes a coefficient stream by `c_n -> c_{H(n)}` for `n < len`.
pub fn permutation_op<T: Clone>(map: &HydraMap, coeffs: &[T], len: usize) -> Result<Vec<T>> {
    (0..len as u64)
        .map(|n| {
            let h = map.checked_apply(n).filter(|&h| (h as usize) < coeffs.len()).ok_or_else(|| {
                HydraError::Precondition(format!("stream of length {} not indexable at H({n})", coeffs.len()))
            })?;
            Ok(coeffs[h as usize].clone())
        })
        .collect()
}

/// Lazy form of [`permutation_op`] over a coefficient function.
pub fn permuted<'a, T>(map: &'a HydraMap, coeff: impl Fn(u64) -> T + 'a) -> impl Fn(u64) -> T + 'a {
    move |n| coeff(map.apply(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydra::catalog;

    fn geometric(z: Complex64) -> Complex64 {
        1.0 / (1.0 - z)
    }

    #[test]
    fn even_and_odd_parts() {
        let z = Complex64::new(0.5, 0.0);
        let even = Multisection::new(2, 0).unwrap().ordinary(geometric, z);
        let odd = Multisection::new(2, 1).unwrap().ordinary(geometric, z);
        assert!((even - 4.0 / 3.0).norm() < 1e-15);
        assert!((odd - 2.0 / 3.0).norm() < 1e-15);
        assert!(Multisection::new(2, 2).is_err());
    }

    #[test]
    fn stream_filter() {
        let ones = vec![1u8; 20];
        let kept = Multisection::new(3, 2).unwrap().stream(&ones);
        for (n, c) in kept.iter().enumerate() {
            assert_eq!(*c == 1, n % 3 == 2);
        }
    }

    #[test]
    fn permutation_realizes_preimages() {
        let h3 = catalog("H3").unwrap();
        let ind: Vec<bool> = (0..64).map(|n| n == 1 || n == 2).collect();
        let out = permutation_op(&h3, &ind, 20).unwrap();
        let hits: Vec<usize> = out.iter().enumerate().filter(|(_, &b)| b).map(|(n, _)| n).collect();
        assert_eq!(hits, vec![1, 2, 4]);

        let tm = catalog("T-1").unwrap();
        let ind: Vec<bool> = (0..64).map(|n| n == 2 || n == 4).collect();
        let out = permutation_op(&tm, &ind, 20).unwrap();
        let hits: Vec<usize> = out.iter().enumerate().filter(|(_, &b)| b).map(|(n, _)| n).collect();
        assert_eq!(hits, vec![2, 4, 10]);

        assert!(permutation_op(&h3, &ind, 64).is_err());
        let lazy = permuted(&h3, |n| n % 2);
        assert_eq!(lazy(3), 1);
    }
}
