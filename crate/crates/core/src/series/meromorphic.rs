use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HydraError, Result};
use crate::exact::{Cyclo, RatMod1};

/// Distance to the nearest pole below which evaluation is refused.
const POLE_EPS: f64 = 1e-12;

/// `F(z) = sum_m pi cot(pi (z - t_m)) R(t_m)` for a finitely supported `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct Meromorphic {
    residues: BTreeMap<RatMod1, Complex64>,
}

impl Meromorphic {
    pub fn new(residues: BTreeMap<RatMod1, Complex64>) -> Self {
        Meromorphic { residues }
    }

    /// From values stored in units of `2 pi` (`c` means `R = c / (2 pi)`).
    pub fn from_units_2pi<'a>(values: impl IntoIterator<Item = (&'a RatMod1, &'a Cyclo)>) -> Self {
        Meromorphic { residues: values.into_iter().map(|(t, c)| (t.clone(), c.approx() / (2.0 * PI))).collect() }
    }

    pub fn residues(&self) -> &BTreeMap<RatMod1, Complex64> {
        &self.residues
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, r) in &self.residues {
            let w = z - t.to_f64();
            let frac = w.re - w.re.round();
            if w.im.abs() < POLE_EPS && frac.abs() < POLE_EPS {
                return Err(HydraError::Pole(format!("z = {z} is a pole at {t}")));
            }
            let arg = Complex64::new(PI * frac, PI * w.im);
            acc += PI * arg.cos() / arg.sin() * r;
        }
        Ok(acc)
    }
}

pub fn meromorphic_dreamcatcher(residues: BTreeMap<RatMod1, Complex64>) -> Meromorphic {
    Meromorphic::new(residues)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(c: f64) -> Meromorphic {
        meromorphic_dreamcatcher([(RatMod1::zero(), Complex64::new(c, 0.0))].into_iter().collect())
    }

    #[test]
    fn cotangent_values() {
        let f = single(1.0 / (2.0 * PI));
        assert!((f.eval(Complex64::new(0.25, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        assert!(f.eval(Complex64::new(0.5, 0.0)).unwrap().norm() < 1e-15);
        let z = Complex64::new(0.3, 0.7);
        let g = single(2.5);
        assert!((g.eval(z).unwrap() - g.eval(z + 1.0).unwrap()).norm() < 1e-12);
        assert!(matches!(f.eval(Complex64::new(3.0, 0.0)), Err(HydraError::Pole(_))));
    }
}
