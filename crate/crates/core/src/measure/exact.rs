//! Exact cylinder masses over integers: every weight is `n_i / D` for a common
//! denominator `D`, so `M*_eps D^{k_eps}` is an integer matrix.

use num::{BigInt, Integer, One, Zero};

use crate::betanum::NumerationSystem;
use crate::dense::Matrix;
use crate::scalar::{ln_bigint, Rational};

#[derive(Debug, Clone)]
pub struct ExactCylinders {
    star: Vec<Matrix<BigInt>>,
    /// Power of `D` folded into each integer matrix.
    power: Vec<u32>,
    denom: BigInt,
    ln_denom: f64,
    v: [BigInt; 3],
    v_denom: BigInt,
}

impl ExactCylinders {
    pub fn new(sys: &NumerationSystem, v: &[Rational; 3]) -> Self {
        let denom = sys.p().iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let a = sys.a() as usize;
        let power: Vec<u32> = (0..sys.letters()).map(|e| if e < a { 1 } else { 2 }).collect();
        let star = sys
            .star()
            .iter()
            .zip(&power)
            .map(|(m, &k)| {
                let scale = Rational::from_integer(num::pow(denom.clone(), k as usize));
                m.map(|x| {
                    let y = x * scale.clone();
                    debug_assert!(y.is_integer());
                    y.to_integer()
                })
            })
            .collect();
        let v_denom = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let vi = v.clone().map(|q| (q * Rational::from_integer(v_denom.clone())).to_integer());
        ExactCylinders { star, power, ln_denom: ln_bigint(&denom), denom, v: vi, v_denom }
    }

    /// `(1 1 0) M_int[w_1] ... M_int[w_n]`, accumulated left to right.
    pub fn row(&self, word: &[usize]) -> Vec<BigInt> {
        let mut row = vec![BigInt::one(), BigInt::one(), BigInt::zero()];
        for &e in word {
            row = self.star[e].vec_mul(&row);
        }
        row
    }

    /// Extends a row by one letter on the right.
    pub fn extend(&self, row: &[BigInt], e: usize) -> Vec<BigInt> {
        self.star[e].vec_mul(row)
    }

    /// Integer numerator `row . V_int`.
    pub fn numerator(&self, row: &[BigInt]) -> BigInt {
        row.iter().zip(&self.v).map(|(x, y)| x * y).sum()
    }

    /// Total power of `D` in the scaling of a word.
    pub fn power_of(&self, word: &[usize]) -> u64 {
        word.iter().map(|&e| u64::from(self.power[e])).sum()
    }

    pub fn letter_power(&self, e: usize) -> u32 {
        self.power[e]
    }

    pub fn ln_denom(&self) -> f64 {
        self.ln_denom
    }

    pub fn measure(&self, word: &[usize]) -> Rational {
        let num = self.numerator(&self.row(word));
        let den = num::pow(self.denom.clone(), self.power_of(word) as usize) * &self.v_denom;
        Rational::new(num, den)
    }

    /// `ln mu*[w]`; `-inf` for null cylinders.
    pub fn ln_measure(&self, word: &[usize]) -> f64 {
        let num = self.numerator(&self.row(word));
        self.ln_from_numerator(&num, self.power_of(word))
    }

    pub fn ln_from_numerator(&self, num: &BigInt, power: u64) -> f64 {
        if num.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(num) - power as f64 * self.ln_denom - ln_bigint(&self.v_denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::stationary_vector_exact;
    use crate::scalar::{rat, rational_to_f64};

    #[test]
    fn integer_path_matches_rational_product() {
        let sys = NumerationSystem::new(2, 1, vec![rat(1, 2), rat(3, 10), rat(1, 5)]).unwrap();
        let v = stationary_vector_exact(&sys).unwrap();
        let c = ExactCylinders::new(&sys, &v);
        let word = [2, 0, 1, 1, 2, 0];
        let mut row = vec![Rational::one(), Rational::one(), Rational::zero()];
        for &e in &word {
            row = sys.star()[e].vec_mul(&row);
        }
        let direct: Rational = row.iter().zip(&v).map(|(x, y)| x * y).sum();
        assert_eq!(c.measure(&word), direct);
        assert!((c.ln_measure(&word) - rational_to_f64(&direct).ln()).abs() < 1e-12);
    }
}
