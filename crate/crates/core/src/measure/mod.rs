//! Bernoulli-convolution measures: the stationary vector, cylinder masses,
//! interval masses and a Monte Carlo oracle.

mod exact;
mod interval;
mod montecarlo;

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::betanum::{BetaError, NumerationSystem};
use crate::dense::Matrix;
use crate::scalar::{format_rational, rational_to_f64, Rational};

pub use exact::ExactCylinders;
pub use interval::REFINEMENT_TOLERANCE;
pub use montecarlo::{monte_carlo, monte_carlo_cylinders, McTarget, MC_BLOCK};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("power iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("the fixed-point system for the stationary vector is singular")]
    SingularStationarySystem,
    #[error("point {0} is outside [{1}]")]
    OutOfRange(String, String),
    #[error("interval endpoints are reversed")]
    ReversedInterval,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("letter {0} is outside the cylinder alphabet")]
    LetterOutOfRange(usize),
    #[error("cylinder word is empty")]
    EmptyWord,
    #[error("x must be <= 0, got {0}")]
    PositiveExponent(f64),
    #[error("digit count violates the covering hypothesis")]
    CoveringHypothesis,
    #[error("tiling descent failed at depth {0}")]
    DescentFailure(usize),
    #[error(transparent)]
    Beta(#[from] BetaError),
}

impl MeasureError {
    pub fn is_internal(&self) -> bool {
        matches!(self, MeasureError::DescentFailure(_) | MeasureError::CoveringHypothesis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactMatrix,
    MonteCarlo,
    Refinement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryVector {
    pub v: [f64; 3],
    /// `max |(sum M*) V - V|` at exit.
    pub residual: f64,
    pub iterations: usize,
}

pub const STATIONARY_TOLERANCE: f64 = 1e-12;
pub const STATIONARY_MAX_ITER: usize = 100_000;

fn aggregate(sys: &NumerationSystem) -> Matrix<Rational> {
    let star = sys.star();
    star[1..].iter().fold(star[0].clone(), |acc, m| acc.add(m))
}

/// Fixed point of `W -> (sum_eps M*_eps) W`, normalized to `W_1 + W_2 = 1`.
pub fn stationary_vector(sys: &NumerationSystem) -> Result<StationaryVector, MeasureError> {
    let s = aggregate(sys).map(rational_to_f64);
    let mut w = vec![1.0 / 3.0; 3];
    let mut residual = f64::INFINITY;
    for it in 1..=STATIONARY_MAX_ITER {
        let next = s.mul_vec(&w);
        let norm = next[0] + next[1];
        if !(norm > 0.0) {
            return Err(MeasureError::NonConvergence { iterations: it, residual });
        }
        let next: Vec<f64> = next.iter().map(|x| x / norm).collect();
        let image = s.mul_vec(&next);
        residual = image.iter().zip(&next).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        w = next;
        if residual < STATIONARY_TOLERANCE {
            return Ok(StationaryVector { v: [w[0], w[1], w[2]], residual, iterations: it });
        }
    }
    Err(MeasureError::NonConvergence { iterations: STATIONARY_MAX_ITER, residual })
}

/// The stationary vector in exact rationals, from the null space of
/// `sum M* - I` with the normalization row appended.
pub fn stationary_vector_exact(sys: &NumerationSystem) -> Result<[Rational; 3], MeasureError> {
    let s = aggregate(sys);
    // Rows: (S - I) w = 0 (three equations) and w_1 + w_2 = 1.
    let mut rows: Vec<Vec<Rational>> = (0..3)
        .map(|i| {
            let mut r: Vec<Rational> = (0..3).map(|j| s.get(i, j).clone()).collect();
            r[i] -= Rational::one();
            r.push(Rational::zero());
            r
        })
        .collect();
    rows.push(vec![Rational::one(), Rational::one(), Rational::zero(), Rational::one()]);
    let mut pivot_row = 0;
    for col in 0..3 {
        let Some(p) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            return Err(MeasureError::SingularStationarySystem);
        };
        rows.swap(pivot_row, p);
        let inv = Rational::one() / rows[pivot_row][col].clone();
        for x in rows[pivot_row].iter_mut() {
            *x *= inv.clone();
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pr = rows[pivot_row].clone();
                for (x, y) in rows[r].iter_mut().zip(pr) {
                    *x -= f.clone() * y;
                }
            }
        }
        pivot_row += 1;
    }
    if !rows[3][3].is_zero() {
        return Err(MeasureError::SingularStationarySystem);
    }
    let v = [rows[0][3].clone(), rows[1][3].clone(), rows[2][3].clone()];
    if v.iter().any(Signed::is_negative) {
        return Err(MeasureError::SingularStationarySystem);
    }
    Ok(v)
}

/// A numeration system with its stationary vector and float caches.
#[derive(Debug, Clone)]
pub struct BernoulliMeasure {
    sys: NumerationSystem,
    stationary: StationaryVector,
    exact_v: [Rational; 3],
    star64: Vec<Matrix<f64>>,
    cylinders: ExactCylinders,
    tiling: interval::Tiling,
}

impl BernoulliMeasure {
    pub fn new(sys: NumerationSystem) -> Result<Self, MeasureError> {
        let stationary = stationary_vector(&sys)?;
        let exact_v = stationary_vector_exact(&sys)?;
        let star64 = sys.star().iter().map(|m| m.map(rational_to_f64)).collect();
        let cylinders = ExactCylinders::new(&sys, &exact_v);
        let tiling = interval::Tiling::new(&sys);
        Ok(BernoulliMeasure { sys, stationary, exact_v, star64, cylinders, tiling })
    }

    pub fn system(&self) -> &NumerationSystem {
        &self.sys
    }

    pub fn stationary(&self) -> &StationaryVector {
        &self.stationary
    }

    pub fn exact_v(&self) -> &[Rational; 3] {
        &self.exact_v
    }

    pub fn exact_cylinders(&self) -> &ExactCylinders {
        &self.cylinders
    }

    fn check_word(&self, word: &[usize]) -> Result<(), MeasureError> {
        if word.is_empty() {
            return Err(MeasureError::EmptyWord);
        }
        match word.iter().find(|&&e| e >= self.sys.letters()) {
            Some(&e) => Err(MeasureError::LetterOutOfRange(e)),
            None => Ok(()),
        }
    }

    /// `mu*[w] = (1 1 0) M*_{w_1} ... M*_{w_n} V` in exact rationals.
    pub fn cylinder_measure_exact(&self, word: &[usize]) -> Result<Rational, MeasureError> {
        self.check_word(word)?;
        Ok(self.cylinders.measure(word))
    }

    /// Exact cylinder mass, reported as a float with zero error.
    pub fn cylinder_measure(&self, word: &[usize]) -> Result<MeasureEstimate, MeasureError> {
        self.check_word(word)?;
        let value = rational_to_f64(&self.cylinders.measure(word));
        Ok(MeasureEstimate { value, stderr: 0.0, method: Method::ExactMatrix })
    }

    /// Float evaluation of the same product with the power-iteration vector.
    pub fn cylinder_measure_f64(&self, word: &[usize]) -> Result<f64, MeasureError> {
        self.check_word(word)?;
        let mut row = vec![1.0, 1.0, 0.0];
        let mut log_scale = 0.0;
        for &e in word {
            row = self.star64[e].vec_mul(&row);
            let m = row.iter().cloned().fold(0.0, f64::max);
            if m > 0.0 {
                row.iter_mut().for_each(|x| *x /= m);
                log_scale += m.ln();
            }
        }
        let v = &self.stationary.v;
        Ok((row[0] * v[0] + row[1] * v[1] + row[2] * v[2]) * log_scale.exp())
    }

    pub fn describe_v(&self) -> Vec<String> {
        self.exact_v.iter().map(format_rational).collect()
    }
}
