//! Masses of intervals: `mu*([0, t])` by descending the partition, and
//! `mu_p([0, t])` on `[0, alpha]` through the covering by `I_k` and `I'_k`.

use super::{BernoulliMeasure, MeasureError, MeasureEstimate, Method};
use crate::betanum::{BetaNumber, NumerationSystem};
use crate::scalar::{rational_from_f64, rational_to_f64};

fn rough(x: &BetaNumber, beta: f64) -> f64 {
    rational_to_f64(&x.u) + rational_to_f64(&x.v) * beta
}

/// Default bound on the unresolved remainder of a descent.
pub const REFINEMENT_TOLERANCE: f64 = 1e-10;
/// Scale factors `p^k` below this are treated as negligible.
const NEGLIGIBLE: f64 = 1e-13;
const MAX_DEPTH: usize = 100_000;

/// Exact left ends and inverses of the partition maps.
#[derive(Debug, Clone)]
pub(crate) struct Tiling {
    lefts: Vec<BetaNumber>,
    lefts_f: Vec<f64>,
    beta: f64,
    shifts: Vec<BetaNumber>,
    inv_scales: Vec<BetaNumber>,
}

impl Tiling {
    pub(crate) fn new(sys: &NumerationSystem) -> Self {
        let pieces = sys.pieces();
        let lefts: Vec<BetaNumber> = pieces.iter().map(|m| m.interval().0).collect();
        Tiling {
            lefts_f: lefts.iter().map(BetaNumber::to_f64).collect(),
            lefts,
            beta: sys.base().beta_f64(),
            shifts: pieces.iter().map(|m| m.shift.clone()).collect(),
            inv_scales: pieces.iter().map(|m| m.scale.inv().expect("nonzero scale")).collect(),
        }
    }

    /// Index of the piece with `left <= y < right`, for `0 <= y < 1`.
    fn locate(&self, y: &BetaNumber) -> usize {
        let yf = rough(y, self.beta);
        let n = self.lefts.len();
        let mut e = self.lefts_f.iter().rposition(|&l| l <= yf).unwrap_or(0);
        while e > 0 && self.lefts[e].try_cmp(y).expect("same base").is_gt() {
            e -= 1;
        }
        while e + 1 < n && self.lefts[e + 1].try_cmp(y).expect("same base").is_le() {
            e += 1;
        }
        e
    }
}

fn in_range(x: &BetaNumber, lo: &BetaNumber, hi: &BetaNumber) -> Result<(), MeasureError> {
    if x.try_cmp(lo)?.is_lt() || x.try_cmp(hi)?.is_gt() {
        return Err(MeasureError::OutOfRange(x.to_string(), format!("{lo}, {hi}")));
    }
    Ok(())
}

fn dot(row: &[f64], v: &[f64; 3]) -> f64 {
    row[0] * v[0] + row[1] * v[1] + row[2] * v[2]
}

impl BernoulliMeasure {
    /// `(value, error bound)` of `mu*([0, s])`.
    fn star_left(&self, s: &BetaNumber, tol: f64) -> Result<(f64, f64), MeasureError> {
        let base = self.sys.base();
        let (zero, one) = (base.from_int(0), base.from_int(1));
        in_range(s, &zero, &one)?;
        if *s == zero {
            return Ok((0.0, 0.0));
        }
        if *s == one {
            return Ok((1.0, 0.0));
        }
        let tiling = &self.tiling;
        let v = &self.stationary.v;
        let mut y = s.clone();
        let mut row = vec![1.0, 1.0, 0.0];
        let mut value = 0.0;
        for _ in 0..MAX_DEPTH {
            let e = tiling.locate(&y);
            for earlier in 0..e {
                value += dot(&self.star64[earlier].vec_mul(&row), v);
            }
            row = self.star64[e].vec_mul(&row);
            y = &(&y - &tiling.shifts[e]) * &tiling.inv_scales[e];
            if y.signum() == 0 {
                return Ok((value, 0.0));
            }
            let mass = dot(&row, v);
            if mass < tol {
                return Ok((value + mass / 2.0, mass / 2.0));
            }
        }
        Err(MeasureError::DescentFailure(MAX_DEPTH))
    }

    /// `mu*([0, t])` for `0 <= t <= 1`.
    pub fn interval_measure(&self, t: &BetaNumber) -> Result<MeasureEstimate, MeasureError> {
        self.interval_measure_tol(t, REFINEMENT_TOLERANCE)
    }

    pub fn interval_measure_tol(&self, t: &BetaNumber, tol: f64) -> Result<MeasureEstimate, MeasureError> {
        let (value, stderr) = self.star_left(t, tol)?;
        Ok(MeasureEstimate { value, stderr, method: Method::Refinement })
    }

    /// `mu*([lo, hi])` for `0 <= lo <= hi <= 1`.
    pub fn mu_star(&self, lo: &BetaNumber, hi: &BetaNumber, tol: f64) -> Result<MeasureEstimate, MeasureError> {
        if lo.try_cmp(hi)?.is_gt() {
            return Err(MeasureError::ReversedInterval);
        }
        let (a, ea) = self.star_left(lo, tol)?;
        let (b, eb) = self.star_left(hi, tol)?;
        Ok(MeasureEstimate { value: b - a, stderr: ea + eb, method: Method::Refinement })
    }

    fn check_covering(&self) -> Result<(), MeasureError> {
        // beta < d <= beta + 1 - 1/beta.
        let base = self.sys.base();
        let beta = base.beta();
        let d = base.from_int(self.sys.d() as i64);
        let slack = &(&(&d - &beta) - &base.from_int(1)) + &beta.inv()?;
        if (&d - &beta).signum() <= 0 || slack.signum() > 0 {
            return Err(MeasureError::CoveringHypothesis);
        }
        Ok(())
    }

    /// For `0 < t <= 1`, the smallest `k` with `t beta^(k+1) >= 1` gives
    /// `(beta^k t, weight^k)`; `None` once `weight^k` is negligible.
    fn scale_up(&self, t: &BetaNumber, weight: f64) -> (Option<BetaNumber>, f64) {
        let beta = self.sys.base().beta();
        let one = self.sys.base().from_int(1);
        let mut x = t.clone();
        let mut w = 1.0;
        loop {
            let next = &x * &beta;
            if next.try_cmp(&one).expect("same base").is_ge() {
                return (Some(x), w);
            }
            if w * weight < NEGLIGIBLE {
                return (None, w * weight);
            }
            x = next;
            w *= weight;
        }
    }

    /// `(value, error bound)` of `mu_p([0, t])`, `0 <= t <= alpha`.
    fn full_left(&self, t: &BetaNumber, tol: f64) -> Result<(f64, f64), MeasureError> {
        let base = self.sys.base();
        let (zero, one) = (base.from_int(0), base.from_int(1));
        let alpha = self.sys.alpha().clone();
        in_range(t, &zero, &alpha)?;
        if t.signum() == 0 {
            return Ok((0.0, 0.0));
        }
        if *t == alpha {
            return Ok((1.0, 0.0));
        }
        let v1 = self.stationary.v[0];
        let p = self.sys.p_f64();
        let inv_beta = base.beta().inv()?;
        if t.try_cmp(&one)?.is_le() {
            let p0 = p[0];
            let (scaled, w) = self.scale_up(t, p0);
            let Some(x) = scaled else {
                return Ok((w * v1 / 2.0, w * v1 / 2.0));
            };
            let (g, ge) = self.star_left(&x, tol)?;
            let (c0, ce) = self.star_left(&inv_beta, tol)?;
            return Ok((w * p0 * v1 + w * (g - c0), w * (ge + ce)));
        }
        // Right half: mu_p([t, alpha]) with s = alpha - t in I_k.
        let s = &alpha - t;
        let q = p[p.len() - 1];
        let (scaled, w) = self.scale_up(&s, q);
        let (left_mass, le) = self.full_left(&(&alpha - &one), tol)?;
        let upper = 1.0 - left_mass;
        let Some(x) = scaled else {
            let bound = w * upper;
            return Ok((1.0 - bound / 2.0, bound / 2.0 + le));
        };
        let (g1, e1) = self.star_left(&(&alpha - &inv_beta), tol)?;
        let (g2, e2) = self.star_left(&(&alpha - &x), tol)?;
        let tail = w * q * upper + w * (g1 - g2);
        Ok((1.0 - tail, w * (q * le + e1 + e2)))
    }

    /// `mu_p([lo, hi])` for `0 <= lo <= hi <= alpha`.
    pub fn mu_full(&self, lo: &BetaNumber, hi: &BetaNumber) -> Result<MeasureEstimate, MeasureError> {
        self.mu_full_tol(lo, hi, REFINEMENT_TOLERANCE)
    }

    pub fn mu_full_tol(&self, lo: &BetaNumber, hi: &BetaNumber, tol: f64) -> Result<MeasureEstimate, MeasureError> {
        self.check_covering()?;
        if lo.try_cmp(hi)?.is_gt() {
            return Err(MeasureError::ReversedInterval);
        }
        let (a, ea) = self.full_left(lo, tol)?;
        let (b, eb) = self.full_left(hi, tol)?;
        Ok(MeasureEstimate { value: b - a, stderr: ea + eb, method: Method::Refinement })
    }

    /// Intersection of `[lo, hi]` with `[0, alpha]`, or `None` when empty.
    pub fn clip_to_support(&self, lo: &BetaNumber, hi: &BetaNumber) -> Option<(BetaNumber, BetaNumber)> {
        let zero = self.sys.base().from_int(0);
        let alpha = self.sys.alpha();
        let lo = if lo.signum() < 0 { zero } else { lo.clone() };
        let hi = if hi.try_cmp(alpha).ok()?.is_gt() { alpha.clone() } else { hi.clone() };
        lo.try_cmp(&hi).ok()?.is_le().then_some((lo, hi))
    }

    /// `H(x) = p_0^x mu_p([0, beta^x])` for `x <= 0`. The float `beta^x` is
    /// converted exactly, so the only approximation is its rounding.
    pub fn h_sample(&self, x: f64) -> Result<MeasureEstimate, MeasureError> {
        if !(x <= 0.0) {
            return Err(MeasureError::PositiveExponent(x));
        }
        let base = self.sys.base();
        let t = base.beta_f64().powf(x).min(1.0);
        let tq = rational_from_f64(t).ok_or(MeasureError::PositiveExponent(x))?;
        let t = base.from_rational(tq);
        let (m, e) = self.full_left(&t, REFINEMENT_TOLERANCE)?;
        let scale = self.sys.p_f64()[0].powf(x);
        Ok(MeasureEstimate { value: scale * m, stderr: scale * e, method: Method::Refinement })
    }
}
