//! Monte Carlo oracle: the random series `sum w_k beta^-k` with i.i.d. digits
//! of law `p`, truncated once the tail is below `1e-12`.
//!
//! Samples are drawn in blocks of `MC_BLOCK`; block `j` uses the ChaCha8
//! stream `j` of the seed, so results do not depend on the thread count.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{MeasureError, MeasureEstimate, Method};
use crate::betanum::NumerationSystem;

pub const MC_BLOCK: u64 = 1 << 16;
const TAIL_TARGET: f64 = 1e-12;
const SLACK: f64 = 1e-14;
const MAX_EXTENSIONS: u32 = 4;

/// Which law the sample is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McTarget {
    /// `mu_p`, the law of the series itself.
    Full,
    /// `mu*`, the law of its fractional part: `B` is hit through `B` or `B + 1`.
    Fractional,
}

struct Series {
    digits: WeightedIndex<f64>,
    inv_beta: f64,
    /// `dmax / (beta - 1)`, so the tail after `k` terms is this times `beta^-k`.
    tail_factor: f64,
    terms: usize,
}

impl Series {
    fn new(sys: &NumerationSystem) -> Self {
        let p = sys.p_f64();
        let beta = sys.base().beta_f64();
        let dmax = p.iter().rposition(|&x| x > 0.0).unwrap_or(0) as f64;
        let tail_factor = dmax / (beta - 1.0);
        let mut terms = 1;
        while tail_factor * beta.powi(-(terms as i32)) >= TAIL_TARGET {
            terms += 1;
        }
        Series {
            digits: WeightedIndex::new(p.iter().copied()).expect("weights sum to one"),
            inv_beta: 1.0 / beta,
            tail_factor,
            terms,
        }
    }
}

/// A truncated sample `x` with the true value in `[x, x + tail]`.
struct Draw {
    x: f64,
    scale: f64,
}

impl Draw {
    fn extend(&mut self, series: &Series, rng: &mut ChaCha8Rng, terms: usize) {
        for _ in 0..terms {
            self.scale *= series.inv_beta;
            self.x += series.digits.sample(rng) as f64 * self.scale;
        }
    }

    fn tail(&self, series: &Series) -> f64 {
        series.tail_factor * self.scale
    }
}

/// `Some(hit)` when the whole uncertainty interval is on one side.
fn decide(x: f64, tail: f64, pieces: &[(f64, f64)]) -> Option<bool> {
    let (lo_x, hi_x) = (x - SLACK, x + tail + SLACK);
    let mut ambiguous = false;
    for &(lo, hi) in pieces {
        if lo_x >= lo && hi_x <= hi {
            return Some(true);
        }
        if !(hi_x < lo || lo_x > hi) {
            ambiguous = true;
        }
    }
    (!ambiguous).then_some(false)
}

fn pieces(lo: f64, hi: f64, target: McTarget) -> Vec<(f64, f64)> {
    match target {
        McTarget::Full => vec![(lo, hi)],
        McTarget::Fractional => vec![(lo, hi), (lo + 1.0, hi + 1.0)],
    }
}

fn count_hits(sys: &NumerationSystem, targets: &[Vec<(f64, f64)>], n: u64, seed: u64) -> Vec<u64> {
    let series = Series::new(sys);
    let blocks = n.div_ceil(MC_BLOCK);
    let per_block = |block: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let mut hits = vec![0u64; targets.len()];
        let count = MC_BLOCK.min(n - block * MC_BLOCK);
        for _ in 0..count {
            let mut draw = Draw { x: 0.0, scale: 1.0 };
            draw.extend(&series, &mut rng, series.terms);
            for (h, target) in hits.iter_mut().zip(targets) {
                let mut extra = series.terms;
                let mut verdict = decide(draw.x, draw.tail(&series), target);
                for _ in 0..MAX_EXTENSIONS {
                    if verdict.is_some() {
                        break;
                    }
                    draw.extend(&series, &mut rng, extra);
                    extra *= 2;
                    verdict = decide(draw.x, draw.tail(&series), target);
                }
                let hit = verdict.unwrap_or_else(|| {
                    let mid = draw.x + draw.tail(&series) / 2.0;
                    target.iter().any(|&(lo, hi)| mid >= lo && mid <= hi)
                });
                *h += u64::from(hit);
            }
        }
        hits
    };
    (0..blocks).into_par_iter().map(per_block).reduce(
        || vec![0; targets.len()],
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )
}

fn estimate(hits: u64, n: u64) -> MeasureEstimate {
    let p = hits as f64 / n as f64;
    MeasureEstimate { value: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), method: Method::MonteCarlo }
}

/// Fraction of `n` samples landing in `[lo, hi]` (or its fractional-part
/// preimage).
pub fn monte_carlo(
    sys: &NumerationSystem,
    lo: f64,
    hi: f64,
    n: u64,
    seed: u64,
    target: McTarget,
) -> Result<MeasureEstimate, MeasureError> {
    if n == 0 {
        return Err(MeasureError::NoSamples);
    }
    if lo > hi {
        return Err(MeasureError::ReversedInterval);
    }
    let hits = count_hits(sys, &[pieces(lo, hi, target)], n, seed);
    Ok(estimate(hits[0], n))
}

/// `mu*` of several cylinders from one shared sample.
pub fn monte_carlo_cylinders(
    sys: &NumerationSystem,
    words: &[Vec<usize>],
    n: u64,
    seed: u64,
) -> Result<Vec<MeasureEstimate>, MeasureError> {
    if n == 0 {
        return Err(MeasureError::NoSamples);
    }
    let mut targets = Vec::with_capacity(words.len());
    for w in words {
        if w.is_empty() {
            return Err(MeasureError::EmptyWord);
        }
        if let Some(&e) = w.iter().find(|&&e| e >= sys.letters()) {
            return Err(MeasureError::LetterOutOfRange(e));
        }
        let (lo, hi) = sys.cylinder_interval(w);
        targets.push(pieces(lo.to_f64(), hi.to_f64(), McTarget::Fractional));
    }
    let hits = count_hits(sys, &targets, n, seed);
    Ok(hits.into_iter().map(|h| estimate(h, n)).collect())
}
