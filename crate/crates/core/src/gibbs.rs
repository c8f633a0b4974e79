//! n-step potentials of `mu*`, their sup-gap envelope, the weak-Gibbs
//! verdict and the two divergence witnesses.

use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::betanum::NumerationSystem;
use crate::measure::{BernoulliMeasure, ExactCylinders};
use crate::scalar::{rational_to_f64, Rational};

/// Largest number of words an exhaustive scan may enumerate.
pub const EXHAUSTIVE_CAP: usize = 1 << 20;
/// Longest zero block in the structured prefixes `e' 0^k e`.
pub const STRUCTURED_ZEROS: usize = 12;
const CRITICAL_HORIZON: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GibbsError {
    #[error("n must be at least 1")]
    ZeroLength,
    #[error("word of length {len} is too short for n = {n}")]
    WordTooShort { len: usize, n: usize },
    #[error("letter {0} is outside the cylinder alphabet")]
    LetterOutOfRange(usize),
    #[error("cylinder {word:?} has measure zero")]
    ZeroMeasure { word: Vec<usize>, positive_weights: bool },
    #[error("witness B needs b != 1")]
    BIsOne,
    #[error("p_a p_(b-1) > p_0^2: the powers of M_0 / p_0 grow exponentially")]
    Supercritical,
}

impl GibbsError {
    pub fn is_internal(&self) -> bool {
        matches!(self, GibbsError::ZeroMeasure { positive_weights: true, .. })
    }
}

/// `ln mu*` of every prefix `w[..n]` of a word, `n = 1..=len`.
fn prefix_logs(c: &ExactCylinders, word: &[usize]) -> Vec<(f64, bool)> {
    let mut row = c.row(&[]);
    let mut power = 0;
    word.iter()
        .map(|&e| {
            row = c.extend(&row, e);
            power += u64::from(c.letter_power(e));
            let num = c.numerator(&row);
            (c.ln_from_numerator(&num, power), num.is_zero())
        })
        .collect()
}

fn check_letters(m: &BernoulliMeasure, word: &[usize]) -> Result<(), GibbsError> {
    match word.iter().find(|&&e| e >= m.system().letters()) {
        Some(&e) => Err(GibbsError::LetterOutOfRange(e)),
        None => Ok(()),
    }
}

/// `phi_1, ..., phi_n` along a word with at least `n` letters.
pub fn potentials(m: &BernoulliMeasure, word: &[usize], n: usize) -> Result<Vec<f64>, GibbsError> {
    if n == 0 {
        return Err(GibbsError::ZeroLength);
    }
    if word.len() < n {
        return Err(GibbsError::WordTooShort { len: word.len(), n });
    }
    check_letters(m, word)?;
    let c = m.exact_cylinders();
    let whole = prefix_logs(c, &word[..n]);
    let tail = prefix_logs(c, &word[1..n]);
    let zero = |k: usize| GibbsError::ZeroMeasure { word: word[..k].to_vec(), positive_weights: m.system().is_positive() };
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let (lw, zw) = whole[k - 1];
        if zw {
            return Err(zero(k));
        }
        if k == 1 {
            out.push(lw);
        } else {
            let (lt, zt) = tail[k - 2];
            if zt {
                return Err(GibbsError::ZeroMeasure {
                    word: word[1..k].to_vec(),
                    positive_weights: m.system().is_positive(),
                });
            }
            out.push(lw - lt);
        }
    }
    Ok(out)
}

/// `phi_n(xi) = ln(mu*[xi_1..xi_n] / mu*[xi_2..xi_n])`, `phi_1 = ln mu*[xi_1]`.
pub fn phi_n(m: &BernoulliMeasure, word: &[usize], n: usize) -> Result<f64, GibbsError> {
    Ok(*potentials(m, word, n)?.last().expect("n >= 1"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialTrace {
    pub word: Vec<usize>,
    pub phi: Vec<f64>,
    /// `|phi_(k+1) - phi_k|`.
    pub gaps: Vec<f64>,
    /// `exp` of the summed gaps.
    pub k_hat: f64,
}

pub fn potential_trace(m: &BernoulliMeasure, word: &[usize], n: usize) -> Result<PotentialTrace, GibbsError> {
    let phi = potentials(m, word, n)?;
    let gaps: Vec<f64> = phi.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let k_hat = gaps.iter().sum::<f64>().exp();
    Ok(PotentialTrace { word: word.to_vec(), phi, gaps, k_hat })
}

/// Ratio of the telescoped product of potentials to the cylinder mass, as a
/// log. Zero up to rounding.
pub fn telescoping_defect(m: &BernoulliMeasure, word: &[usize]) -> Result<f64, GibbsError> {
    let n = word.len();
    let mut sum = 0.0;
    for k in 0..n {
        sum += phi_n(m, &word[k..], n - k)?;
    }
    Ok(sum - m.exact_cylinders().ln_measure(word))
}

/// `ln` of `exp(sum_{k<n} phi_depth(sigma^k xi)) / mu*[xi_1..xi_n]`; bounded
/// by `ln K_n` when the potentials converge uniformly.
pub fn cocycle_defect(m: &BernoulliMeasure, word: &[usize], n: usize, depth: usize) -> Result<f64, GibbsError> {
    let need = n.saturating_sub(1) + depth;
    if word.len() < need || n == 0 {
        return Err(GibbsError::WordTooShort { len: word.len(), n: need });
    }
    let mut sum = 0.0;
    for k in 0..n {
        sum += phi_n(m, &word[k..], depth)?;
    }
    check_letters(m, word)?;
    Ok(sum - m.exact_cylinders().ln_measure(&word[..n]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `phi_(2n+1)((10)^inf) / n -> ln(p_a p_(b-1) / p_0^2) > 0`.
    A { slope: f64 },
    /// `(mu*[(0c)^n 1^n] / (mu*[(0c)^n] mu*[1^n]))^(1/n) -> p_0 p_c / p_a^2 < 1`,
    /// `c = a - b + 1`.
    B { limit: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsVerdict {
    pub weak_gibbs: bool,
    /// `(p_0^2, p_a p_(b-1))`.
    pub ineq1: (f64, f64),
    /// `(p_0 p_(a-b+1), p_a^2)`.
    pub ineq2: (f64, f64),
    /// Every divergence witness that applies; empty when `weak_gibbs`.
    pub witnesses: Vec<Witness>,
}

pub fn weak_gibbs_verdict(sys: &NumerationSystem) -> GibbsVerdict {
    let (a, b) = (i64::from(sys.a()), i64::from(sys.b()));
    let p = |i| sys.p_at(i);
    let (l1, r1) = (p(0) * p(0), p(a) * p(b - 1));
    let (l2, r2) = (p(0) * p(a - b + 1), p(a) * p(a));
    let ok1 = l1 >= r1;
    let ok2 = l2 >= r2;
    let ln = |q: &Rational| rational_to_f64(q).ln();
    let mut witnesses = Vec::new();
    if !ok1 {
        witnesses.push(Witness::A { slope: ln(&r1) - ln(&l1) });
    }
    // With b = 1 both inequalities read p_0 >= p_a, so only A is attached.
    if !ok2 && sys.b() != 1 {
        witnesses.push(Witness::B { limit: rational_to_f64(&(l2.clone() / r2.clone())) });
    }
    let f = rational_to_f64;
    GibbsVerdict { weak_gibbs: ok1 && ok2, ineq1: (f(&l1), f(&r1)), ineq2: (f(&l2), f(&r2)), witnesses }
}

/// `phi_(2n+1)((10)^inf) / n`.
pub fn witness_a(m: &BernoulliMeasure, n: usize) -> Result<f64, GibbsError> {
    if n == 0 {
        return Err(GibbsError::ZeroLength);
    }
    let word: Vec<usize> = (0..2 * n + 1).map(|i| if i % 2 == 0 { 1 } else { 0 }).collect();
    Ok(phi_n(m, &word, 2 * n + 1)? / n as f64)
}

/// The n-th root cylinder ratio of witness B.
pub fn divergence_witness_b(m: &BernoulliMeasure, n: usize) -> Result<f64, GibbsError> {
    let sys = m.system();
    if sys.b() == 1 {
        return Err(GibbsError::BIsOne);
    }
    if n == 0 {
        return Err(GibbsError::ZeroLength);
    }
    let c = (sys.a() - sys.b() + 1) as usize;
    let head: Vec<usize> = (0..n).flat_map(|_| [0, c]).collect();
    let ones = vec![1; n];
    let whole: Vec<usize> = head.iter().chain(&ones).copied().collect();
    let cyl = m.exact_cylinders();
    let positive = sys.is_positive();
    let ln = |w: &[usize]| {
        let v = cyl.ln_measure(w);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GibbsError::ZeroMeasure { word: w.to_vec(), positive_weights: positive })
        }
    };
    Ok(((ln(&whole)? - ln(&head)? - ln(&ones)?) / n as f64).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub depth: usize,
    pub exhaustive: bool,
    pub words: usize,
    /// `sup_gap[n-1]` is the largest `|phi_(n+1) - phi_n|` seen, `n = 1..=depth`.
    pub sup_gap: Vec<f64>,
    /// `exp(sum_(k<=n) sup_gap_k)`.
    pub k_hat: Vec<f64>,
    pub k_hat_root: Vec<f64>,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sup_gap,K_n,K_n^{1/n}\n");
        for n in 0..self.depth {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e}\n",
                n + 1,
                self.sup_gap[n],
                self.k_hat[n],
                self.k_hat_root[n]
            ));
        }
        out
    }
}

/// Gaps `|phi_(n+1) - phi_n|`, `n = 1..len-1`, along one word.
fn word_gaps(c: &ExactCylinders, word: &[usize]) -> Vec<f64> {
    let whole = prefix_logs(c, word);
    let tail = prefix_logs(c, &word[1..]);
    let phi = |k: usize| if k == 1 { whole[0].0 } else { whole[k - 1].0 - tail[k - 2].0 };
    (1..word.len()).map(|n| (phi(n + 1) - phi(n)).abs()).collect()
}

fn merge(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(y));
    a
}

/// All words of each length `2..=len` over `s` letters, as `ln mu*` tables,
/// then the exact sup of every gap.
fn exhaustive_gaps(c: &ExactCylinders, s: usize, depth: usize) -> Vec<f64> {
    // logs[l][code] = ln mu*[w], first letter most significant.
    let mut logs: Vec<Vec<f64>> = vec![vec![0.0]];
    let mut rows: Vec<Vec<BigInt>> = vec![c.row(&[])];
    let mut powers: Vec<u64> = vec![0];
    for _ in 0..=depth {
        let next: Vec<(Vec<BigInt>, u64)> = rows
            .par_iter()
            .zip(&powers)
            .flat_map_iter(|(row, &pw)| (0..s).map(move |e| (c.extend(row, e), pw + u64::from(c.letter_power(e)))))
            .collect();
        logs.push(next.par_iter().map(|(r, pw)| c.ln_from_numerator(&c.numerator(r), *pw)).collect());
        (rows, powers) = next.into_iter().unzip();
    }
    let phi = |l: usize, code: usize| -> f64 {
        // phi_l of a word of length l.
        if l == 1 {
            logs[1][code]
        } else {
            logs[l][code] - logs[l - 1][code % s.pow(l as u32 - 1)]
        }
    };
    (1..=depth)
        .map(|n| {
            (0..s.pow(n as u32 + 1))
                .into_par_iter()
                .map(|code| (phi(n + 1, code) - phi(n, code / s)).abs())
                .reduce(|| 0.0, f64::max)
        })
        .collect()
}

fn structured_words(s: usize, len: usize, breadth: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut words = Vec::new();
    for start in 0..s {
        for end in 0..s {
            for k in 0..=STRUCTURED_ZEROS.min(len.saturating_sub(2)) {
                let mut w = vec![start];
                w.extend(std::iter::repeat_n(0, k));
                w.push(end);
                let mut zeros = w.clone();
                zeros.resize(len, 0);
                words.push(zeros);
                let mut periodic = w.clone();
                while periodic.len() < len {
                    periodic.push(w[periodic.len() % w.len()]);
                }
                words.push(periodic);
            }
        }
    }
    for pattern in [vec![1, 0], vec![0, 1]] {
        words.push((0..len).map(|i| pattern[i % 2]).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while words.len() < breadth {
        words.push((0..len).map(|_| rng.random_range(0..s)).collect());
    }
    words
}

/// Sup-gap envelope of the potentials up to `depth`: exhaustive when
/// `letters^(depth+1) <= breadth`, otherwise structured and random prefixes.
pub fn potential_limit_scan(m: &BernoulliMeasure, depth: usize, breadth: usize, seed: u64) -> ScanReport {
    let c = m.exact_cylinders();
    let s = m.system().letters();
    let total = (s as f64).powi(depth as i32 + 1);
    let exhaustive = total <= breadth.min(EXHAUSTIVE_CAP) as f64;
    let (sup_gap, words) = if exhaustive {
        (exhaustive_gaps(c, s, depth), total as usize)
    } else {
        let words = structured_words(s, depth + 1, breadth, seed);
        let gaps = words.par_iter().map(|w| word_gaps(c, w)).reduce(|| vec![0.0; depth], merge);
        (gaps, words.len())
    };
    let mut acc = 0.0;
    let k_hat: Vec<f64> = sup_gap
        .iter()
        .map(|g| {
            acc += g;
            acc.exp()
        })
        .collect();
    let k_hat_root = k_hat.iter().enumerate().map(|(i, k)| k.powf(1.0 / (i + 1) as f64)).collect();
    ScanReport { depth, exhaustive, words, sup_gap, k_hat, k_hat_root }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Subcritical,
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct M0Report {
    pub regime: Regime,
    pub k: usize,
    /// `p_0^-k M_0^k`, divided by `k` in the critical case.
    pub a_k: [[f64; 3]; 3],
    /// Largest entry in columns 2 and 3.
    pub off_pattern: f64,
    /// Scale of the first column against `(p_0^2 - p_a p_(b-1), p_a p_b, p_0 p_b)`.
    pub lambda0: f64,
    /// Per-row `A_k(i, 1) / shape_i` over `lambda0`; all 1 for the exact shape.
    pub shape_ratios: [f64; 3],
    /// `max_k |A_k - A_(k-1)|` over the last step.
    pub last_step: f64,
}

/// Asymptotics of `M_0^k`: `p_0^-k M_0^k` (scaled by `1/k` when
/// `p_a p_(b-1) = p_0^2`) up to `k = 200`.
pub fn m0_asymptotics(sys: &NumerationSystem) -> Result<M0Report, GibbsError> {
    let (a, b) = (i64::from(sys.a()), i64::from(sys.b()));
    let p = |i| sys.p_at(i);
    let lhs = p(0) * p(0);
    let rhs = p(a) * p(b - 1);
    if rhs > lhs {
        return Err(GibbsError::Supercritical);
    }
    let regime = if rhs == lhs { Regime::Critical } else { Regime::Subcritical };
    let p0 = rational_to_f64(&p(0));
    let m0 = sys.digit_matrices()[0].map(|x| rational_to_f64(x) / p0);
    let mut power = crate::dense::Matrix::identity(3);
    let scaled = |m: &crate::dense::Matrix<f64>, k: usize| {
        let f = if regime == Regime::Critical { 1.0 / k as f64 } else { 1.0 };
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = m.get(i, j) * f;
            }
        }
        out
    };
    let mut prev = [[0.0; 3]; 3];
    let mut last_step = 0.0;
    for k in 1..=CRITICAL_HORIZON {
        power = &power * &m0;
        let cur = scaled(&power, k);
        if k == CRITICAL_HORIZON {
            last_step = (0..9).map(|i| (cur[i / 3][i % 3] - prev[i / 3][i % 3]).abs()).fold(0.0, f64::max);
        }
        prev = cur;
    }
    let a_k = prev;
    let off_pattern = a_k.iter().flat_map(|r| [r[1].abs(), r[2].abs()]).fold(0.0, f64::max);
    let f = |q: Rational| rational_to_f64(&q);
    let shape = [f(lhs - rhs), f(p(a) * p(b)), f(p(0) * p(b))];
    let lambda0 = a_k[1][0] / shape[1];
    let shape_ratios = [0, 1, 2].map(|i| {
        if shape[i] == 0.0 {
            if a_k[i][0].abs() < 1e-12 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            a_k[i][0] / (shape[i] * lambda0)
        }
    });
    Ok(M0Report { regime, k: CRITICAL_HORIZON, a_k, off_pattern, lambda0, shape_ratios, last_step })
}
