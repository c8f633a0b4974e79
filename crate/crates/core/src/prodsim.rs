//! Left products `P_n = M_{w_1} ... M_{w_n}` along words, with renormalized
//! float trajectories and a numerical uniform-convergence probe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::MatrixFamily;
use crate::matcore::{Mat2, Vec2};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProdError {
    #[error("letter {letter} at position {pos} is outside an alphabet of size {size}")]
    LetterOutOfRange { letter: usize, pos: usize, size: usize },
    #[error("word is finite and has no letter at position {0}")]
    WordTooShort(usize),
    #[error("depth must be at least 2")]
    DepthTooSmall,
}

/// A finite or eventually periodic word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Word {
    pub prefix: Vec<usize>,
    /// Repeated forever after the prefix; empty for finite words.
    pub period: Vec<usize>,
}

impl Word {
    pub fn finite(letters: Vec<usize>) -> Self {
        Word { prefix: letters, period: Vec::new() }
    }

    pub fn periodic(prefix: Vec<usize>, period: Vec<usize>) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        Word { prefix, period }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Letter at 0-based position `i`.
    pub fn letter(&self, i: usize) -> Option<usize> {
        if i < self.prefix.len() {
            Some(self.prefix[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - self.prefix.len()) % self.period.len()])
        }
    }

    /// The first `n` letters.
    pub fn take(&self, n: usize) -> Result<Vec<usize>, ProdError> {
        (0..n).map(|i| self.letter(i).ok_or(ProdError::WordTooShort(i))).collect()
    }

    pub fn check_alphabet(&self, size: usize) -> Result<(), ProdError> {
        for (pos, &letter) in self.prefix.iter().chain(self.period.iter()).enumerate() {
            if letter >= size {
                return Err(ProdError::LetterOutOfRange { letter, pos, size });
            }
        }
        Ok(())
    }
}

fn check_letters(size: usize, letters: &[usize]) -> Result<(), ProdError> {
    match letters.iter().position(|&l| l >= size) {
        Some(pos) => Err(ProdError::LetterOutOfRange { letter: letters[pos], pos, size }),
        None => Ok(()),
    }
}

/// Exact (or plain float) product of the first letters.
pub fn product_prefix<T: Scalar>(fam: &MatrixFamily<T>, letters: &[usize]) -> Result<Mat2<T>, ProdError> {
    check_letters(fam.len(), letters)?;
    let mut p = Mat2::identity();
    for &l in letters {
        p = &p * &fam.matrices[l];
    }
    Ok(p)
}

/// A float product stored as `exp(log_scale) * mat` with `max(mat) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledProduct {
    pub mat: Mat2<f64>,
    pub log_scale: f64,
}

impl ScaledProduct {
    pub fn identity() -> Self {
        ScaledProduct { mat: Mat2::identity(), log_scale: 0.0 }
    }

    pub fn push(&mut self, m: &Mat2<f64>) {
        let p = &self.mat * m;
        let s = p.max_entry();
        self.mat = p.scale(&(1.0 / s));
        self.log_scale += s.ln();
    }
}

pub fn product_prefix_scaled(fam: &MatrixFamily<f64>, letters: &[usize]) -> Result<ScaledProduct, ProdError> {
    check_letters(fam.len(), letters)?;
    let mut p = ScaledProduct::identity();
    for &l in letters {
        p.push(&fam.matrices[l]);
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub n: usize,
    /// `n(P_n V)`.
    pub normalized: f64,
    /// `d_columns(P_n M_V)` when an `M_V` is supplied.
    pub d_columns_mv: Option<f64>,
    /// `log max(P_n)`.
    pub log_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

/// Records `n(P_n v)` for `n = 0..=len` along the first `len` letters.
pub fn trajectory(
    fam: &MatrixFamily<f64>,
    word: &Word,
    len: usize,
    v: &Vec2<f64>,
    mv: Option<&Mat2<f64>>,
) -> Result<Trajectory, ProdError> {
    let letters = word.take(len)?;
    check_letters(fam.len(), &letters)?;
    let mut p = ScaledProduct::identity();
    let mut points = Vec::with_capacity(len + 1);
    let record = |n: usize, p: &ScaledProduct| TrajectoryPoint {
        n,
        normalized: p.mat.mul_vec(v).n().unwrap_or(f64::NAN),
        d_columns_mv: mv.map(|m| (&p.mat * m).d_columns()),
        log_scale: p.log_scale,
    };
    points.push(record(0, &p));
    for (i, &l) in letters.iter().enumerate() {
        p.push(&fam.matrices[l]);
        points.push(record(i + 1, &p));
    }
    Ok(Trajectory { points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MvBounds {
    /// Infimum of `n(P_n V)` over probed prefixes.
    pub m_hat: f64,
    /// Supremum of `n(P_n V)` over probed prefixes.
    pub big_m_hat: f64,
    pub exhaustive: bool,
    pub prefixes: usize,
}

impl MvBounds {
    /// `M_V = ((m M) (1-m 1-M))`.
    pub fn mv(&self) -> Option<Mat2<f64>> {
        Mat2::new(self.m_hat, self.big_m_hat, 1.0 - self.m_hat, 1.0 - self.big_m_hat).ok()
    }
}

/// Bounds of `n(P_n V)` over all prefixes of length `1..=depth`; exhaustive
/// when the prefix tree has at most `cap` nodes, otherwise sampled.
pub fn mv_bounds(fam: &MatrixFamily<f64>, depth: usize, cap: usize, seed: u64) -> MvBounds {
    let s = fam.len();
    let mut nodes = 0usize;
    let mut width = 1usize;
    let mut exhaustive = true;
    for _ in 0..depth {
        width = width.saturating_mul(s);
        nodes = nodes.saturating_add(width);
        if nodes > cap {
            exhaustive = false;
            break;
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut prefixes = 0usize;
    if exhaustive {
        let mut stack: Vec<(Mat2<f64>, usize)> = vec![(Mat2::identity(), 0)];
        while let Some((p, k)) = stack.pop() {
            if k > 0 {
                let x = p.mul_vec(&fam.v).n().unwrap_or(f64::NAN);
                lo = lo.min(x);
                hi = hi.max(x);
                prefixes += 1;
            }
            if k < depth {
                for m in &fam.matrices {
                    let q = &p * m;
                    let sc = q.max_entry();
                    stack.push((q.scale(&(1.0 / sc)), k + 1));
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (cap / depth.max(1)).max(1);
        for _ in 0..samples {
            let mut p = ScaledProduct::identity();
            for _ in 0..depth {
                p.push(&fam.matrices[rng.random_range(0..s)]);
                let x = p.mat.mul_vec(&fam.v).n().unwrap_or(f64::NAN);
                lo = lo.min(x);
                hi = hi.max(x);
                prefixes += 1;
            }
        }
    }
    MvBounds { m_hat: lo, big_m_hat: hi, exhaustive, prefixes }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub depth: usize,
    /// Number of uniformly random words, on top of the structured probes.
    pub samples: usize,
    pub seed: u64,
    /// Gap below which the probe reports convergence.
    pub threshold: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { depth: 60, samples: 200, seed: 0, threshold: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub depth: usize,
    /// First index of the tail window `[depth/2, depth]`.
    pub window_start: usize,
    /// Largest `|n(P_p V) - n(P_q V)|` with `p, q` in the window.
    pub gap: f64,
    pub converges: bool,
    pub threshold: f64,
    pub worst_word: Vec<usize>,
    pub probes: usize,
    /// Largest `d_columns(P_n M_V)` over probed words, for `n = 0..=depth`.
    pub dcol_curve: Vec<f64>,
}

/// Word families that stress the uniform Cauchy property: blocks switching
/// at every time inside the window, alternations and random words.
fn probe_words(s: usize, cfg: &ProbeConfig) -> Vec<Word> {
    let depth = cfg.depth;
    // Switch points are thinned past depth 256 to bound memory.
    let stride = (depth / 256).max(1);
    let mut blocks: Vec<Vec<usize>> = (0..s).map(|i| vec![i]).collect();
    for i in 0..s {
        for j in 0..s {
            if i != j {
                blocks.push(vec![i, j]);
            }
        }
    }
    let mut words = Vec::new();
    for u in &blocks {
        words.push(Word::periodic(Vec::new(), u.clone()));
        for w in &blocks {
            if u == w {
                continue;
            }
            let mut prefix = Vec::new();
            while prefix.len() <= depth {
                words.push(Word::periodic(prefix.clone(), w.clone()));
                for _ in 0..stride {
                    prefix.extend_from_slice(u);
                }
            }
            for m in (1..=depth / u.len().max(1)).step_by(stride) {
                let mut period: Vec<usize> = Vec::new();
                for _ in 0..m {
                    period.extend_from_slice(u);
                }
                for _ in 0..m {
                    period.extend_from_slice(w);
                }
                words.push(Word::periodic(Vec::new(), period));
            }
        }
    }
    // Three-block words u^N x w^infinity.
    for u in 0..s {
        for x in 0..s {
            for w in 0..s {
                if u == x && x == w {
                    continue;
                }
                for n in (0..=depth).step_by(stride) {
                    let mut prefix = vec![u; n];
                    prefix.push(x);
                    words.push(Word::periodic(prefix, vec![w]));
                }
            }
        }
    }
    // Uniform random words, one independent stream per sample index.
    for k in 0..cfg.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64);
        let prefix = (0..=depth).map(|_| rng.random_range(0..s)).collect();
        words.push(Word::finite(prefix));
    }
    words
}

/// Numerical check of uniform convergence of `n(P_n V)`.
pub fn convergence_probe(fam: &MatrixFamily<f64>, cfg: &ProbeConfig) -> Result<ProbeReport, ProdError> {
    if cfg.depth < 2 {
        return Err(ProdError::DepthTooSmall);
    }
    let depth = cfg.depth;
    let window_start = depth / 2;
    let bounds = mv_bounds(fam, depth.min(16), 2_000_000, cfg.seed);
    let mv = bounds.mv();
    let words = probe_words(fam.len(), cfg);
    let (gap, worst, dcol_curve) = words
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let t = trajectory(fam, w, depth, &fam.v, mv.as_ref()).expect("probe words are long enough");
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in &t.points[window_start..] {
                lo = lo.min(p.normalized);
                hi = hi.max(p.normalized);
            }
            let curve: Vec<f64> = t.points.iter().map(|p| p.d_columns_mv.unwrap_or(0.0)).collect();
            (hi - lo, i, curve)
        })
        .reduce(
            || (0.0, 0, vec![0.0f64; depth + 1]),
            |a, b| {
                let curve = a.2.iter().zip(&b.2).map(|(x, y)| x.max(*y)).collect();
                // Ties go to the earlier word so the result is independent of scheduling.
                let (g, i) = if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { (b.0, b.1) } else { (a.0, a.1) };
                (g, i, curve)
            },
        );
    Ok(ProbeReport {
        depth,
        window_start,
        gap,
        converges: gap < cfg.threshold,
        threshold: cfg.threshold,
        worst_word: words[worst].take(depth)?,
        probes: words.len(),
        dcol_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn intro() -> MatrixFamily<Rational> {
        let m0 = Mat2::from_rows([[rat(1, 2), rat(1, 2)], [rat(1, 3), rat(2, 3)]]).unwrap();
        let m1 = Mat2::from_rows([[rat(1, 2), rat(1, 2)], [rat(1, 2), rat(1, 2)]]).unwrap();
        MatrixFamily::new(vec![m0, m1], Vec2::new(int(1), int(1))).unwrap()
    }

    #[test]
    fn word_access() {
        let w = Word::periodic(vec![2], vec![0, 1]);
        assert_eq!(w.take(5).unwrap(), vec![2, 0, 1, 0, 1]);
        assert_eq!(Word::finite(vec![1]).take(2), Err(ProdError::WordTooShort(1)));
    }

    #[test]
    fn intro_closed_form_three_zeros() {
        let p = product_prefix(&intro(), &[0, 0, 0]).unwrap();
        let six = int(6).pow(-3);
        let tenth = rat(1, 10);
        let expected = Mat2::from_rows([
            [tenth.clone() * (int(4) + int(6) * six.clone()), tenth.clone() * (int(6) - int(6) * six.clone())],
            [tenth.clone() * (int(4) - int(4) * six.clone()), tenth * (int(6) + int(4) * six)],
        ])
        .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn scaled_matches_plain() {
        let f = intro().to_f64();
        let letters = [0, 1, 1, 0, 1, 0, 0, 0];
        let plain = product_prefix(&f, &letters).unwrap();
        let sc = product_prefix_scaled(&f, &letters).unwrap();
        let back = sc.mat.scale(&sc.log_scale.exp());
        for (x, y) in plain.rows().iter().flatten().zip(back.rows().iter().flatten()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn mv_bounds_of_intro() {
        let b = mv_bounds(&intro().to_f64(), 8, 100_000, 1);
        assert!(b.exhaustive);
        assert!((b.m_hat - 0.5).abs() < 1e-12 && (b.big_m_hat - 0.5).abs() < 1e-12);
        assert!(b.mv().unwrap().d_columns().abs() < 1e-15);
    }

    #[test]
    fn probe_on_divergent_family() {
        let m0 = Mat2::from_rows([[2.0, 1.0], [0.0, 1.0]]).unwrap();
        let m1 = Mat2::from_rows([[1.0, 1.0], [0.0, 2.0]]).unwrap();
        let f = MatrixFamily::new(vec![m0, m1], Vec2::new(1.0, 1.0)).unwrap();
        let r = convergence_probe(&f, &ProbeConfig { depth: 30, samples: 20, ..Default::default() }).unwrap();
        assert!(!r.converges);
        assert!(r.gap > 0.1);
    }
}
