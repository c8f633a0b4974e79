//! The numeration system of a quadratic base: carry set, digit matrices,
//! partition maps and the matrix families derived from them.

use std::collections::{HashSet, VecDeque};

use num::{BigInt, One, Signed, Zero};

use super::field::{BetaNumber, QuadraticBase};
use super::BetaError;
use crate::classify::MatrixFamily;
use crate::dense::Matrix;
use crate::matcore::{Mat2, Vec2};
use crate::scalar::{format_rational, rational_to_f64, Rational};

/// Node cap for the carry-set search.
pub const REACHABLE_CAP: usize = 100_000;

/// `x -> scale * x + shift` with `scale > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub scale: BetaNumber,
    pub shift: BetaNumber,
}

impl AffineMap {
    pub fn apply(&self, x: &BetaNumber) -> BetaNumber {
        &(&self.scale * x) + &self.shift
    }

    pub fn invert(&self, y: &BetaNumber) -> BetaNumber {
        (y - &self.shift).div(&self.scale).expect("scale is nonzero")
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap { scale: &self.scale * &inner.scale, shift: &(&self.scale * &inner.shift) + &self.shift }
    }

    /// Image of `[0, 1]`.
    pub fn interval(&self) -> (BetaNumber, BetaNumber) {
        (self.shift.clone(), &self.scale + &self.shift)
    }
}

/// Breadth-first closure of `{0}` under `y = beta x + (eps - k)`, `eps` in
/// `0..=a`, `k` in `0..d`, restricted to `-1 < y < alpha`. Elements come out
/// in discovery order, starting with 0.
pub fn reachable_set(base: QuadraticBase, d: usize, cap: usize) -> Result<Vec<BetaNumber>, BetaError> {
    if (d as f64) <= base.beta_f64() {
        return Err(BetaError::InvalidDigitCount(d));
    }
    let alpha = alpha_of(base, d);
    let minus_one = base.from_int(-1);
    let bb = i64::from(base.a()) + 1;
    let beta = base.beta();
    let zero = base.from_int(0);
    let mut seen: HashSet<BetaNumber> = HashSet::from([zero.clone()]);
    let mut order = vec![zero.clone()];
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        let bx = &beta * &x;
        for eps in 0..bb {
            for k in 0..d as i64 {
                let y = &bx + &base.from_int(eps - k);
                if y.try_cmp(&minus_one)?.is_gt() && y.try_cmp(&alpha)?.is_lt() && seen.insert(y.clone()) {
                    if order.len() >= cap {
                        return Err(BetaError::CapExceeded(cap));
                    }
                    order.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(order)
}

fn alpha_of(base: QuadraticBase, d: usize) -> BetaNumber {
    let num = base.from_int(d as i64 - 1);
    num.div(&(&base.beta() - &base.from_int(1))).expect("beta != 1")
}

/// `M_eps(i, j) = p_k` when `k = eps + beta i_i - i_j` is an integer digit.
pub fn build_digit_matrices(
    base: QuadraticBase,
    carries: &[BetaNumber],
    p: &[Rational],
) -> Vec<Matrix<Rational>> {
    let r = carries.len();
    let beta = base.beta();
    (0..=i64::from(base.a()))
        .map(|eps| {
            let mut m = Matrix::zeros(r, r);
            for (i, ii) in carries.iter().enumerate() {
                let shifted = &(&beta * ii) + &base.from_int(eps);
                for (j, ij) in carries.iter().enumerate() {
                    if let Some(k) = (&shifted - ij).as_integer() {
                        if !k.is_negative() && k < BigInt::from(p.len()) {
                            let k: usize = k.try_into().expect("small digit");
                            m.set(i, j, p[k].clone());
                        }
                    }
                }
            }
            m
        })
        .collect()
}

/// `p_i`, zero outside the digit range.
fn pk(p: &[Rational], i: i64) -> Rational {
    if i < 0 || i as usize >= p.len() {
        Rational::zero()
    } else {
        p[i as usize].clone()
    }
}

/// The closed-form digit matrix for carry order `(0, 1, beta - a)`.
pub fn digit_matrix_display(base: QuadraticBase, p: &[Rational], eps: i64) -> Matrix<Rational> {
    let (a, b) = (i64::from(base.a()), i64::from(base.b()));
    let z = Rational::zero;
    Matrix::from_rows(vec![
        vec![pk(p, eps), pk(p, eps - 1), z()],
        vec![z(), z(), pk(p, a + eps)],
        vec![pk(p, b + eps), pk(p, b + eps - 1), z()],
    ])
}

/// `S_eps = R_eps` for `eps < a`, `R_a o R_{eps-a}` otherwise, with
/// `R_eps(x) = (x + eps) / beta`; checks that the images tile `[0, 1]`.
pub fn build_partition_maps(base: QuadraticBase) -> Result<Vec<AffineMap>, BetaError> {
    let (a, b) = (i64::from(base.a()), i64::from(base.b()));
    let inv_beta = base.beta().inv()?;
    let r = |eps: i64| AffineMap { scale: inv_beta.clone(), shift: base.from_int(eps).div(&base.beta()).expect("beta != 0") };
    let maps: Vec<AffineMap> = (0..a + b).map(|eps| if eps < a { r(eps) } else { r(a).compose(&r(eps - a)) }).collect();
    let mut expected_left = base.from_int(0);
    for (eps, m) in maps.iter().enumerate() {
        let (l, rr) = m.interval();
        if l != expected_left || !rr.try_cmp(&l)?.is_gt() {
            return Err(BetaError::TilingViolation(format!("piece {eps} is [{l}, {rr}], expected left end {expected_left}")));
        }
        expected_left = rr;
    }
    if expected_left != base.from_int(1) {
        return Err(BetaError::TilingViolation(format!("pieces end at {expected_left}, not 1")));
    }
    Ok(maps)
}

/// Matrix families derived from the digit matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct StarFamilies {
    /// Cylinder generators over `{0, ..., a+b-1}`.
    pub star: Vec<Matrix<Rational>>,
    /// Commutation family over `{0, ..., 2a}`.
    pub diamond: Vec<Matrix<Rational>>,
    /// 2x2 matrices with `Y M_eps = P_eps Y`.
    pub reduced: Vec<Matrix<Rational>>,
    /// 3x2 matrices `Q_eps` for `eps` in `{0, ..., a+b-1}`.
    pub q: Vec<Matrix<Rational>>,
    pub y: Matrix<Rational>,
}

pub fn build_star_and_reduced(
    base: QuadraticBase,
    p: &[Rational],
    digit: &[Matrix<Rational>],
) -> Result<StarFamilies, BetaError> {
    let (a, b) = (i64::from(base.a()), i64::from(base.b()));
    let star: Vec<_> = (0..a + b)
        .map(|eps| if eps < a { digit[eps as usize].clone() } else { &digit[a as usize] * &digit[(eps - a) as usize] })
        .collect();
    let diamond: Vec<_> = (0..=2 * a)
        .map(|eps| if eps <= a { &digit[0] * &digit[eps as usize] } else { digit[(eps - a) as usize].clone() })
        .collect();
    let reduced: Vec<_> = (0..=2 * a)
        .map(|eps| {
            if eps <= a {
                let (p0, pa) = (pk(p, 0), pk(p, a));
                Matrix::from_rows(vec![
                    vec![p0.clone() * pk(p, eps), p0 * pk(p, eps - 1)],
                    vec![pa.clone() * pk(p, b + eps), pa * pk(p, b + eps - 1)],
                ])
            } else {
                let z = Rational::zero();
                Matrix::from_rows(vec![vec![pk(p, eps - a), pk(p, eps - a - 1)], vec![z.clone(), z]])
            }
        })
        .collect();
    let q: Vec<_> = (0..a + b)
        .map(|eps| {
            let z = Rational::zero();
            Matrix::from_rows(vec![
                vec![pk(p, eps), pk(p, eps - 1)],
                vec![z.clone(), z],
                vec![pk(p, b + eps), pk(p, b + eps - 1)],
            ])
        })
        .collect();
    let (o, z) = (Rational::one(), Rational::zero());
    let y = Matrix::from_rows(vec![vec![o.clone(), z.clone(), z.clone()], vec![z.clone(), o, z]]);
    for (eps, (md, pe)) in diamond.iter().zip(&reduced).enumerate() {
        if &y * md != pe * &y {
            return Err(BetaError::CommutationFailure(eps));
        }
    }
    Ok(StarFamilies { star, diamond, reduced, q, y })
}

/// A `p`-distributed Bernoulli convolution in a quadratic base, with all of
/// its matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct NumerationSystem {
    base: QuadraticBase,
    p: Vec<Rational>,
    p64: Vec<f64>,
    alpha: BetaNumber,
    carries: Vec<BetaNumber>,
    digit: Vec<Matrix<Rational>>,
    pieces: Vec<AffineMap>,
    families: StarFamilies,
}

impl NumerationSystem {
    pub fn new(a: u32, b: u32, p: Vec<Rational>) -> Result<Self, BetaError> {
        let base = QuadraticBase::new(a, b)?;
        let d = a as usize + 1;
        if p.len() != d {
            return Err(BetaError::InvalidProbability(format!("expected {d} weights, got {}", p.len())));
        }
        if p.iter().any(Signed::is_negative) {
            return Err(BetaError::InvalidProbability("negative weight".into()));
        }
        let total: Rational = p.iter().cloned().sum();
        if !total.is_one() {
            return Err(BetaError::InvalidProbability(format!("weights sum to {}", format_rational(&total))));
        }
        let carries = reachable_set(base, d, REACHABLE_CAP)?;
        let expected = [base.from_int(0), base.from_int(1), &base.beta() - &base.from_int(i64::from(a))];
        if carries.len() != 3 || !expected.iter().all(|x| carries.contains(x)) {
            let got: Vec<String> = carries.iter().map(ToString::to_string).collect();
            return Err(BetaError::UnexpectedCarrySet(got.join(", ")));
        }
        let digit = build_digit_matrices(base, &carries, &p);
        for (eps, m) in digit.iter().enumerate() {
            if *m != digit_matrix_display(base, &p, eps as i64) {
                return Err(BetaError::DisplayMismatch(eps));
            }
        }
        let pieces = build_partition_maps(base)?;
        let families = build_star_and_reduced(base, &p, &digit)?;
        let p64 = p.iter().map(rational_to_f64).collect();
        Ok(NumerationSystem { base, p, p64, alpha: alpha_of(base, d), carries, digit, pieces, families })
    }

    pub fn uniform(a: u32, b: u32) -> Result<Self, BetaError> {
        let d = i64::from(a) + 1;
        Self::new(a, b, (0..d).map(|_| Rational::new(BigInt::one(), BigInt::from(d))).collect())
    }

    pub fn base(&self) -> QuadraticBase {
        self.base
    }
    pub fn a(&self) -> u32 {
        self.base.a()
    }
    pub fn b(&self) -> u32 {
        self.base.b()
    }
    /// Number of digits, `a + 1`.
    pub fn d(&self) -> usize {
        self.p.len()
    }
    pub fn p(&self) -> &[Rational] {
        &self.p
    }
    pub fn p_f64(&self) -> &[f64] {
        &self.p64
    }
    /// `p_i`, zero outside the digit range.
    pub fn p_at(&self, i: i64) -> Rational {
        pk(&self.p, i)
    }
    pub fn is_positive(&self) -> bool {
        self.p.iter().all(Signed::is_positive)
    }
    pub fn alpha(&self) -> &BetaNumber {
        &self.alpha
    }
    pub fn carries(&self) -> &[BetaNumber] {
        &self.carries
    }
    pub fn digit_matrices(&self) -> &[Matrix<Rational>] {
        &self.digit
    }
    pub fn pieces(&self) -> &[AffineMap] {
        &self.pieces
    }
    /// Size of the cylinder alphabet, `a + b`.
    pub fn letters(&self) -> usize {
        self.pieces.len()
    }
    pub fn families(&self) -> &StarFamilies {
        &self.families
    }
    pub fn star(&self) -> &[Matrix<Rational>] {
        &self.families.star
    }

    /// The reduced 2x2 family with a starting vector, when it is
    /// column-allowable.
    pub fn reduced_family(&self, v: Vec2<Rational>) -> Result<MatrixFamily<Rational>, BetaError> {
        let ms = self
            .families
            .reduced
            .iter()
            .map(|m| Mat2::new(m.get(0, 0).clone(), m.get(0, 1).clone(), m.get(1, 0).clone(), m.get(1, 1).clone()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| BetaError::InvalidProbability(format!("reduced family: {e}")))?;
        MatrixFamily::new(ms, v).map_err(|e| BetaError::InvalidProbability(format!("reduced family: {e}")))
    }

    /// `[S_{w_1} o ... o S_{w_n}]([0, 1])`.
    pub fn cylinder_interval(&self, word: &[usize]) -> (BetaNumber, BetaNumber) {
        let mut lo = self.base.from_int(0);
        let mut hi = self.base.from_int(1);
        for &e in word.iter().rev() {
            lo = self.pieces[e].apply(&lo);
            hi = self.pieces[e].apply(&hi);
        }
        (lo, hi)
    }
}
