//! Zero-pattern classification of finite families and the five-case
//! convergence test for normalized products applied to a positive vector.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::matcore::{MatError, Mat2, Vec2};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("family is empty")]
    EmptyFamily,
    #[error("starting vector must be positive")]
    NonPositiveVector,
    #[error("family does not satisfy case {0}")]
    CaseNotSatisfied(u8),
    #[error("only cases 1 and 2 admit a conjugating matrix")]
    UnsupportedCase(u8),
    #[error("no admissible alpha: lower bound {lo} vs upper bound {hi}")]
    InfeasibleAlpha { lo: String, hi: String },
    #[error("transformed family fails case {0}")]
    TransformedFamilyViolates(u8),
    #[error("letter {0} is outside the alphabet")]
    LetterOutOfRange(usize),
    #[error("singular matrix at position {0}")]
    SingularMatrix(usize),
    #[error(transparent)]
    Matrix(#[from] MatError),
}

/// Reporting label. Diagonal and antidiagonal take precedence, then the
/// null-row shapes, then the single-zero shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroPattern {
    Positive,
    Upper,
    Lower,
    Diagonal,
    Antidiagonal,
    TopleftZero,
    BottomrightZero,
    RankDeficientOther,
}

impl ZeroPattern {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroPattern::Positive => "positive",
            ZeroPattern::Upper => "upper",
            ZeroPattern::Lower => "lower",
            ZeroPattern::Diagonal => "diagonal",
            ZeroPattern::Antidiagonal => "antidiagonal",
            ZeroPattern::TopleftZero => "topleft-zero",
            ZeroPattern::BottomrightZero => "bottomright-zero",
            ZeroPattern::RankDeficientOther => "rank-deficient-other",
        }
    }
}

pub fn zero_pattern<T: Scalar>(m: &Mat2<T>) -> ZeroPattern {
    let z = [m.a().is_zero(), m.b().is_zero(), m.c().is_zero(), m.d().is_zero()];
    match z {
        [false, true, true, false] => ZeroPattern::Diagonal,
        [true, false, false, true] => ZeroPattern::Antidiagonal,
        [true, true, _, _] | [_, _, true, true] => ZeroPattern::RankDeficientOther,
        [false, false, true, false] => ZeroPattern::Upper,
        [false, true, false, false] => ZeroPattern::Lower,
        [true, false, false, false] => ZeroPattern::TopleftZero,
        [false, false, false, true] => ZeroPattern::BottomrightZero,
        _ => ZeroPattern::Positive,
    }
}

// The case conditions quantify over matrices of a given form, read off the
// entries directly: a matrix may have several forms (a null row such as
// ((a b) (0 0)) is both upper triangular and of bottomright-zero form).
fn is_upper<T: Scalar>(m: &Mat2<T>) -> bool {
    m.c().is_zero()
}
fn is_lower<T: Scalar>(m: &Mat2<T>) -> bool {
    m.b().is_zero()
}
fn is_topleft_zero<T: Scalar>(m: &Mat2<T>) -> bool {
    m.a().is_zero()
}
fn is_bottomright_zero<T: Scalar>(m: &Mat2<T>) -> bool {
    m.d().is_zero()
}
fn is_diagonal<T: Scalar>(m: &Mat2<T>) -> bool {
    is_upper(m) && is_lower(m)
}
fn is_antidiagonal<T: Scalar>(m: &Mat2<T>) -> bool {
    is_topleft_zero(m) && is_bottomright_zero(m)
}

/// A finite family with its starting vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFamily<T> {
    pub matrices: Vec<Mat2<T>>,
    pub v: Vec2<T>,
}

impl<T: Scalar> MatrixFamily<T> {
    pub fn new(matrices: Vec<Mat2<T>>, v: Vec2<T>) -> Result<Self, ClassifyError> {
        if matrices.is_empty() {
            return Err(ClassifyError::EmptyFamily);
        }
        if !(v.x1.gt_zero() && v.x2.gt_zero()) {
            return Err(ClassifyError::NonPositiveVector);
        }
        Ok(MatrixFamily { matrices, v })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn to_f64(&self) -> MatrixFamily<f64> {
        MatrixFamily {
            matrices: self.matrices.iter().map(Mat2::to_f64).collect(),
            v: self.v.to_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Indices of the offending matrices.
    pub matrices: Vec<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: u8,
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub converges: bool,
    pub cases: BTreeSet<u8>,
    pub patterns: Vec<ZeroPattern>,
    pub reports: Vec<CaseReport>,
}

fn v1(idx: usize, reason: impl Into<String>) -> Violation {
    Violation { matrices: vec![idx], reason: reason.into() }
}

fn triangular_checks<T: Scalar>(
    f: &[Mat2<T>],
    out: &mut Vec<Violation>,
    upper_ok: impl Fn(&T, &T) -> bool,
    lower_ok: impl Fn(&T, &T) -> bool,
    upper_rule: &str,
    lower_rule: &str,
) {
    for (i, m) in f.iter().enumerate() {
        if is_upper(m) && !upper_ok(m.a(), m.d()) {
            out.push(v1(i, format!("upper triangular requires {upper_rule}")));
        }
        if is_lower(m) && !lower_ok(m.a(), m.d()) {
            out.push(v1(i, format!("lower triangular requires {lower_rule}")));
        }
    }
}

fn pair_checks<T: Scalar>(f: &[Mat2<T>], out: &mut Vec<Violation>, strict: bool) {
    for (i, m) in f.iter().enumerate().filter(|(_, m)| is_bottomright_zero(m)) {
        for (j, k) in f.iter().enumerate().filter(|(_, k)| is_topleft_zero(k)) {
            let lhs = m.b().clone() * k.c().clone();
            let rhs = k.b().clone() * m.c().clone();
            let ok = if strict { lhs < rhs } else { lhs >= rhs };
            if !ok {
                let rule = if strict { "b c' < b' c" } else { "b c' >= b' c" };
                out.push(Violation { matrices: vec![i, j], reason: format!("pair requires {rule}") });
            }
        }
    }
}

fn no_shape<T: Scalar>(f: &[Mat2<T>], out: &mut Vec<Violation>, pred: fn(&Mat2<T>) -> bool, name: &str) {
    for (i, m) in f.iter().enumerate() {
        if pred(m) {
            out.push(v1(i, format!("{name} matrices are excluded")));
        }
    }
}

fn case_violations<T: Scalar>(fam: &MatrixFamily<T>, case: u8) -> Vec<Violation> {
    let f = &fam.matrices;
    let mut out = Vec::new();
    match case {
        1 => {
            triangular_checks(f, &mut out, |a, d| a >= d, |a, d| a <= d, "a >= d", "a <= d");
            pair_checks(f, &mut out, false);
            no_shape(f, &mut out, is_diagonal, "diagonal");
            no_shape(f, &mut out, is_antidiagonal, "antidiagonal");
        }
        2 => {
            triangular_checks(f, &mut out, |a, d| a < d, |a, d| a > d, "a < d", "a > d");
            pair_checks(f, &mut out, true);
        }
        3 => {
            triangular_checks(f, &mut out, |a, d| a >= d, |a, d| a > d, "a >= d", "a > d");
            no_shape(f, &mut out, is_topleft_zero, "topleft-zero");
        }
        4 => {
            triangular_checks(f, &mut out, |a, d| a < d, |a, d| a <= d, "a < d", "a <= d");
            no_shape(f, &mut out, is_bottomright_zero, "bottomright-zero");
        }
        5 => {
            let v = &fam.v;
            for (i, m) in f.iter().enumerate() {
                let w = m.mul_vec(v);
                let same = if T::EXACT {
                    w.x1.clone() * v.x2.clone() == w.x2.clone() * v.x1.clone()
                } else {
                    (w.x1.clone() * v.x2.clone()).near(&(w.x2.clone() * v.x1.clone()))
                };
                if !same {
                    out.push(v1(i, "M V is not collinear with V"));
                }
            }
        }
        _ => unreachable!("cases are 1..=5"),
    }
    out
}

/// Decides uniform convergence of `n(P_n V)` over all infinite words.
pub fn classify<T: Scalar>(fam: &MatrixFamily<T>) -> Verdict {
    let reports: Vec<CaseReport> = (1..=5)
        .map(|case| {
            let violations = case_violations(fam, case);
            CaseReport { case, satisfied: violations.is_empty(), violations }
        })
        .collect();
    let cases: BTreeSet<u8> = reports.iter().filter(|r| r.satisfied).map(|r| r.case).collect();
    Verdict {
        converges: !cases.is_empty(),
        cases,
        patterns: fam.matrices.iter().map(zero_pattern).collect(),
        reports,
    }
}

/// Which of the two conjugation cases to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    Case1,
    Case2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaConstruction<T> {
    pub alpha: T,
    pub delta: Mat2<T>,
    pub delta_inv: Mat2<T>,
    /// Bounds `(lo, hi)` of the admissible interval; `None` when unconstrained.
    pub bounds: (Option<T>, Option<T>),
    pub transformed: MatrixFamily<T>,
}

fn delta_matrices<T: Scalar>(alpha: &T) -> (Mat2<T>, Mat2<T>) {
    let d = Mat2::new_unchecked(T::zero(), alpha.clone(), T::one(), T::zero());
    let di = Mat2::new_unchecked(T::zero(), T::one(), T::one() / alpha.clone(), T::zero());
    (d, di)
}

/// Chooses `alpha` inside the admissible interval for `Delta = ((0 alpha) (1 0))`
/// and builds the family in which every matrix has nonnegative determinant
/// (negative-determinant matrices enter as `Delta^-1 M` and `M Delta`).
pub fn build_delta<T: Scalar>(fam: &MatrixFamily<T>, mode: DeltaMode) -> Result<DeltaConstruction<T>, ClassifyError> {
    let case = match mode {
        DeltaMode::Case1 => 1,
        DeltaMode::Case2 => 2,
    };
    if !case_violations(fam, case).is_empty() {
        return Err(ClassifyError::CaseNotSatisfied(case));
    }
    let f = &fam.matrices;
    // Ratios b/c from bottomright-zero matrices and b'/c' from topleft-zero ones.
    let br: Vec<T> = f
        .iter()
        .filter(|m| is_bottomright_zero(*m) && !m.c().is_zero())
        .map(|m| m.b().clone() / m.c().clone())
        .collect();
    let tl: Vec<T> = f
        .iter()
        .filter(|m| is_topleft_zero(*m))
        .map(|m| m.b().clone() / m.c().clone())
        .collect();
    let max = |v: &[T]| v.iter().cloned().reduce(|x, y| if y > x { y } else { x });
    let min = |v: &[T]| v.iter().cloned().reduce(|x, y| if y < x { y } else { x });
    let (lo, hi) = match mode {
        DeltaMode::Case1 => (max(&tl), min(&br)),
        DeltaMode::Case2 => (max(&br), min(&tl)),
    };
    let two = T::from_i64(2);
    let alpha = match (&lo, &hi) {
        (Some(l), Some(h)) => (l.clone() + h.clone()) / two,
        (None, Some(h)) => h.clone() / two,
        (Some(l), None) if l.gt_zero() => l.clone() * two,
        _ => T::one(),
    };
    let feasible = match (&lo, &hi) {
        (Some(l), Some(h)) => match mode {
            DeltaMode::Case1 => l <= h,
            DeltaMode::Case2 => l < h,
        },
        _ => true,
    };
    if !feasible || !alpha.gt_zero() {
        return Err(ClassifyError::InfeasibleAlpha {
            lo: format!("{:?}", lo),
            hi: format!("{:?}", hi),
        });
    }
    let (delta, delta_inv) = delta_matrices(&alpha);
    let mut transformed = Vec::with_capacity(2 * f.len());
    for m in f {
        if m.det().lt_zero() {
            transformed.push(&delta_inv * m);
            transformed.push(m * &delta);
        } else {
            transformed.push(m.clone());
            transformed.push(&(&delta_inv * m) * &delta);
        }
    }
    let transformed = MatrixFamily { matrices: transformed, v: fam.v.clone() };
    if !case_violations(&transformed, case).is_empty() {
        return Err(ClassifyError::TransformedFamilyViolates(case));
    }
    if transformed.matrices.iter().any(|m| m.det().lt_zero()) {
        return Err(ClassifyError::TransformedFamilyViolates(case));
    }
    Ok(DeltaConstruction { alpha, delta, delta_inv, bounds: (lo, hi), transformed })
}

/// Parity sequence `eps_n = eps_{n-1} xor [det M_{w_n} < 0]`, starting at 0.
pub fn epsilon_sequence<T: Scalar>(fam: &MatrixFamily<T>, word: &[usize]) -> Result<Vec<u8>, ClassifyError> {
    let mut eps = Vec::with_capacity(word.len() + 1);
    let mut e = 0u8;
    eps.push(e);
    for (pos, &w) in word.iter().enumerate() {
        let m = fam.matrices.get(w).ok_or(ClassifyError::LetterOutOfRange(w))?;
        let det = m.det();
        if det.is_zero() {
            return Err(ClassifyError::SingularMatrix(pos));
        }
        if det.lt_zero() {
            e ^= 1;
        }
        eps.push(e);
    }
    Ok(eps)
}
