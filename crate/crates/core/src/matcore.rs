//! Nonnegative 2x2 matrices, normalization, projective distances and
//! contraction coefficients.

use std::f64::consts::FRAC_PI_2;
use std::ops::Mul;

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatError {
    #[error("vector is zero or has a negative entry")]
    DegenerateVector,
    #[error("matrix has a negative entry")]
    NegativeEntry,
    #[error("matrix has a null column")]
    NotColumnAllowable,
    #[error("cone stability precondition violated: {0}")]
    ConePrecondition(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vec2<T> {
    pub x1: T,
    pub x2: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x1: T, x2: T) -> Self {
        Vec2 { x1, x2 }
    }

    pub fn is_nonnegative_nonzero(&self) -> bool {
        !self.x1.lt_zero() && !self.x2.lt_zero() && !(self.x1.is_zero() && self.x2.is_zero())
    }

    /// First coordinate of the sum-normalized vector.
    pub fn n(&self) -> Result<T, MatError> {
        if !self.is_nonnegative_nonzero() {
            return Err(MatError::DegenerateVector);
        }
        Ok(self.x1.clone() / (self.x1.clone() + self.x2.clone()))
    }

    /// The vector scaled to coordinate sum 1.
    pub fn normalize(&self) -> Result<Vec2<T>, MatError> {
        let s = self.x1.clone() + self.x2.clone();
        if !self.is_nonnegative_nonzero() {
            return Err(MatError::DegenerateVector);
        }
        Ok(Vec2::new(self.x1.clone() / s.clone(), self.x2.clone() / s))
    }

    pub fn to_f64(&self) -> Vec2<f64> {
        Vec2::new(self.x1.to_f64_lossy(), self.x2.to_f64_lossy())
    }
}

/// A nonnegative column-allowable matrix `((a b) (c d))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, MatError> {
        if [&a, &b, &c, &d].iter().any(|x| x.lt_zero()) {
            return Err(MatError::NegativeEntry);
        }
        if (a.is_zero() && c.is_zero()) || (b.is_zero() && d.is_zero()) {
            return Err(MatError::NotColumnAllowable);
        }
        Ok(Mat2 { a, b, c, d })
    }

    /// Skips validation; callers guarantee nonnegativity and nonzero columns.
    pub(crate) fn new_unchecked(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_rows(rows: [[T; 2]; 2]) -> Result<Self, MatError> {
        let [[a, b], [c, d]] = rows;
        Mat2::new(a, b, c, d)
    }

    pub fn identity() -> Self {
        Mat2::new_unchecked(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn a(&self) -> &T {
        &self.a
    }
    pub fn b(&self) -> &T {
        &self.b
    }
    pub fn c(&self) -> &T {
        &self.c
    }
    pub fn d(&self) -> &T {
        &self.d
    }

    pub fn rows(&self) -> [[T; 2]; 2] {
        [[self.a.clone(), self.b.clone()], [self.c.clone(), self.d.clone()]]
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn transpose(&self) -> Self {
        Mat2::new_unchecked(self.a.clone(), self.c.clone(), self.b.clone(), self.d.clone())
    }

    pub fn col1(&self) -> Vec2<T> {
        Vec2::new(self.a.clone(), self.c.clone())
    }

    pub fn col2(&self) -> Vec2<T> {
        Vec2::new(self.b.clone(), self.d.clone())
    }

    pub fn is_positive(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|x| x.gt_zero())
    }

    pub fn has_null_row(&self) -> bool {
        (self.a.is_zero() && self.b.is_zero()) || (self.c.is_zero() && self.d.is_zero())
    }

    pub fn is_row_allowable(&self) -> bool {
        !self.has_null_row()
    }

    pub fn is_scalar_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn mul_vec(&self, v: &Vec2<T>) -> Vec2<T> {
        Vec2::new(
            self.a.clone() * v.x1.clone() + self.b.clone() * v.x2.clone(),
            self.c.clone() * v.x1.clone() + self.d.clone() * v.x2.clone(),
        )
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat2::new_unchecked(
            self.a.clone() * s.clone(),
            self.b.clone() * s.clone(),
            self.c.clone() * s.clone(),
            self.d.clone() * s.clone(),
        )
    }

    /// Largest entry, used for renormalizing long float products.
    pub fn max_entry(&self) -> T {
        let mut m = self.a.clone();
        for x in [&self.b, &self.c, &self.d] {
            if *x > m {
                m = x.clone();
            }
        }
        m
    }

    /// `|det A| / ((a+c)(b+d))`.
    pub fn d_columns(&self) -> T {
        let s1 = self.a.clone() + self.c.clone();
        let s2 = self.b.clone() + self.d.clone();
        self.det().abs() / (s1 * s2)
    }

    /// `|n(col1) - n(col2)|`, equal to [`Mat2::d_columns`].
    pub fn d_columns_via_columns(&self) -> T {
        let n1 = self.col1().n().expect("column-allowable");
        let n2 = self.col2().n().expect("column-allowable");
        (n1 - n2).abs()
    }

    /// Column distance of the transpose. Requires row-allowability.
    pub fn d_rows(&self) -> Option<T> {
        self.is_row_allowable().then(|| self.transpose().d_columns())
    }

    /// Angle between the two columns, in radians.
    pub fn angle(&self) -> f64 {
        let t1 = self.a.to_f64_lossy().atan2(self.c.to_f64_lossy());
        let t2 = self.b.to_f64_lossy().atan2(self.d.to_f64_lossy());
        (t1 - t2).abs().min(FRAC_PI_2)
    }

    /// Hilbert projective distance between the columns; positive matrices only.
    pub fn hilbert(&self) -> Option<f64> {
        if !self.is_positive() {
            return None;
        }
        let f = |x: &T| x.to_f64_lossy().ln();
        Some(((f(&self.a) - f(&self.c)) - (f(&self.b) - f(&self.d))).abs())
    }

    /// Birkhoff contraction coefficient `|sqrt(ad) - sqrt(bc)| / (sqrt(ad) + sqrt(bc))`,
    /// zero when a row is null.
    pub fn tau(&self) -> f64 {
        if self.has_null_row() {
            return 0.0;
        }
        let ad = (self.a.to_f64_lossy() * self.d.to_f64_lossy()).sqrt();
        let bc = (self.b.to_f64_lossy() * self.c.to_f64_lossy()).sqrt();
        (ad - bc).abs() / (ad + bc)
    }

    /// `|det A| / min((a+c)^2, (b+d)^2)`.
    pub fn tau1(&self) -> T {
        let s1 = self.a.clone() + self.c.clone();
        let s2 = self.b.clone() + self.d.clone();
        let m = if s1 < s2 { s1 } else { s2 };
        self.det().abs() / (m.clone() * m)
    }

    /// `|det A| / (min(a,b) min(c,d))`; positive matrices only.
    pub fn tau2(&self) -> Option<T> {
        if !self.is_positive() {
            return None;
        }
        let min = |x: &T, y: &T| if x < y { x.clone() } else { y.clone() };
        Some(self.det().abs() / (min(&self.a, &self.b) * min(&self.c, &self.d)))
    }

    /// All coefficients at once, in floating point.
    pub fn metrics(&self) -> CoefficientReport {
        CoefficientReport {
            d_columns: self.d_columns().to_f64_lossy(),
            d_rows: self.d_rows().map(|x| x.to_f64_lossy()),
            tau: self.tau(),
            tau1: self.tau1().to_f64_lossy(),
            tau2: self.tau2().map(|x| x.to_f64_lossy()),
            hilbert: self.hilbert(),
            angle: self.angle(),
        }
    }

    /// Perron eigenvalue and sum-normalized Perron vector, in floating point.
    /// Multiples of the identity get `(1/2, 1/2)`.
    pub fn perron_vector(&self) -> (f64, Vec2<f64>) {
        let m = self.to_f64();
        let (a, b, c, d) = (m.a, m.b, m.c, m.d);
        let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
        let lambda = (a + d + disc) / 2.0;
        if self.is_scalar_identity() {
            return (lambda, Vec2::new(0.5, 0.5));
        }
        // (b, lambda - a) and (lambda - d, c) both span the eigenline; take
        // the one with the larger mass.
        let v1 = Vec2::new(b, lambda - a);
        let v2 = Vec2::new(lambda - d, c);
        let v = if v1.x1 + v1.x2 >= v2.x1 + v2.x2 { v1 } else { v2 };
        let s = v.x1 + v.x2;
        (lambda, Vec2::new(v.x1 / s, v.x2 / s))
    }

    /// Perron data in this context when the discriminant has an exact root.
    pub fn perron_vector_exact(&self) -> Option<(T, Vec2<T>)> {
        let two = T::from_i64(2);
        let amd = self.a.clone() - self.d.clone();
        let disc = amd.clone() * amd + T::from_i64(4) * self.b.clone() * self.c.clone();
        let root = disc.sqrt_exact()?;
        let lambda = (self.a.clone() + self.d.clone() + root) / two.clone();
        if self.is_scalar_identity() {
            let half = T::one() / two;
            return Some((lambda, Vec2::new(half.clone(), half)));
        }
        let v1 = Vec2::new(self.b.clone(), lambda.clone() - self.a.clone());
        let v = if v1.is_nonnegative_nonzero() {
            v1
        } else {
            Vec2::new(lambda.clone() - self.d.clone(), self.c.clone())
        };
        Some((lambda, v.normalize().ok()?))
    }

    /// Whether the cone is mapped into itself. Requires `det A >= 0` and a
    /// Perron vector inside the cone.
    pub fn cone_stable(&self, cone: &Cone<T>) -> Result<bool, MatError> {
        if self.det().lt_zero() {
            return Err(MatError::ConePrecondition("negative determinant".into()));
        }
        if !self.is_scalar_identity() {
            let (lo, hi) = cone.bounds_f64();
            let inside = match self.perron_vector_exact() {
                Some((_, v)) => cone.contains(&v),
                None => {
                    let x = self.perron_vector().1.x1;
                    x >= lo - crate::scalar::FLOAT_TOLERANCE && x <= hi + crate::scalar::FLOAT_TOLERANCE
                }
            };
            if !inside {
                return Err(MatError::ConePrecondition("Perron vector outside the cone".into()));
            }
        }
        Ok(self.maps_cone_into(cone))
    }

    /// Whether both generating rays land inside the cone.
    pub fn maps_cone_into(&self, cone: &Cone<T>) -> bool {
        cone.contains(&self.mul_vec(&cone.r1)) && cone.contains(&self.mul_vec(&cone.r2))
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        Mat2::new_unchecked(
            self.a.to_f64_lossy(),
            self.b.to_f64_lossy(),
            self.c.to_f64_lossy(),
            self.d.to_f64_lossy(),
        )
    }
}

impl<T: Scalar> Mul for &Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, o: &Mat2<T>) -> Mat2<T> {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        Mat2::new_unchecked(
            a.clone() * o.a.clone() + b.clone() * o.c.clone(),
            a.clone() * o.b.clone() + b.clone() * o.d.clone(),
            c.clone() * o.a.clone() + d.clone() * o.c.clone(),
            c.clone() * o.b.clone() + d.clone() * o.d.clone(),
        )
    }
}

/// The closed cone spanned by two nonnegative rays.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone<T> {
    pub r1: Vec2<T>,
    pub r2: Vec2<T>,
}

impl<T: Scalar> Cone<T> {
    pub fn new(r1: Vec2<T>, r2: Vec2<T>) -> Result<Self, MatError> {
        if !r1.is_nonnegative_nonzero() || !r2.is_nonnegative_nonzero() {
            return Err(MatError::DegenerateVector);
        }
        Ok(Cone { r1, r2 })
    }

    fn bounds(&self) -> (T, T) {
        let n1 = self.r1.n().expect("validated ray");
        let n2 = self.r2.n().expect("validated ray");
        if n1 <= n2 {
            (n1, n2)
        } else {
            (n2, n1)
        }
    }

    fn bounds_f64(&self) -> (f64, f64) {
        let (lo, hi) = self.bounds();
        (lo.to_f64_lossy(), hi.to_f64_lossy())
    }

    /// Nonnegative vectors are ordered by their normalized first coordinate.
    pub fn contains(&self, v: &Vec2<T>) -> bool {
        let Ok(x) = v.n() else { return false };
        let (lo, hi) = self.bounds();
        if T::EXACT {
            lo <= x && x <= hi
        } else {
            (lo <= x || lo.near(&x)) && (x <= hi || hi.near(&x))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientReport {
    pub d_columns: f64,
    pub d_rows: Option<f64>,
    pub tau: f64,
    pub tau1: f64,
    pub tau2: Option<f64>,
    pub hilbert: Option<f64>,
    pub angle: f64,
}

/// Ratio `d_columns(A' A) / d_columns(A')` computed in this context.
pub fn contraction_ratio<T: Scalar>(a: &Mat2<T>, a_prime: &Mat2<T>) -> T {
    (a_prime * a).d_columns() / a_prime.d_columns()
}
