//! Small dense matrices for the 3x3 and rectangular numeration matrices.

use std::ops::Mul;

use num::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.cols + j] = x;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols).map(<[T]>::to_vec).collect()
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn column_is_zero(&self, j: usize) -> bool {
        (0..self.rows).all(|i| self.get(i, j).is_zero())
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }
}

impl<T: Clone + Zero + Mul<Output = T>> Matrix<T> {
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone()))
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + v[i].clone() * self.get(i, j).clone()))
            .collect()
    }

    pub fn add(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(x, y)| x.clone() + y.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<T: Clone + Zero + Mul<Output = T>> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * o.get(k, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}
