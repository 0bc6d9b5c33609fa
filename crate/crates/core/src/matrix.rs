//! Small dense square matrices over a [`Scalar`] field.

use nalgebra::DMatrix;

use crate::scalar::{Scalar, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<S> {
    dim: usize,
    /// row-major
    data: Vec<S>,
}

impl<S: Scalar> ComplexMatrix<S> {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn diagonal(values: Vec<S>) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.into_iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds from rows; panics if the rows do not form a square matrix.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        ComplexMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| s.clone() * a.clone()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(self.dim), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(S::modulus).fold(0.0, f64::max)
    }

    /// `max |self − other|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.add(&other.scale(&-S::one())).max_abs()
    }

    /// Direct sum `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let n = self.dim + other.dim;
        let mut out = Self::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                out[(self.dim + i, self.dim + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    pub fn to_c64(&self) -> ComplexMatrix<C64> {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(S::to_c64).collect(),
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self[(i, j)].to_c64())
    }
}

impl ComplexMatrix<C64> {
    pub fn from_dmatrix(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        let n = m.nrows();
        ComplexMatrix {
            dim: n,
            data: (0..n * n).map(|k| m[(k / n, k % n)]).collect(),
        }
    }

    /// `max |U*U − I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .max_abs_diff(&ComplexMatrix::identity(self.dim))
    }
}

impl<S> std::ops::Index<(usize, usize)> for ComplexMatrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.dim + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.dim + j]
    }
}
