//! Dense vectors and square matrices over a scalar domain.
//!
//! Dimensions in this problem family are small (the instances of interest
//! have n <= 10, plus the block matrices of the 3-SAT reduction), so the
//! storage is plainly dense and row-major.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::num::Num;

#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T: Num> {
    entries: Vec<T>,
}

impl<T: Num> Vector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        Vector { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Vector { entries: vec![T::zero(); n] }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Vector { entries: entries.iter().map(|&v| T::from_i64(v)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &T {
        &self.entries[i]
    }

    pub fn dot(&self, other: &Vector<T>) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let mut acc = T::zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc = acc.add(&a.mul(b));
        }
        Ok(acc)
    }

    pub fn scale(&self, factor: &T) -> Vector<T> {
        Vector { entries: self.entries.iter().map(|e| e.mul(factor)).collect() }
    }

    pub fn max_abs(&self) -> T {
        let mut best = T::zero();
        for e in &self.entries {
            let a = e.abs();
            if a.total_cmp(&best) == Ordering::Greater {
                best = a;
            }
        }
        best
    }

    /// Componentwise lexicographic order; the canonical order used for
    /// layer points and hull output.
    pub fn lex_cmp(&self, other: &Vector<T>) -> Ordering {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Num> {
    n: usize,
    // row-major, n*n entries
    entries: Vec<T>,
}

impl<T: Num> Matrix<T> {
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "square matrix required");
            entries.extend(row.iter().map(|&v| T::from_i64(v)));
        }
        Matrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix { n, entries: vec![T::zero(); n * n] };
        for i in 0..n {
            m.entries[i * n + i] = T::one();
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        Matrix { n, entries: vec![T::zero(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: T) {
        self.entries[row * self.n + col] = v;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// Matrix-vector product `T x`, the single-step system update.
    pub fn mat_vec(&self, x: &Vector<T>) -> Result<Vector<T>> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        let mut out = Vec::with_capacity(self.n);
        for r in 0..self.n {
            let mut acc = T::zero();
            for c in 0..self.n {
                let e = self.get(r, c);
                if !e.is_zero() {
                    acc = acc.add(&e.mul(x.get(c)));
                }
            }
            out.push(acc);
        }
        Ok(Vector::new(out))
    }

    pub fn mat_mul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut out: Matrix<T> = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let e = self.get(r, k);
                if e.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = out.get(r, c).add(&e.mul(other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix<T> {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        let mut best = T::zero();
        for e in &self.entries {
            let a = e.abs();
            if a.total_cmp(&best) == Ordering::Greater {
                best = a;
            }
        }
        best
    }

    /// Gauss-Jordan inverse. Errors on a singular matrix; in exact mode
    /// the test is an exact zero pivot.
    pub fn inverse(&self) -> Result<Matrix<T>> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv: Matrix<T> = Matrix::identity(n);
        for col in 0..n {
            // partial pivot on largest magnitude
            let mut pivot = None;
            let mut best = T::zero();
            for r in col..n {
                let mag = a.get(r, col).abs();
                if !mag.is_zero() && mag.total_cmp(&best) == Ordering::Greater {
                    best = mag;
                    pivot = Some(r);
                }
            }
            let pivot = pivot.ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for c in 0..n {
                    let tmp = a.get(col, c).clone();
                    a.set(col, c, a.get(pivot, c).clone());
                    a.set(pivot, c, tmp);
                    let tmp = inv.get(col, c).clone();
                    inv.set(col, c, inv.get(pivot, c).clone());
                    inv.set(pivot, c, tmp);
                }
            }
            let p = a.get(col, col).clone();
            for c in 0..n {
                a.set(col, c, a.get(col, c).div(&p));
                inv.set(col, c, inv.get(col, c).div(&p));
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let v = a.get(r, c).sub(&factor.mul(a.get(col, c)));
                    a.set(r, c, v);
                    let v = inv.get(r, c).sub(&factor.mul(inv.get(col, c)));
                    inv.set(r, c, v);
                }
            }
        }
        Ok(inv)
    }
}
