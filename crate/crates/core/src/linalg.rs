//! Dense matrices over exact rings: Laurent polynomials and rational functions.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::{Coeff, LaurentPoly, QRatio};

/// Minimal commutative-ring interface the matrix code needs.
pub trait RingElem: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Coefficient involution `q ↦ q⁻¹`.
    fn bar(&self) -> Self;
}

pub trait FieldElem: RingElem {
    fn inv(&self) -> Option<Self>;
}

impl<C: Coeff> RingElem for LaurentPoly<C> {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn bar(&self) -> Self {
        LaurentPoly::bar(self)
    }
}

impl<C: Coeff> RingElem for QRatio<C> {
    fn zero() -> Self {
        QRatio::zero()
    }
    fn one() -> Self {
        QRatio::one()
    }
    fn is_zero(&self) -> bool {
        QRatio::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn bar(&self) -> Self {
        QRatio::bar(self)
    }
}

impl<C: Coeff> FieldElem for QRatio<C> {
    fn inv(&self) -> Option<Self> {
        QRatio::inv(self).ok()
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: RingElem> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<T> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn map<U: RingElem>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Entrywise bar.
    pub fn bar(&self) -> Self {
        self.map(|x| x.bar())
    }

    /// Bar-conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().bar()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("{}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c).add(&a.mul(b));
                        out.set(r, c, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Shape("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).fold(T::zero(), |acc, c| acc.add(&self.get(r, c).mul(&v[c]))))
            .collect())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Shape("sub".into()));
        }
        Ok(Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| if r == c { *self.get(r, c) == T::one() } else { self.get(r, c).is_zero() }))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data.iter().enumerate().map(move |(k, v)| (k / self.cols, k % self.cols, v))
    }
}

impl<T: FieldElem> Mat<T> {
    /// Row-echelon reduction in place; returns pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else { continue };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = self.get(row, col).inv().expect("nonzero pivot");
            for c in col..self.cols {
                let v = self.get(row, c).mul(&inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = self.get(r, c).sub(&f.mul(self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self.get(r, c).clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        let piv = aug.echelon();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(n, n, |r, c| aug.get(r, n + c).clone()))
    }

    /// Solve `A X = B` for square nonsingular `A`.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        if self.rows != self.cols || b.rows != self.rows {
            return Err(Error::Shape("solve".into()));
        }
        let n = self.rows;
        let m = b.cols;
        let mut aug = Self::from_fn(n, n + m, |r, c| if c < n { self.get(r, c).clone() } else { b.get(r, c - n).clone() });
        let piv = aug.echelon();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(n, m, |r, c| aug.get(r, n + c).clone()))
    }
}

impl<C: Coeff> Mat<QRatio<C>> {
    /// Convert to Laurent polynomials if every entry is one.
    pub fn to_laurent(&self) -> Option<Mat<LaurentPoly<C>>> {
        let data = self.data.iter().map(|x| x.as_poly()).collect::<Option<Vec<_>>>()?;
        Some(Mat { rows: self.rows, cols: self.cols, data })
    }
}

impl<C: Coeff> Mat<LaurentPoly<C>> {
    pub fn to_ratio(&self) -> Mat<QRatio<C>> {
        self.map(|x| QRatio::from_poly(x.clone()))
    }

    /// Inverse over `ℤ[q,q⁻¹]`, failing if some entry is not a Laurent polynomial.
    pub fn inverse_laurent(&self) -> Result<Self> {
        self.to_ratio().inverse()?.to_laurent().ok_or_else(|| Error::NotIntegral("matrix inverse".into()))
    }
}

/// Serialised as a list of rows.
impl<T: Serialize> Serialize for Mat<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[T]> = if self.cols == 0 { vec![&[]; self.rows] } else { self.data.chunks(self.cols).collect() };
        rows.serialize(s)
    }
}

impl<'de, T: Deserialize<'de> + RingElem> Deserialize<'de> for Mat<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(d)?;
        Mat::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl<T: fmt::Display> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[r * self.cols + c])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mat").field("rows", &self.rows).field("cols", &self.cols).field("data", &self.data).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = LaurentPoly<BigInt>;
    type R = QRatio<BigInt>;

    fn r(ts: &[(i64, i64)]) -> R {
        R::from_poly(P::from_int_terms(ts))
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_rows(vec![
            vec![r(&[(0, 1), (-2, 1)]), r(&[(-1, 1)])],
            vec![r(&[(-1, 1)]), r(&[(0, 1)])],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&m).unwrap().is_identity());
    }

    #[test]
    fn rank_and_singular() {
        let m = Mat::from_rows(vec![vec![r(&[(1, 1)]), r(&[(2, 1)])], vec![r(&[(0, 1)]), r(&[(1, 1)])]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.inverse(), Err(Error::Singular));
    }

    #[test]
    fn solve_matches_inverse() {
        let a = Mat::from_rows(vec![vec![r(&[(0, 2)]), r(&[(1, 1)])], vec![r(&[(-1, 1)]), r(&[(0, 3)])]]).unwrap();
        let b = Mat::from_rows(vec![vec![r(&[(0, 1)])], vec![r(&[(2, 1)])]]).unwrap();
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        assert_eq!(a.inverse().unwrap().mul(&b).unwrap(), x);
    }

    #[test]
    fn unimodular_laurent_inverse() {
        let m = Mat::from_rows(vec![vec![P::one(), P::from_int_terms(&[(-1, 1)])], vec![P::zero(), P::one()]]).unwrap();
        let inv = m.inverse_laurent().unwrap();
        assert_eq!(*inv.get(0, 1), P::from_int_terms(&[(-1, -1)]));
    }
}
