//! Dense matrices over the crate's coefficient rings.
//!
//! Matrix dimensions here are (d+1)! at most, so everything is dense and
//! unoptimized.  Ring elements carry their own parameters (field order,
//! amplitude), so constructors take an exemplar element to know which ring
//! they are working in.

use crate::scalars::{FqElement, Scalar};

/// Minimal ring interface.  `zero_like`/`one_like` produce constants with
/// the same parameters as `self`, which is what parameter-carrying scalar
/// types need.
pub trait RingElem: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn neg_ref(&self) -> Self {
        self.zero_like().sub_ref(self)
    }
}

impl RingElem for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero(self.params())
    }
    fn one_like(&self) -> Self {
        Scalar::one(self.params())
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl RingElem for FqElement {
    fn zero_like(&self) -> Self {
        FqElement::zero(self.q()).expect("valid field order")
    }
    fn one_like(&self) -> Self {
        FqElement::one(self.q()).expect("valid field order")
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: RingElem> Matrix<T> {
    pub fn zero(rows: usize, cols: usize, like: &T) -> Self {
        Matrix { rows, cols, data: vec![like.zero_like(); rows * cols] }
    }

    pub fn identity(n: usize, like: &T) -> Self {
        let mut m = Self::zero(n, n, like);
        for i in 0..n {
            m.data[i * n + i] = like.one_like();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &T) {
        let slot = i * self.cols + j;
        self.data[slot] = self.data[slot].add_ref(v);
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let like = &self.data[0];
        let mut out = Self::zero(self.rows, rhs.cols, like);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero_elem() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero_elem() {
                        continue;
                    }
                    let prod = a.mul_ref(b);
                    out.add_to(i, j, &prod);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> Self {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut out = Self::identity(self.rows, &self.data[0]);
        for _ in 0..e {
            out = out.matmul(self);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let like = &self.data[0];
        let (zero, one) = (like.zero_like(), like.one_like());
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { &one } else { &zero };
                if self.at(i, j) != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn map<U: RingElem>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| f(x)).collect() }
    }

    pub fn try_map<U: RingElem, E>(
        &self,
        mut f: impl FnMut(&T) -> Result<U, E>,
    ) -> Result<Matrix<U>, E> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in &self.data {
            data.push(f(x)?);
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// Rows with a nonzero entry in column j.
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| !self.at(i, j).is_zero_elem()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let cols = self.cols;
        self.data.iter().enumerate().map(move |(k, v)| (k / cols, k % cols, v))
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries().filter(|(_, _, v)| !v.is_zero_elem())
    }
}

impl<T: RingElem + std::fmt::Display> std::fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl<T: RingElem + std::fmt::Display> std::fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Matrix({}x{})\n{}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ScalarParams;

    fn fq(q: u32, v: u32) -> FqElement {
        FqElement::new(q, v).unwrap()
    }

    #[test]
    fn identity_and_multiplication_over_fq() {
        let like = fq(5, 0);
        let id = Matrix::identity(3, &like);
        assert!(id.is_identity());
        let m = Matrix::from_fn(3, 3, |i, j| fq(5, ((i + 2 * j) % 5) as u32));
        assert_eq!(id.matmul(&m), m);
        assert_eq!(m.matmul(&id), m);
    }

    #[test]
    fn associativity_spot_check() {
        let a = Matrix::from_fn(2, 3, |i, j| fq(7, ((i * 3 + j) % 7) as u32));
        let b = Matrix::from_fn(3, 2, |i, j| fq(7, ((2 * i + j + 1) % 7) as u32));
        let c = Matrix::from_fn(2, 2, |i, j| fq(7, ((i + j + 3) % 7) as u32));
        assert_eq!(a.matmul(&b).matmul(&c), a.matmul(&b.matmul(&c)));
    }

    #[test]
    fn powers_over_scalar() {
        let p = ScalarParams::new(3, 1).unwrap();
        let like = Scalar::zero(p);
        // Nilpotent single off-diagonal entry.
        let mut n = Matrix::zero(2, 2, &like);
        n.set(0, 1, Scalar::one(p));
        assert!(n.pow(2).entries().all(|(_, _, v)| v.is_zero()));
        assert!(n.pow(0).is_identity());
    }

    #[test]
    fn column_support_reports_nonzero_rows() {
        let p = ScalarParams::new(3, 1).unwrap();
        let like = Scalar::zero(p);
        let mut m = Matrix::zero(3, 3, &like);
        m.set(0, 1, Scalar::one(p));
        m.set(2, 1, Scalar::from_int(p, -1));
        assert_eq!(m.column_support(0), Vec::<usize>::new());
        assert_eq!(m.column_support(1), vec![0, 2]);
    }
}
