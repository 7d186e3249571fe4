use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use super::{StateVector, C64};
use crate::error::{Error, Result};

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// The rank-one operator `|ket><bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Self {
        Self::from_fn(ket.dim(), bra.dim(), |i, j| ket[i] * bra[j].conj())
    }

    /// Projector onto the span of an orthonormal set.
    pub fn projector(basis: &[StateVector]) -> Result<Self> {
        let dim = basis.first().map_or(0, StateVector::dim);
        let mut p = Self::zeros(dim, dim);
        for v in basis {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch("basis vectors differ in dim".into()));
            }
            p = &p + &Self::outer(v, v);
        }
        Ok(p)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> StateVector {
        StateVector::from_amplitudes((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn try_matmul(&self, rhs: &Matrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Matrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Kronecker product; entry `(i*rb + k, j*cb + l)` is `a(i,j) * b(k,l)`.
    pub fn kron(&self, rhs: &Matrix) -> Self {
        let (rb, cb) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * rb, self.cols * cb, |r, c| {
            self[(r / rb, c / cb)] * rhs[(r % rb, c % cb)]
        })
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a {}-dim vector",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        Ok(StateVector::from_amplitudes(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
                .collect(),
        ))
    }

    /// `<u| self |v>`.
    pub fn sandwich(&self, u: &StateVector, v: &StateVector) -> Result<C64> {
        let mv = self.apply(v)?;
        u.inner(&mv)
    }

    /// The small matrix with entries `<b_i| self |b_j>`.
    pub fn restrict(&self, basis: &[StateVector]) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let images = basis
            .iter()
            .map(|b| self.apply(b))
            .collect::<Result<Vec<_>>>()?;
        let n = basis.len();
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for (j, img) in images.iter().enumerate() {
                out[(i, j)] = basis[i].inner(img)?;
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> Result<f64> {
        Ok(self.try_sub(rhs)?.max_abs())
    }

    /// `max |m - m^dagger|`; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Deviation from being an orthogonal projector: `max(|P^2 - P|, |P - P^dagger|)`.
    pub fn projector_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let sq = self * self;
        let idem = sq.max_abs_diff(self).unwrap_or(f64::INFINITY);
        idem.max(self.hermiticity_defect())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; the `try_*` methods report it instead.

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = Matrix::identity(2);
        assert_eq!(i2.kron(&i2), Matrix::identity(4));
    }

    #[test]
    fn kron_x_identity_matches_index_formula() {
        let x = Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let k = x.kron(&Matrix::identity(2));
        let ones = [(0, 2), (1, 3), (2, 0), (3, 1)];
        for r in 0..4 {
            for col in 0..4 {
                let expected = if ones.contains(&(r, col)) { 1.0 } else { 0.0 };
                assert_eq!(k[(r, col)], c(expected), "entry ({r},{col})");
            }
        }
    }

    #[test]
    fn trace_of_identity() {
        assert_eq!(Matrix::identity(4).trace().unwrap(), c(4.0));
        assert!(Matrix::zeros(2, 3).trace().is_err());
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(a.try_matmul(&a), Err(Error::DimensionMismatch(_))));
        assert!(Matrix::from_vec(2, 2, vec![c(1.0)]).is_err());
    }

    #[test]
    fn restrict_projector_on_its_range_is_identity() {
        let s = 0.5f64.sqrt();
        let zero = StateVector::from_real(&[s, 0.0, 0.0, s]);
        let one = StateVector::from_real(&[0.0, s, s, 0.0]);
        let p = Matrix::projector(&[zero.clone(), one.clone()]).unwrap();
        let r = p.restrict(&[zero, one]).unwrap();
        assert!(r.max_abs_diff(&Matrix::identity(2)).unwrap() < 1e-15);
        assert!(p.projector_defect() < 1e-15);
    }

    #[test]
    fn sandwich_reads_single_entries() {
        let m = Matrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        let e1 = StateVector::basis(3, 1);
        let e2 = StateVector::basis(3, 2);
        assert_eq!(m.sandwich(&e1, &e2).unwrap(), C64::new(1.0, 2.0));
    }
}
