use std::ops::Index;

use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

/// A vector of complex amplitudes in the computational basis.
///
/// Basis index convention: the bitstring `b_1 b_2 ... b_n` maps to the
/// integer with `b_1` as the most significant bit, so `|0100>` is index 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            amplitudes: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::from_amplitudes(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// The computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amplitudes[index] = C64::new(1.0, 0.0);
        v
    }

    /// The computational basis state named by a bitstring such as `"0011"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = bits_to_index(bits)?;
        Ok(Self::basis(1 << bits.len(), index))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of {}- and {}-dim vectors",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Unit vector along `self`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_amplitudes(self.amplitudes.iter().map(|&z| z * c).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: C64, other: &StateVector) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("axpy on vectors of different dim".into()));
        }
        Ok(Self::from_amplitudes(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(&a, &b)| a + c * b)
                .collect(),
        ))
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &StateVector) -> Result<Self> {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// Multiplies by a global phase so the first component with modulus
    /// above `tol` is real and positive.
    pub fn with_canonical_phase(&self, tol: f64) -> Self {
        match self.amplitudes.iter().find(|z| z.norm() > tol) {
            Some(z) => self.scale(z.conj() / z.norm()),
            None => self.clone(),
        }
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        Ok(self
            .sub(other)?
            .amplitudes
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

impl Index<usize> for StateVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.amplitudes[i]
    }
}

/// Integer index of a bitstring, leftmost character most significant.
pub fn bits_to_index(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > 30 {
        return Err(Error::InvalidData(format!("bad bitstring length: {bits:?}")));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidData(format!("bad bitstring: {bits:?}"))),
    })
}

/// Bitstring of `index` over `n` qubits, leftmost character most significant.
pub fn index_to_bits(index: usize, n: usize) -> String {
    (0..n)
        .map(|k| if (index >> (n - 1 - k)) & 1 == 1 { '1' } else { '0' })
        .collect()
}
