//! Symmetric matrix type with exact mirror storage.

use std::ops::Index;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Symmetric `n × n` matrix. Entries satisfy `a[(i,j)] == a[(j,i)]` exactly:
/// every mutation writes both mirror positions, and constructors either fill
/// from the upper triangle or symmetrize as `(A + Aᵀ)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>, // row-major, full storage
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Build from a closure evaluated once per upper-triangle entry and
    /// mirrored, so symmetry is exact by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetrize an arbitrary square matrix as `(A + Aᵀ)/2`.
    pub fn symmetrize(a: &Matrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot symmetrize a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        Ok(SymMatrix::from_fn(a.rows(), |i, j| {
            0.5 * (a[(i, j)] + a[(j, i)])
        }))
    }

    /// Build from nested rows, symmetrizing; rows must form a square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        SymMatrix::symmetrize(&m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Set entry `(i, j)` and its mirror `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n, "order mismatch");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n, "order mismatch");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `self + jitter·I`.
    pub fn add_scaled_identity(&self, jitter: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.set(i, i, out.get(i, i) + jitter);
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len(), "matvec shape mismatch");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Quadratic form `vᵀ A v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let av = self.matvec(v);
        v.iter().zip(&av).map(|(x, y)| x * y).sum()
    }

    /// Largest absolute difference to another symmetric matrix.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n, "order mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn frobenius_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n, "order mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Gershgorin upper bound on the largest eigenvalue.
    pub fn gershgorin_max(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let radius: f64 = (0..self.n)
                    .filter(|&j| j != i)
                    .map(|j| self.get(i, j).abs())
                    .sum();
                self.get(i, i) + radius
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

// Serialized as nested rows so privacy/model JSON stays human-readable.
impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(deserializer)?;
        if rows.len() != rows.first().map_or(0, Vec::len) {
            return Err(D::Error::custom("symmetric matrix must be square"));
        }
        SymMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_mirrors_both_entries() {
        let mut a = SymMatrix::zeros(3);
        a.set(0, 2, 5.0);
        assert_eq!(a.get(2, 0), 5.0);
        assert_eq!(a.get(0, 2), a.get(2, 0));
    }

    #[test]
    fn symmetrize_averages() {
        let m = Matrix::from_rows(&[vec![1.0, 3.0], vec![1.0, 2.0]]).unwrap();
        let s = SymMatrix::symmetrize(&m).unwrap();
        assert_eq!(s.get(0, 1), 2.0);
        assert_eq!(s.get(1, 0), 2.0);
    }

    #[test]
    fn json_round_trip() {
        let a = SymMatrix::from_fn(2, |i, j| (i + j) as f64);
        let text = serde_json::to_string(&a).unwrap();
        let b: SymMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gershgorin_bounds_identity() {
        let a = SymMatrix::identity(4);
        assert_eq!(a.gershgorin_max(), 1.0);
    }
}
