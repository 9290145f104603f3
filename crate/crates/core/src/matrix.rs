//! Small dense symmetric matrices (d <= 3) and their eigen-decomposition.
//!
//! Only the upper triangle is stored, row-major, so symmetry holds by
//! construction. The decomposition is a cyclic Jacobi rotation scheme run to
//! machine precision; for d <= 3 a sweep costs a handful of flops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    dim: usize,
    upper: Vec<f64>,
}

#[inline]
fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows 0..i contribute dim, dim-1, ..., dim-i+1 entries
    i * dim - i * i.saturating_sub(1) / 2 + (j - i)
}

impl SymmetricMatrix {
    /// Builds a matrix from its upper triangle (row-major, `dim*(dim+1)/2` entries).
    pub fn new(dim: usize, upper: Vec<f64>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::input(format!("matrix dimension {dim} not in 1..=3")));
        }
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(Error::input(format!(
                "expected {} upper-triangle entries for d = {dim}, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        if let Some(bad) = upper.iter().find(|v| !v.is_finite()) {
            return Err(Error::input(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self { dim, upper })
    }

    /// Builds from full rows; only the upper triangle is read.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::input("matrix rows must be square"));
            }
            upper.extend_from_slice(&row[i..]);
        }
        Self::new(dim, upper)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Self {
            dim,
            upper: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diag(&vec![1.0; dim]).expect("identity is valid")
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut upper = vec![0.0; dim * (dim + 1) / 2];
        for (i, &v) in values.iter().enumerate() {
            upper[upper_index(dim, i, i)] = v;
        }
        Self::new(dim, upper)
    }

    /// `Q diag(values) Q^T`, where `vectors[i]` is the i-th column of `Q`.
    pub fn from_spectrum(values: &[f64], vectors: &[Vec<f64>]) -> Result<Self> {
        let dim = values.len();
        if vectors.len() != dim || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::input("spectrum shape mismatch"));
        }
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                upper.push(values.iter().zip(vectors).map(|(&l, q)| l * q[i] * q[j]).sum());
            }
        }
        Self::new(dim, upper)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[upper_index(self.dim, i, j)]
    }

    pub fn to_dense(&self) -> [[f64; MAX_DIM]; MAX_DIM] {
        let mut a = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in a.iter_mut().enumerate().take(self.dim) {
            for (j, v) in row.iter_mut().enumerate().take(self.dim) {
                *v = self.get(i, j);
            }
        }
        a
    }

    pub fn scale(&self, mu: f64) -> Self {
        Self {
            dim: self.dim,
            upper: self.upper.iter().map(|v| v * mu).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::input("matrix dimension mismatch"));
        }
        Self::new(
            self.dim,
            self.upper.iter().zip(&other.upper).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(A B)` for symmetric `A`, `B`.
    pub fn trace_product(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j) * other.get(j, i);
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Sorted eigenvalues with an orthonormal eigenvector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn reconstruct(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_spectrum(&self.values, &self.vectors).expect("spectrum of a finite matrix reconstructs")
    }
}

const MAX_SWEEPS: usize = 64;

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
pub fn eig_sym(m: &SymmetricMatrix) -> Result<Spectrum> {
    if m.upper.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite matrix entry"));
    }
    let n = m.dim;
    let mut a = m.to_dense();
    let mut v = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off == 0.0 || off <= f64::EPSILON * f64::EPSILON * 1e-4 * diag {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut().take(n) {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    Ok(Spectrum { values, vectors })
}
