//! Small dense square matrices and a partially pivoted LU factorization.
//!
//! Dimensions here are `8n` for modest `n`, so a row-major `Vec<f64>` is all
//! the storage we need.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

/// Square row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix rows must be square");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    pub(crate) fn from_row_major(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `vᵀ M`, i.e. `Mᵀ v`.
    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (r, &vr) in v.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += vr * m;
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self[(r, k)];
                if a == 0.0 {
                    continue;
                }
                for c in 0..d {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(r, &xr)| xr * self.row(r).iter().zip(y).map(|(m, yc)| m * yc).sum::<f64>())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self[(r, c)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|M + Mᵀ|` entry; zero for an antisymmetric matrix.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] + self[(c, r)]).abs());
            }
        }
        worst
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        self.antisymmetry_defect() <= tol
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.dim + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (no usable pivot in column {column})")]
    Singular { column: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// `P A = L U` with partial (row) pivoting.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    dim: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    min_pivot: f64,
    one_norm: f64,
}

impl LuFactorization {
    /// A pivot is treated as zero when it falls below `dim · ε · max|A|`.
    pub fn new(a: &Matrix) -> Result<Self, LinalgError> {
        let d = a.dim();
        if a.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let scale = a.max_abs();
        let zero_pivot = d.max(1) as f64 * f64::EPSILON * scale;
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..d).collect();
        let mut min_pivot = f64::INFINITY;

        for col in 0..d {
            let (piv_row, piv_abs) = (col..d)
                .map(|r| (r, lu[r * d + col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if scale == 0.0 || piv_abs <= zero_pivot {
                return Err(LinalgError::Singular { column: col });
            }
            if piv_row != col {
                for c in 0..d {
                    lu.swap(col * d + c, piv_row * d + c);
                }
                perm.swap(col, piv_row);
            }
            let pivot = lu[col * d + col];
            min_pivot = min_pivot.min(pivot.abs());
            for r in col + 1..d {
                let factor = lu[r * d + col] / pivot;
                lu[r * d + col] = factor;
                if factor != 0.0 {
                    for c in col + 1..d {
                        lu[r * d + c] -= factor * lu[col * d + c];
                    }
                }
            }
        }

        Ok(Self {
            dim: d,
            lu,
            perm,
            min_pivot: if d == 0 { 0.0 } else { min_pivot },
            one_norm: a.one_norm(),
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let d = self.dim;
        assert_eq!(b.len(), d);
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..d {
            let row = &self.lu[r * d..r * d + r];
            y[r] -= row.iter().zip(&y[..r]).map(|(l, v)| l * v).sum::<f64>();
        }
        for r in (0..d).rev() {
            let row = &self.lu[r * d + r + 1..(r + 1) * d];
            let acc = y[r] - row.iter().zip(&y[r + 1..]).map(|(u, v)| u * v).sum::<f64>();
            y[r] = acc / self.lu[r * d + r];
        }
        y
    }

    /// Smallest pivot magnitude encountered during elimination.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// `‖A‖₁ · ‖A⁻¹‖₁`, with the inverse formed column by column.
    pub fn condition_estimate(&self) -> f64 {
        let d = self.dim;
        let mut inv_norm = 0.0f64;
        let mut e = vec![0.0; d];
        for c in 0..d {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            let col = self.solve(&e);
            inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
        }
        self.one_norm * inv_norm
    }
}
