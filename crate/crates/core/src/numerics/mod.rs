//! Dense vectors and column-major matrices.
//!
//! Both types validate their entries on construction, so every other module
//! can assume finite data.

pub mod linalg;

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Dot product of two equally sized slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm of a slice.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A finite real vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_finite(&entries)?;
        Ok(Self(entries))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    /// Unit basis vector `e_index` of length `len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = vec![0.0; len];
        v[index] = 1.0;
        Self(v)
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                op: "dot",
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(dot(&self.0, &other.0))
    }

    pub fn two_norm(&self) -> f64 {
        two_norm(self)
    }

    pub fn scaled(&self, alpha: f64) -> DenseVector {
        DenseVector(self.0.iter().map(|v| alpha * v).collect())
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: f64, other: &DenseVector, beta: f64) -> Result<DenseVector> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                op: "lin_comb",
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(DenseVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        ))
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        DenseVector::new(v)
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Vec<f64> {
        v.0
    }
}

/// Euclidean norm.
pub fn two_norm(v: &DenseVector) -> f64 {
    norm(&v.0)
}

/// A finite real matrix stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Build from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::usage(format!(
                "matrix must have at least one row and column, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "from_col_major",
                expected: rows * cols,
                got: data.len(),
            });
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    /// Build from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "from_row_major",
                expected: rows * cols,
                got: data.len(),
            });
        }
        let mut col_major = vec![0.0; data.len()];
        for i in 0..rows {
            for j in 0..cols {
                col_major[j * rows + i] = data[i * cols + j];
            }
        }
        Self::from_col_major(rows, cols, col_major)
    }

    /// Build from a slice of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension {
                    op: "from_rows",
                    expected: cols,
                    got: rows[i].len(),
                });
            }
            flat.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, &flat)
    }

    /// Build from columns of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            if c.len() != rows {
                return Err(Error::Dimension {
                    op: "from_columns",
                    expected: rows,
                    got: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self::from_col_major(rows, cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub(crate) fn from_col_major_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            out.extend((0..self.cols).map(|j| self.get(i, j)));
        }
        out
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.cols).map(|j| norm(self.col(j))).collect()
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                op: "matmul",
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = vec![0.0; self.rows * other.cols];
        let inner = self.cols;
        for j in 0..other.cols {
            let dst = &mut out[j * self.rows..(j + 1) * self.rows];
            let src = other.col(j);
            // Four columns per pass keep `dst` traffic down.
            let mut l = 0;
            while l + 4 <= inner {
                let (s0, s1, s2, s3) = (src[l], src[l + 1], src[l + 2], src[l + 3]);
                let r = dst.len();
                let (c0, c1, c2, c3) = (
                    &self.col(l)[..r],
                    &self.col(l + 1)[..r],
                    &self.col(l + 2)[..r],
                    &self.col(l + 3)[..r],
                );
                for i in 0..r {
                    dst[i] += s0 * c0[i] + s1 * c1[i] + s2 * c2[i] + s3 * c3[i];
                }
                l += 4;
            }
            for l in l..inner {
                let s = src[l];
                for (d, a) in dst.iter_mut().zip(self.col(l)) {
                    *d += s * a;
                }
            }
        }
        Ok(Self::from_col_major_unchecked(self.rows, other.cols, out))
    }

    /// `self^T * v`.
    pub fn transpose_matvec(&self, v: &DenseVector) -> Result<DenseVector> {
        if self.rows != v.len() {
            return Err(Error::Dimension {
                op: "transpose_matvec",
                expected: self.rows,
                got: v.len(),
            });
        }
        Ok(DenseVector(
            (0..self.cols).map(|j| dot(self.col(j), v.as_slice())).collect(),
        ))
    }

    /// Raw `self * v` on slices; callers guarantee `v.len() == cols`.
    pub(crate) fn matvec_slice(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, &s) in v.iter().enumerate() {
            if s != 0.0 {
                for (o, a) in out.iter_mut().zip(self.col(j)) {
                    *o += s * a;
                }
            }
        }
        out
    }
}

/// Matrix-vector product `M v`.
pub fn matvec(m: &DenseMatrix, v: &DenseVector) -> Result<DenseVector> {
    if m.cols != v.len() {
        return Err(Error::Dimension {
            op: "matvec",
            expected: m.cols,
            got: v.len(),
        });
    }
    Ok(DenseVector(m.matvec_slice(v.as_slice())))
}

/// Scale every column to unit Euclidean norm.
pub fn normalize_columns(m: &DenseMatrix) -> Result<DenseMatrix> {
    let mut data = m.data.clone();
    for j in 0..m.cols {
        let col = &mut data[j * m.rows..(j + 1) * m.rows];
        let nrm = norm(col);
        if nrm == 0.0 {
            return Err(Error::DegenerateColumn { index: j });
        }
        col.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok(DenseMatrix::from_col_major_unchecked(m.rows, m.cols, data))
}
