//! Sorted-triplet sparse matrices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    /// Row-major sorted, unique `(row, col)` keys.
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    /// Sorts the triplets and sums duplicates. Summation follows input order,
    /// so equal inputs give bitwise-equal matrices.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(r, c, v) in &triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidMesh(format!(
                    "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            entries: (0..n).map(|i| (i, i, 1.0)).collect(),
        }
    }

    /// Builds from a dense row-major matrix, dropping exact zeros.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
            t.extend(
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, &v)| (i, j, v)),
            );
        }
        Self::from_triplets(nrows, ncols, t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(r, c), |&(i, j, _)| (i, j))
            .map_or(0.0, |k| self.entries[k].2)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        Ok(y)
    }

    pub fn scaled(&self, factor: f64) -> SparseMatrix {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (r, c, v * factor))
                .collect(),
        }
    }

    /// `self - other`, with structurally missing entries treated as zero.
    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                found: other.nrows,
            });
        }
        let mut t = self.entries.clone();
        t.extend(other.entries.iter().map(|&(r, c, v)| (r, c, -v)));
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols
            && self
                .entries
                .iter()
                .all(|&(r, c, v)| (self.get(c, r) - v).abs() <= tol * v.abs().max(1.0))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0f64; self.nrows];
        for &(r, _, v) in &self.entries {
            rows[r] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.2.abs()))
    }

    /// Submatrix on the given rows and columns (in the order given).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut row_pos = vec![usize::MAX; self.nrows];
        for (k, &r) in rows.iter().enumerate() {
            row_pos[r] = k;
        }
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        let mut t: Vec<(usize, usize, f64)> = self
            .entries
            .iter()
            .filter(|&&(r, c, _)| row_pos[r] != usize::MAX && col_pos[c] != usize::MAX)
            .map(|&(r, c, v)| (row_pos[r], col_pos[c], v))
            .collect();
        t.sort_by_key(|&(r, c, _)| (r, c));
        SparseMatrix {
            nrows: rows.len(),
            ncols: cols.len(),
            entries: t,
        }
    }

    pub(crate) fn to_csc(&self) -> sprs::CsMat<f64> {
        let mut tri = sprs::TriMat::with_capacity((self.nrows, self.ncols), self.entries.len());
        for &(r, c, v) in &self.entries {
            tri.add_triplet(r, c, v);
        }
        tri.to_csc()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_in_order() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            vec![(1, 1, 1.0), (0, 1, 2.0), (1, 1, 0.5), (0, 0, -1.0)],
        )
        .unwrap();
        assert_eq!(m.entries(), &[(0, 0, -1.0), (0, 1, 2.0), (1, 1, 1.5)]);
        assert_eq!(m.get(1, 0), 0.0);
        assert!(!m.is_symmetric(0.0));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, vec![(0, 0, f64::NAN)]).is_err());
    }

    #[test]
    fn select_blocks() {
        let m = SparseMatrix::from_dense(&[
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap();
        let ii = m.select(&[1], &[1]);
        assert_eq!(ii.to_dense(), vec![vec![2.0]]);
        let i0 = m.select(&[1], &[0, 2]);
        assert_eq!(i0.to_dense(), vec![vec![-1.0, -1.0]]);
        assert_eq!(m.norm_inf(), 4.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![0.0; 3]);
    }
}
