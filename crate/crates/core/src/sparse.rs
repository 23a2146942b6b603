//! Compressed sparse row storage and Matrix Market exchange.

use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Sums duplicate entries and drops entries that sum to exactly zero.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, T)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|t| t.0 >= nrows || t.1 >= ncols) {
            return Err(Error::DofMismatch(format!(
                "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
            )));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if (r2, c2) != (r, c) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v != T::zero() {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(p) => self.values[span.start + p],
            Err(_) => T::zero(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols, "dimension mismatch in matrix-vector product");
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v.abs()))
    }

    /// `max |a_ij - a_ji|` relative to `max |a_ij|`; infinite for rectangular matrices.
    pub fn asymmetry(&self) -> T {
        if self.nrows != self.ncols {
            return T::infinity();
        }
        let mut worst = T::zero();
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        let scale = self.max_abs();
        if scale > T::zero() {
            worst / scale
        } else {
            worst
        }
    }

    pub fn cast<U: Real>(&self) -> CsrMatrix<U> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| U::lit(v.to_f64_lossy())).collect(),
        }
    }
}

impl CsrMatrix<f64> {
    fn to_sprs(&self) -> sprs::CsMat<f64> {
        sprs::CsMat::new(
            (self.nrows, self.ncols),
            self.row_ptr.clone(),
            self.col_idx.clone(),
            self.values.clone(),
        )
    }

    /// Writes the matrix in Matrix Market coordinate format.
    pub fn write_matrix_market(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        sprs::io::write_matrix_market(path, &self.to_sprs()).map_err(|e| Error::io(path, e))
    }

    /// Reads a real Matrix Market coordinate file; symmetric files are expanded.
    pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let tri: sprs::TriMat<f64> = sprs::io::read_matrix_market(path).map_err(|e| {
            Error::InvalidInput(format!("{}: {e}", path.display()))
        })?;
        let triplets = tri
            .triplet_iter()
            .map(|(&v, (r, c))| (r, c, v))
            .collect();
        Self::from_triplets(tri.rows(), tri.cols(), triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let m = CsrMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0), (1, 1, 1.0), (1, 1, -1.0)],
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![4.0, 2.0]);
        assert!(m.asymmetry() > 0.0);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(CsrMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn matrix_market_round_trip() {
        let m = CsrMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 2.0), (0, 2, -1.5), (2, 0, -1.5), (1, 1, 1e-300), (2, 2, 7.25)],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mtx");
        m.write_matrix_market(&path).unwrap();
        assert_eq!(CsrMatrix::read_matrix_market(&path).unwrap(), m);
    }
}
