use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fixed chunk for parallel reductions, so sums do not depend on the thread
/// count.
const CHUNK: usize = 1 << 13;

/// Compressed sparse rows, columns sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Assemble row by row in parallel. `row(i)` may repeat columns; repeats
    /// are summed and exact zeros dropped.
    pub fn from_rows<F>(n: usize, row: F) -> Self
    where
        F: Fn(usize) -> Vec<(usize, f64)> + Sync,
    {
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut r = row(i);
                r.sort_by_key(|&(j, _)| j);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(r.len());
                for (j, v) in r {
                    match merged.last_mut() {
                        Some(last) if last.0 == j => last.1 += v,
                        _ => merged.push((j, v)),
                    }
                }
                merged.retain(|&(_, v)| v != 0.0);
                merged
            })
            .collect();
        let mut indptr = Vec::with_capacity(n + 1);
        indptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for r in rows {
            for (j, v) in r {
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Self {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(p) => self.values[span.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.par_iter_mut().with_min_len(1024).enumerate().for_each(|(i, yi)| {
            let mut acc = 0.0;
            for p in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[p] * x[self.indices[p]];
            }
            *yi = acc;
        });
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                cols[j].push((i, v));
            }
        }
        Self::from_rows(self.n, |i| cols[i].clone())
    }

    /// `max |A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.n)
            .into_par_iter()
            .map(|i| self.row(i).map(|(j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Argument(format!("dimension mismatch {} vs {}", self.n, other.n)));
        }
        Ok(Self::from_rows(self.n, |i| {
            let mut out = Vec::new();
            for (k, a) in self.row(i) {
                out.extend(other.row(k).map(|(j, b)| (j, a * b)));
            }
            out
        }))
    }

    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Argument(format!("dimension mismatch {} vs {}", self.n, other.n)));
        }
        Ok(Self::from_rows(self.n, |i| {
            self.row(i).chain(other.row(i).map(|(j, v)| (j, s * v))).collect()
        }))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| s * v).collect(),
            ..self.clone()
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc + v * v).sqrt()
    }

    /// Rows holding at least one nonzero.
    pub fn nonzero_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.indptr[i + 1] > self.indptr[i])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                let mut r = vec![0.0; self.n];
                for (j, v) in self.row(i) {
                    r[j] = v;
                }
                r
            })
            .collect()
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    let parts: Vec<f64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum())
        .collect();
    parts.iter().sum()
}

pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += a * xi));
}

pub(crate) fn scale(a: f64, x: &mut [f64]) {
    x.par_chunks_mut(CHUNK).for_each(|c| c.iter_mut().for_each(|v| *v *= a));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(n: usize) -> CsrMatrix {
        CsrMatrix::from_rows(n, |i| {
            let mut r = vec![(i, 2.0)];
            if i > 0 {
                r.push((i - 1, -1.0));
            }
            if i + 1 < n {
                r.push((i + 1, -1.0));
            }
            r
        })
    }

    #[test]
    fn merges_repeats_and_drops_zeros() {
        let a = CsrMatrix::from_rows(2, |i| vec![(1, 1.0), (i, 0.5), (1, -1.0)]);
        assert_eq!(a.get(0, 0), 0.5);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn matvec_and_products() {
        let a = tri(5);
        let mut y = vec![0.0; 5];
        a.matvec(&[1.0; 5], &mut y);
        assert_eq!(y, vec![1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(a.asymmetry(), 0.0);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.get(0, 0), 5.0);
        assert_eq!(sq.get(0, 2), 1.0);
        assert_eq!(a.transpose(), a);
        assert!(a.add_scaled(-1.0, &a).unwrap().nnz() == 0);
    }
}
