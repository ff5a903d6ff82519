//! Sentence-embedding matrices and exact nearest-neighbour search.
//!
//! Embedding files are header-less raw `f32` little-endian, row-major; the row
//! count is inferred from the file size and the declared dimension. Rows are
//! unit-normalised on load so that cosine similarity is a plain dot product.
//! All-zero rows stay zero and have cosine 0 with everything.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    data: Vec<f32>,
    n: usize,
    dim: usize,
    zero: Vec<bool>,
}

impl EmbeddingMatrix {
    /// Builds a matrix from row-major values, normalising every row.
    pub fn from_raw(mut data: Vec<f32>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::out_of_range("dim", dim, "positive"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::SizeMismatch {
                size: (data.len() * 4) as u64,
                dim,
                row_bytes: (dim * 4) as u64,
            });
        }
        let n = data.len() / dim;
        let mut zero = vec![false; n];
        for (r, row) in data.chunks_exact_mut(dim).enumerate() {
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { row: r });
            }
            let norm = row
                .iter()
                .map(|&x| f64::from(x) * f64::from(x))
                .sum::<f64>()
                .sqrt();
            if norm == 0.0 {
                zero[r] = true;
                continue;
            }
            for x in row.iter_mut() {
                *x = (f64::from(*x) / norm) as f32;
            }
        }
        Ok(EmbeddingMatrix { data, n, dim, zero })
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R], dim: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: dim,
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_raw(data, dim)
    }

    /// Reads a raw little-endian `f32` file with `dim` columns.
    pub fn load(path: &Path, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::out_of_range("dim", dim, "positive"));
        }
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let row_bytes = 4 * dim as u64;
        if !(bytes.len() as u64).is_multiple_of(row_bytes) {
            return Err(Error::SizeMismatch {
                size: bytes.len() as u64,
                dim,
                row_bytes,
            });
        }
        let data = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        Self::from_raw(data, dim)
    }

    /// Writes the (normalised) rows in the raw file format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self.data.iter().flat_map(|x| x.to_le_bytes()).collect();
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_zero(&self, i: usize) -> bool {
        self.zero[i]
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.zero[i]).collect()
    }

    /// Copies rows `range` into a new matrix.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        EmbeddingMatrix {
            data: self.data[range.start * self.dim..range.end * self.dim].to_vec(),
            n: range.len(),
            dim: self.dim,
            zero: self.zero[range].to_vec(),
        }
    }
}

/// Eight-lane dot product; the fixed accumulation order keeps results
/// bit-identical across runs and thread counts.
#[inline]
pub(crate) fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0f32; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

#[inline]
pub(crate) fn unit_cosine(u: &[f32], v: &[f32]) -> f32 {
    dot(u, v).clamp(-1.0, 1.0)
}

/// Cosine similarity of two rows taken from loaded (normalised) matrices.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f32> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(unit_cosine(u, v))
}

/// A neighbour entry: key row index and cosine.
pub type Neighbor = (usize, f32);

/// `a` ranks before `b`: higher score first, then smaller index.
#[inline]
pub(crate) fn ranks_before(a: Neighbor, b: Neighbor) -> bool {
    a.1 > b.1 || (a.1 == b.1 && a.0 < b.0)
}

/// Bounded best-first list of neighbours.
#[derive(Debug, Clone)]
pub(crate) struct TopK {
    k: usize,
    items: Vec<Neighbor>,
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        TopK {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, cand: Neighbor) {
        if self.items.len() == self.k {
            match self.items.last() {
                Some(&worst) if !ranks_before(cand, worst) => return,
                _ => {}
            }
        }
        let pos = self
            .items
            .iter()
            .position(|&x| ranks_before(cand, x))
            .unwrap_or(self.items.len());
        self.items.insert(pos, cand);
        self.items.truncate(self.k);
    }

    pub(crate) fn mean_score(&self) -> f64 {
        if self.items.is_empty() {
            return 0.0;
        }
        self.items.iter().map(|&(_, s)| f64::from(s)).sum::<f64>() / self.items.len() as f64
    }

    pub(crate) fn into_vec(self) -> Vec<Neighbor> {
        self.items
    }
}

/// Exact top-`k` keys by cosine for every query row, best first; ties go to
/// the smaller key index.
pub fn knn(queries: &EmbeddingMatrix, keys: &EmbeddingMatrix, k: usize) -> Result<Vec<Vec<Neighbor>>> {
    if queries.dim != keys.dim {
        return Err(Error::DimensionMismatch {
            left: queries.dim,
            right: keys.dim,
        });
    }
    if k == 0 || k > keys.n {
        return Err(Error::out_of_range("k", k, "1 <= k <= number of keys"));
    }
    Ok((0..queries.n)
        .into_par_iter()
        .map(|q| {
            let row = queries.row(q);
            if 4 * k >= keys.n {
                let mut all: Vec<Neighbor> = (0..keys.n)
                    .map(|j| (j, unit_cosine(row, keys.row(j))))
                    .collect();
                all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                all.truncate(k);
                all
            } else {
                let mut top = TopK::new(k);
                for j in 0..keys.n {
                    top.push((j, unit_cosine(row, keys.row(j))));
                }
                top.into_vec()
            }
        })
        .collect())
}
