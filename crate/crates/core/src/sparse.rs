//! Compressed sparse row matrices with real entries.

use nalgebra::DMatrix;

/// Entries below this magnitude are dropped after arithmetic.
pub const PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat {
    dim: usize,
    indptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMat {
    pub fn zeros(dim: usize) -> Self {
        SparseMat { dim, indptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMat {
            dim,
            indptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: vec![1.0; dim],
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut trips: Vec<(usize, usize, f64)>) -> Self {
        trips.sort_by_key(|a| (a.0, a.1));
        let mut indptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(trips.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trips {
            assert!(r < dim && c < dim, "triplet ({r},{c}) out of range for dim {dim}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            indptr[r + 1] += indptr[r];
        }
        SparseMat { dim, indptr, cols, vals }.pruned()
    }

    pub fn from_dense(m: &DMatrix<f64>, tol: f64) -> Self {
        let dim = m.nrows();
        let mut trips = Vec::new();
        for r in 0..dim {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v.abs() > tol {
                    trips.push((r, c, v));
                }
            }
        }
        Self::from_triplets(dim, trips)
    }

    fn pruned(self) -> Self {
        if self.vals.iter().all(|v| v.abs() >= PRUNE) {
            return self;
        }
        let mut indptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.vals[k].abs() >= PRUNE {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            indptr[r + 1] = cols.len();
        }
        SparseMat { dim: self.dim, indptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let slice = &self.cols[self.indptr[r]..self.indptr[r + 1]];
        match slice.binary_search(&c) {
            Ok(k) => self.vals[self.indptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= a);
        out.pruned()
    }

    /// `self + a * other`
    pub fn add_scaled(&self, a: f64, other: &SparseMat) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut indptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.nnz() + other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            let (mut i, ie) = (self.indptr[r], self.indptr[r + 1]);
            let (mut j, je) = (other.indptr[r], other.indptr[r + 1]);
            while i < ie || j < je {
                let ci = if i < ie { self.cols[i] } else { usize::MAX };
                let cj = if j < je { other.cols[j] } else { usize::MAX };
                let (c, v) = if ci < cj {
                    i += 1;
                    (ci, self.vals[i - 1])
                } else if cj < ci {
                    j += 1;
                    (cj, a * other.vals[j - 1])
                } else {
                    i += 1;
                    j += 1;
                    (ci, self.vals[i - 1] + a * other.vals[j - 1])
                };
                if v.abs() >= PRUNE {
                    cols.push(c);
                    vals.push(v);
                }
            }
            indptr[r + 1] = cols.len();
        }
        SparseMat { dim: self.dim, indptr, cols, vals }
    }

    pub fn add(&self, other: &SparseMat) -> Self {
        self.add_scaled(1.0, other)
    }

    pub fn sub(&self, other: &SparseMat) -> Self {
        self.add_scaled(-1.0, other)
    }

    pub fn matmul(&self, other: &SparseMat) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = vec![0.0; n];
        let mut mark = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut indptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..n {
            touched.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = 0.0;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c].abs() >= PRUNE {
                    cols.push(c);
                    vals.push(acc[c]);
                }
            }
            indptr[r + 1] = cols.len();
        }
        SparseMat { dim: n, indptr, cols, vals }
    }

    pub fn transpose(&self) -> Self {
        let trips = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.dim, trips)
    }

    /// `[self, other] = self*other - other*self`
    pub fn commutator(&self, other: &SparseMat) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Hilbert-Schmidt inner product `tr(AᵀB) / dim`.
    pub fn inner(&self, other: &SparseMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for r in 0..self.dim {
            let (mut i, ie) = (self.indptr[r], self.indptr[r + 1]);
            let (mut j, je) = (other.indptr[r], other.indptr[r + 1]);
            while i < ie && j < je {
                match self.cols[i].cmp(&other.cols[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        s += self.vals[i] * other.vals[j];
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        s / self.dim as f64
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn frobenius(&self) -> f64 {
        self.vals.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &SparseMat) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// `self * m` for a dense right-hand side.
    pub fn mul_dense(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, m.ncols());
        for r in 0..self.dim {
            for (k, v) in self.row(r) {
                for c in 0..m.ncols() {
                    out[(r, c)] += v * m[(k, c)];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        self.add(&self.transpose()).max_abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_sparse(dim: usize) -> impl Strategy<Value = SparseMat> {
        proptest::collection::vec((0..dim, 0..dim, -3i32..=3), 0..20).prop_map(move |t| {
            SparseMat::from_triplets(dim, t.into_iter().map(|(r, c, v)| (r, c, v as f64)).collect())
        })
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = SparseMat::from_triplets(3, vec![(0, 1, 1.0), (0, 1, 2.0), (2, 0, 1.0), (2, 0, -1.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.nnz(), 1);
    }

    proptest! {
        #[test]
        fn matmul_matches_dense(a in arb_sparse(6), b in arb_sparse(6)) {
            let d = a.to_dense() * b.to_dense();
            let s = a.matmul(&b).to_dense();
            prop_assert!((d - s).amax() < 1e-12);
        }

        #[test]
        fn commutator_antisymmetric(a in arb_sparse(5), b in arb_sparse(5)) {
            let x = a.commutator(&b).add(&b.commutator(&a));
            prop_assert!(x.is_zero());
        }

        #[test]
        fn inner_is_normalized_trace(a in arb_sparse(4), b in arb_sparse(4)) {
            let d = (a.to_dense().transpose() * b.to_dense()).trace() / 4.0;
            prop_assert!((a.inner(&b) - d).abs() < 1e-12);
        }
    }
}
