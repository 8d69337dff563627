//! Compressed sparse rows, reverse Cuthill–McKee and an envelope Cholesky
//! factorisation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an `n × n` matrix, summing duplicates and dropping exact zeros.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            debug_assert!(i < n && j < n);
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        let mut m = CsrMatrix { n, indptr, indices, values };
        m.drop_zeros();
        m
    }

    fn drop_zeros(&mut self) {
        let mut indptr = vec![0usize; self.n + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.n {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if self.values[k] != 0.0 {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match r.binary_search(&j) {
            Ok(k) => self.values[self.indptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            y[i] = s;
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let mut r = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                r += self.values[k] * x[self.indices[k]];
            }
            s += x[i] * r;
        }
        s
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// `D_l A D_r` for diagonal scalings.
    pub fn scaled(&self, left: &[f64], right: &[f64]) -> CsrMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in out.indptr[i]..out.indptr[i + 1] {
                out.values[k] *= left[i] * right[out.indices[k]];
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, v) in self.triplets() {
            worst = worst.max((v - self.get(j, i)).abs());
        }
        worst
    }

    /// Symmetric permutation `P A Pᵀ` with `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> CsrMatrix {
        let mut inv = vec![0usize; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let t = self.triplets().map(|(i, j, v)| (inv[i], inv[j], v)).collect();
        CsrMatrix::from_triplets(self.n, t)
    }
}

/// Reverse Cuthill–McKee ordering of the matrix graph, `perm[new] = old`.
/// Each connected component starts from a pseudo-peripheral node.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|(j, _)| *j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    let mut level = vec![usize::MAX; n];
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree, &mut level);
        let base = order.len();
        visited[start] = true;
        order.push(start);
        let mut head = base;
        let mut nbrs = Vec::new();
        while head < order.len() {
            let v = order[head];
            head += 1;
            nbrs.clear();
            nbrs.extend(a.row(v).map(|(j, _)| j).filter(|&j| !visited[j]));
            nbrs.sort_by_key(|&j| (degree[j], j));
            for &j in &nbrs {
                if !visited[j] {
                    visited[j] = true;
                    order.push(j);
                }
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &CsrMatrix, start: usize, level: &mut [usize]) -> (usize, Vec<usize>) {
    let mut touched = vec![start];
    level[start] = 0;
    let mut head = 0;
    let mut depth = 0;
    while head < touched.len() {
        let v = touched[head];
        head += 1;
        for (j, _) in a.row(v) {
            if level[j] == usize::MAX {
                level[j] = level[v] + 1;
                depth = depth.max(level[j]);
                touched.push(j);
            }
        }
    }
    let last: Vec<usize> = touched.iter().copied().filter(|&v| level[v] == depth).collect();
    for &v in &touched {
        level[v] = usize::MAX;
    }
    (depth, last)
}

fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize], level: &mut [usize]) -> usize {
    let mut v = seed;
    let (mut depth, mut last) = bfs_levels(a, v, level);
    for _ in 0..8 {
        let cand = *last.iter().min_by_key(|&&u| (degree[u], u)).unwrap();
        let (d2, l2) = bfs_levels(a, cand, level);
        if d2 <= depth {
            break;
        }
        v = cand;
        depth = d2;
        last = l2;
    }
    v
}

/// Cholesky factor `L` of a symmetric positive definite matrix stored by
/// rows over its envelope: row `i` holds columns `first[i]..=i`.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
    perm: Vec<usize>,
}

impl EnvelopeCholesky {
    /// Factorises after a reverse Cuthill–McKee reordering.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        let p = a.permuted(&perm);
        let n = p.n;
        let mut first = vec![0usize; n];
        for i in 0..n {
            first[i] = p.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in p.row(i) {
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let si = start[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let sj = start[j];
                let mut s = data[si + j - fi];
                let a_row = &data[si + lo - fi..si + j - fi];
                let b_row = &data[sj + lo - fj..sj + j - fj];
                s -= dot(a_row, b_row);
                data[si + j - fi] = s / data[sj + j - fj];
            }
            let row = &data[si..si + i - fi];
            let d = data[si + i - fi] - dot(row, row);
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: i, value: d });
            }
            data[si + i - fi] = d.sqrt();
        }
        Ok(EnvelopeCholesky { n, first, start, data, perm })
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            let s = y[i] - dot(&self.data[si..si + i - fi], &y[fi..i]);
            y[i] = s / self.data[si + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let si = self.start[i];
            let xi = y[i] / self.data[si + i - fi];
            y[i] = xi;
            for (k, l) in (fi..i).zip(&self.data[si..si + i - fi]) {
                y[k] -= l * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators keep the loop vectorisable
    let n = a.len().min(b.len());
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
        s2 += a[k + 2] * b[k + 2];
        s3 += a[k + 3] * b[k + 3];
    }
    let mut s = (s0 + s1) + (s2 + s3);
    for k in 4 * chunks..n {
        s += a[k] * b[k];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn laplacian_2d(m: usize) -> CsrMatrix {
        let idx = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(m * m, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0), (1, 1, 0.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplacian_2d(9);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort();
        assert_eq!(p, (0..81).collect::<Vec<_>>());
    }

    #[test]
    fn cholesky_solves() {
        let a = laplacian_2d(12);
        let f = EnvelopeCholesky::new(&a).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..a.n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut b = a.mul(&x);
        f.solve_in_place(&mut b);
        let err = x.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(EnvelopeCholesky::new(&a), Err(Error::NotPositiveDefinite { .. })));
    }
}
