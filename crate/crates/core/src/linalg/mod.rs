//! Compressed sparse row matrices and the linear solvers used by the
//! time stepper.

mod solve;

pub use solve::{spd_solve, Factorization, SolverKind};

use crate::error::{Error, Result};

/// Square matrix in compressed sparse row storage. Column indices are
/// strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![1.0; dim],
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::identity(diag.len());
        m.values.copy_from_slice(diag);
        m
    }

    /// Sums duplicate `(row, col)` entries. Entries are sorted by
    /// `(row, col)` with a stable sort, so duplicates are added in
    /// insertion order.
    pub fn from_triplets(dim: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::IndexOutOfRange { index: r.max(c), len: dim });
        }
        let mut sorted: Vec<(usize, usize, f64)> = entries.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; dim + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self { dim, row_ptr, col_idx, values })
    }

    /// Zero matrix whose pattern is the union of dense `block × block`
    /// tiles: row block `i` couples to every column block listed in
    /// `coupling[i]`.
    pub fn with_block_pattern(block: usize, coupling: &[Vec<usize>]) -> Self {
        let nb = coupling.len();
        let dim = nb * block;
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for cols in coupling {
            let mut cols = cols.clone();
            cols.sort_unstable();
            cols.dedup();
            for _ in 0..block {
                for &cb in &cols {
                    col_idx.extend(cb * block..(cb + 1) * block);
                }
                row_ptr.push(col_idx.len());
            }
        }
        let values = vec![0.0; col_idx.len()];
        Self { dim, row_ptr, col_idx, values }
    }

    /// Adds a dense tile (row-major, `rows.len() × cols.len()`) into
    /// existing pattern positions.
    pub fn add_dense(&mut self, rows: &[usize], cols: &[usize], tile: &[f64]) -> Result<()> {
        debug_assert_eq!(tile.len(), rows.len() * cols.len());
        for (a, &r) in rows.iter().enumerate() {
            let start = self.row_ptr[r];
            let row_cols = &self.col_idx[start..self.row_ptr[r + 1]];
            for (b, &c) in cols.iter().enumerate() {
                let pos = row_cols
                    .binary_search(&c)
                    .map_err(|_| Error::InvalidArgument(format!("entry ({r}, {c}) is outside the sparsity pattern")))?;
                self.values[start + pos] += tile[a * cols.len() + b];
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(p) => self.values[range.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = K x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *out = acc;
        }
    }

    /// `y += alpha K x`.
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *out += alpha * acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// `xᵀ K y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.dim)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }

    /// `Σ_i c_i K_i` over matrices of equal dimension; the result pattern is
    /// the union of the input patterns.
    pub fn linear_combination(terms: &[(f64, &SparseMatrix)]) -> Result<Self> {
        let dim = match terms.first() {
            Some((_, m)) => m.dim,
            None => return Err(Error::InvalidArgument("empty linear combination".into())),
        };
        if terms.iter().any(|(_, m)| m.dim != dim) {
            return Err(Error::InvalidArgument("dimension mismatch in linear combination".into()));
        }
        if terms.iter().all(|(_, m)| m.row_ptr == terms[0].1.row_ptr && m.col_idx == terms[0].1.col_idx) {
            let base = terms[0].1;
            let mut values = vec![0.0; base.nnz()];
            for (c, m) in terms {
                for (v, &x) in values.iter_mut().zip(&m.values) {
                    *v += c * x;
                }
            }
            return Ok(Self { values, ..base.clone() });
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..dim {
            scratch.clear();
            for (c, m) in terms {
                scratch.extend(m.row(r).map(|(j, v)| (j, c * v)));
            }
            scratch.sort_by_key(|&(j, _)| j);
            let mut last = None;
            for &(j, v) in &scratch {
                if last == Some(j) {
                    *values.last_mut().expect("entry exists") += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { dim, row_ptr, col_idx, values })
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| alpha * v).collect(),
            ..self.clone()
        }
    }

    /// Largest `|a_ij − a_ji|` over stored entries.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Dense row-major copy, for small test systems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 3.0);
    }

    #[test]
    fn empty_is_zero() {
        let m = SparseMatrix::from_triplets(3, &[]).unwrap();
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![0.0; 3]);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            SparseMatrix::from_triplets(2, &[(0, 2, 1.0)]),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn sorted_columns() {
        let m = SparseMatrix::from_triplets(3, &[(1, 2, 1.0), (1, 0, 1.0), (0, 1, 4.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(m.col_idx(), &[1, 0, 2]);
        assert_eq!(m.row_ptr(), &[0, 1, 3, 3]);
        assert_eq!(m.get(1, 2), 2.0);
    }

    #[test]
    fn block_pattern_and_combination() {
        let mut a = SparseMatrix::with_block_pattern(2, &[vec![0, 1], vec![1, 0]]);
        a.add_dense(&[0, 1], &[2, 3], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.get(1, 3), 4.0);
        assert!(a.add_dense(&[0], &[0], &[1.0]).is_ok());
        let d = SparseMatrix::identity(4);
        let k = SparseMatrix::linear_combination(&[(2.0, &a), (1.0, &d)]).unwrap();
        assert_eq!(k.get(0, 0), 2.0 * 1.0 + 1.0);
        assert_eq!(k.get(1, 3), 8.0);
        assert_eq!(k.get(3, 3), 1.0);
    }

    proptest! {
        #[test]
        fn matvec_is_linear(
            entries in proptest::collection::vec((0usize..6, 0usize..6, -3.0f64..3.0), 0..40),
            x in proptest::collection::vec(-1.0f64..1.0, 6),
            y in proptest::collection::vec(-1.0f64..1.0, 6),
            alpha in -2.0f64..2.0, beta in -2.0f64..2.0,
        ) {
            let m = SparseMatrix::from_triplets(6, &entries).unwrap();
            let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = m.matvec(&z);
            let (mx, my) = (m.matvec(&x), m.matvec(&y));
            for i in 0..6 {
                prop_assert!((lhs[i] - alpha * mx[i] - beta * my[i]).abs() < 1e-13);
            }
        }
    }
}
