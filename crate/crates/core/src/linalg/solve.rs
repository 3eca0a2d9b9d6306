use faer::linalg::solvers::SolveCore;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Side};

use super::SparseMatrix;
use crate::error::{Error, Result};

const CG_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Sparse Cholesky (fill-reducing ordering, supernodal when profitable).
    Cholesky,
    /// Jacobi-preconditioned conjugate gradients, relative tolerance 1e-10.
    ConjugateGradient,
    /// Sparse LU with partial pivoting, for systems that are not SPD.
    Lu,
}

enum Inner {
    Cholesky(Llt<usize, f64>),
    Lu(Lu<usize, f64>),
    Cg { matrix: SparseMatrix, inv_diag: Vec<f64> },
}

/// A factored (or preconditioned) matrix that can be applied repeatedly.
pub struct Factorization {
    dim: usize,
    kind: SolverKind,
    inner: Inner,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization").field("dim", &self.dim).field("kind", &self.kind).finish()
    }
}

fn as_faer(k: &SparseMatrix) -> SparseColMatRef<'_, usize, f64> {
    // CSR of a symmetric matrix read as CSC is the transpose; the Cholesky
    // path reads only one triangle, the LU path solves the transpose.
    let symbolic = SymbolicSparseColMatRef::new_checked(k.dim(), k.dim(), k.row_ptr(), None, k.col_idx());
    SparseColMatRef::new(symbolic, k.values())
}

impl Factorization {
    /// Sparse Cholesky factorization. Fails with
    /// [`Error::NotPositiveDefinite`] on a non-positive pivot.
    pub fn cholesky(k: &SparseMatrix) -> Result<Self> {
        let llt = as_faer(k).sp_cholesky(Side::Lower).map_err(|e| match e {
            faer::sparse::linalg::LltError::Numeric(inner) => Error::NotPositiveDefinite(format!("{inner:?}")),
            other => Error::Solver(format!("{other:?}")),
        })?;
        Ok(Self {
            dim: k.dim(),
            kind: SolverKind::Cholesky,
            inner: Inner::Cholesky(llt),
        })
    }

    pub fn conjugate_gradient(k: &SparseMatrix) -> Result<Self> {
        let diag = k.diag();
        if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::NotPositiveDefinite(format!("diagonal entry {i} is {}", diag[i])));
        }
        Ok(Self {
            dim: k.dim(),
            kind: SolverKind::ConjugateGradient,
            inner: Inner::Cg {
                matrix: k.clone(),
                inv_diag: diag.iter().map(|d| 1.0 / d).collect(),
            },
        })
    }

    /// Sparse LU of `Kᵀ` (equal to `K` for the symmetric matrices used here).
    pub fn lu(k: &SparseMatrix) -> Result<Self> {
        let lu = as_faer(k).sp_lu().map_err(|e| Error::Solver(format!("{e:?}")))?;
        Ok(Self {
            dim: k.dim(),
            kind: SolverKind::Lu,
            inner: Inner::Lu(lu),
        })
    }

    pub fn new(k: &SparseMatrix, kind: SolverKind) -> Result<Self> {
        match kind {
            SolverKind::Cholesky => Self::cholesky(k),
            SolverKind::ConjugateGradient => Self::conjugate_gradient(k),
            SolverKind::Lu => Self::lu(k),
        }
    }

    pub fn kind(&self) -> SolverKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    /// Overwrites `x` (holding the right-hand side) with the solution.
    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "right-hand side has length {}, expected {}",
                x.len(),
                self.dim
            )));
        }
        match &self.inner {
            Inner::Cholesky(llt) => {
                llt.solve_in_place_with_conj(Conj::No, MatMut::from_column_major_slice_mut(x, self.dim, 1));
            }
            Inner::Lu(lu) => {
                // the factor is of Kᵀ
                lu.solve_transpose_in_place_with_conj(Conj::No, MatMut::from_column_major_slice_mut(x, self.dim, 1));
            }
            Inner::Cg { matrix, inv_diag } => {
                let b = x.to_vec();
                let sol = preconditioned_cg(matrix, inv_diag, &b)?;
                x.copy_from_slice(&sol);
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("solution contains non-finite values".into()));
        }
        Ok(())
    }
}

fn preconditioned_cg(k: &SparseMatrix, inv_diag: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut kp = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 10 * n.max(1);
    let mut residual = 1.0;
    for _ in 0..max_iter {
        k.matvec_into(&p, &mut kp);
        let pkp: f64 = p.iter().zip(&kp).map(|(a, b)| a * b).sum();
        if !(pkp > 0.0) {
            return Err(Error::NotPositiveDefinite(format!("conjugate gradients found pᵀKp = {pkp:e}")));
        }
        let alpha = rz / pkp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * kp[i];
        }
        residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
        if residual <= CG_RTOL {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// One-shot SPD solve using the default direct factorization.
pub fn spd_solve(k: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Factorization::cholesky(k)?.solve(b)
}
