//! Lagrange basis of total degree `k` on the uniform lattice of the
//! reference triangle.
//!
//! Nodes are `(i/k, j/k)` with `i + j ≤ k`, enumerated row by row in `j`
//! and then `i`, so for `k = 1` they are the vertices `(0,0), (1,0), (0,1)`.
//! Each basis function is a product of univariate Lagrange factors in the
//! barycentric coordinates.

use crate::error::{Error, Result};
use crate::tensor::{Point, Vec2};

#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    degree: usize,
    /// Barycentric multi-indices `(a, b, c)` with `a + b + c = k`.
    indices: Vec<[usize; 3]>,
}

/// `(L_m(λ), L_m'(λ))` with `L_m(λ) = Π_{r<m} (kλ - r) / (r + 1)`.
fn factor(k: usize, m: usize, lambda: f64) -> (f64, f64) {
    let kl = k as f64 * lambda;
    let mut value = 1.0;
    let mut deriv = 0.0;
    for r in 0..m {
        let denom = (r + 1) as f64;
        let f = (kl - r as f64) / denom;
        deriv = deriv * f + value * k as f64 / denom;
        value *= f;
    }
    (value, deriv)
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidArgument(format!("polynomial degree must be at least 1, got {degree}")));
        }
        let mut indices = Vec::with_capacity((degree + 1) * (degree + 2) / 2);
        for j in 0..=degree {
            for i in 0..=degree - j {
                indices.push([degree - i - j, i, j]);
            }
        }
        Ok(Self { degree, indices })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Reference coordinates of the Lagrange nodes.
    pub fn nodes(&self) -> Vec<Point> {
        let k = self.degree as f64;
        self.indices.iter().map(|&[_, i, j]| [i as f64 / k, j as f64 / k]).collect()
    }

    pub fn values(&self, p: Point) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        let mut g = vec![[0.0; 2]; self.len()];
        self.evaluate(p, &mut v, &mut g);
        v
    }

    /// Values and reference gradients at `p`, written into the slices.
    pub fn evaluate(&self, p: Point, values: &mut [f64], grads: &mut [Vec2]) {
        let k = self.degree;
        let lambda = [1.0 - p[0] - p[1], p[0], p[1]];
        let dlambda: [Vec2; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        for (n, idx) in self.indices.iter().enumerate() {
            let f: [(f64, f64); 3] = std::array::from_fn(|b| factor(k, idx[b], lambda[b]));
            values[n] = f[0].0 * f[1].0 * f[2].0;
            let d = [f[0].1 * f[1].0 * f[2].0, f[0].0 * f[1].1 * f[2].0, f[0].0 * f[1].0 * f[2].1];
            grads[n] = [
                d[0] * dlambda[0][0] + d[1] * dlambda[1][0] + d[2] * dlambda[2][0],
                d[0] * dlambda[0][1] + d[1] * dlambda[1][1] + d[2] * dlambda[2][1],
            ];
        }
    }
}

/// Values and reference gradients of the degree-`k` basis at `p`.
pub fn reference_basis(k: usize, p: Point) -> Result<(Vec<f64>, Vec<Vec2>)> {
    let basis = LagrangeBasis::new(k)?;
    let mut v = vec![0.0; basis.len()];
    let mut g = vec![[0.0; 2]; basis.len()];
    basis.evaluate(p, &mut v, &mut g);
    Ok((v, g))
}
