//! Vector-valued discontinuous `P_k` space on a triangulation.
//!
//! Each triangle owns a contiguous block of `2 · (k+1)(k+2)/2` degrees of
//! freedom. Within a block the layout is component-major: all `x`
//! coefficients come first, then all `y` coefficients. Both components
//! share the scalar Lagrange basis of [`basis::LagrangeBasis`].

pub mod basis;
pub mod quadrature;

use std::ops::Range;

pub use basis::{reference_basis, LagrangeBasis};
pub use quadrature::{error_rule, quadrature_rules, EdgeRule, ElementRule};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::tensor::{Mat2, Point, Vec2};

/// Affine map `x = origin + J ξ` from the reference triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub origin: Point,
    pub jacobian: Mat2,
    /// `J⁻ᵀ`, maps reference gradients to physical ones.
    pub inv_jacobian_t: Mat2,
    /// `det J = 2 |E|`.
    pub det: f64,
}

impl ElementMap {
    fn new(v: [Point; 3]) -> Self {
        let j = [[v[1][0] - v[0][0], v[2][0] - v[0][0]], [v[1][1] - v[0][1], v[2][1] - v[0][1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv_t = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
        Self {
            origin: v[0],
            jacobian: j,
            inv_jacobian_t: inv_t,
            det,
        }
    }

    #[inline]
    pub fn to_physical(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    #[inline]
    pub fn to_reference(&self, p: Point) -> Point {
        // J⁻¹ = (J⁻ᵀ)ᵀ
        let d = [p[0] - self.origin[0], p[1] - self.origin[1]];
        let it = &self.inv_jacobian_t;
        [it[0][0] * d[0] + it[1][0] * d[1], it[0][1] * d[0] + it[1][1] * d[1]]
    }

    #[inline]
    pub fn physical_gradient(&self, g: Vec2) -> Vec2 {
        let it = &self.inv_jacobian_t;
        [it[0][0] * g[0] + it[0][1] * g[1], it[1][0] * g[0] + it[1][1] * g[1]]
    }
}

/// Basis values and reference gradients tabulated at a set of points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub grads: Vec<Vec2>,
}

impl Tabulation {
    pub fn new(basis: &LagrangeBasis, points: &[Point]) -> Self {
        let nb = basis.len();
        let mut values = vec![0.0; nb * points.len()];
        let mut grads = vec![[0.0; 2]; nb * points.len()];
        for (q, &p) in points.iter().enumerate() {
            basis.evaluate(p, &mut values[q * nb..(q + 1) * nb], &mut grads[q * nb..(q + 1) * nb]);
        }
        Self { n_basis: nb, values, grads }
    }

    #[inline]
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    #[inline]
    pub fn grads_at(&self, q: usize) -> &[Vec2] {
        &self.grads[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

#[derive(Debug, Clone)]
pub struct DgSpace {
    mesh: TriMesh,
    basis: LagrangeBasis,
    element_rule: ElementRule,
    edge_rule: EdgeRule,
    error_rule: ElementRule,
    element_table: Tabulation,
    maps: Vec<ElementMap>,
}

impl DgSpace {
    pub fn new(mesh: TriMesh, degree: usize) -> Result<Self> {
        let basis = LagrangeBasis::new(degree)?;
        let (element_rule, edge_rule) = quadrature_rules(degree);
        let element_table = Tabulation::new(&basis, &element_rule.points);
        let maps = (0..mesh.num_triangles())
            .map(|t| ElementMap::new(mesh.triangle_vertices(t)))
            .collect();
        Ok(Self {
            mesh,
            basis,
            element_rule,
            edge_rule,
            error_rule: error_rule(degree),
            element_table,
            maps,
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn element_rule(&self) -> &ElementRule {
        &self.element_rule
    }

    pub fn edge_rule(&self) -> &EdgeRule {
        &self.edge_rule
    }

    /// Elevated rule for error norms against smooth exact fields.
    pub fn error_rule(&self) -> &ElementRule {
        &self.error_rule
    }

    /// Basis tabulated at the element quadrature points.
    pub fn element_table(&self) -> &Tabulation {
        &self.element_table
    }

    pub fn element_map(&self, t: usize) -> &ElementMap {
        &self.maps[t]
    }

    pub fn dofs_per_component(&self) -> usize {
        self.basis.len()
    }

    pub fn dofs_per_element(&self) -> usize {
        2 * self.basis.len()
    }

    pub fn total_dofs(&self) -> usize {
        self.mesh.num_triangles() * self.dofs_per_element()
    }

    /// Global index of scalar basis function `i` of component `c` on
    /// triangle `t`.
    #[inline]
    pub fn dof(&self, t: usize, c: usize, i: usize) -> usize {
        t * self.dofs_per_element() + c * self.basis.len() + i
    }

    pub fn element_dofs(&self, t: usize) -> Range<usize> {
        let n = self.dofs_per_element();
        t * n..(t + 1) * n
    }

    /// Nodal interpolant of a vector field, element by element.
    pub fn interpolate(&self, field: impl Fn(Point) -> Vec2) -> Vec<f64> {
        let nodes = self.basis.nodes();
        let nb = self.basis.len();
        let mut out = vec![0.0; self.total_dofs()];
        for (t, map) in self.maps.iter().enumerate() {
            for (i, &xi) in nodes.iter().enumerate() {
                let v = field(map.to_physical(xi));
                out[self.dof(t, 0, i)] = v[0];
                out[self.dof(t, 1, i)] = v[1];
            }
        }
        debug_assert_eq!(out.len(), self.mesh.num_triangles() * 2 * nb);
        out
    }

    /// Value and physical gradient (`g[c][d] = ∂u_c/∂x_d`) of a discrete
    /// field on triangle `t` at reference point `xi`.
    pub fn evaluate(&self, coeffs: &[f64], t: usize, xi: Point) -> Result<(Vec2, Mat2)> {
        if t >= self.mesh.num_triangles() {
            return Err(Error::IndexOutOfRange { index: t, len: self.mesh.num_triangles() });
        }
        if coeffs.len() != self.total_dofs() {
            return Err(Error::InvalidArgument(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                self.total_dofs()
            )));
        }
        let nb = self.basis.len();
        let mut values = vec![0.0; nb];
        let mut grads = vec![[0.0; 2]; nb];
        self.basis.evaluate(xi, &mut values, &mut grads);
        Ok(self.combine(coeffs, t, &values, &grads))
    }

    /// Combines tabulated basis values/reference gradients with the local
    /// coefficients of triangle `t`.
    #[inline]
    pub fn combine(&self, coeffs: &[f64], t: usize, values: &[f64], ref_grads: &[Vec2]) -> (Vec2, Mat2) {
        let map = &self.maps[t];
        let block = &coeffs[self.element_dofs(t)];
        let nb = self.basis.len();
        let mut u = [0.0; 2];
        let mut g = [[0.0; 2]; 2];
        for c in 0..2 {
            let local = &block[c * nb..(c + 1) * nb];
            let mut gr = [0.0; 2];
            for i in 0..nb {
                u[c] += local[i] * values[i];
                gr[0] += local[i] * ref_grads[i][0];
                gr[1] += local[i] * ref_grads[i][1];
            }
            g[c] = map.physical_gradient(gr);
        }
        (u, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dof_map_is_bijective() {
        let space = DgSpace::new(TriMesh::structured(3).unwrap(), 2).unwrap();
        assert_eq!(space.dofs_per_component(), 6);
        assert_eq!(space.dofs_per_element(), 12);
        assert_eq!(space.total_dofs(), 18 * 12);
        let mut hit = vec![0u8; space.total_dofs()];
        for t in 0..space.mesh().num_triangles() {
            for c in 0..2 {
                for i in 0..6 {
                    let d = space.dof(t, c, i);
                    assert!(space.element_dofs(t).contains(&d));
                    hit[d] += 1;
                }
            }
        }
        assert!(hit.iter().all(|&h| h == 1));
    }

    #[test]
    fn map_round_trip() {
        let space = DgSpace::new(TriMesh::structured(2).unwrap(), 1).unwrap();
        for t in 0..8 {
            let m = space.element_map(t);
            assert!((m.det - 2.0 * 0.125).abs() < 1e-15);
            let xi = [0.2, 0.3];
            let back = m.to_reference(m.to_physical(xi));
            assert!((back[0] - xi[0]).abs() < 1e-14 && (back[1] - xi[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        for k in 1..=3 {
            let space = DgSpace::new(TriMesh::structured(3).unwrap(), k).unwrap();
            // a polynomial of total degree k per component
            let f = |p: Point| [p[0].powi(k as i32) + 2.0 * p[1] - 0.5, (p[0] * p[1]).powi(k as i32 / 2) + p[1]];
            let df = |p: Point| -> Mat2 {
                let kk = k as i32;
                let m = kk / 2;
                let dxy = |a: f64, b: f64| if m == 0 { 0.0 } else { m as f64 * (a * b).powi(m - 1) * b };
                [
                    [kk as f64 * p[0].powi(kk - 1), 2.0],
                    [dxy(p[0], p[1]), dxy(p[1], p[0]) + 1.0],
                ]
            };
            let coeffs = space.interpolate(f);
            for t in 0..space.mesh().num_triangles() {
                for &xi in &space.element_rule().points {
                    let x = space.element_map(t).to_physical(xi);
                    let (u, g) = space.evaluate(&coeffs, t, xi).unwrap();
                    let e = f(x);
                    let de = df(x);
                    assert!((u[0] - e[0]).abs() < 1e-12 && (u[1] - e[1]).abs() < 1e-12);
                    for c in 0..2 {
                        for d in 0..2 {
                            assert!((g[c][d] - de[c][d]).abs() < 1e-11, "k={k}");
                        }
                    }
                }
            }
        }
    }
}
