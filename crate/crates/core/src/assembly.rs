//! Global matrices and load vectors of the symmetric interior penalty form
//!
//! ```text
//! a(v, w) = Σ_E ∫_E Dε(v):ε(w)
//!         − Σ_{e ⊂ Γ_h ∪ Γ_D} ∫_e {Dε(v)}:[w ⊗ n_e] + {Dε(w)}:[v ⊗ n_e]
//!         + J(v, w),
//! J(v, w) = Σ_{e ⊂ Γ_h ∪ Γ_D} α₀ / |e|^β₀ ∫_e [v]·[w].
//! ```
//!
//! On an interior edge shared by `E_i`, `E_j` (`i < j`) the jump is
//! `v|E_i − v|E_j` and the normal points from `E_i` to `E_j`. On a Dirichlet
//! edge the jump is the full vector trace. Neumann edges contribute only
//! to the load. Dirichlet data enter weakly through the edge terms.

use crate::dg_space::{DgSpace, ElementRule, Tabulation};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::material::PronyMaterial;
use crate::mesh::EdgeTag;
use crate::tensor::{ddot, dot, mat_vec, outer, sym, Mat2, Point, Vec2, ZERO_MAT};

/// A vector field with its gradient, `gradient(p)[c][d] = ∂v_c/∂x_d`.
pub trait VectorField {
    fn value(&self, p: Point) -> Vec2;
    fn gradient(&self, p: Point) -> Mat2;
}

pub struct ZeroField;

impl VectorField for ZeroField {
    fn value(&self, _: Point) -> Vec2 {
        [0.0; 2]
    }
    fn gradient(&self, _: Point) -> Mat2 {
        ZERO_MAT
    }
}

/// Field built from a pair of closures.
pub struct FnField<F, G> {
    value: F,
    gradient: G,
}

impl<F, G> FnField<F, G>
where
    F: Fn(Point) -> Vec2,
    G: Fn(Point) -> Mat2,
{
    pub fn new(value: F, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<F, G> VectorField for FnField<F, G>
where
    F: Fn(Point) -> Vec2,
    G: Fn(Point) -> Mat2,
{
    fn value(&self, p: Point) -> Vec2 {
        (self.value)(p)
    }
    fn gradient(&self, p: Point) -> Mat2 {
        (self.gradient)(p)
    }
}

/// Time-dependent body force and Neumann traction.
pub trait LoadData {
    fn body_force(&self, p: Point, t: f64) -> Vec2;
    fn traction(&self, p: Point, normal: Vec2, t: f64) -> Vec2;
}

/// Homogeneous loads.
pub struct ZeroLoads;

impl LoadData for ZeroLoads {
    fn body_force(&self, _: Point, _: f64) -> Vec2 {
        [0.0; 2]
    }
    fn traction(&self, _: Point, _: Vec2, _: f64) -> Vec2 {
        [0.0; 2]
    }
}

/// Basis traces of one incident element along an edge.
#[derive(Debug, Clone)]
pub struct SideTrace {
    pub element: usize,
    /// +1 for the lower-numbered (or only) element, −1 for the other.
    pub sign: f64,
    /// `n_q × n_basis` values.
    pub values: Vec<f64>,
    /// `n_q × n_basis` physical gradients.
    pub grads: Vec<Vec2>,
}

/// Edge quadrature with basis traces of each incident element.
#[derive(Debug, Clone)]
pub struct EdgeTraces {
    pub points: Vec<Point>,
    /// Quadrature weights including the edge length.
    pub weights: Vec<f64>,
    pub normal: Vec2,
    /// `1/2` on interior edges, `1` on boundary edges.
    pub average_factor: f64,
    pub sides: Vec<SideTrace>,
}

impl EdgeTraces {
    pub fn new(space: &DgSpace, e: usize) -> Self {
        let edge = &space.mesh().edges()[e];
        let [a, b] = edge.endpoints.map(|v| space.mesh().vertices()[v]);
        let rule = space.edge_rule();
        let points: Vec<Point> = rule
            .points
            .iter()
            .map(|&s| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])
            .collect();
        let weights = rule.weights.iter().map(|w| w * edge.length).collect();
        let nb = space.dofs_per_component();
        let sides = edge
            .incident
            .iter()
            .enumerate()
            .map(|(s, &t)| {
                let map = space.element_map(t);
                let refs: Vec<Point> = points.iter().map(|&p| map.to_reference(p)).collect();
                let tab = Tabulation::new(space.basis(), &refs);
                let grads = tab.grads.iter().map(|&g| map.physical_gradient(g)).collect();
                debug_assert_eq!(tab.n_basis, nb);
                SideTrace {
                    element: t,
                    sign: if s == 0 { 1.0 } else { -1.0 },
                    values: tab.values,
                    grads,
                }
            })
            .collect();
        Self {
            points,
            weights,
            normal: edge.normal,
            average_factor: if edge.incident.len() == 2 { 0.5 } else { 1.0 },
            sides,
        }
    }
}

/// `Dε` of the vector basis function `e_c N_i` with physical gradient `g`.
#[inline]
fn basis_stress(material: &PronyMaterial, c: usize, g: Vec2) -> (Mat2, Mat2) {
    let mut m = ZERO_MAT;
    m[c] = g;
    let eps = sym(&m);
    (material.apply_elastic(&eps), eps)
}

/// Average and jumps of a discrete field at one edge quadrature point.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeJump {
    pub point: Point,
    pub average: Vec2,
    /// `{Dε(v)}`.
    pub average_stress: Mat2,
    /// `[v]`.
    pub jump: Vec2,
    /// `[v ⊗ n_e]`.
    pub jump_outer_normal: Mat2,
}

/// Averages and jumps of the discrete field `v` at the quadrature points of
/// edge `e`.
pub fn average_jump(space: &DgSpace, material: &PronyMaterial, v: &[f64], e: usize) -> Result<Vec<EdgeJump>> {
    if e >= space.mesh().edges().len() {
        return Err(Error::IndexOutOfRange { index: e, len: space.mesh().edges().len() });
    }
    if v.len() != space.total_dofs() {
        return Err(Error::InvalidArgument(format!(
            "field has {} coefficients, expected {}",
            v.len(),
            space.total_dofs()
        )));
    }
    let tr = EdgeTraces::new(space, e);
    let nb = space.dofs_per_component();
    let mut out = Vec::with_capacity(tr.points.len());
    for (q, &point) in tr.points.iter().enumerate() {
        let mut average = [0.0; 2];
        let mut average_stress = ZERO_MAT;
        let mut jump = [0.0; 2];
        let mut jump_outer_normal = ZERO_MAT;
        for side in &tr.sides {
            let (val, grad) = space.combine(
                v,
                side.element,
                &side.values[q * nb..(q + 1) * nb],
                &identity_grads(space, side, q),
            );
            let stress = material.apply_elastic(&sym(&grad));
            let jo = outer(val, tr.normal);
            for c in 0..2 {
                average[c] += tr.average_factor * val[c];
                jump[c] += side.sign * val[c];
                for d in 0..2 {
                    average_stress[c][d] += tr.average_factor * stress[c][d];
                    jump_outer_normal[c][d] += side.sign * jo[c][d];
                }
            }
        }
        out.push(EdgeJump {
            point,
            average,
            average_stress,
            jump,
            jump_outer_normal,
        });
    }
    Ok(out)
}

/// `DgSpace::combine` maps reference gradients; side traces already hold
/// physical ones, so pull them back through `Jᵀ`.
fn identity_grads(space: &DgSpace, side: &SideTrace, q: usize) -> Vec<Vec2> {
    let nb = space.dofs_per_component();
    let j = space.element_map(side.element).jacobian;
    side.grads[q * nb..(q + 1) * nb]
        .iter()
        .map(|g| [j[0][0] * g[0] + j[1][0] * g[1], j[0][1] * g[0] + j[1][1] * g[1]])
        .collect()
}

/// Mass, stiffness and interior-penalty matrices for one space and material.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// `(ρ v, w)`.
    pub mass: SparseMatrix,
    /// `(v, w)`.
    pub plain_mass: SparseMatrix,
    /// Volume term `Σ_E ∫ Dε(v):ε(w)`.
    pub stiffness: SparseMatrix,
    /// Full bilinear form `a(v, w)`.
    pub sipg: SparseMatrix,
    /// Jump penalty `J(v, w)`.
    pub penalty: SparseMatrix,
    pub alpha0: f64,
    pub beta0: f64,
}

impl AssembledSystem {
    pub fn assemble(space: &DgSpace, material: &PronyMaterial, alpha0: f64, beta0: f64) -> Result<Self> {
        let (stiffness, sipg, penalty) = assemble_sipg_parts(space, material, alpha0, beta0)?;
        Ok(Self {
            mass: assemble_mass(space, material.rho())?,
            plain_mass: assemble_mass(space, 1.0)?,
            stiffness,
            sipg,
            penalty,
            alpha0,
            beta0,
        })
    }

    /// `|||v|||² = Σ_E ∫ Dε(v):ε(v) + J(v, v)`.
    pub fn energy_norm_sq(&self, v: &[f64]) -> f64 {
        self.stiffness.bilinear(v, v) + self.penalty.bilinear(v, v)
    }
}

fn element_coupling(space: &DgSpace) -> Vec<Vec<usize>> {
    let mesh = space.mesh();
    (0..mesh.num_triangles())
        .map(|t| {
            let mut c = mesh.neighbours(t);
            c.push(t);
            c
        })
        .collect()
}

/// Block-diagonal mass matrix weighted by `weight`.
pub fn assemble_mass(space: &DgSpace, weight: f64) -> Result<SparseMatrix> {
    if !(weight > 0.0) {
        return Err(Error::InvalidArgument(format!("mass weight must be positive, got {weight}")));
    }
    let nt = space.mesh().num_triangles();
    let nb = space.dofs_per_component();
    let nd = space.dofs_per_element();
    let coupling: Vec<Vec<usize>> = (0..nt).map(|t| vec![t]).collect();
    let mut m = SparseMatrix::with_block_pattern(nd, &coupling);
    let rule = space.element_rule();
    let tab = space.element_table();
    let mut local = vec![0.0; nd * nd];
    for t in 0..nt {
        local.iter_mut().for_each(|v| *v = 0.0);
        let det = space.element_map(t).det;
        for (q, w) in rule.weights.iter().enumerate() {
            let n = tab.values_at(q);
            let wq = weight * w * det;
            for i in 0..nb {
                for j in 0..nb {
                    let v = wq * n[i] * n[j];
                    local[i * nd + j] += v;
                    local[(nb + i) * nd + nb + j] += v;
                }
            }
        }
        let dofs: Vec<usize> = space.element_dofs(t).collect();
        m.add_dense(&dofs, &dofs, &local)?;
    }
    Ok(m)
}

/// Returns `(A, J)`.
pub fn assemble_sipg(
    space: &DgSpace,
    material: &PronyMaterial,
    alpha0: f64,
    beta0: f64,
) -> Result<(SparseMatrix, SparseMatrix)> {
    let (_, a, j) = assemble_sipg_parts(space, material, alpha0, beta0)?;
    Ok((a, j))
}

fn assemble_sipg_parts(
    space: &DgSpace,
    material: &PronyMaterial,
    alpha0: f64,
    beta0: f64,
) -> Result<(SparseMatrix, SparseMatrix, SparseMatrix)> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(Error::InvalidArgument(format!("penalty alpha0 must be positive, got {alpha0}")));
    }
    if !(beta0 >= 1.0 && beta0.is_finite()) {
        return Err(Error::InvalidArgument(format!("penalty exponent beta0 must be at least 1, got {beta0}")));
    }
    let coupling = element_coupling(space);
    let nd = space.dofs_per_element();
    let nb = space.dofs_per_component();
    let mut stiffness = SparseMatrix::with_block_pattern(nd, &coupling);
    let mut penalty = stiffness.clone();
    let mut consistency = stiffness.clone();

    // volume term
    let rule = space.element_rule();
    let tab = space.element_table();
    let mut local = vec![0.0; nd * nd];
    let mut stress = vec![ZERO_MAT; nd];
    let mut strain = vec![ZERO_MAT; nd];
    for t in 0..space.mesh().num_triangles() {
        local.iter_mut().for_each(|v| *v = 0.0);
        let map = space.element_map(t);
        for (q, w) in rule.weights.iter().enumerate() {
            let wq = w * map.det;
            for (i, &g) in tab.grads_at(q).iter().enumerate() {
                let g = map.physical_gradient(g);
                for c in 0..2 {
                    let (s, e) = basis_stress(material, c, g);
                    stress[c * nb + i] = s;
                    strain[c * nb + i] = e;
                }
            }
            for r in 0..nd {
                for c in 0..nd {
                    local[r * nd + c] += wq * ddot(&stress[c], &strain[r]);
                }
            }
        }
        let dofs: Vec<usize> = space.element_dofs(t).collect();
        stiffness.add_dense(&dofs, &dofs, &local)?;
    }

    // edge terms
    let mut jumps: Vec<Vec2> = Vec::new();
    let mut tractions: Vec<Vec2> = Vec::new();
    for (e, edge) in space.mesh().edges().iter().enumerate() {
        if edge.tag == EdgeTag::Neumann {
            continue;
        }
        let tr = EdgeTraces::new(space, e);
        let n_local = tr.sides.len() * nd;
        let pen = alpha0 / edge.length.powf(beta0);
        let mut loc_c = vec![0.0; n_local * n_local];
        let mut loc_j = vec![0.0; n_local * n_local];
        jumps.resize(n_local, [0.0; 2]);
        tractions.resize(n_local, [0.0; 2]);
        for (q, &w) in tr.weights.iter().enumerate() {
            for (s, side) in tr.sides.iter().enumerate() {
                let vals = &side.values[q * nb..(q + 1) * nb];
                let grads = &side.grads[q * nb..(q + 1) * nb];
                for i in 0..nb {
                    let (s0, _) = basis_stress(material, 0, grads[i]);
                    let (s1, _) = basis_stress(material, 1, grads[i]);
                    let base = s * nd;
                    jumps[base + i] = [side.sign * vals[i], 0.0];
                    jumps[base + nb + i] = [0.0, side.sign * vals[i]];
                    let t0 = mat_vec(&s0, tr.normal);
                    let t1 = mat_vec(&s1, tr.normal);
                    let f = tr.average_factor;
                    tractions[base + i] = [f * t0[0], f * t0[1]];
                    tractions[base + nb + i] = [f * t1[0], f * t1[1]];
                }
            }
            for r in 0..n_local {
                for c in 0..n_local {
                    // {Dε(φ_c)}:[φ_r ⊗ n] = ({Dε(φ_c)} n)·[φ_r]
                    let cons = dot(tractions[c], jumps[r]) + dot(tractions[r], jumps[c]);
                    loc_c[r * n_local + c] -= w * cons;
                    loc_j[r * n_local + c] += w * pen * dot(jumps[r], jumps[c]);
                }
            }
        }
        let dofs: Vec<usize> = tr.sides.iter().flat_map(|s| space.element_dofs(s.element)).collect();
        consistency.add_dense(&dofs, &dofs, &loc_c)?;
        penalty.add_dense(&dofs, &dofs, &loc_j)?;
    }

    let sipg = SparseMatrix::linear_combination(&[(1.0, &stiffness), (1.0, &consistency), (1.0, &penalty)])?;
    Ok((stiffness, sipg, penalty))
}

/// `F_i = ∫_Ω f·φ_i + ∫_{Γ_N} g_N·φ_i`.
pub fn assemble_load(
    space: &DgSpace,
    body_force: impl Fn(Point) -> Vec2,
    traction: impl Fn(Point, Vec2) -> Vec2,
) -> Vec<f64> {
    let mut out = vec![0.0; space.total_dofs()];
    add_body_load(space, space.element_rule(), space.element_table(), &body_force, &mut out);
    let nb = space.dofs_per_component();
    for (e, edge) in space.mesh().edges().iter().enumerate() {
        if edge.tag != EdgeTag::Neumann {
            continue;
        }
        let tr = EdgeTraces::new(space, e);
        let side = &tr.sides[0];
        for (q, (&p, &w)) in tr.points.iter().zip(&tr.weights).enumerate() {
            let g = traction(p, tr.normal);
            let vals = &side.values[q * nb..(q + 1) * nb];
            for i in 0..nb {
                out[space.dof(side.element, 0, i)] += w * g[0] * vals[i];
                out[space.dof(side.element, 1, i)] += w * g[1] * vals[i];
            }
        }
    }
    out
}

fn add_body_load(
    space: &DgSpace,
    rule: &ElementRule,
    tab: &Tabulation,
    body_force: &impl Fn(Point) -> Vec2,
    out: &mut [f64],
) {
    let nb = space.dofs_per_component();
    for t in 0..space.mesh().num_triangles() {
        let map = space.element_map(t);
        let base = space.dof(t, 0, 0);
        for (q, (&xi, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let f = body_force(map.to_physical(xi));
            let wq = w * map.det;
            let n = tab.values_at(q);
            for i in 0..nb {
                out[base + i] += wq * f[0] * n[i];
                out[base + nb + i] += wq * f[1] * n[i];
            }
        }
    }
}

/// Load vector of `data` at time `t`.
pub fn assemble_load_at(space: &DgSpace, data: &dyn LoadData, t: f64) -> Vec<f64> {
    assemble_load(space, |p| data.body_force(p, t), |p, n| data.traction(p, n, t))
}

/// `(v, φ_i)`, the right-hand side of the L2 projection.
pub fn assemble_l2_rhs(space: &DgSpace, v: &dyn VectorField) -> Vec<f64> {
    let mut out = vec![0.0; space.total_dofs()];
    add_body_load(space, space.element_rule(), space.element_table(), &|p| v.value(p), &mut out);
    out
}

/// `a(u₀, φ_i)` for a field that is continuous across interior edges, so
/// only its Dirichlet-edge traces enter the jump terms.
pub fn assemble_elliptic_rhs(
    space: &DgSpace,
    material: &PronyMaterial,
    alpha0: f64,
    beta0: f64,
    u0: &dyn VectorField,
) -> Vec<f64> {
    let nb = space.dofs_per_component();
    let mut out = vec![0.0; space.total_dofs()];
    let rule = space.element_rule();
    let tab = space.element_table();
    for t in 0..space.mesh().num_triangles() {
        let map = space.element_map(t);
        for (q, (&xi, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let x = map.to_physical(xi);
            let s = material.apply_elastic(&sym(&u0.gradient(x)));
            let wq = w * map.det;
            for (i, &g) in tab.grads_at(q).iter().enumerate() {
                let g = map.physical_gradient(g);
                for c in 0..2 {
                    let (_, eps) = basis_stress(material, c, g);
                    out[space.dof(t, c, i)] += wq * ddot(&s, &eps);
                }
            }
        }
    }
    for (e, edge) in space.mesh().edges().iter().enumerate() {
        if edge.tag == EdgeTag::Neumann {
            continue;
        }
        let tr = EdgeTraces::new(space, e);
        let dirichlet = edge.tag == EdgeTag::Dirichlet;
        let pen = alpha0 / edge.length.powf(beta0);
        for (q, (&p, &w)) in tr.points.iter().zip(&tr.weights).enumerate() {
            let traction = mat_vec(&material.apply_elastic(&sym(&u0.gradient(p))), tr.normal);
            let u = u0.value(p);
            let u_outer_n = outer(u, tr.normal);
            for side in &tr.sides {
                let vals = &side.values[q * nb..(q + 1) * nb];
                let grads = &side.grads[q * nb..(q + 1) * nb];
                for i in 0..nb {
                    for c in 0..2 {
                        // −{Dε(u₀)}:[φ ⊗ n]
                        let mut v = -traction[c] * side.sign * vals[i];
                        if dirichlet {
                            let (s, _) = basis_stress(material, c, grads[i]);
                            v -= ddot(&s, &u_outer_n);
                            v += pen * u[c] * vals[i];
                        }
                        out[space.dof(side.element, c, i)] += w * v;
                    }
                }
            }
        }
    }
    out
}
