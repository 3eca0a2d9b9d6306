//! Discrete-vs-exact error norms and observed convergence rates.

use crate::assembly::{AssembledSystem, EdgeTraces};
use crate::dg_space::{DgSpace, ElementRule, Tabulation};
use crate::error::{Error, Result};
use crate::material::PronyMaterial;
use crate::mesh::EdgeTag;
use crate::stepper::{Scheme, State};
use crate::tensor::{ddot, sym, Mat2, Point, Vec2};

/// Exact displacement and velocity with their spatial gradients.
pub trait ExactSolution {
    fn displacement(&self, p: Point, t: f64) -> Vec2;
    fn displacement_gradient(&self, p: Point, t: f64) -> Mat2;
    fn velocity(&self, p: Point, t: f64) -> Vec2;
    fn velocity_gradient(&self, p: Point, t: f64) -> Mat2;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors {
    pub l2: f64,
    /// Full broken norm, `(‖e‖² + Σ_E ‖∇e‖²)^{1/2}`.
    pub h1: f64,
    /// `(Σ_E ∫ Dε(e):ε(e) + J(e, e))^{1/2}`.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub scheme: Scheme,
    pub k: usize,
    pub h: f64,
    pub dt: f64,
    pub t: f64,
    pub err_u_l2: f64,
    pub err_u_h1: f64,
    pub err_u_energy: f64,
    pub err_w_l2: f64,
    pub err_w_h1: f64,
    pub err_w_energy: f64,
}

/// Errors of a discrete field `coeffs` against an exact field.
pub fn field_errors(
    space: &DgSpace,
    system: &AssembledSystem,
    material: &PronyMaterial,
    coeffs: &[f64],
    value: &dyn Fn(Point) -> Vec2,
    gradient: &dyn Fn(Point) -> Mat2,
) -> Result<FieldErrors> {
    field_errors_with_rule(space, system, material, coeffs, value, gradient, space.error_rule())
}

/// As [`field_errors`] with an explicit element quadrature rule.
pub fn field_errors_with_rule(
    space: &DgSpace,
    system: &AssembledSystem,
    material: &PronyMaterial,
    coeffs: &[f64],
    value: &dyn Fn(Point) -> Vec2,
    gradient: &dyn Fn(Point) -> Mat2,
    rule: &ElementRule,
) -> Result<FieldErrors> {
    if coeffs.len() != space.total_dofs() {
        return Err(Error::InvalidArgument(format!(
            "coefficient vector has length {}, expected {}",
            coeffs.len(),
            space.total_dofs()
        )));
    }
    let tab = Tabulation::new(space.basis(), &rule.points);
    let mut l2 = 0.0;
    let mut grad = 0.0;
    let mut strain = 0.0;
    for t in 0..space.mesh().num_triangles() {
        let map = space.element_map(t);
        for (q, (&xi, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let x = map.to_physical(xi);
            let (uh, gh) = space.combine(coeffs, t, tab.values_at(q), tab.grads_at(q));
            let u = value(x);
            let g = gradient(x);
            let wq = w * map.det;
            let e = [u[0] - uh[0], u[1] - uh[1]];
            let mut ge = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    ge[i][j] = g[i][j] - gh[i][j];
                }
            }
            l2 += wq * (e[0] * e[0] + e[1] * e[1]);
            grad += wq * ddot(&ge, &ge);
            let eps = sym(&ge);
            strain += wq * ddot(&material.apply_elastic(&eps), &eps);
        }
    }
    // the exact field is continuous, so interior jumps are those of the
    // discrete field; on Dirichlet edges the jump is the trace of the error
    let nb = space.dofs_per_component();
    let mut jump = 0.0;
    for (e, edge) in space.mesh().edges().iter().enumerate() {
        if edge.tag == EdgeTag::Neumann {
            continue;
        }
        let tr = EdgeTraces::new(space, e);
        let pen = system.alpha0 / edge.length.powf(system.beta0);
        for (q, (&p, &w)) in tr.points.iter().zip(&tr.weights).enumerate() {
            let mut j = [0.0; 2];
            for side in &tr.sides {
                let vals = &side.values[q * nb..(q + 1) * nb];
                for c in 0..2 {
                    let local = &coeffs[space.dof(side.element, c, 0)..space.dof(side.element, c, 0) + nb];
                    let v: f64 = local.iter().zip(vals).map(|(a, b)| a * b).sum();
                    j[c] += side.sign * v;
                }
            }
            if tr.sides.len() == 1 {
                let u = value(p);
                j = [u[0] - j[0], u[1] - j[1]];
            }
            jump += w * pen * (j[0] * j[0] + j[1] * j[1]);
        }
    }
    Ok(FieldErrors {
        l2: l2.sqrt(),
        h1: (l2 + grad).sqrt(),
        energy: (strain + jump).sqrt(),
    })
}

/// Displacement and velocity errors of `state` at its own time.
pub fn error_norms(
    space: &DgSpace,
    system: &AssembledSystem,
    material: &PronyMaterial,
    state: &State,
    exact: &dyn ExactSolution,
) -> Result<ErrorReport> {
    let t = state.t;
    let u = field_errors(
        space,
        system,
        material,
        &state.u,
        &|p| exact.displacement(p, t),
        &|p| exact.displacement_gradient(p, t),
    )?;
    let w = field_errors(
        space,
        system,
        material,
        &state.w,
        &|p| exact.velocity(p, t),
        &|p| exact.velocity_gradient(p, t),
    )?;
    Ok(ErrorReport {
        scheme: state.scheme,
        k: space.degree(),
        h: space.mesh().h(),
        dt: state.dt,
        t,
        err_u_l2: u.l2,
        err_u_h1: u.h1,
        err_u_energy: u.energy,
        err_w_l2: w.l2,
        err_w_h1: w.h1,
        err_w_energy: w.energy,
    })
}

/// `d_c = (log e₁ − log e₂)/(log h₁ − log h₂)` for each adjacent pair.
pub fn convergence_rate(errors: &[f64], scales: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != scales.len() {
        return Err(Error::InvalidArgument(format!(
            "{} errors but {} scales",
            errors.len(),
            scales.len()
        )));
    }
    if let Some(e) = errors.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(format!("errors must be positive and finite, got {e}")));
    }
    if let Some(s) = scales.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(format!("scales must be positive and finite, got {s}")));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("scales must be strictly decreasing".into()));
    }
    Ok(errors
        .windows(2)
        .zip(scales.windows(2))
        .map(|(e, h)| (e[0].ln() - e[1].ln()) / (h[0].ln() - h[1].ln()))
        .collect())
}
