//! Manufactured solution on the unit square,
//!
//! ```text
//! u(x, y, t) = (xy·e^{1−t}, cos t · sin(xy)),
//! ```
//!
//! with Dirichlet sides `x = 0`, `y = 0` and traction sides `x = 1`, `y = 1`.
//! Internal variables, stress, body force and traction are all in closed
//! form. With `κ = 1/τ_q` the displacement-form internal variable is
//!
//! ```text
//! ψ_q = φ_q κ ∫₀ᵗ e^{−κ(t−s)} u(s) ds
//!     = (xy · φ_q κ (e^{1−t} − e^{1−κt})/(κ − 1),
//!        sin(xy) · φ_q κ (κ cos t + sin t − κ e^{−κt})/(κ² + 1)).
//! ```

use crate::assembly::{LoadData, VectorField};
use crate::error::{Error, Result};
use crate::material::PronyMaterial;
use crate::norms::ExactSolution;
use crate::tensor::{mat_vec, sym, Mat2, Point, Vec2};

const SIDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedCase {
    material: PronyMaterial,
    final_time: f64,
}

impl Default for ManufacturedCase {
    fn default() -> Self {
        Self::new()
    }
}

/// `e^{1−t}(1 − e^{(1−κ)t})/(κ − 1)`, with the `κ = 1` limit `t e^{1−t}`.
fn exp_kernel(kappa: f64, t: f64) -> f64 {
    let d = 1.0 - kappa;
    let base = (1.0 - t).exp();
    if d == 0.0 {
        t * base
    } else {
        base * (d * t).exp_m1() / d
    }
}

/// `∫₀ᵗ e^{−κ(t−s)} cos s ds`.
fn cos_kernel(kappa: f64, t: f64) -> f64 {
    (kappa * t.cos() + t.sin() - kappa * (-kappa * t).exp()) / (kappa * kappa + 1.0)
}

impl ManufacturedCase {
    /// Reference material, final time 1.
    pub fn new() -> Self {
        Self::with_material(PronyMaterial::reference())
    }

    pub fn with_material(material: PronyMaterial) -> Self {
        Self { material, final_time: 1.0 }
    }

    pub fn material(&self) -> &PronyMaterial {
        &self.material
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn displacement(&self, p: Point, t: f64) -> Vec2 {
        let s = p[0] * p[1];
        [s * (1.0 - t).exp(), t.cos() * s.sin()]
    }

    pub fn displacement_gradient(&self, p: Point, t: f64) -> Mat2 {
        let [x, y] = p;
        let e = (1.0 - t).exp();
        let c = (x * y).cos() * t.cos();
        [[y * e, x * e], [y * c, x * c]]
    }

    pub fn velocity(&self, p: Point, t: f64) -> Vec2 {
        let s = p[0] * p[1];
        [-s * (1.0 - t).exp(), -t.sin() * s.sin()]
    }

    pub fn velocity_gradient(&self, p: Point, t: f64) -> Mat2 {
        let [x, y] = p;
        let e = (1.0 - t).exp();
        let c = -(x * y).cos() * t.sin();
        [[-y * e, -x * e], [y * c, x * c]]
    }

    pub fn acceleration(&self, p: Point, t: f64) -> Vec2 {
        let s = p[0] * p[1];
        [s * (1.0 - t).exp(), -t.cos() * s.sin()]
    }

    /// Time factors `(A_q(t), B_q(t))` with `ψ_q = (xy A_q, sin(xy) B_q)`.
    fn internal_factors(&self, q: usize, t: f64) -> Result<(f64, f64)> {
        let (phi, tau) = self.material.term(q)?;
        let kappa = 1.0 / tau;
        Ok((phi * kappa * exp_kernel(kappa, t), phi * kappa * cos_kernel(kappa, t)))
    }

    /// Displacement-form internal variable `ψ_q`.
    pub fn internal_displacement(&self, q: usize, p: Point, t: f64) -> Result<Vec2> {
        let (a, b) = self.internal_factors(q, t)?;
        let s = p[0] * p[1];
        Ok([s * a, s.sin() * b])
    }

    /// Time factors `(C_q(t), D_q(t))` with `ζ_q = (xy C_q, sin(xy) D_q)`.
    fn velocity_internal_factors(&self, q: usize, t: f64) -> Result<(f64, f64)> {
        let (phi, tau) = self.material.term(q)?;
        let kappa = 1.0 / tau;
        let sin_kernel = (kappa * t.sin() - t.cos() + (-kappa * t).exp()) / (kappa * kappa + 1.0);
        Ok((-phi * exp_kernel(kappa, t), -phi * sin_kernel))
    }

    /// Velocity-form internal variable `ζ_q = φ_q ∫₀ᵗ e^{−(t−s)/τ_q} u̇(s) ds`.
    pub fn internal_velocity(&self, q: usize, p: Point, t: f64) -> Result<Vec2> {
        let (a, b) = self.velocity_internal_factors(q, t)?;
        let s = p[0] * p[1];
        Ok([s * a, s.sin() * b])
    }

    /// Time factors `(P, Q)` of `u − Σψ_q = (xy P(t), sin(xy) Q(t))`.
    fn effective_factors(&self, t: f64) -> (f64, f64) {
        let mut p = (1.0 - t).exp();
        let mut q = t.cos();
        for i in 0..self.material.n_terms() {
            let (a, b) = self.internal_factors(i, t).expect("term index in range");
            p -= a;
            q -= b;
        }
        (p, q)
    }

    /// `∇(u − Σψ_q)`.
    pub fn effective_gradient(&self, p: Point, t: f64) -> Mat2 {
        let [x, y] = p;
        let (pf, qf) = self.effective_factors(t);
        let c = (x * y).cos() * qf;
        [[y * pf, x * pf], [y * c, x * c]]
    }

    /// `σ = Dε(u − Σψ_q)`.
    pub fn stress(&self, p: Point, t: f64) -> Mat2 {
        self.material.apply_elastic(&sym(&self.effective_gradient(p, t)))
    }

    /// `σ = Dε(φ₀ u + Σ ζ_q + Σ φ_q e^{−t/τ_q} u(0))`, the velocity-form
    /// expression of the same stress.
    pub fn stress_velocity_form(&self, p: Point, t: f64) -> Mat2 {
        let m = &self.material;
        let gu = self.displacement_gradient(p, t);
        let gu0 = self.displacement_gradient(p, 0.0);
        let mut g = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] = m.phi0() * gu[i][j];
            }
        }
        let [x, y] = p;
        let cs = (x * y).cos();
        for q in 0..m.n_terms() {
            let (phi, tau) = m.term(q).expect("term index in range");
            let (a, b) = self.velocity_internal_factors(q, t).expect("term index in range");
            let decay = phi * (-t / tau).exp();
            let gz = [[y * a, x * a], [y * cs * b, x * cs * b]];
            for i in 0..2 {
                for j in 0..2 {
                    g[i][j] += gz[i][j] + decay * gu0[i][j];
                }
            }
        }
        m.apply_elastic(&sym(&g))
    }

    /// `f = ρ ü − ∇·σ`. For `Dε = 2με + λ tr(ε) I` the divergence is
    /// `μ Δv + (μ + λ) ∇ div v` with `v = u − Σψ_q`.
    pub fn body_force(&self, p: Point, t: f64) -> Vec2 {
        let [x, y] = p;
        let s = x * y;
        let (lambda, mu) = self.material.elastic_tensor().lame();
        let (pf, qf) = self.effective_factors(t);
        let (sn, cs) = s.sin_cos();
        let lap = [0.0, -qf * (x * x + y * y) * sn];
        let grad_div = [qf * (cs - s * sn), pf - x * x * qf * sn];
        let acc = self.acceleration(p, t);
        let rho = self.material.rho();
        [
            rho * acc[0] - mu * lap[0] - (mu + lambda) * grad_div[0],
            rho * acc[1] - mu * lap[1] - (mu + lambda) * grad_div[1],
        ]
    }

    fn on_traction_side(p: Point) -> bool {
        let inside = (-SIDE_TOL..=1.0 + SIDE_TOL).contains(&p[0]) && (-SIDE_TOL..=1.0 + SIDE_TOL).contains(&p[1]);
        inside && ((p[0] - 1.0).abs() <= SIDE_TOL || (p[1] - 1.0).abs() <= SIDE_TOL)
    }

    /// `g_N = σ n` on the sides `x = 1`, `y = 1`.
    pub fn traction(&self, p: Point, normal: Vec2, t: f64) -> Result<Vec2> {
        if !Self::on_traction_side(p) {
            return Err(Error::InvalidArgument(format!(
                "point ({}, {}) is not on a traction side",
                p[0], p[1]
            )));
        }
        Ok(mat_vec(&self.stress(p, t), normal))
    }

    pub fn initial_displacement(&self) -> Snapshot<'_> {
        Snapshot { case: self, t: 0.0, field: Field::Displacement }
    }

    pub fn initial_velocity(&self) -> Snapshot<'_> {
        Snapshot { case: self, t: 0.0, field: Field::Velocity }
    }

    pub fn displacement_at(&self, t: f64) -> Snapshot<'_> {
        Snapshot { case: self, t, field: Field::Displacement }
    }

    pub fn velocity_at(&self, t: f64) -> Snapshot<'_> {
        Snapshot { case: self, t, field: Field::Velocity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Displacement,
    Velocity,
}

/// The exact displacement or velocity frozen at one time.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    case: &'a ManufacturedCase,
    t: f64,
    field: Field,
}

impl VectorField for Snapshot<'_> {
    fn value(&self, p: Point) -> Vec2 {
        match self.field {
            Field::Displacement => self.case.displacement(p, self.t),
            Field::Velocity => self.case.velocity(p, self.t),
        }
    }

    fn gradient(&self, p: Point) -> Mat2 {
        match self.field {
            Field::Displacement => self.case.displacement_gradient(p, self.t),
            Field::Velocity => self.case.velocity_gradient(p, self.t),
        }
    }
}

impl LoadData for ManufacturedCase {
    fn body_force(&self, p: Point, t: f64) -> Vec2 {
        ManufacturedCase::body_force(self, p, t)
    }

    fn traction(&self, p: Point, normal: Vec2, t: f64) -> Vec2 {
        mat_vec(&self.stress(p, t), normal)
    }
}

impl ExactSolution for ManufacturedCase {
    fn displacement(&self, p: Point, t: f64) -> Vec2 {
        ManufacturedCase::displacement(self, p, t)
    }
    fn displacement_gradient(&self, p: Point, t: f64) -> Mat2 {
        ManufacturedCase::displacement_gradient(self, p, t)
    }
    fn velocity(&self, p: Point, t: f64) -> Vec2 {
        ManufacturedCase::velocity(self, p, t)
    }
    fn velocity_gradient(&self, p: Point, t: f64) -> Mat2 {
        ManufacturedCase::velocity_gradient(self, p, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    #[allow(clippy::approx_constant)]
    fn point_values() {
        let c = ManufacturedCase::new();
        let u = c.displacement([1.0, 1.0], 0.0);
        assert!((u[0] - E).abs() < 1e-15 && (u[1] - 1f64.sin()).abs() < 1e-15);
        assert!((u[0] - 2.71828).abs() < 1e-5 && (u[1] - 0.84147).abs() < 1e-5);
        for &(y, t) in &[(0.3, 0.0), (1.0, 0.7), (0.5, 1.0)] {
            assert_eq!(c.displacement([0.0, y], t), [0.0, 0.0]);
            assert_eq!(c.displacement([y, 0.0], t), [0.0, 0.0]);
        }
        let w = c.velocity([0.5, 0.4], 0.0);
        assert!((w[0] + 0.2 * E).abs() < 1e-15 && w[1] == 0.0);
    }

    #[test]
    fn internal_variables_start_at_zero() {
        let c = ManufacturedCase::new();
        for q in 0..2 {
            assert_eq!(c.internal_displacement(q, [0.3, 0.9], 0.0).unwrap(), [0.0, 0.0]);
            let z = c.internal_velocity(q, [0.3, 0.9], 0.0).unwrap();
            assert!(z[0].abs() < 1e-16 && z[1].abs() < 1e-16);
        }
        assert!(c.internal_displacement(2, [0.3, 0.9], 0.5).is_err());
    }

    #[test]
    fn unit_relaxation_rate_limit() {
        // κ = 1 hits the removable singularity of the exponential kernel
        let near = exp_kernel(1.0 + 1e-9, 0.8);
        let at = exp_kernel(1.0, 0.8);
        assert!((near - at).abs() < 1e-8);
        assert!((at - 0.8 * 0.2f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn internal_odes_hold() {
        let c = ManufacturedCase::new();
        let h = 1e-4;
        for &(p, t) in &[([0.2, 0.7], 0.3), ([0.9, 0.5], 0.8), ([1.0, 1.0], 0.5)] {
            for q in 0..2 {
                let (phi, tau) = c.material().term(q).unwrap();
                let dpsi: Vec<f64> = (0..2)
                    .map(|i| {
                        (c.internal_displacement(q, p, t + h).unwrap()[i] - c.internal_displacement(q, p, t - h).unwrap()[i])
                            / (2.0 * h)
                    })
                    .collect();
                let psi = c.internal_displacement(q, p, t).unwrap();
                let u = c.displacement(p, t);
                let dz: Vec<f64> = (0..2)
                    .map(|i| {
                        (c.internal_velocity(q, p, t + h).unwrap()[i] - c.internal_velocity(q, p, t - h).unwrap()[i]) / (2.0 * h)
                    })
                    .collect();
                let z = c.internal_velocity(q, p, t).unwrap();
                let w = c.velocity(p, t);
                for i in 0..2 {
                    assert!((tau * dpsi[i] + psi[i] - phi * u[i]).abs() < 1e-7);
                    assert!((tau * dz[i] + z[i] - tau * phi * w[i]).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn velocity_internal_identity() {
        let c = ManufacturedCase::new();
        for &(p, t) in &[([0.2, 0.7], 0.3), ([0.9, 0.5], 0.8), ([1.0, 1.0], 1.0)] {
            for q in 0..2 {
                let (phi, tau) = c.material().term(q).unwrap();
                let z = c.internal_velocity(q, p, t).unwrap();
                let psi = c.internal_displacement(q, p, t).unwrap();
                let (u, u0) = (c.displacement(p, t), c.displacement(p, 0.0));
                for i in 0..2 {
                    let rhs = phi * u[i] - psi[i] - phi * (-t / tau).exp() * u0[i];
                    assert!((z[i] - rhs).abs() < 1e-11);
                }
            }
            let (s1, s2) = (c.stress(p, t), c.stress_velocity_form(p, t));
            for i in 0..2 {
                for j in 0..2 {
                    assert!((s1[i][j] - s2[i][j]).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn traction_sides() {
        let c = ManufacturedCase::new();
        assert!(c.traction([0.5, 0.5], [0.0, 1.0], 0.2).is_err());
        assert!(c.traction([0.0, 0.5], [-1.0, 0.0], 0.2).is_err());
        // zero history at t = 0
        let g = c.traction([0.4, 1.0], [0.0, 1.0], 0.0).unwrap();
        let eps = sym(&c.displacement_gradient([0.4, 1.0], 0.0));
        assert!((g[0] - eps[0][1]).abs() < 1e-15 && (g[1] - eps[1][1]).abs() < 1e-15);
    }

    #[test]
    fn body_force_continuous_at_start() {
        let c = ManufacturedCase::new();
        let a = c.body_force([0.3, 0.6], 0.0);
        let b = c.body_force([0.3, 0.6], 1e-9);
        assert!((a[0] - b[0]).abs() < 1e-7 && (a[1] - b[1]).abs() < 1e-7);
    }
}
