//! Crank–Nicolson time stepping for the displacement and velocity forms.
//!
//! Both schemes impose `(W^{n+1} + W^n)/2 = (U^{n+1} − U^n)/Δt` and
//! eliminate the internal variables algebraically, leaving one SPD solve
//! per step with the time-independent matrix
//!
//! ```text
//! K = (2/Δt²) M + (γ/2) A + (1/Δt) J,
//! ```
//!
//! where `γ = 1 − Σ b_q` for the displacement form and `γ = φ₀ + Σ c_q`
//! for the velocity form.

use crate::assembly::{assemble_elliptic_rhs, assemble_l2_rhs, assemble_load_at, AssembledSystem, LoadData, VectorField};
use crate::dg_space::DgSpace;
use crate::error::{Error, Result};
use crate::linalg::{Factorization, SolverKind, SparseMatrix};
use crate::material::PronyMaterial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Internal variables `ψ_q` driven by the displacement.
    Displacement,
    /// Internal variables `ζ_q` driven by the velocity.
    Velocity,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Displacement => "displacement",
            Scheme::Velocity => "velocity",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "displacement" | "D" | "d" => Ok(Scheme::Displacement),
            "velocity" | "V" | "v" => Ok(Scheme::Velocity),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Per-term recurrence coefficients for a fixed `Δt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeCoefficients {
    pub dt: f64,
    pub phi0: f64,
    pub phis: Vec<f64>,
    pub taus: Vec<f64>,
    /// `(2τ_q − Δt)/(2τ_q + Δt)`.
    pub a: Vec<f64>,
    /// `φ_q Δt/(2τ_q + Δt)`.
    pub b: Vec<f64>,
    /// `2τ_q φ_q/(2τ_q + Δt)`.
    pub c: Vec<f64>,
    pub gamma_d: f64,
    pub gamma_v: f64,
}

impl SchemeCoefficients {
    pub fn new(material: &PronyMaterial, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        let (phis, taus) = (material.phis().to_vec(), material.taus().to_vec());
        let a: Vec<f64> = taus.iter().map(|t| (2.0 * t - dt) / (2.0 * t + dt)).collect();
        let b: Vec<f64> = phis.iter().zip(&taus).map(|(p, t)| p * dt / (2.0 * t + dt)).collect();
        let c: Vec<f64> = phis.iter().zip(&taus).map(|(p, t)| 2.0 * t * p / (2.0 * t + dt)).collect();
        let gamma_d = 1.0 - b.iter().sum::<f64>();
        let gamma_v = material.phi0() + c.iter().sum::<f64>();
        Ok(Self {
            dt,
            phi0: material.phi0(),
            phis,
            taus,
            a,
            b,
            c,
            gamma_d,
            gamma_v,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.a.len()
    }

    /// Coefficient of `A` in the step matrix, times two.
    pub fn gamma(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::Displacement => self.gamma_d,
            Scheme::Velocity => self.gamma_v,
        }
    }
}

/// Discrete solution at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub scheme: Scheme,
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    /// `Ψ_q` (displacement form) or `S_q` (velocity form).
    pub internal: Vec<Vec<f64>>,
}

impl State {
    pub fn initial(scheme: Scheme, init: &InitialData, n_terms: usize, dt: f64) -> Self {
        Self {
            scheme,
            n: 0,
            t: 0.0,
            dt,
            u: init.u.clone(),
            w: init.w.clone(),
            internal: vec![vec![0.0; init.u.len()]; n_terms],
        }
    }

    /// `ρ‖W‖² + |||U|||²`.
    pub fn energy(&self, system: &AssembledSystem) -> f64 {
        system.mass.bilinear(&self.w, &self.w) + system.energy_norm_sq(&self.u)
    }
}

/// `U⁰` with `a(U⁰, v) = a(u₀, v)` and `W⁰` with `(W⁰, v) = (w₀, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl InitialData {
    pub fn compute(
        space: &DgSpace,
        system: &AssembledSystem,
        material: &PronyMaterial,
        u0: &dyn VectorField,
        w0: &dyn VectorField,
    ) -> Result<Self> {
        Self::compute_with(space, system, material, u0, w0, SolverKind::Cholesky)
    }

    /// As [`InitialData::compute`], solving the elliptic projection with
    /// `solver`.
    pub fn compute_with(
        space: &DgSpace,
        system: &AssembledSystem,
        material: &PronyMaterial,
        u0: &dyn VectorField,
        w0: &dyn VectorField,
        solver: SolverKind,
    ) -> Result<Self> {
        let rhs = assemble_elliptic_rhs(space, material, system.alpha0, system.beta0, u0);
        let u = if rhs.iter().all(|&v| v == 0.0) {
            rhs
        } else {
            Factorization::new(&system.sipg, solver)?.solve(&rhs)?
        };
        let rhs = assemble_l2_rhs(space, w0);
        let w = Factorization::cholesky(&system.plain_mass)?.solve(&rhs)?;
        Ok(Self { u, w })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { u: vec![0.0; dim], w: vec![0.0; dim] }
    }
}

/// Factored step matrix with everything needed to advance one scheme.
#[derive(Debug)]
pub struct StepOperator<'a> {
    scheme: Scheme,
    coeffs: SchemeCoefficients,
    system: &'a AssembledSystem,
    matrix: SparseMatrix,
    factor: Factorization,
    /// `A U⁰`, used by the velocity-form load.
    a_u0: Vec<f64>,
}

impl<'a> StepOperator<'a> {
    pub fn new(
        scheme: Scheme,
        system: &'a AssembledSystem,
        material: &PronyMaterial,
        dt: f64,
        init: &InitialData,
        solver: SolverKind,
    ) -> Result<Self> {
        let coeffs = SchemeCoefficients::new(material, dt)?;
        let matrix = SparseMatrix::linear_combination(&[
            (2.0 / (dt * dt), &system.mass),
            (0.5 * coeffs.gamma(scheme), &system.sipg),
            (1.0 / dt, &system.penalty),
        ])?;
        let factor = Factorization::new(&matrix, solver)?;
        let a_u0 = match scheme {
            Scheme::Displacement => Vec::new(),
            Scheme::Velocity => system.sipg.matvec(&init.u),
        };
        Ok(Self {
            scheme,
            coeffs,
            system,
            matrix,
            factor,
            a_u0,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn coefficients(&self) -> &SchemeCoefficients {
        &self.coeffs
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn solver(&self) -> SolverKind {
        self.factor.kind()
    }

    /// Converts the displacement-form load `F(t)` into the scheme's own
    /// load: unchanged for the displacement form, and
    /// `F(t) − Σ φ_q e^{−t/τ_q} A U⁰` for the velocity form.
    pub fn scheme_load(&self, mut f: Vec<f64>, t: f64) -> Vec<f64> {
        if self.scheme == Scheme::Velocity {
            let s: f64 = self
                .coeffs
                .phis
                .iter()
                .zip(&self.coeffs.taus)
                .map(|(p, tau)| p * (-t / tau).exp())
                .sum();
            for (v, a) in f.iter_mut().zip(&self.a_u0) {
                *v -= s * a;
            }
        }
        f
    }

    /// Advances `state` by one step given the averaged scheme load
    /// `(F^{n+1} + F^n)/2`.
    pub fn step(&self, state: &State, load_avg: &[f64]) -> Result<State> {
        if state.scheme != self.scheme {
            return Err(Error::InvalidArgument(format!(
                "state belongs to the {} scheme, operator to the {} scheme",
                state.scheme, self.scheme
            )));
        }
        let dim = self.matrix.dim();
        if load_avg.len() != dim || state.u.len() != dim || state.w.len() != dim {
            return Err(Error::InvalidArgument(format!("vector lengths do not match system dimension {dim}")));
        }
        if state.internal.len() != self.coeffs.n_terms() {
            return Err(Error::InvalidArgument(format!(
                "state has {} internal variables, material has {}",
                state.internal.len(),
                self.coeffs.n_terms()
            )));
        }
        let c = &self.coeffs;
        let dt = c.dt;
        let sys = self.system;

        let mut rhs = load_avg.to_vec();
        let mass_arg: Vec<f64> = state
            .u
            .iter()
            .zip(&state.w)
            .map(|(u, w)| 2.0 / (dt * dt) * u + 2.0 / dt * w)
            .collect();
        sys.mass.matvec_add(1.0, &mass_arg, &mut rhs);
        sys.penalty.matvec_add(1.0 / dt, &state.u, &mut rhs);

        let (u_factor, internal_sign) = match self.scheme {
            Scheme::Displacement => (-0.5 * c.gamma_d, 0.5),
            Scheme::Velocity => (-0.5 * (c.phi0 - c.c.iter().sum::<f64>()), -0.5),
        };
        let mut a_arg: Vec<f64> = state.u.iter().map(|u| u_factor * u).collect();
        for (q, z) in state.internal.iter().enumerate() {
            let f = internal_sign * (1.0 + c.a[q]);
            for (v, z) in a_arg.iter_mut().zip(z) {
                *v += f * z;
            }
        }
        sys.sipg.matvec_add(1.0, &a_arg, &mut rhs);

        self.factor.solve_in_place(&mut rhs)?;
        let u_next = rhs;

        let w_next: Vec<f64> = u_next
            .iter()
            .zip(&state.u)
            .zip(&state.w)
            .map(|((un, u), w)| 2.0 / dt * (un - u) - w)
            .collect();
        let internal = state
            .internal
            .iter()
            .enumerate()
            .map(|(q, z)| match self.scheme {
                Scheme::Displacement => z
                    .iter()
                    .zip(u_next.iter().zip(&state.u))
                    .map(|(z, (un, u))| c.a[q] * z + c.b[q] * (un + u))
                    .collect(),
                Scheme::Velocity => z
                    .iter()
                    .zip(u_next.iter().zip(&state.u))
                    .map(|(z, (un, u))| c.a[q] * z + c.c[q] * (un - u))
                    .collect(),
            })
            .collect();
        Ok(State {
            scheme: self.scheme,
            n: state.n + 1,
            t: (state.n + 1) as f64 * dt,
            dt,
            u: u_next,
            w: w_next,
            internal,
        })
    }
}

/// Number of steps `T/Δt`, which must be an integer.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid final time {t_final} or step {dt}")));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
        return Err(Error::InvalidArgument(format!("final time {t_final} is not a multiple of the step {dt}")));
    }
    Ok(n as usize)
}

/// Runs `scheme` from `init` to `t_final`. The step matrix is factored
/// once; `observer` sees every state including the initial one.
#[allow(clippy::too_many_arguments)]
pub fn run(
    scheme: Scheme,
    space: &DgSpace,
    system: &AssembledSystem,
    material: &PronyMaterial,
    data: &dyn LoadData,
    init: &InitialData,
    t_final: f64,
    dt: f64,
    solver: SolverKind,
    mut observer: impl FnMut(&State),
) -> Result<State> {
    let steps = step_count(t_final, dt)?;
    let mut state = State::initial(scheme, init, material.n_terms(), dt);
    observer(&state);
    if steps == 0 {
        return Ok(state);
    }
    let op = StepOperator::new(scheme, system, material, dt, init, solver)?;
    let mut prev = op.scheme_load(assemble_load_at(space, data, 0.0), 0.0);
    for n in 0..steps {
        let t_next = (n + 1) as f64 * dt;
        let next = op.scheme_load(assemble_load_at(space, data, t_next), t_next);
        let avg: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| 0.5 * (a + b)).collect();
        state = op.step(&state, &avg)?;
        observer(&state);
        prev = next;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{ZeroField, ZeroLoads};
    use crate::mesh::TriMesh;

    #[test]
    fn coefficient_ranges() {
        let m = PronyMaterial::reference();
        for dt in [1e-4, 0.01, 0.5, 3.0, 100.0] {
            let c = SchemeCoefficients::new(&m, dt).unwrap();
            for q in 0..2 {
                assert!(c.a[q].abs() < 1.0 && c.b[q] > 0.0 && c.c[q] > 0.0);
            }
            assert!(c.gamma_d > m.phi0() && c.gamma_d <= 1.0);
            assert!(c.gamma_v > m.phi0() && c.gamma_v <= 1.0);
        }
        assert!(SchemeCoefficients::new(&m, 0.0).is_err());
    }

    #[test]
    fn step_counts() {
        assert_eq!(step_count(1.0, 0.5).unwrap(), 2);
        assert_eq!(step_count(1.0, 1.0 / 2048.0).unwrap(), 2048);
        assert_eq!(step_count(0.0, 0.1).unwrap(), 0);
        assert!(step_count(1.0, 0.3).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        let space = DgSpace::new(TriMesh::structured(2).unwrap(), 1).unwrap();
        let m = PronyMaterial::reference();
        let sys = AssembledSystem::assemble(&space, &m, 10.0, 1.0).unwrap();
        let init = InitialData::compute(&space, &sys, &m, &ZeroField, &ZeroField).unwrap();
        assert!(init.u.iter().chain(&init.w).all(|&v| v == 0.0));
        for scheme in [Scheme::Displacement, Scheme::Velocity] {
            let mut seen = 0;
            let s = run(scheme, &space, &sys, &m, &ZeroLoads, &init, 1.0, 0.25, SolverKind::Cholesky, |_| seen += 1)
                .unwrap();
            assert_eq!(seen, 5);
            assert_eq!(s.n, 4);
            assert_eq!(s.t, 1.0);
            assert!(s.u.iter().chain(&s.w).chain(s.internal.iter().flatten()).all(|&v| v == 0.0));
        }
    }

    #[test]
    fn no_steps_returns_initial() {
        let space = DgSpace::new(TriMesh::structured(1).unwrap(), 1).unwrap();
        let m = PronyMaterial::reference();
        let sys = AssembledSystem::assemble(&space, &m, 10.0, 1.0).unwrap();
        let init = InitialData { u: vec![1.0; space.total_dofs()], w: vec![2.0; space.total_dofs()] };
        let s = run(Scheme::Velocity, &space, &sys, &m, &ZeroLoads, &init, 0.0, 0.5, SolverKind::Cholesky, |_| {}).unwrap();
        assert_eq!(s.u, init.u);
        assert_eq!(s.w, init.w);
        assert_eq!(s.n, 0);
    }

    #[test]
    fn scheme_mismatch() {
        let space = DgSpace::new(TriMesh::structured(1).unwrap(), 1).unwrap();
        let m = PronyMaterial::reference();
        let sys = AssembledSystem::assemble(&space, &m, 10.0, 1.0).unwrap();
        let init = InitialData::zeros(space.total_dofs());
        let op = StepOperator::new(Scheme::Displacement, &sys, &m, 0.1, &init, SolverKind::Cholesky).unwrap();
        let s = State::initial(Scheme::Velocity, &init, 2, 0.1);
        assert!(op.step(&s, &vec![0.0; space.total_dofs()]).is_err());
        assert_eq!("velocity".parse::<Scheme>().unwrap(), Scheme::Velocity);
        assert!("both".parse::<Scheme>().is_err());
    }
}
