//! Dense reference for one time step: the coupled system in displacement,
//! velocity and internal variables, solved without elimination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use viscodg::linalg::SolverKind;
use viscodg::stepper::{InitialData, State, StepOperator};
use viscodg::{AssembledSystem, DgSpace, ElasticTensor, PronyMaterial, Scheme, TriMesh};

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular block system");
        for r in col + 1..n {
            let f = a[r][col] / p;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

pub fn add_block(big: &mut [Vec<f64>], row: usize, col: usize, m: &[Vec<f64>], scale: f64) {
    for (i, r) in m.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            big[row + i][col + j] += scale * v;
        }
    }
}

pub fn mv(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn material() -> PronyMaterial {
    PronyMaterial::new(
        2.0,
        0.5,
        vec![0.1, 0.4],
        vec![0.5, 1.5],
        ElasticTensor::Isotropic { lambda: 1.0, mu: 0.7 },
    )
    .unwrap()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub struct Setup {
    pub sys: AssembledSystem,
    pub m: PronyMaterial,
    pub dim: usize,
}

pub fn setup() -> Setup {
    let space = DgSpace::new(TriMesh::structured(2).unwrap(), 1).unwrap();
    let m = material();
    let sys = AssembledSystem::assemble(&space, &m, 10.0, 1.0).unwrap();
    Setup { dim: space.total_dofs(), sys, m }
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

/// Unknown order: U', W', Z'_1, ..., Z'_N.
pub fn block_solution(scheme: Scheme, s: &Setup, state: &State, load: &[f64], dt: f64) -> Vec<f64> {
    let d = s.dim;
    let nq = s.m.n_terms();
    let m = s.sys.mass.to_dense();
    let a = s.sys.sipg.to_dense();
    let j = s.sys.penalty.to_dense();
    let eye: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
    let n = (2 + nq) * d;
    let mut big = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    let (u, w) = (&state.u, &state.w);

    // (W' + W)/2 = (U' − U)/Δt
    add_block(&mut big, 0, 0, &eye, -1.0 / dt);
    add_block(&mut big, 0, d, &eye, 0.5);
    for i in 0..d {
        rhs[i] = -u[i] / dt - 0.5 * w[i];
    }

    // momentum
    let (mw, au, jw) = (mv(&m, w), mv(&a, u), mv(&j, w));
    let u_coef = match scheme {
        Scheme::Displacement => 1.0,
        Scheme::Velocity => s.m.phi0(),
    };
    let z_sign = match scheme {
        Scheme::Displacement => -1.0,
        Scheme::Velocity => 1.0,
    };
    add_block(&mut big, d, 0, &a, 0.5 * u_coef);
    add_block(&mut big, d, d, &m, 1.0 / dt);
    add_block(&mut big, d, d, &j, 0.5);
    for i in 0..d {
        rhs[d + i] = load[i] + mw[i] / dt - 0.5 * u_coef * au[i] - 0.5 * jw[i];
    }
    for q in 0..nq {
        add_block(&mut big, d, (2 + q) * d, &a, 0.5 * z_sign);
        let az = mv(&a, &state.internal[q]);
        for i in 0..d {
            rhs[d + i] -= 0.5 * z_sign * az[i];
        }
    }

    // internal variables
    let aw = mv(&a, w);
    for q in 0..nq {
        let (phi, tau) = s.m.term(q).unwrap();
        let row = (2 + q) * d;
        add_block(&mut big, row, row, &a, tau / dt + 0.5);
        let az = mv(&a, &state.internal[q]);
        match scheme {
            Scheme::Displacement => {
                add_block(&mut big, row, 0, &a, -0.5 * phi);
                for i in 0..d {
                    rhs[row + i] = (tau / dt - 0.5) * az[i] + 0.5 * phi * au[i];
                }
            }
            Scheme::Velocity => {
                add_block(&mut big, row, d, &a, -0.5 * tau * phi);
                for i in 0..d {
                    rhs[row + i] = (tau / dt - 0.5) * az[i] + 0.5 * tau * phi * aw[i];
                }
            }
        }
    }
    solve_dense(big, rhs)
}

/// Largest relative difference between the eliminated step and the block
/// system over both schemes and a spread of step sizes, random states.
pub fn reduced_step_discrepancy(seed: u64) -> f64 {
    let s = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for scheme in [Scheme::Displacement, Scheme::Velocity] {
        for dt in [0.5, 0.1, 1.0 / 64.0] {
            let init = InitialData { u: random_vec(&mut rng, s.dim), w: random_vec(&mut rng, s.dim) };
            let mut state = State::initial(scheme, &init, 2, dt);
            state.internal = vec![random_vec(&mut rng, s.dim), random_vec(&mut rng, s.dim)];
            let load = random_vec(&mut rng, s.dim);
            let op = StepOperator::new(scheme, &s.sys, &s.m, dt, &init, SolverKind::Cholesky).unwrap();
            let next = op.step(&state, &load).unwrap();
            let x = block_solution(scheme, &s, &state, &load, dt);
            let d = s.dim;
            worst = worst.max(max_rel_diff(&next.u, &x[..d])).max(max_rel_diff(&next.w, &x[d..2 * d]));
            for q in 0..2 {
                worst = worst.max(max_rel_diff(&next.internal[q], &x[(2 + q) * d..(3 + q) * d]));
            }
        }
    }
    worst
}
