//! Direct numerical evaluation of the hereditary integrals behind the
//! manufactured stress, body force and internal variables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use viscodg::dg_space::EdgeRule;
use viscodg::{ElasticTensor, ManufacturedCase, Mat2, PronyMaterial};

/// Composite Gauss–Legendre on `[0, t]`, doubling the panel count until
/// successive results differ by less than `1e-12` (relative to scale).
pub fn integrate(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let rule = EdgeRule::with_order(15);
    let eval = |panels: usize| -> f64 {
        let h = t / panels as f64;
        (0..panels)
            .map(|p| {
                let a = p as f64 * h;
                rule.points.iter().zip(&rule.weights).map(|(&s, &w)| w * h * f(a + s * h)).sum::<f64>()
            })
            .sum()
    };
    let mut panels = 1;
    let mut prev = eval(panels);
    loop {
        panels *= 2;
        let next = eval(panels);
        if (next - prev).abs() < 1e-12 * next.abs().max(1.0) || panels > 1 << 16 {
            return next;
        }
        prev = next;
    }
}

// Exact solution pieces used by the oracle, written out independently.
pub fn u(p: [f64; 2], t: f64) -> [f64; 2] {
    let s = p[0] * p[1];
    [s * (1.0 - t).exp(), t.cos() * s.sin()]
}

pub fn u_dot(p: [f64; 2], t: f64) -> [f64; 2] {
    let s = p[0] * p[1];
    [-s * (1.0 - t).exp(), -t.sin() * s.sin()]
}

pub fn grad(p: [f64; 2], a: f64, b: f64) -> Mat2 {
    // ∇ of (a·xy, b·sin(xy))
    let [x, y] = p;
    let c = (x * y).cos();
    [[a * y, a * x], [b * c * y, b * c * x]]
}

/// Hessians `H[i][j][k] = ∂_j ∂_k z_i` of `z = (a·xy, b·sin(xy))`.
pub fn hessian(p: [f64; 2], a: f64, b: f64) -> [[[f64; 2]; 2]; 2] {
    let [x, y] = p;
    let s = x * y;
    let (sn, cs) = s.sin_cos();
    [
        [[0.0, a], [a, 0.0]],
        [[-b * y * y * sn, b * (cs - s * sn)], [b * (cs - s * sn), -b * x * x * sn]],
    ]
}

/// `∇·Dε(z)` from second derivatives, for `Dε = 2με + λ tr(ε) I`.
pub fn div_elastic(h: &[[[f64; 2]; 2]; 2], lambda: f64, mu: f64) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..2 {
            // ∂_j ε_ij = (∂_j∂_j z_i + ∂_i∂_j z_j)/2
            *o += 2.0 * mu * 0.5 * (h[i][j][j] + h[j][i][j]);
            // ∂_i tr ε
            *o += lambda * h[j][j][i];
        }
    }
    out
}

pub fn apply(lambda: f64, mu: f64, g: &Mat2) -> Mat2 {
    let eps = [[g[0][0], 0.5 * (g[0][1] + g[1][0])], [0.5 * (g[0][1] + g[1][0]), g[1][1]]];
    let tr = eps[0][0] + eps[1][1];
    [
        [2.0 * mu * eps[0][0] + lambda * tr, 2.0 * mu * eps[0][1]],
        [2.0 * mu * eps[1][0], 2.0 * mu * eps[1][1] + lambda * tr],
    ]
}

/// Relaxation function of the case material.
pub fn relax(m: &PronyMaterial, t: f64) -> f64 {
    m.relaxation(t).unwrap()
}

/// `σ(t) = φ(t) Dε(u₀) + ∫₀ᵗ φ(t−s) Dε(u̇(s)) ds`.
pub fn stress_oracle(m: &PronyMaterial, p: [f64; 2], t: f64) -> Mat2 {
    let (lambda, mu) = m.elastic_tensor().lame();
    let s0 = apply(lambda, mu, &grad(p, 1f64.exp(), 1.0));
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let hist = integrate(
                |s| {
                    let g = grad(p, -(1.0 - s).exp(), -s.sin());
                    relax(m, t - s) * apply(lambda, mu, &g)[i][j]
                },
                t,
            );
            out[i][j] = relax(m, t) * s0[i][j] + hist;
        }
    }
    out
}

/// `ρ ü − ∇·σ` with the divergence taken under the time integral.
pub fn body_force_oracle(m: &PronyMaterial, p: [f64; 2], t: f64) -> [f64; 2] {
    let (lambda, mu) = m.elastic_tensor().lame();
    let d0 = div_elastic(&hessian(p, 1f64.exp(), 1.0), lambda, mu);
    let s = p[0] * p[1];
    let acc = [s * (1.0 - t).exp(), -t.cos() * s.sin()];
    let mut out = [0.0; 2];
    for i in 0..2 {
        let hist = integrate(
            |r| relax(m, t - r) * div_elastic(&hessian(p, -(1.0 - r).exp(), -r.sin()), lambda, mu)[i],
            t,
        );
        out[i] = m.rho() * acc[i] - relax(m, t) * d0[i] - hist;
    }
    out
}

pub fn cases() -> Vec<ManufacturedCase> {
    vec![
        ManufacturedCase::new(),
        ManufacturedCase::with_material(
            PronyMaterial::new(
                1.7,
                0.3,
                vec![0.2, 0.3, 0.2],
                vec![0.25, 1.0, 4.0],
                ElasticTensor::Isotropic { lambda: 1.3, mu: 0.8 },
            )
            .unwrap(),
        ),
    ]
}

/// Largest absolute deviation of the closed forms from the oracle: the
/// internal variables, then stress, body force and traction.
pub fn closed_form_discrepancy(seed: u64, samples: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut internal, mut loads) = (0.0f64, 0.0f64);
    for case in cases() {
        let m = case.material().clone();
        for _ in 0..samples {
            let p = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            let t = rng.gen_range(0.0..1.0);
            for q in 0..m.n_terms() {
                let (phi, tau) = m.term(q).unwrap();
                let psi = case.internal_displacement(q, p, t).unwrap();
                let zeta = case.internal_velocity(q, p, t).unwrap();
                for i in 0..2 {
                    let psi_o = integrate(|s| phi / tau * (-(t - s) / tau).exp() * u(p, s)[i], t);
                    let zeta_o = integrate(|s| phi * (-(t - s) / tau).exp() * u_dot(p, s)[i], t);
                    internal = internal.max((psi[i] - psi_o).abs()).max((zeta[i] - zeta_o).abs());
                }
            }
            let so = stress_oracle(&m, p, t);
            let fo = body_force_oracle(&m, p, t);
            let f = case.body_force(p, t);
            let (s1, s2) = (case.stress(p, t), case.stress_velocity_form(p, t));
            for i in 0..2 {
                loads = loads.max((f[i] - fo[i]).abs());
                for j in 0..2 {
                    loads = loads.max((s1[i][j] - so[i][j]).abs()).max((s2[i][j] - so[i][j]).abs());
                }
            }
            let s = rng.gen_range(0.0..1.0);
            for (p, n) in [([1.0, s], [1.0, 0.0]), ([s, 1.0], [0.0, 1.0])] {
                let g = case.traction(p, n, t).unwrap();
                let so = stress_oracle(&m, p, t);
                for i in 0..2 {
                    loads = loads.max((g[i] - (so[i][0] * n[0] + so[i][1] * n[1])).abs());
                }
            }
        }
    }
    (internal, loads)
}
