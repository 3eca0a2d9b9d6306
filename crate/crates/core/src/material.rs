//! Generalised Maxwell solid: Prony-series relaxation and the elastic tensor.

use crate::error::{Error, Result};
use crate::tensor::{Mat2, ZERO_MAT};

/// Action of the fourth-order elastic tensor `D` on symmetric strains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElasticTensor {
    /// `Dε = ε`.
    Identity,
    /// `Dε = 2μ ε + λ tr(ε) I`.
    Isotropic { lambda: f64, mu: f64 },
}

impl ElasticTensor {
    #[inline]
    pub fn apply(&self, eps: &Mat2) -> Mat2 {
        match *self {
            ElasticTensor::Identity => *eps,
            ElasticTensor::Isotropic { lambda, mu } => {
                let tr = eps[0][0] + eps[1][1];
                let mut out = ZERO_MAT;
                for i in 0..2 {
                    for j in 0..2 {
                        out[i][j] = 2.0 * mu * eps[i][j];
                    }
                    out[i][i] += lambda * tr;
                }
                out
            }
        }
    }

    /// Equivalent Lamé pair; the identity tensor is `μ = 1/2, λ = 0`.
    pub fn lame(&self) -> (f64, f64) {
        match *self {
            ElasticTensor::Identity => (0.0, 0.5),
            ElasticTensor::Isotropic { lambda, mu } => (lambda, mu),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PronyMaterial {
    rho: f64,
    phi0: f64,
    phis: Vec<f64>,
    taus: Vec<f64>,
    elastic: ElasticTensor,
}

impl PronyMaterial {
    /// Validates `ρ > 0`, `φ₀ > 0`, `φ_q, τ_q > 0` and `φ₀ + Σ φ_q = 1`.
    pub fn new(rho: f64, phi0: f64, phis: Vec<f64>, taus: Vec<f64>, elastic: ElasticTensor) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(rho > 0.0 && rho.is_finite()) {
            return bad(format!("density must be positive, got {rho}"));
        }
        if !(phi0 > 0.0) {
            return bad(format!("long-term coefficient phi0 must be positive, got {phi0}"));
        }
        if phis.len() != taus.len() {
            return bad(format!("{} Prony coefficients but {} relaxation times", phis.len(), taus.len()));
        }
        if let Some(p) = phis.iter().find(|&&p| !(p > 0.0)) {
            return bad(format!("Prony coefficients must be positive, got {p}"));
        }
        if let Some(t) = taus.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
            return bad(format!("relaxation times must be positive, got {t}"));
        }
        let total = phi0 + phis.iter().sum::<f64>();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("phi0 + sum(phi_q) must equal 1, got {total}"));
        }
        if let ElasticTensor::Isotropic { lambda, mu } = elastic {
            if !(mu > 0.0 && lambda + mu > 0.0) {
                return bad(format!("Lamé parameters (lambda={lambda}, mu={mu}) are not positive definite"));
            }
        }
        Ok(Self { rho, phi0, phis, taus, elastic })
    }

    /// Material of the manufactured-solution experiments: `ρ = 1`, identity
    /// `D`, `φ₀ = 0.5`, `(φ₁, φ₂) = (0.1, 0.4)`, `(τ₁, τ₂) = (0.5, 1.5)`.
    pub fn reference() -> Self {
        Self::new(1.0, 0.5, vec![0.1, 0.4], vec![0.5, 1.5], ElasticTensor::Identity).expect("valid reference material")
    }

    /// Purely elastic material (`φ₀ = 1`, no internal variables).
    pub fn elastic(rho: f64, elastic: ElasticTensor) -> Result<Self> {
        Self::new(rho, 1.0, Vec::new(), Vec::new(), elastic)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn elastic_tensor(&self) -> ElasticTensor {
        self.elastic
    }

    /// Number of internal variables `N_φ`.
    pub fn n_terms(&self) -> usize {
        self.phis.len()
    }

    /// `φ(t) = φ₀ + Σ φ_q exp(-t/τ_q)`.
    pub fn relaxation(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("relaxation time argument must be non-negative, got {t}")));
        }
        Ok(self.phi0
            + self
                .phis
                .iter()
                .zip(&self.taus)
                .map(|(p, tau)| p * (-t / tau).exp())
                .sum::<f64>())
    }

    #[inline]
    pub fn apply_elastic(&self, eps: &Mat2) -> Mat2 {
        self.elastic.apply(eps)
    }

    /// Internal variable `ψ_q(t)` for a constant history `u ≡ c`:
    /// `φ_q c (1 − exp(−t/τ_q))`.
    pub fn internal_kernel_constant_history(&self, q: usize, c: f64, t: f64) -> Result<f64> {
        let (phi, tau) = self.term(q)?;
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
        }
        Ok(phi * c * (1.0 - (-t / tau).exp()))
    }

    pub fn term(&self, q: usize) -> Result<(f64, f64)> {
        match (self.phis.get(q), self.taus.get(q)) {
            (Some(&p), Some(&t)) => Ok((p, t)),
            _ => Err(Error::IndexOutOfRange { index: q, len: self.phis.len() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ddot;
    use proptest::prelude::*;

    #[test]
    fn relaxation_values() {
        let m = PronyMaterial::reference();
        assert_eq!(m.relaxation(0.0).unwrap(), 1.0);
        assert!((m.relaxation(1e3).unwrap() - 0.5).abs() < 1e-15);
        let expect = 0.5 + 0.1 * (-2.0f64).exp() + 0.4 * (-2.0f64 / 3.0).exp();
        assert!((m.relaxation(1.0).unwrap() - expect).abs() < 1e-15);
        assert!((m.relaxation(1.0).unwrap() - 0.71890).abs() < 1e-5);
        assert!(m.relaxation(-0.1).is_err());
    }

    #[test]
    fn relaxation_convex_decreasing() {
        let m = PronyMaterial::reference();
        let ts: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let v: Vec<f64> = ts.iter().map(|&t| m.relaxation(t).unwrap()).collect();
        for w in v.windows(3) {
            assert!(w[1] < w[0]);
            assert!(w[0] - 2.0 * w[1] + w[2] > 0.0);
            assert!(w[1] > 0.5 && w[1] <= 1.0);
        }
    }

    #[test]
    fn rejects_invalid() {
        let id = ElasticTensor::Identity;
        assert!(PronyMaterial::new(1.0, 0.0, vec![1.0], vec![1.0], id).is_err());
        assert!(PronyMaterial::new(1.0, 0.5, vec![0.4], vec![1.0], id).is_err());
        assert!(PronyMaterial::new(1.0, 0.5, vec![0.5], vec![], id).is_err());
        assert!(PronyMaterial::new(1.0, 0.5, vec![0.5], vec![-1.0], id).is_err());
        assert!(PronyMaterial::new(0.0, 1.0, vec![], vec![], id).is_err());
        assert!(PronyMaterial::new(1.0, 1.0, vec![], vec![], id).is_ok());
    }

    #[test]
    fn elastic_action() {
        let eye = [[1.0, 0.0], [0.0, 1.0]];
        assert_eq!(ElasticTensor::Identity.apply(&eye), eye);
        assert_eq!(ElasticTensor::Isotropic { lambda: 1.0, mu: 1.0 }.apply(&eye), [[4.0, 0.0], [0.0, 4.0]]);
        let dev = [[1.0, 0.0], [0.0, -1.0]];
        assert_eq!(ElasticTensor::Isotropic { lambda: 2.0, mu: 3.0 }.apply(&dev), [[6.0, 0.0], [0.0, -6.0]]);
    }

    #[test]
    fn constant_history_kernel() {
        let m = PronyMaterial::reference();
        assert_eq!(m.internal_kernel_constant_history(0, 1.0, 0.0).unwrap(), 0.0);
        assert!((m.internal_kernel_constant_history(1, 2.0, 1e4).unwrap() - 0.8).abs() < 1e-15);
        let v = m.internal_kernel_constant_history(0, 1.0, 0.5).unwrap();
        assert!((v - 0.1 * (1.0 - (-1.0f64).exp())).abs() < 1e-16);
        assert!((v - 0.063212).abs() < 1e-6);
        assert!(m.internal_kernel_constant_history(2, 1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn elastic_major_symmetry(
            a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0,
            d in -2.0f64..2.0, e in -2.0f64..2.0, f in -2.0f64..2.0,
            lambda in 0.0f64..5.0, mu in 0.1f64..5.0,
        ) {
            let x = [[a, b], [b, c]];
            let y = [[d, e], [e, f]];
            for tensor in [ElasticTensor::Identity, ElasticTensor::Isotropic { lambda, mu }] {
                let dx = tensor.apply(&x);
                prop_assert!((dx[0][1] - dx[1][0]).abs() < 1e-15);
                prop_assert!((ddot(&dx, &y) - ddot(&tensor.apply(&y), &x)).abs() < 1e-12);
            }
        }
    }
}
