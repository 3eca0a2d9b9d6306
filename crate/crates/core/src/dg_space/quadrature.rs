//! Gauss–Legendre rules on `[0, 1]` and collapsed (Duffy) product rules on
//! the reference triangle `{ξ, η ≥ 0, ξ + η ≤ 1}`.

use crate::tensor::Point;

#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly.
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct ElementRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub order: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl EdgeRule {
    /// Gauss–Legendre rule on `[0, 1]` exact for polynomials of degree `order`.
    pub fn with_order(order: usize) -> Self {
        let m = (order + 2) / 2;
        let (x, w) = gauss_legendre(m.max(1));
        Self {
            points: x.iter().map(|&x| 0.5 * (x + 1.0)).collect(),
            weights: w.iter().map(|&w| 0.5 * w).collect(),
            order: 2 * m.max(1) - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl ElementRule {
    /// Collapsed Gauss–Legendre rule on the reference triangle exact for
    /// polynomials of total degree `order`. Weights sum to 1/2.
    pub fn with_order(order: usize) -> Self {
        // The collapse adds one degree in the first direction.
        let line = EdgeRule::with_order(order + 1);
        let mut points = Vec::with_capacity(line.len() * line.len());
        let mut weights = Vec::with_capacity(line.len() * line.len());
        for (&u, &wu) in line.points.iter().zip(&line.weights) {
            for (&v, &wv) in line.points.iter().zip(&line.weights) {
                points.push([u, (1.0 - u) * v]);
                weights.push(wu * wv * (1.0 - u));
            }
        }
        Self {
            points,
            weights,
            order: line.order - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Default rules for degree `k`: element exactness `max(2k + 2, 6)`, edge
/// exactness `max(2k + 3, 7)`.
pub fn quadrature_rules(k: usize) -> (ElementRule, EdgeRule) {
    (
        ElementRule::with_order((2 * k + 2).max(6)),
        EdgeRule::with_order((2 * k + 3).max(7)),
    )
}

/// Element rule for error norms, exactness `2k + 8`. The errors are many
/// orders smaller than the exact fields, so the assembly rule is not
/// accurate enough once `k ≥ 2`.
pub fn error_rule(k: usize) -> ElementRule {
    ElementRule::with_order(2 * k + 8)
}
