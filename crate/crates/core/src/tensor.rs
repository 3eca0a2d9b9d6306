//! Small fixed-size vector and tensor helpers for two space dimensions.

pub type Point = [f64; 2];
pub type Vec2 = [f64; 2];
/// Row-major 2×2 tensor, `m[i][j]`.
pub type Mat2 = [[f64; 2]; 2];

pub const ZERO_MAT: Mat2 = [[0.0; 2]; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Double contraction `a : b`.
#[inline]
pub fn ddot(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

#[inline]
pub fn outer(a: Vec2, b: Vec2) -> Mat2 {
    [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]]
}

#[inline]
pub fn sym(m: &Mat2) -> Mat2 {
    let off = 0.5 * (m[0][1] + m[1][0]);
    [[m[0][0], off], [off, m[1][1]]]
}

#[inline]
pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

#[inline]
pub fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

#[inline]
pub fn norm(v: Vec2) -> f64 {
    dot(v, v).sqrt()
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}
