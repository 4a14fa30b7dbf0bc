//! Independent reference computations built on nalgebra.

#![allow(dead_code)]

use std::f64::consts::SQRT_2;

use chsh_vertical::linalg::{CMatrix4, C64};
use chsh_vertical::states::DensityMatrix;
use nalgebra::{Matrix2, Matrix3, Matrix4};

pub fn to_na(m: &CMatrix4) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| m.0[i][j])
}

pub fn paulis() -> [Matrix2<C64>; 3] {
    let c = |re: f64, im: f64| C64::new(re, im);
    [
        Matrix2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)),
        Matrix2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)),
        Matrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)),
    ]
}

pub fn correlation(rho: &DensityMatrix) -> Matrix3<f64> {
    let r = to_na(rho.matrix());
    let p = paulis();
    Matrix3::from_fn(|i, j| (r * p[i].kronecker(&p[j])).trace().re)
}

/// With `a ⊥ a'` and `b ± b' = √2 c±`, the CHSH value is
/// `√2 (aᵀT c₊ + a'ᵀT c₋)`, maximized by the two top singular values of `T`.
pub fn vertical_bound(rho: &DensityMatrix) -> f64 {
    let mut s: Vec<f64> = correlation(rho).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    SQRT_2 * (s[0] + s[1])
}

/// `√2 (7 + 2λ)/9` below the kink at `λ = 7/2`, `4√2 λ/9` above.
pub fn lambda_bound(lambda: f64) -> f64 {
    SQRT_2 * f64::max(7.0 + 2.0 * lambda, 4.0 * lambda) / 9.0
}

/// Where `lambda_bound` crosses 2.
pub fn lambda_onset() -> f64 {
    (9.0 * SQRT_2 - 7.0) / 2.0
}

pub fn hermitian_eigenvalues(m: &CMatrix4) -> [f64; 4] {
    let mut v: Vec<f64> = to_na(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    [v[0], v[1], v[2], v[3]]
}
