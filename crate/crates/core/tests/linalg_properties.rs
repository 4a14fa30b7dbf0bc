mod common;

use chsh_vertical::linalg::{kron, CMatrix, CMatrix2, CMatrix4, C64};
use nalgebra::Matrix4;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian<const N: usize>(rng: &mut ChaCha8Rng) -> CMatrix<N> {
    CMatrix(std::array::from_fn(|_| {
        std::array::from_fn(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    }))
}

fn hermitian(rng: &mut ChaCha8Rng) -> CMatrix4 {
    let g: CMatrix4 = gaussian(rng);
    (g + g.dagger()).scale(C64::new(0.5, 0.0))
}

#[test]
fn herm_eig_matches_nalgebra_on_random_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let h = hermitian(&mut rng);
        let eig = h.herm_eig().unwrap();
        let reference = common::hermitian_eigenvalues(&h);
        for (a, b) in eig.values.iter().zip(reference) {
            assert!((a - b).abs() < 1e-9, "{:?} vs {reference:?}", eig.values);
        }
        for (value, vector) in eig.values.iter().zip(eig.vectors) {
            let residual = (h * vector - vector.scale(C64::new(*value, 0.0))).norm();
            assert!(residual < 1e-9);
            assert!((vector.norm() - 1.0).abs() < 1e-12);
        }
        assert!(eig.reconstruct().max_abs_diff(&h) < 1e-8);
    }
}

#[test]
fn singular_values_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let m: CMatrix4 = gaussian(&mut rng);
        let ours = m.singular_values();
        let mut theirs: Vec<f64> = Matrix4::from_fn(|i, j| m.0[i][j])
            .singular_values()
            .iter()
            .copied()
            .collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10, "{ours:?} vs {theirs:?}");
        }
    }
}

#[test]
fn degenerate_spectra_are_resolved() {
    // Unitary rotation of diag(1, 1, -2, 0): repeated eigenvalue.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = hermitian(&mut rng);
    let basis = h.herm_eig().unwrap().vectors;
    let u = CMatrix4::from_columns(&basis);
    let m = u * CMatrix4::diag_real([1.0, 1.0, -2.0, 0.0]) * u.dagger();
    let eig = m.herm_eig().unwrap();
    let expected = [-2.0, 0.0, 1.0, 1.0];
    for (a, b) in eig.values.iter().zip(expected) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!(eig.reconstruct().max_abs_diff(&m) < 1e-10);
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix2() -> impl Strategy<Value = CMatrix2> {
    proptest::array::uniform4(complex()).prop_map(|[a, b, c, d]| CMatrix([[a, b], [c, d]]))
}

fn matrix4() -> impl Strategy<Value = CMatrix4> {
    proptest::array::uniform16(complex()).prop_map(|e| CMatrix4::from_row_major(&e).unwrap())
}

proptest! {
    #[test]
    fn trace_is_cyclic(a in matrix4(), b in matrix4()) {
        prop_assert!(((a * b).trace() - (b * a).trace()).norm() < 1e-10);
    }

    #[test]
    fn kron_mixed_product(a in matrix2(), b in matrix2(), c in matrix2(), d in matrix2()) {
        let lhs = kron(&a, &b) * kron(&c, &d);
        let rhs = kron(&(a * c), &(b * d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn kron_matches_nalgebra(a in matrix2(), b in matrix2()) {
        let na = |m: &CMatrix2| nalgebra::Matrix2::from_fn(|i, j| m.0[i][j]);
        let reference = na(&a).kronecker(&na(&b));
        let ours = kron(&a, &b);
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((ours[(i, j)] - reference[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dagger_reverses_products(a in matrix4(), b in matrix4()) {
        prop_assert!((a * b).dagger().max_abs_diff(&(b.dagger() * a.dagger())) < 1e-12);
        prop_assert_eq!(a.dagger().dagger(), a);
    }
}
