//! Entanglement quantifiers: reduced-state entropy, Wootters concurrence,
//! and the Horodecki maximum of the CHSH value over all settings.

use serde::Serialize;

use crate::linalg::{expectation, kron, pauli, CMatrix2, CMatrix3};
use crate::states::DensityMatrix;

/// Eigenvalue residue in `[-NEG_CLAMP, 0)` is treated as rounding and zeroed.
const NEG_CLAMP: f64 = 1e-10;

/// Reduced state of qubit `a`.
pub fn partial_trace_b(rho: &DensityMatrix) -> CMatrix2 {
    let m = rho.matrix();
    let mut out = CMatrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)];
        }
    }
    out
}

/// `-Σ p log₂ p` over the spectrum of the reduced state of qubit `a`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let reduced = partial_trace_b(rho);
    let eig = reduced
        .herm_eig()
        .expect("partial trace of a density matrix is Hermitian");
    let h: f64 = eig
        .values
        .iter()
        .map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 })
        .sum();
    h.clamp(0.0, 1.0)
}

/// Binary entropy `H₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .map(|&x| if x > 0.0 { -x * x.log2() } else { 0.0 })
        .sum()
}

/// Wootters concurrence.
///
/// The eigenvalues `μᵢ` of `ρ ρ̃`, with `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`, are read off
/// the similar Hermitian matrix `√ρ ρ̃ √ρ`.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let yy = kron(&pauli::y(), &pauli::y());
    let sqrt_rho = m
        .herm_eig()
        .expect("density matrices are Hermitian")
        .map_values(|x| clamp_rounding(x).sqrt());
    // The square roots of the eigenvalues of √ρ ρ̃ √ρ are the singular values
    // of √ρ (σy⊗σy) √ρ*; working with the latter avoids squaring them.
    let mu = (sqrt_rho * yy * sqrt_rho.conj()).singular_values();
    (mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0)
}

fn clamp_rounding(x: f64) -> f64 {
    if (-NEG_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x.max(0.0)
    }
}

/// Spin correlation matrix `T[i][j] = Tr(ρ σᵢ⊗σⱼ)`, Pauli order `(x, y, z)`.
pub fn correlation_matrix(rho: &DensityMatrix) -> [[f64; 3]; 3] {
    let paulis = pauli::all();
    let mut t = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            t[i][j] = expectation(&kron(si, sj), rho.matrix()).re;
        }
    }
    t
}

/// Sum of the two largest eigenvalues of `TᵀT`.
pub fn horodecki_m(rho: &DensityMatrix) -> f64 {
    let t = correlation_matrix(rho);
    let mut ttt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ttt[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let values = CMatrix3::from_real(ttt)
        .herm_eig()
        .expect("TᵀT is symmetric")
        .values;
    (values[1] + values[2]).max(0.0)
}

/// Largest `|⟨W⟩_ρ|` over all (not necessarily vertical) settings, `2√M`.
pub fn horodecki_max(rho: &DensityMatrix) -> f64 {
    2.0 * horodecki_m(rho).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub entropy: f64,
    pub concurrence: f64,
    pub horodecki_m: f64,
    pub horodecki_max: f64,
}

impl EntanglementReport {
    pub fn of(rho: &DensityMatrix) -> Self {
        let m = horodecki_m(rho);
        Self {
            entropy: von_neumann_entropy(rho),
            concurrence: concurrence(rho),
            horodecki_m: m,
            horodecki_max: 2.0 * m.sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::canonical_eigensystem;
    use crate::linalg::{re, CVector4};
    use crate::states::{lambda_state, schmidt_to_pure, LambdaFamily, PureState, SchmidtForm};
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn eta1() -> DensityMatrix {
        PureState::new(canonical_eigensystem().eta1)
            .unwrap()
            .to_density()
    }

    #[test]
    fn partial_trace_examples() {
        let half = CMatrix2::identity().scale(re(0.5));
        assert!(partial_trace_b(&eta1()).max_abs_diff(&half) < 1e-15);

        let product = PureState::new(CVector4::from_real([1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(
            partial_trace_b(&product.to_density()),
            CMatrix2::diag_real([1.0, 0.0])
        );

        for lambda in [0.0, 1.3, 4.0] {
            let reduced = partial_trace_b(&lambda_state(&LambdaFamily::new(lambda).unwrap()));
            assert!(reduced.max_abs_diff(&CMatrix2::diag_real([5.0 / 9.0, 4.0 / 9.0])) < 1e-15);
        }
    }

    #[test]
    fn entropy_examples() {
        let pure = |theta| schmidt_to_pure(&SchmidtForm::new(theta, 0.0).unwrap()).to_density();
        assert!((von_neumann_entropy(&pure(FRAC_PI_2)) - 1.0).abs() < 1e-12);
        assert_eq!(von_neumann_entropy(&pure(0.0)), 0.0);
        let threshold = (SQRT_2 - 1.0).asin();
        assert!((von_neumann_entropy(&pure(threshold)) - 0.2644).abs() < 1e-3);
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&eta1()) - 1.0).abs() < 1e-9);
        for lambda in [0.0, 1.0, 2.7, 4.0] {
            let c = concurrence(&lambda_state(&LambdaFamily::new(lambda).unwrap()));
            assert!((c - 2.0 * lambda / 9.0).abs() < 1e-9, "λ={lambda}: {c}");
        }
        for k in 0..=20 {
            let theta = k as f64 * std::f64::consts::PI / 20.0;
            let rho = schmidt_to_pure(&SchmidtForm::new(theta, 0.4).unwrap()).to_density();
            assert!((concurrence(&rho) - theta.sin()).abs() < 1e-9, "θ={theta}");
        }
    }

    #[test]
    fn horodecki_examples() {
        assert!((horodecki_m(&eta1()) - 2.0).abs() < 1e-12);
        assert!((horodecki_max(&eta1()) - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(horodecki_m(&DensityMatrix::maximally_mixed()).abs() < 1e-15);

        for lambda in [0.0, 2.0, 3.5, 4.0] {
            let rho = lambda_state(&LambdaFamily::new(lambda).unwrap());
            let corr = (2.0 * lambda / 9.0).powi(2);
            let mut candidates = [(7.0f64 / 9.0).powi(2), corr, corr];
            candidates.sort_by(f64::total_cmp);
            let expected = candidates[1] + candidates[2];
            assert!((horodecki_m(&rho) - expected).abs() < 1e-12, "λ={lambda}");
        }
    }

    #[test]
    fn report_consistency() {
        let r = EntanglementReport::of(&eta1());
        assert!((r.horodecki_max - 2.0 * r.horodecki_m.sqrt()).abs() < 1e-15);
        assert!((r.entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }
}
