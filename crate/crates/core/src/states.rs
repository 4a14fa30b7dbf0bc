//! Two-qubit pure and mixed states.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with qubit `a` as the first tensor
//! factor, so amplitude index `2i + j` belongs to `|i⟩_a |j⟩_b`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{
    expectation, kron_vec, re, CMatrix, CMatrix2, CMatrix4, CVector, CVector4, LinalgError, C64,
};

/// Tolerance on `‖ψ‖² = 1` and `Tr ρ = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated in a density matrix.
pub const PSD_FLOOR: f64 = -1e-10;
/// Largest admissible mixing parameter of the λ-family.
pub const LAMBDA_MAX: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state vector is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("density matrix is not Hermitian: max |rho - rho^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("density matrix trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("density matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("state contains non-finite entries")]
    NonFinite,
    #[error("lambda = {0} outside [0, 4]")]
    LambdaOutOfRange(f64),
    #[error("Schmidt parameters out of range: theta = {theta}, chi = {chi}")]
    SchmidtOutOfRange { theta: f64, chi: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl StateError {
    /// Short name of the violated invariant, used in CLI diagnostics.
    pub fn invariant(&self) -> &'static str {
        match self {
            StateError::NotNormalized { .. } => "normalization",
            StateError::NotHermitian { .. } => "hermiticity",
            StateError::TraceNotOne { .. } => "unit-trace",
            StateError::NotPositive { .. } => "positivity",
            StateError::NonFinite => "finiteness",
            StateError::LambdaOutOfRange(_) => "lambda-range",
            StateError::SchmidtOutOfRange { .. } => "schmidt-range",
            StateError::Linalg(LinalgError::DimensionMismatch { .. }) => "dimension",
            StateError::Linalg(_) => "linear-algebra",
        }
    }
}

/// Normalized two-qubit state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amplitudes: CVector4,
}

impl PureState {
    pub fn new(amplitudes: CVector4) -> Result<Self, StateError> {
        if !amplitudes.is_finite() {
            return Err(StateError::NonFinite);
        }
        let norm_sqr = amplitudes.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` before validating. Panics on a zero vector.
    pub fn normalized(amplitudes: CVector4) -> Self {
        let norm = amplitudes.norm();
        assert!(
            norm > 0.0 && norm.is_finite(),
            "cannot normalize {amplitudes:?}"
        );
        Self {
            amplitudes: amplitudes.scale(re(1.0 / norm)),
        }
    }

    pub fn amplitudes(&self) -> &CVector4 {
        &self.amplitudes
    }

    /// Amplitudes arranged as the 2×2 matrix `ψ[i][j]` of `|i⟩_a |j⟩_b`.
    pub fn amplitude_matrix(&self) -> CMatrix2 {
        let a = &self.amplitudes.0;
        CMatrix([[a[0], a[1]], [a[2], a[3]]])
    }

    pub fn to_density(&self) -> DensityMatrix {
        pure_to_density(self)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v = CVector(std::array::from_fn(|_| gaussian_complex(rng)));
        Self::normalized(v)
    }

    /// Random product state `|a⟩ ⊗ |b⟩` of two random single-qubit states.
    pub fn random_product<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let a = CVector(std::array::from_fn(|_| gaussian_complex(rng))).normalized();
        let b = CVector(std::array::from_fn(|_| gaussian_complex(rng))).normalized();
        Self::normalized(kron_vec(&a, &b))
    }
}

/// Canonical pure state `cos(θ/2)|01⟩ + e^{iχ} sin(θ/2)|10⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtForm {
    pub theta: f64,
    pub chi: f64,
}

impl SchmidtForm {
    /// `theta` in `[0, π]`, `chi` in `[0, 2π)`.
    pub fn new(theta: f64, chi: f64) -> Result<Self, StateError> {
        let ok = (0.0..=PI).contains(&theta) && (0.0..2.0 * PI).contains(&chi);
        if !ok {
            return Err(StateError::SchmidtOutOfRange { theta, chi });
        }
        Ok(Self { theta, chi })
    }
}

/// Validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix4,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity (in that order).
    pub fn new(matrix: CMatrix4) -> Result<Self, StateError> {
        if !matrix.is_finite() {
            return Err(StateError::NonFinite);
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > crate::linalg::HERMITICITY_TOL {
            return Err(StateError::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(StateError::TraceNotOne { trace });
        }
        let min_eigenvalue = matrix.herm_eig()?.values[0];
        if min_eigenvalue < PSD_FLOOR {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: CMatrix4::identity().scale(re(0.25)),
        }
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        expectation(&self.matrix, &self.matrix).re
    }

    /// `V ρ V†` for a unitary `V`, revalidated.
    pub fn conjugated(&self, v: &CMatrix4) -> Result<Self, StateError> {
        Self::new(*v * self.matrix * v.dagger())
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let g = CMatrix(std::array::from_fn(|_| {
            std::array::from_fn(|_| gaussian_complex(rng))
        }));
        let gg = g * g.dagger();
        let trace = gg.trace().re;
        let mut m = gg.scale(re(1.0 / trace));
        // GG† is Hermitian up to rounding; make it exact.
        m = (m + m.dagger()).scale(re(0.5));
        Self { matrix: m }
    }

    /// Convex mixture, with random weights, of `1..=4` random product states.
    pub fn random_separable<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let count = rng.random_range(1..=4usize);
        let mut weights: Vec<f64> = (0..count).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut m = CMatrix4::zeros();
        for w in weights {
            m = m + PureState::random_product(rng)
                .to_density()
                .matrix
                .scale(re(w));
        }
        Self { matrix: m }
    }
}

/// Member of the one-parameter mixed family
/// `(1/9) [[1,0,0,0],[0,4,λ,0],[0,λ,4,0],[0,0,0,0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaFamily {
    lambda: f64,
}

impl LambdaFamily {
    pub fn new(lambda: f64) -> Result<Self, StateError> {
        if !(0.0..=LAMBDA_MAX).contains(&lambda) {
            return Err(StateError::LambdaOutOfRange(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn schmidt_to_pure(s: &SchmidtForm) -> PureState {
    let (sin, cos) = (s.theta / 2.0).sin_cos();
    let phase = C64::from_polar(1.0, s.chi);
    PureState::normalized(CVector([re(0.0), re(cos), phase * sin, re(0.0)]))
}

/// Schmidt angle of a pure state, folded into `[0, π/2]` with `χ = 0`.
///
/// The Schmidt coefficients are the singular values of the amplitude matrix
/// `ψ`. The larger one comes from the top eigenvalue of `ψ†ψ`; the smaller
/// one is recovered as `|det ψ| / σ_max`, which stays accurate for nearly
/// product states.
pub fn schmidt_angle(p: &PureState) -> SchmidtForm {
    let (sigma_max, sigma_min) = schmidt_coefficients(p);
    SchmidtForm {
        theta: (2.0 * sigma_min.atan2(sigma_max)).clamp(0.0, FRAC_PI_2),
        chi: 0.0,
    }
}

/// Schmidt coefficients `(σ_max, σ_min)`.
pub(crate) fn schmidt_coefficients(p: &PureState) -> (f64, f64) {
    let psi = p.amplitude_matrix();
    let gram = psi.dagger() * psi;
    let top = gram
        .herm_eig()
        .expect("ψ†ψ is Hermitian by construction")
        .values[1]
        .max(0.0);
    let sigma_max = top.sqrt();
    let det = psi[(0, 0)] * psi[(1, 1)] - psi[(0, 1)] * psi[(1, 0)];
    let sigma_min = (det.norm() / sigma_max).min(sigma_max);
    (sigma_max, sigma_min)
}

pub fn lambda_state(f: &LambdaFamily) -> DensityMatrix {
    let l = f.lambda;
    let m = CMatrix4::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 4.0, l, 0.0],
        [0.0, l, 4.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    .scale(re(1.0 / 9.0));
    DensityMatrix::new(m).expect("λ-family member is a valid state for λ in [0, 4]")
}

pub fn pure_to_density(p: &PureState) -> DensityMatrix {
    let m = p.amplitudes.projector();
    DensityMatrix {
        matrix: (m + m.dagger()).scale(re(0.5)),
    }
}

/// Deterministic random pure state for `seed`.
pub fn random_pure(seed: u64) -> PureState {
    PureState::random(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Deterministic random density matrix `GG† / Tr(GG†)` for `seed`.
pub fn random_density(seed: u64) -> DensityMatrix {
    DensityMatrix::random(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub(crate) fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}
