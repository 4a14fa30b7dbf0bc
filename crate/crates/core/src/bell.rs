//! CHSH Bell operators, the canonical vertical-measurement operator and its
//! eigensystem, and the classical and Tsirelson bounds.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use thiserror::Error;

use crate::linalg::{expectation, kron, pauli, re, CMatrix2, CMatrix4, CVector4};
use crate::states::{DensityMatrix, PureState};

/// `|⟨W⟩| ≤ 2` for every local-realistic model.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// `2√2`, the largest `|⟨W⟩|` quantum mechanics allows.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

const UNIT_TOL: f64 = 1e-10;
const VERTICAL_TOL: f64 = 1e-10;
/// Two eigenvalue magnitudes closer than this are treated as tied.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error("Bloch vector ({x}, {y}, {z}) is not a unit vector")]
    NotUnitVector { x: f64, y: f64, z: f64 },
}

/// Unit direction `n` of a spin observable `n·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, BellError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(BellError::NotUnitVector { x, y, z });
        }
        Ok(Self { x, y, z })
    }

    /// Rescales a non-zero vector to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self, BellError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(BellError::NotUnitVector { x, y, z });
        }
        Self::new(x / norm, y / norm, z / norm)
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.sample(rand_distr::StandardNormal));
            if let Ok(b) = Self::normalized(v[0], v[1], v[2]) {
                return b;
            }
        }
    }
}

/// Two measurement directions per party.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub a: BlochVector,
    pub a_prime: BlochVector,
    pub b: BlochVector,
    pub b_prime: BlochVector,
}

impl MeasurementSetting {
    /// `A = σz`, `A' = σx`, `B = -(σz + σx)/√2`, `B' = (σx - σz)/√2`.
    ///
    /// This is the vertical setting whose Bell operator is [`canonical_w`].
    pub fn canonical() -> Self {
        let h = FRAC_1_SQRT_2;
        Self {
            a: BlochVector {
                x: 0.0,
                y: 0.0,
                z: 1.0,
            },
            a_prime: BlochVector {
                x: 1.0,
                y: 0.0,
                z: 0.0,
            },
            b: BlochVector {
                x: -h,
                y: 0.0,
                z: -h,
            },
            b_prime: BlochVector {
                x: h,
                y: 0.0,
                z: -h,
            },
        }
    }

    /// Both parties measure orthogonal (anti-commuting) pairs.
    pub fn is_vertical(&self) -> bool {
        self.a.dot(&self.a_prime).abs() <= VERTICAL_TOL
            && self.b.dot(&self.b_prime).abs() <= VERTICAL_TOL
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            a: BlochVector::random(rng),
            a_prime: BlochVector::random(rng),
            b: BlochVector::random(rng),
            b_prime: BlochVector::random(rng),
        }
    }
}

/// `n·σ`.
pub fn observable(v: &BlochVector) -> CMatrix2 {
    let [sx, sy, sz] = pauli::all();
    sx.scale(re(v.x)) + sy.scale(re(v.y)) + sz.scale(re(v.z))
}

/// `W = A⊗(B + B') + A'⊗(B − B')`.
pub fn bell_operator(s: &MeasurementSetting) -> CMatrix4 {
    let a = observable(&s.a);
    let a_prime = observable(&s.a_prime);
    let b = observable(&s.b);
    let b_prime = observable(&s.b_prime);
    kron(&a, &(b + b_prime)) + kron(&a_prime, &(b - b_prime))
}

/// The Bell operator of [`MeasurementSetting::canonical`], written out.
pub fn canonical_w() -> CMatrix4 {
    let r = SQRT_2;
    CMatrix4::from_real([
        [-r, 0.0, 0.0, -r],
        [0.0, r, -r, 0.0],
        [0.0, -r, r, 0.0],
        [-r, 0.0, 0.0, -r],
    ])
}

/// Closed-form spectrum of [`canonical_w`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellEigensystem {
    /// Eigenvalues matching `eta1..eta4`: `(-2√2, 0, 2√2, 0)`.
    pub eigenvalues: [f64; 4],
    pub eta1: CVector4,
    pub eta2: CVector4,
    pub eta3: CVector4,
    pub eta4: CVector4,
}

impl BellEigensystem {
    pub fn pairs(&self) -> [(f64, CVector4); 4] {
        [
            (self.eigenvalues[0], self.eta1),
            (self.eigenvalues[1], self.eta2),
            (self.eigenvalues[2], self.eta3),
            (self.eigenvalues[3], self.eta4),
        ]
    }
}

pub fn canonical_eigensystem() -> BellEigensystem {
    let h = FRAC_1_SQRT_2;
    BellEigensystem {
        eigenvalues: [-TSIRELSON_BOUND, 0.0, TSIRELSON_BOUND, 0.0],
        eta1: CVector4::from_real([h, 0.0, 0.0, h]),
        eta2: CVector4::from_real([-h, 0.0, 0.0, h]),
        eta3: CVector4::from_real([0.0, -h, h, 0.0]),
        eta4: CVector4::from_real([0.0, h, h, 0.0]),
    }
}

/// Signed `⟨W⟩_ρ`.
pub fn chsh_value(s: &MeasurementSetting, rho: &DensityMatrix) -> f64 {
    expectation(&bell_operator(s), rho.matrix()).re
}

/// Right-hand side `√(4 + |⟨[A,A']⊗[B,B']⟩_ρ|)` of the state-dependent
/// Tsirelson inequality.
pub fn tsirelson_rhs(s: &MeasurementSetting, rho: &DensityMatrix) -> f64 {
    let comm = |u: &BlochVector, v: &BlochVector| {
        let a = observable(u);
        let b = observable(v);
        a * b - b * a
    };
    let c = kron(&comm(&s.a, &s.a_prime), &comm(&s.b, &s.b_prime));
    (4.0 + expectation(&c, rho.matrix()).norm()).sqrt()
}

/// Eigenvector of `W(s)` with the largest `|eigenvalue|`, and that magnitude.
///
/// When `±` eigenvalues tie in magnitude the positive one is returned. The
/// vector's phase is fixed so its first non-negligible component is real and
/// positive.
pub fn max_violating_state(s: &MeasurementSetting) -> (PureState, f64) {
    let eig = bell_operator(s)
        .herm_eig()
        .expect("Bell operators are Hermitian");
    let lowest = eig.values[0];
    let highest = eig.values[3];
    let (value, vector) = if highest.abs() + DEGENERACY_TOL >= lowest.abs() {
        (highest, eig.vectors[3])
    } else {
        (lowest, eig.vectors[0])
    };
    (PureState::normalized(fix_phase(&vector)), value.abs())
}

fn fix_phase(v: &CVector4) -> CVector4 {
    match v.0.iter().find(|z| z.norm() > 1e-12) {
        Some(lead) => v.scale(lead.conj() / lead.norm()),
        None => *v,
    }
}
