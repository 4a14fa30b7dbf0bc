//! Fixed-size complex linear algebra for one and two qubits.
//!
//! Everything here is sized at compile time: `CMatrix<2>` for single-qubit
//! operators, `CMatrix<4>` for two-qubit operators and density matrices. The
//! non-trivial routines are [`CMatrix::herm_eig`], a cyclic complex Jacobi
//! eigensolver, and [`CMatrix::singular_values`].

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used for every amplitude and matrix entry.
pub type C64 = Complex64;

/// Maximum entrywise deviation `|m - m†|` accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Residual `|m v - λ v|` the eigensolver is expected to reach.
pub const EIG_RESIDUAL_TOL: f64 = 1e-9;
/// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_OFF_DIAG_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Shorthand for a real-valued complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Complex column vector of dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVector<const N: usize>(pub [C64; N]);

pub type CVector2 = CVector<2>;
pub type CVector4 = CVector<4>;

impl<const N: usize> CVector<N> {
    pub fn zeros() -> Self {
        Self([ZERO; N])
    }

    pub fn from_real(values: [f64; N]) -> Self {
        Self(values.map(re))
    }

    /// Builds a vector from a slice, checking its length.
    pub fn from_slice(values: &[C64]) -> Result<Self, LinalgError> {
        let entries: [C64; N] = values
            .try_into()
            .map_err(|_| LinalgError::DimensionMismatch {
                expected: N,
                found: values.len(),
            })?;
        Ok(Self(entries))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn normalized(&self) -> Self {
        self.scale(re(1.0 / self.norm()))
    }

    /// Outer product `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix<N> {
        let mut m = CMatrix::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * self.0[j].conj();
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl<const N: usize> Index<usize> for CVector<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for CVector<N> {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for CVector<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (o, r) in out.0.iter_mut().zip(rhs.0) {
            *o += r;
        }
        out
    }
}

impl<const N: usize> Sub for CVector<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for (o, r) in out.0.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        out
    }
}

/// Dense row-major complex square matrix of dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix<const N: usize>(pub [[C64; N]; N]);

pub type CMatrix2 = CMatrix<2>;
pub type CMatrix3 = CMatrix<3>;
pub type CMatrix4 = CMatrix<4>;

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: [CVector<N>; N],
}

impl<const N: usize> HermEigen<N> {
    /// Rebuilds `Σ λᵢ |vᵢ⟩⟨vᵢ|`.
    pub fn reconstruct(&self) -> CMatrix<N> {
        self.map_values(|x| x)
    }

    /// Applies `f` to the spectrum: `Σ f(λᵢ) |vᵢ⟩⟨vᵢ|`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix<N> {
        let mut m = CMatrix::zeros();
        for (value, vector) in self.values.iter().zip(self.vectors.iter()) {
            m = m + vector.projector().scale(re(f(*value)));
        }
        m
    }
}

impl<const N: usize> CMatrix<N> {
    pub fn zeros() -> Self {
        Self([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self(rows.map(|row| row.map(re)))
    }

    pub fn diag(values: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in values.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn diag_real(values: [f64; N]) -> Self {
        Self::diag(values.map(re))
    }

    /// Builds a matrix from a row-major slice of `N * N` entries.
    pub fn from_row_major(entries: &[C64]) -> Result<Self, LinalgError> {
        if entries.len() != N * N {
            return Err(LinalgError::DimensionMismatch {
                expected: N * N,
                found: entries.len(),
            });
        }
        let mut m = Self::zeros();
        for (k, z) in entries.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(LinalgError::NonFinite {
                    row: k / N,
                    col: k % N,
                });
            }
            m.0[k / N][k % N] = *z;
        }
        Ok(m)
    }

    pub fn row_major(&self) -> Vec<C64> {
        self.0.iter().flatten().copied().collect()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Self(self.0.map(|row| row.map(|z| z.conj())))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|row| row.map(|z| z * s)))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn apply(&self, v: &CVector<N>) -> CVector<N> {
        let mut out = CVector::zeros();
        for i in 0..N {
            out.0[i] = (0..N).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    /// `⟨v| self |v⟩`.
    pub fn sandwich(&self, v: &CVector<N>) -> C64 {
        v.inner(&self.apply(v))
    }

    pub fn column(&self, j: usize) -> CVector<N> {
        let mut v = CVector::zeros();
        for i in 0..N {
            v.0[i] = self.0[i][j];
        }
        v
    }

    pub fn from_columns(columns: &[CVector<N>; N]) -> Self {
        let mut m = Self::zeros();
        for (j, col) in columns.iter().enumerate() {
            for i in 0..N {
                m.0[i][j] = col.0[i];
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise `|m - m†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.dagger() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back ascending. For degenerate eigenvalues the
    /// returned basis of the eigenspace is whatever the rotations produced;
    /// callers must not depend on it.
    pub fn herm_eig(&self) -> Result<HermEigen<N>, LinalgError> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITICITY_TOL || deviation.is_nan() {
            return Err(LinalgError::NotHermitian { deviation });
        }
        // Symmetrize so the rotations operate on an exactly Hermitian matrix.
        let mut a = (*self + self.dagger()).scale(re(0.5));
        let mut v = Self::identity();
        let scale = a.frobenius_norm().max(1.0);

        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) <= JACOBI_OFF_DIAG_TOL * scale {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }

        let mut order: [usize; N] = std::array::from_fn(|i| i);
        order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
        Ok(HermEigen {
            values: order.map(|i| a.0[i][i].re),
            vectors: order.map(|i| v.column(i)),
        })
    }

    /// Singular values, descending, by one-sided (Hestenes) Jacobi.
    ///
    /// Columns are rotated pairwise until mutually orthogonal; their norms are
    /// then the singular values. Small singular values keep an absolute error
    /// near `ε‖A‖`, unlike square roots of the eigenvalues of `A†A`.
    pub fn singular_values(&self) -> [f64; N] {
        let mut cols: [CVector<N>; N] = std::array::from_fn(|j| self.column(j));
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..N {
                for q in (p + 1)..N {
                    let alpha = cols[p].norm_sqr();
                    let beta = cols[q].norm_sqr();
                    let gamma = cols[p].inner(&cols[q]);
                    let mag = gamma.norm();
                    if mag <= f64::EPSILON * (alpha * beta).sqrt() || mag < f64::MIN_POSITIVE {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * mag);
                    let t = if zeta == 0.0 {
                        1.0
                    } else {
                        zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let aligned = cols[q].scale(gamma.conj() / mag);
                    let new_p = cols[p].scale(re(c)) - aligned.scale(re(s));
                    let new_q = cols[p].scale(re(s)) + aligned.scale(re(c));
                    cols[p] = new_p;
                    cols[q] = new_q;
                }
            }
            if !rotated {
                break;
            }
        }
        let mut out = cols.map(|c| c.norm());
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }
}

fn off_diagonal_norm<const N: usize>(a: &CMatrix<N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                sum += a.0[i][j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `Q = D R` where `D` strips the phase of `a[p][q]` and `R`
/// is the real symmetric Jacobi rotation; `a ← Q† a Q` and `v ← v Q`.
fn jacobi_rotate<const N: usize>(a: &mut CMatrix<N>, v: &mut CMatrix<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Columns of Q restricted to (p, q).
    let q_pp = re(c);
    let q_pq = re(s);
    let q_qp = -phase.conj() * s;
    let q_qq = phase.conj() * c;

    // a ← a Q
    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * q_pp + akq * q_qp;
        a.0[k][q] = akp * q_pq + akq * q_qq;
    }
    // a ← Q† a
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = q_pp.conj() * apk + q_qp.conj() * aqk;
        a.0[q][k] = q_pq.conj() * apk + q_qq.conj() * aqk;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p].im = 0.0;
    a.0[q][q].im = 0.0;
    // v ← v Q
    for k in 0..N {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * q_pp + vkq * q_qp;
        v.0[k][q] = vkp * q_pq + vkq * q_qq;
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Neg for CMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(re(-1.0))
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let aik = self.0[i][k];
                for j in 0..N {
                    out.0[i][j] += aik * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> Mul<CVector<N>> for CMatrix<N> {
    type Output = CVector<N>;
    fn mul(self, rhs: CVector<N>) -> CVector<N> {
        self.apply(&rhs)
    }
}

/// Kronecker product of two single-qubit operators; qubit `a` is the first
/// factor, so `kron(a, b)[2i + k][2j + l] = a[i][j] * b[k][l]`.
pub fn kron(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    let mut out = CMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// `|a⟩ ⊗ |b⟩`.
pub fn kron_vec(a: &CVector2, b: &CVector2) -> CVector4 {
    CVector([
        a.0[0] * b.0[0],
        a.0[0] * b.0[1],
        a.0[1] * b.0[0],
        a.0[1] * b.0[1],
    ])
}

/// `Tr(m ρ)`.
pub fn expectation<const N: usize>(m: &CMatrix<N>, rho: &CMatrix<N>) -> C64 {
    let mut acc = ZERO;
    for i in 0..N {
        for k in 0..N {
            acc += m.0[i][k] * rho.0[k][i];
        }
    }
    acc
}

/// Pauli matrices.
pub mod pauli {
    use super::{re, CMatrix2, I, ONE, ZERO};

    pub fn x() -> CMatrix2 {
        CMatrix2::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn y() -> CMatrix2 {
        super::CMatrix([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> CMatrix2 {
        CMatrix2::diag([ONE, re(-1.0)])
    }

    /// `[σx, σy, σz]`.
    pub fn all() -> [CMatrix2; 3] {
        [x(), y(), z()]
    }
}
