//! Maximization of `|⟨(Uᵃ⊗Uᵇ)† W (Uᵃ⊗Uᵇ)⟩_ρ|` over local unitaries, with `W`
//! the canonical vertical-measurement Bell operator.
//!
//! Rotating the state by a product unitary is the same as rotating both
//! parties' vertical measurement frames, so this is the largest CHSH value
//! reachable with vertical measurements. Pure states have the closed form
//! `√2 (sin θ + 1)`; mixed states go through a multi-start simplex search on
//! the six Euler angles `(β, γ, δ)` per qubit. The global phases `α, α'`
//! cancel under conjugation and stay at zero.

mod nelder_mead;
pub mod sweep;

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bell::{canonical_eigensystem, canonical_w, TSIRELSON_BOUND};
use crate::exec::Execution;
use crate::linalg::{expectation, kron, re, CMatrix, CMatrix2, CMatrix4, CVector, CVector4, C64};
use crate::states::{schmidt_angle, schmidt_coefficients, DensityMatrix, PureState, StateError};

pub use nelder_mead::{minimize, NelderMeadOptions, NelderMeadOutcome};
pub use sweep::{
    bisect_increasing, find_onset, find_turning_point, lambda_bound, lambda_grid, onset_from_rows,
    sweep_lambda, sweep_theta, theta_grid, theta_threshold, turning_point_from_rows, LambdaRange,
    LambdaRow, Onset, ThetaRow,
};

/// States with `Tr ρ² > 1 - PURITY_TOL` take the closed-form path.
pub const PURITY_TOL: f64 = 1e-9;

const FOUR_PI: f64 = 4.0 * PI;
const TWO_PI: f64 = 2.0 * PI;
const POLISH_ROUNDS: usize = 4;
const POLISH_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("invalid state: {0}")]
    InvalidState(#[from] StateError),
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("bound never crosses 2 for lambda in [{lo}, {hi}]")]
    NoOnsetInRange { lo: f64, hi: f64 },
}

/// `U = e^{-iα} R_z(β) R_y(γ) R_z(δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EulerParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl EulerParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn matrix(&self) -> CMatrix2 {
        single_qubit_unitary(self)
    }

    /// Same matrix with `β, δ ∈ [0, 4π)` and `γ ∈ [0, 2π)`; a `2π` shift of
    /// `γ` flips the sign of `U` and is compensated in `α`.
    pub fn canonicalized(&self) -> Self {
        let mut gamma = self.gamma.rem_euclid(FOUR_PI);
        let mut alpha = self.alpha;
        if gamma >= TWO_PI {
            gamma -= TWO_PI;
            alpha += PI;
        }
        Self {
            alpha: alpha.rem_euclid(TWO_PI),
            beta: self.beta.rem_euclid(FOUR_PI),
            gamma,
            delta: self.delta.rem_euclid(FOUR_PI),
        }
    }

    /// Euler angles of an arbitrary 2×2 unitary, with `γ ∈ [0, π]`.
    pub fn from_unitary(m: &CMatrix2) -> Self {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let alpha = -det.arg() / 2.0;
        let v = m.scale(C64::from_polar(1.0, alpha));
        let c = v[(0, 0)].norm();
        let s = v[(1, 0)].norm();
        let gamma = 2.0 * s.atan2(c);
        let sum = if c > 1e-12 {
            -2.0 * v[(0, 0)].arg()
        } else {
            0.0
        };
        let diff = if s > 1e-12 {
            2.0 * v[(1, 0)].arg()
        } else {
            0.0
        };
        Self {
            alpha,
            beta: (sum + diff) / 2.0,
            gamma,
            delta: (sum - diff) / 2.0,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            alpha: rng.random_range(0.0..TWO_PI),
            beta: rng.random_range(0.0..FOUR_PI),
            gamma: rng.random_range(0.0..TWO_PI),
            delta: rng.random_range(0.0..FOUR_PI),
        }
    }
}

/// `Uᵃ ⊗ Uᵇ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ProductUnitary {
    pub a: EulerParams,
    pub b: EulerParams,
}

impl ProductUnitary {
    pub fn matrix(&self) -> CMatrix4 {
        product_unitary(self)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            a: EulerParams::random(rng),
            b: EulerParams::random(rng),
        }
    }

    /// Packs `(β, γ, δ)` of both qubits; `α` is dropped.
    #[cfg(test)]
    fn to_search(self) -> [f64; 6] {
        [
            self.a.beta,
            self.a.gamma,
            self.a.delta,
            self.b.beta,
            self.b.gamma,
            self.b.delta,
        ]
    }

    fn from_search(x: &[f64; 6]) -> Self {
        Self {
            a: EulerParams::new(0.0, x[0], x[1], x[2]),
            b: EulerParams::new(0.0, x[3], x[4], x[5]),
        }
    }
}

pub fn single_qubit_unitary(p: &EulerParams) -> CMatrix2 {
    let (s, c) = (p.gamma / 2.0).sin_cos();
    let global = C64::from_polar(1.0, -p.alpha);
    let half_sum = (p.beta + p.delta) / 2.0;
    let half_diff = (p.beta - p.delta) / 2.0;
    CMatrix([
        [
            global * C64::from_polar(c, -half_sum),
            -global * C64::from_polar(s, -half_diff),
        ],
        [
            global * C64::from_polar(s, half_diff),
            global * C64::from_polar(c, half_sum),
        ],
    ])
}

pub fn product_unitary(u: &ProductUnitary) -> CMatrix4 {
    kron(&u.a.matrix(), &u.b.matrix())
}

/// `|2√2 [⟨η₃|UρU†|η₃⟩ − ⟨η₁|UρU†|η₁⟩]|`, which equals `|Tr(U†WU ρ)|`.
pub fn objective(u: &ProductUnitary, rho: &DensityMatrix) -> f64 {
    let sys = canonical_eigensystem();
    let m = u.matrix();
    let project = |eta: CVector4| {
        let p = m.dagger() * eta.projector() * m;
        expectation(&p, rho.matrix()).re
    };
    (TSIRELSON_BOUND * (project(sys.eta3) - project(sys.eta1))).abs()
}

/// Reference form `|Tr((U†WU) ρ)|` built from `W` directly.
pub fn objective_direct(u: &ProductUnitary, rho: &DensityMatrix) -> f64 {
    let m = u.matrix();
    expectation(&(m.dagger() * canonical_w() * m), rho.matrix()).norm()
}

/// `√2 (sin θ + 1)`: largest vertical-measurement CHSH value of a pure state
/// with Schmidt angle `θ`.
pub fn pure_bound_analytic(theta: f64) -> f64 {
    SQRT_2 * (theta.sin() + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub num_starts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub seed: u64,
    /// Route pure states through the closed form.
    pub pure_fast_path: bool,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            num_starts: 64,
            max_iters: 2000,
            f_tol: 1e-10,
            x_tol: 1e-9,
            seed: 0,
            pure_fast_path: true,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    /// Same settings with the pure-state shortcut disabled.
    pub fn numeric_only(&self) -> Self {
        Self {
            pure_fast_path: false,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.num_starts == 0 || self.max_iters == 0 {
            return Err(OptimizerError::InvalidConfig(
                "num_starts and max_iters must be positive".into(),
            ));
        }
        if !(self.f_tol > 0.0 && self.x_tol > 0.0) {
            return Err(OptimizerError::InvalidConfig(
                "f_tol and x_tol must be positive".into(),
            ));
        }
        Ok(())
    }

    fn simplex_options(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            max_iters: self.max_iters,
            f_tol: self.f_tol,
            x_tol: self.x_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub best_params: ProductUnitary,
    pub starts_converged: usize,
    pub evaluations: usize,
    pub method: BoundMethod,
}

/// Largest `|⟨U†WU⟩_ρ|` over product unitaries `U`.
pub fn maximize_bound(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<BoundResult, OptimizerError> {
    cfg.validate()?;
    if cfg.pure_fast_path && rho.purity() > 1.0 - PURITY_TOL {
        return Ok(analytic_bound(rho));
    }
    Ok(numeric_bound(rho, cfg))
}

fn analytic_bound(rho: &DensityMatrix) -> BoundResult {
    let eig = rho.matrix().herm_eig().expect("validated density matrix");
    let psi = PureState::normalized(eig.vectors[3]);
    BoundResult {
        value: pure_bound_analytic(schmidt_angle(&psi).theta),
        best_params: aligning_unitary(&psi),
        starts_converged: 0,
        evaluations: 0,
        method: BoundMethod::Analytic,
    }
}

/// Product unitary that puts the largest possible weight of `ψ` on `η₃` and
/// none on `η₁`.
///
/// With the singular value decomposition `ψ = X Σ Z†` of the amplitude
/// matrix, `A = −X†` and `B = Jᵀ Zᵀ` (`J = [[0, 1], [−1, 0]]`) map `ψ` to
/// `−c₀|01⟩ + c₁|10⟩`, whose overlap with `η₃` is `(c₀ + c₁)/√2`.
fn aligning_unitary(psi: &PureState) -> ProductUnitary {
    let amp = psi.amplitude_matrix();
    let gram = amp.dagger() * amp;
    let eig = gram.herm_eig().expect("ψ†ψ is Hermitian");
    let (sigma_max, _) = schmidt_coefficients(psi);
    let z1 = eig.vectors[1];
    let z2 = eig.vectors[0];
    let x1 = amp.apply(&z1).scale(re(1.0 / sigma_max));
    let perp = CVector([-x1[1].conj(), x1[0].conj()]);
    let overlap = perp.inner(&amp.apply(&z2));
    let x2 = if overlap.norm() > 1e-300 {
        perp.scale(overlap / overlap.norm())
    } else {
        perp
    };
    let x = CMatrix2::from_columns(&[x1, x2]);
    let z = CMatrix2::from_columns(&[z1, z2]);
    let j_t = CMatrix2::from_real([[0.0, -1.0], [1.0, 0.0]]);
    let a = -x.dagger();
    let b = j_t * z.transpose();
    let strip_phase = |m: &CMatrix2| {
        let p = EulerParams::from_unitary(m);
        EulerParams { alpha: 0.0, ..p }.canonicalized()
    };
    ProductUnitary {
        a: strip_phase(&a),
        b: strip_phase(&b),
    }
}

/// Precomputed pieces of the objective for one state.
///
/// For `U = Uᵃ⊗Uᵇ`, `U†|η⟩` corresponds to the amplitude matrix
/// `Uᵃ† M_η conj(Uᵇ)`, so each evaluation only needs 2×2 products.
struct Evaluator {
    rho: CMatrix4,
    eta1: CMatrix2,
    eta3: CMatrix2,
}

impl Evaluator {
    fn new(rho: &DensityMatrix) -> Self {
        let sys = canonical_eigensystem();
        let as_matrix = |v: crate::linalg::CVector4| CMatrix([[v[0], v[1]], [v[2], v[3]]]);
        Self {
            rho: *rho.matrix(),
            eta1: as_matrix(sys.eta1),
            eta3: as_matrix(sys.eta3),
        }
    }

    fn weight(&self, ua_dag: &CMatrix2, ub_conj: &CMatrix2, eta: &CMatrix2) -> f64 {
        let m = *ua_dag * *eta * *ub_conj;
        let v = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            let row: C64 = (0..4).map(|j| self.rho[(i, j)] * v[j]).sum();
            acc += v[i].conj() * row;
        }
        acc.re
    }

    fn value(&self, x: &[f64; 6]) -> f64 {
        let u = ProductUnitary::from_search(x);
        let ua_dag = u.a.matrix().dagger();
        let ub_conj = u.b.matrix().conj();
        let p3 = self.weight(&ua_dag, &ub_conj, &self.eta3);
        let p1 = self.weight(&ua_dag, &ub_conj, &self.eta1);
        (TSIRELSON_BOUND * (p3 - p1)).abs()
    }
}

#[derive(Debug, Clone, Copy)]
struct StartOutcome {
    x: [f64; 6],
    value: f64,
    evaluations: usize,
    converged: bool,
}

/// Six-dimensional Halton point with a seed-dependent rotation, scaled onto
/// the parameter torus (`β, δ` over `4π`, `γ` over `2π`).
fn start_point(seed: u64, index: usize) -> [f64; 6] {
    const BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    const SPANS: [f64; 6] = [FOUR_PI, TWO_PI, FOUR_PI, FOUR_PI, TWO_PI, FOUR_PI];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 6] = std::array::from_fn(|_| rng.random::<f64>());
    std::array::from_fn(|k| {
        let u = (radical_inverse(index as u64 + 1, BASES[k]) + shift[k]).fract();
        u * SPANS[k]
    })
}

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while n > 0 {
        out += (n % base) as f64 * scale;
        n /= base;
        scale *= inv;
    }
    out
}

/// Initial simplex edges for one start, drawn from the `(seed, index)` stream.
fn start_steps(seed: u64, index: usize) -> [f64; 6] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    std::array::from_fn(|_| {
        let magnitude = rng.random_range(0.4..1.0);
        if rng.random::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    })
}

fn numeric_bound(rho: &DensityMatrix, cfg: &OptimizerConfig) -> BoundResult {
    let evaluator = Evaluator::new(rho);
    let opts = cfg.simplex_options();
    let run = |x0: [f64; 6], steps: [f64; 6]| {
        let out = minimize(|x| -evaluator.value(x), x0, steps, &opts);
        StartOutcome {
            x: out.x,
            value: -out.f,
            evaluations: out.evaluations,
            converged: out.converged,
        }
    };

    let outcomes = cfg.execution.map(cfg.num_starts, |k| {
        run(start_point(cfg.seed, k), start_steps(cfg.seed, k))
    });

    let starts_converged = outcomes.iter().filter(|o| o.converged).count();
    let mut evaluations: usize = outcomes.iter().map(|o| o.evaluations).sum();
    // Values within f_tol count as ties and keep the lowest index, so rounding
    // noise on a flat objective cannot pick a later start.
    let mut best = outcomes
        .iter()
        .copied()
        .reduce(|best, o| {
            if o.value > best.value + cfg.f_tol {
                o
            } else {
                best
            }
        })
        .expect("num_starts >= 1");

    // Restarting from the incumbent guards against simplex collapse.
    for round in 0..POLISH_ROUNDS {
        let steps = start_steps(cfg.seed, cfg.num_starts + round).map(|s| s * POLISH_STEP);
        let polished = run(best.x, steps);
        evaluations += polished.evaluations;
        if polished.value > best.value + cfg.f_tol {
            best = polished;
        } else {
            break;
        }
    }

    let params = ProductUnitary::from_search(&best.x);
    BoundResult {
        value: best.value,
        best_params: ProductUnitary {
            a: params.a.canonicalized(),
            b: params.b.canonicalized(),
        },
        starts_converged,
        evaluations,
        method: BoundMethod::Numeric,
    }
}
