//! Randomized property suites, run by the `verify` subcommand and the
//! integration tests.
//!
//! Every suite draws from its own ChaCha stream of the configured seed, so
//! suites can run alone or in any order and still see the same samples.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bell::{
    bell_operator, canonical_w, chsh_value, max_violating_state, tsirelson_rhs, MeasurementSetting,
    CLASSICAL_BOUND, TSIRELSON_BOUND,
};
use crate::entanglement::{
    binary_entropy, concurrence, horodecki_m, horodecki_max, von_neumann_entropy,
};
use crate::io::{state_to_json, LoadedState};
use crate::linalg::{kron, re, CMatrix, CMatrix2, CMatrix4, C64};
use crate::optimizer::{
    maximize_bound, objective, objective_direct, pure_bound_analytic, OptimizerConfig,
    ProductUnitary,
};
use crate::states::{
    gaussian_complex, lambda_state, schmidt_angle, schmidt_to_pure, DensityMatrix, LambdaFamily,
    PureState, SchmidtForm, LAMBDA_MAX,
};

/// Number of λ points checked for validity.
const LAMBDA_POINTS: usize = 400;
const PHASE_SAMPLES: usize = 100;
const ANALYTIC_THETAS: usize = 50;
const ANALYTIC_CHIS: usize = 5;
/// The bound's local-unitary check runs two optimizations per sample.
const BOUND_LU_DIVISOR: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Sample count of the randomized suites.
    pub samples: usize,
    pub optimizer: OptimizerConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// Outcome of one suite; `counterexample` holds the first failing case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            passed: 0,
            note: None,
            counterexample: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }

    fn check(&mut self, ok: bool, dump: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else if self.counterexample.is_none() {
            self.counterexample = Some(dump());
        }
    }

    /// `"name: passed/checked"` plus the note and counterexample, if any.
    pub fn summary_line(&self) -> String {
        let mut line = format!(
            "{}: {}/{} {}",
            self.name,
            self.passed,
            self.checked,
            if self.ok() { "ok" } else { "FAILED" }
        );
        if let Some(note) = &self.note {
            line.push_str(&format!(" ({note})"));
        }
        if let Some(dump) = &self.counterexample {
            line.push_str(&format!("\n  counterexample: {dump}"));
        }
        line
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    EigReconstruction,
    TraceCyclicity,
    KronMixedProduct,
    LambdaValidity,
    SchmidtPhaseInvariance,
    ProductSchmidtAngle,
    TsirelsonInequality,
    TsirelsonTightness,
    CanonicalOperator,
    SeparableChsh,
    PureEntanglement,
    EntanglementLuInvariance,
    EntanglementRanges,
    SpectralIdentity,
    PhaseFreeze,
    Dominance,
    AnalyticNumeric,
    BoundLuInvariance,
}

impl Suite {
    pub const ALL: [Suite; 18] = [
        Suite::EigReconstruction,
        Suite::TraceCyclicity,
        Suite::KronMixedProduct,
        Suite::LambdaValidity,
        Suite::SchmidtPhaseInvariance,
        Suite::ProductSchmidtAngle,
        Suite::TsirelsonInequality,
        Suite::TsirelsonTightness,
        Suite::CanonicalOperator,
        Suite::SeparableChsh,
        Suite::PureEntanglement,
        Suite::EntanglementLuInvariance,
        Suite::EntanglementRanges,
        Suite::SpectralIdentity,
        Suite::PhaseFreeze,
        Suite::Dominance,
        Suite::AnalyticNumeric,
        Suite::BoundLuInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EigReconstruction => "eig-reconstruction",
            Suite::TraceCyclicity => "trace-cyclicity",
            Suite::KronMixedProduct => "kron-mixed-product",
            Suite::LambdaValidity => "lambda-validity",
            Suite::SchmidtPhaseInvariance => "schmidt-phase-invariance",
            Suite::ProductSchmidtAngle => "product-schmidt-angle",
            Suite::TsirelsonInequality => "tsirelson-inequality",
            Suite::TsirelsonTightness => "tsirelson-tightness",
            Suite::CanonicalOperator => "canonical-operator",
            Suite::SeparableChsh => "separable-chsh",
            Suite::PureEntanglement => "pure-entanglement",
            Suite::EntanglementLuInvariance => "entanglement-lu-invariance",
            Suite::EntanglementRanges => "entanglement-ranges",
            Suite::SpectralIdentity => "spectral-identity",
            Suite::PhaseFreeze => "phase-freeze",
            Suite::Dominance => "dominance",
            Suite::AnalyticNumeric => "analytic-numeric",
            Suite::BoundLuInvariance => "bound-lu-invariance",
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).expect("listed") as u64
    }

    /// Runs the suite with `n` randomized samples. Suites over fixed grids
    /// ignore `n`.
    pub fn run_with(self, cfg: &VerifyConfig, n: usize) -> SuiteReport {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(self.index() + 1);
        let mut r = SuiteReport::new(self.name());
        let rng = &mut rng;
        match self {
            Suite::EigReconstruction => eig_reconstruction(&mut r, rng, n),
            Suite::TraceCyclicity => trace_cyclicity(&mut r, rng, n),
            Suite::KronMixedProduct => kron_mixed_product(&mut r, rng, n),
            Suite::LambdaValidity => lambda_validity(&mut r),
            Suite::SchmidtPhaseInvariance => schmidt_phase_invariance(&mut r, rng),
            Suite::ProductSchmidtAngle => product_schmidt_angle(&mut r, rng, n),
            Suite::TsirelsonInequality => tsirelson_inequality(&mut r, rng, n),
            Suite::TsirelsonTightness => tsirelson_tightness(&mut r, rng, n),
            Suite::CanonicalOperator => canonical_operator(&mut r),
            Suite::SeparableChsh => separable_chsh(&mut r, rng, n),
            Suite::PureEntanglement => pure_entanglement(&mut r, rng, n),
            Suite::EntanglementLuInvariance => entanglement_lu_invariance(&mut r, rng, n),
            Suite::EntanglementRanges => entanglement_ranges(&mut r, rng, n),
            Suite::SpectralIdentity => spectral_identity(&mut r, rng, n),
            Suite::PhaseFreeze => phase_freeze(&mut r, rng, n),
            Suite::Dominance => dominance(&mut r, rng, n, &cfg.optimizer),
            Suite::AnalyticNumeric => analytic_numeric(&mut r, &cfg.optimizer),
            Suite::BoundLuInvariance => bound_lu_invariance(&mut r, rng, n, &cfg.optimizer),
        }
        r
    }

    /// Runs the suite at its default size for `cfg.samples`.
    pub fn run(self, cfg: &VerifyConfig) -> SuiteReport {
        let n = match self {
            Suite::BoundLuInvariance => (cfg.samples / BOUND_LU_DIVISOR).max(1),
            _ => cfg.samples,
        };
        self.run_with(cfg, n)
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<SuiteReport> {
    Suite::ALL.iter().map(|s| s.run(cfg)).collect()
}

fn random_matrix<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> CMatrix<N> {
    CMatrix(std::array::from_fn(|_| {
        std::array::from_fn(|_| gaussian_complex(rng))
    }))
}

fn random_hermitian<R: Rng + ?Sized>(rng: &mut R) -> CMatrix4 {
    let g: CMatrix4 = random_matrix(rng);
    (g + g.dagger()).scale(re(0.5))
}

fn density_dump(rho: &DensityMatrix) -> String {
    state_to_json(&LoadedState::Density(*rho))
}

fn pure_dump(psi: &PureState) -> String {
    state_to_json(&LoadedState::Pure(*psi))
}

fn eig_reconstruction(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let h = random_hermitian(rng);
        let err = match h.herm_eig() {
            Ok(eig) => eig.reconstruct().max_abs_diff(&h),
            Err(_) => f64::INFINITY,
        };
        r.check(err <= 1e-8, || format!("matrix {:?}, error {err:e}", h.0));
    }
}

fn trace_cyclicity(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let a: CMatrix4 = random_matrix(rng);
        let b: CMatrix4 = random_matrix(rng);
        let err = ((a * b).trace() - (b * a).trace()).norm();
        r.check(err <= 1e-10, || format!("A {:?}, B {:?}", a.0, b.0));
    }
}

fn kron_mixed_product(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let [a, b, c, d]: [CMatrix2; 4] = std::array::from_fn(|_| random_matrix(rng));
        let err = (kron(&a, &b) * kron(&c, &d)).max_abs_diff(&kron(&(a * c), &(b * d)));
        r.check(err <= 1e-10, || {
            format!("A {:?}, B {:?}, C {:?}, D {:?}", a.0, b.0, c.0, d.0)
        });
    }
}

fn lambda_validity(r: &mut SuiteReport) {
    for k in 0..LAMBDA_POINTS {
        let lambda = LAMBDA_MAX * k as f64 / (LAMBDA_POINTS - 1) as f64;
        let valid = LambdaFamily::new(lambda)
            .map(|f| DensityMatrix::new(*lambda_state(&f).matrix()).is_ok())
            .unwrap_or(false);
        r.check(valid, || format!("lambda {lambda}"));
    }
}

fn schmidt_phase_invariance(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    for _ in 0..PHASE_SAMPLES {
        let psi = PureState::random(rng);
        let phase = rng.random_range(0.0..2.0 * PI);
        let rotated = PureState::normalized(psi.amplitudes().scale(C64::from_polar(1.0, phase)));
        let diff = (schmidt_angle(&psi).theta - schmidt_angle(&rotated).theta).abs();
        r.check(diff <= 1e-9, || {
            format!("state {}, phase {phase}", pure_dump(&psi))
        });
    }
}

fn product_schmidt_angle(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let psi = PureState::random_product(rng);
        let theta = schmidt_angle(&psi).theta;
        r.check(theta <= 1e-6, || {
            format!("state {}, theta {theta}", pure_dump(&psi))
        });
    }
}

fn tsirelson_inequality(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    let mut max_rhs: f64 = 0.0;
    for _ in 0..n {
        let s = MeasurementSetting::random(rng);
        let rho = DensityMatrix::random(rng);
        let value = chsh_value(&s, &rho).abs();
        let rhs = tsirelson_rhs(&s, &rho);
        max_rhs = max_rhs.max(rhs);
        r.check(value <= rhs + 1e-9 && rhs <= TSIRELSON_BOUND + 1e-9, || {
            format!("state {}, setting {s:?}", density_dump(&rho))
        });
    }
    r.note = Some(format!("max rhs {max_rhs:.9}"));
}

/// The top eigenvector of `W(s)` saturates the state-dependent Tsirelson
/// inequality and never exceeds `2√2`.
fn tsirelson_tightness(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let s = MeasurementSetting::random(rng);
        let (psi, value) = max_violating_state(&s);
        let rho = psi.to_density();
        let attained = chsh_value(&s, &rho).abs();
        let rhs = tsirelson_rhs(&s, &rho);
        let ok = value <= TSIRELSON_BOUND + 1e-9
            && (attained - value).abs() <= 1e-9
            && (value - rhs).abs() <= 1e-6;
        r.check(ok, || {
            format!("setting {s:?}, value {value}, attained {attained}, rhs {rhs}")
        });
    }
}

fn canonical_operator(r: &mut SuiteReport) {
    let err = bell_operator(&MeasurementSetting::canonical()).max_abs_diff(&canonical_w());
    r.check(err <= 1e-12, || format!("max deviation {err:e}"));
}

fn separable_chsh(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    let mut max_value: f64 = 0.0;
    for _ in 0..n {
        let rho = DensityMatrix::random_separable(rng);
        let s = MeasurementSetting::random(rng);
        let value = chsh_value(&s, &rho).abs();
        max_value = max_value.max(value);
        r.check(value <= CLASSICAL_BOUND + 1e-8, || {
            format!("state {}, setting {s:?}", density_dump(&rho))
        });
    }
    r.note = Some(format!("max |chsh| {max_value:.9}"));
}

fn pure_entanglement(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let psi = PureState::random(rng);
        let rho = psi.to_density();
        let theta = schmidt_angle(&psi).theta;
        let c_err = (concurrence(&rho) - theta.sin()).abs();
        let s_err = (von_neumann_entropy(&rho) - binary_entropy((theta / 2.0).cos().powi(2))).abs();
        r.check(c_err <= 1e-8 && s_err <= 1e-8, || {
            format!("state {}, theta {theta}", pure_dump(&psi))
        });
    }
}

fn entanglement_lu_invariance(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let rho = DensityMatrix::random(rng);
        let u = ProductUnitary::random(rng);
        let Ok(moved) = rho.conjugated(&u.matrix()) else {
            r.check(false, || {
                format!("state {}, unitary {u:?}", density_dump(&rho))
            });
            continue;
        };
        let ok = (concurrence(&rho) - concurrence(&moved)).abs() <= 1e-8
            && (von_neumann_entropy(&rho) - von_neumann_entropy(&moved)).abs() <= 1e-8
            && (horodecki_m(&rho) - horodecki_m(&moved)).abs() <= 1e-8;
        r.check(ok, || {
            format!("state {}, unitary {u:?}", density_dump(&rho))
        });
    }
}

fn entanglement_ranges(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let rho = DensityMatrix::random(rng);
        let c = concurrence(&rho);
        let h = horodecki_max(&rho);
        r.check(
            (0.0..=1.0).contains(&c) && h <= TSIRELSON_BOUND + 1e-9,
            || {
                format!(
                    "state {}, concurrence {c}, horodecki_max {h}",
                    density_dump(&rho)
                )
            },
        );
    }
}

fn spectral_identity(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let u = ProductUnitary::random(rng);
        let rho = DensityMatrix::random(rng);
        let err = (objective(&u, &rho) - objective_direct(&u, &rho)).abs();
        r.check(err <= 1e-10, || {
            format!("state {}, unitary {u:?}", density_dump(&rho))
        });
    }
}

fn phase_freeze(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize) {
    for _ in 0..n {
        let u = ProductUnitary::random(rng);
        let rho = DensityMatrix::random(rng);
        let mut shifted = u;
        shifted.a.alpha += rng.random_range(-10.0..10.0);
        shifted.b.alpha += rng.random_range(-10.0..10.0);
        let err = (objective(&u, &rho) - objective(&shifted, &rho)).abs();
        r.check(err <= 1e-10, || {
            format!(
                "state {}, unitary {u:?}, shifted {shifted:?}",
                density_dump(&rho)
            )
        });
    }
}

/// `0 ≤ bound ≤ horodecki_max ≤ 2√2`, and the optimizer never exceeds `2√2`.
fn dominance(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize, cfg: &OptimizerConfig) {
    let mut worst_gap = f64::INFINITY;
    for _ in 0..n {
        let rho = DensityMatrix::random(rng);
        let ceiling = horodecki_max(&rho);
        let ok = match maximize_bound(&rho, cfg) {
            Ok(b) => {
                worst_gap = worst_gap.min(ceiling - b.value);
                b.value >= 0.0
                    && b.value <= ceiling + 1e-6
                    && b.value <= TSIRELSON_BOUND + 1e-9
                    && ceiling <= TSIRELSON_BOUND + 1e-6
            }
            Err(_) => false,
        };
        r.check(ok, || {
            format!("state {}, horodecki_max {ceiling}", density_dump(&rho))
        });
    }
    if n > 0 {
        r.note = Some(format!("min horodecki_max - bound {worst_gap:.3e}"));
    }
}

/// Numeric search on pure inputs against `√2 (sin θ + 1)`.
fn analytic_numeric(r: &mut SuiteReport, cfg: &OptimizerConfig) {
    let numeric = cfg.numeric_only();
    let mut max_err: f64 = 0.0;
    for i in 0..ANALYTIC_THETAS {
        let theta = PI * i as f64 / (ANALYTIC_THETAS - 1) as f64;
        for j in 0..ANALYTIC_CHIS {
            let chi = 2.0 * PI * j as f64 / ANALYTIC_CHIS as f64;
            let psi = schmidt_to_pure(&SchmidtForm::new(theta, chi).expect("grid in range"));
            let err = maximize_bound(&psi.to_density(), &numeric)
                .map(|b| (b.value - pure_bound_analytic(theta)).abs())
                .unwrap_or(f64::INFINITY);
            max_err = max_err.max(err);
            r.check(err <= 1e-4, || {
                format!("theta {theta}, chi {chi}, error {err:e}")
            });
        }
    }
    r.note = Some(format!("max error {max_err:.3e}"));
}

fn bound_lu_invariance(r: &mut SuiteReport, rng: &mut ChaCha8Rng, n: usize, cfg: &OptimizerConfig) {
    for _ in 0..n {
        let rho = DensityMatrix::random(rng);
        let v = ProductUnitary::random(rng);
        let diff = rho
            .conjugated(&v.matrix())
            .ok()
            .and_then(|moved| {
                let a = maximize_bound(&rho, cfg).ok()?.value;
                let b = maximize_bound(&moved, cfg).ok()?.value;
                Some((a - b).abs())
            })
            .unwrap_or(f64::INFINITY);
        r.check(diff <= 2e-4, || {
            format!(
                "state {}, unitary {v:?}, difference {diff:e}",
                density_dump(&rho)
            )
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            samples: 20,
            optimizer: OptimizerConfig {
                num_starts: 16,
                ..OptimizerConfig::default()
            },
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn cheap_suites_pass() {
        let cfg = small();
        for suite in Suite::ALL {
            if matches!(suite, Suite::AnalyticNumeric) {
                continue;
            }
            let report = suite.run(&cfg);
            assert!(report.ok(), "{}", report.summary_line());
            assert!(report.checked > 0);
        }
    }

    #[test]
    fn suites_are_reproducible() {
        let cfg = small();
        assert_eq!(
            Suite::TsirelsonInequality.run(&cfg),
            Suite::TsirelsonInequality.run(&cfg)
        );
        let other = VerifyConfig { seed: 1, ..cfg };
        assert_ne!(
            Suite::TsirelsonInequality.run(&cfg).note,
            Suite::TsirelsonInequality.run(&other).note
        );
    }

    #[test]
    fn failures_keep_the_first_counterexample() {
        let mut r = SuiteReport::new("demo");
        r.check(true, || unreachable!());
        r.check(false, || "first".into());
        r.check(false, || "second".into());
        assert_eq!((r.checked, r.passed), (3, 1));
        assert_eq!(r.counterexample.as_deref(), Some("first"));
        assert!(r.summary_line().contains("FAILED"));
    }

    #[test]
    fn fixed_grid_suites_ignore_sample_count() {
        let cfg = small();
        assert_eq!(
            Suite::LambdaValidity.run_with(&cfg, 3).checked,
            LAMBDA_POINTS
        );
        assert_eq!(
            Suite::SchmidtPhaseInvariance.run_with(&cfg, 3).checked,
            PHASE_SAMPLES
        );
        assert_eq!(Suite::CanonicalOperator.run_with(&cfg, 3).checked, 1);
    }

    #[test]
    fn suite_names_are_unique() {
        let mut names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), Suite::ALL.len());
    }
}
