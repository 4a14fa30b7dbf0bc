//! Parameter sweeps over the pure-state Schmidt angle and the λ-family, plus
//! the violation onset and turning point of the λ curve.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{maximize_bound, pure_bound_analytic, OptimizerConfig, OptimizerError};
use crate::bell::CLASSICAL_BOUND;
use crate::entanglement::{concurrence, horodecki_max, von_neumann_entropy};
use crate::states::{lambda_state, schmidt_to_pure, LambdaFamily, SchmidtForm, LAMBDA_MAX};

/// Bisection tolerance on λ for the violation onset.
pub const ONSET_TOL: f64 = 1e-7;
/// Bisection tolerance on θ for the pure-state violation threshold.
pub const THRESHOLD_TOL: f64 = 1e-10;
/// Refinement factor of the local grid around a turning-point candidate.
const REFINE_FACTOR: usize = 10;
/// Half-width, in coarse grid steps, of the refinement window.
const REFINE_HALF_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub theta: f64,
    pub chi: f64,
    pub bound_analytic: f64,
    pub bound_numeric: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub lambda: f64,
    pub bound: f64,
    pub concurrence: f64,
    pub horodecki_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Onset {
    pub lambda: f64,
    pub concurrence: f64,
}

/// Closed interval of λ scanned with a fixed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl LambdaRange {
    pub fn full(step: f64) -> Self {
        Self {
            lo: 0.0,
            hi: LAMBDA_MAX,
            step,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.lo, self.hi, self.step)
    }
}

/// `n + 1` equally spaced points from `lo` to `hi`, with `n = round((hi - lo) / step)`.
fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round().max(1.0) as usize;
    (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect()
}

/// Grid over `[0, π]` with spacing close to `step`; both endpoints included.
pub fn theta_grid(step: f64) -> Vec<f64> {
    uniform_grid(0.0, PI, step)
}

/// Grid over `[0, 4]` with spacing close to `step`; both endpoints included.
pub fn lambda_grid(step: f64) -> Vec<f64> {
    uniform_grid(0.0, LAMBDA_MAX, step)
}

/// One row per `(θ, χ)`, θ-major. The numeric column always runs the
/// simplex search, even though the inputs are pure.
pub fn sweep_theta(
    grid: &[f64],
    chis: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Vec<ThetaRow>, OptimizerError> {
    cfg.validate()?;
    let numeric_cfg = cfg.numeric_only();
    let cases: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&theta| chis.iter().map(move |&chi| (theta, chi)))
        .collect();
    cfg.execution
        .map(cases.len(), |k| {
            let (theta, chi) = cases[k];
            let state = schmidt_to_pure(&SchmidtForm::new(theta, chi)?);
            let rho = state.to_density();
            Ok(ThetaRow {
                theta,
                chi,
                bound_analytic: pure_bound_analytic(theta),
                bound_numeric: maximize_bound(&rho, &numeric_cfg)?.value,
                entropy: von_neumann_entropy(&rho),
            })
        })
        .into_iter()
        .collect()
}

/// Bound of a single λ-family member.
pub fn lambda_bound(lambda: f64, cfg: &OptimizerConfig) -> Result<f64, OptimizerError> {
    let rho = lambda_state(&LambdaFamily::new(lambda)?);
    Ok(maximize_bound(&rho, cfg)?.value)
}

pub fn sweep_lambda(grid: &[f64], cfg: &OptimizerConfig) -> Result<Vec<LambdaRow>, OptimizerError> {
    cfg.validate()?;
    cfg.execution
        .map(grid.len(), |k| {
            let lambda = grid[k];
            let rho = lambda_state(&LambdaFamily::new(lambda)?);
            Ok(LambdaRow {
                lambda,
                bound: maximize_bound(&rho, cfg)?.value,
                concurrence: concurrence(&rho),
                horodecki_max: horodecki_max(&rho),
            })
        })
        .into_iter()
        .collect()
}

/// Root of an increasing `f` in `[lo, hi]` given `f(lo) < 0 <= f(hi)`.
pub fn bisect_increasing<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, E> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest λ where the bound reaches the classical value 2, bracketed by
/// the first grid crossing and refined by bisection.
pub fn onset_from_rows(rows: &[LambdaRow], cfg: &OptimizerConfig) -> Result<Onset, OptimizerError> {
    let (lo, hi) = match (rows.first(), rows.last()) {
        (Some(first), Some(last)) => (first.lambda, last.lambda),
        _ => {
            return Err(OptimizerError::NoOnsetInRange {
                lo: f64::NAN,
                hi: f64::NAN,
            })
        }
    };
    let bracket = rows
        .windows(2)
        .find(|w| w[0].bound < CLASSICAL_BOUND && w[1].bound >= CLASSICAL_BOUND)
        .ok_or(OptimizerError::NoOnsetInRange { lo, hi })?;
    let lambda = bisect_increasing(
        |l| Ok::<_, OptimizerError>(lambda_bound(l, cfg)? - CLASSICAL_BOUND),
        bracket[0].lambda,
        bracket[1].lambda,
        ONSET_TOL,
    )?;
    let rho = lambda_state(&LambdaFamily::new(lambda)?);
    Ok(Onset {
        lambda,
        concurrence: concurrence(&rho),
    })
}

pub fn find_onset(range: &LambdaRange, cfg: &OptimizerConfig) -> Result<Onset, OptimizerError> {
    let rows = sweep_lambda(&range.grid(), cfg)?;
    onset_from_rows(&rows, cfg)
}

/// Index of the interior point with the largest `|b[k+1] - 2 b[k] + b[k-1]|`.
fn sharpest_bend(bounds: &[f64]) -> Option<usize> {
    (1..bounds.len().saturating_sub(1))
        .map(|k| (k, (bounds[k + 1] - 2.0 * bounds[k] + bounds[k - 1]).abs()))
        .fold(None, |best: Option<(usize, f64)>, (k, d)| match best {
            Some((_, bd)) if bd >= d => best,
            _ => Some((k, d)),
        })
        .map(|(k, _)| k)
}

/// λ of the sharpest bend in the bound curve: the coarse grid point with the
/// largest absolute second difference, then the same search on a grid ten
/// times finer spanning two coarse steps either side.
pub fn turning_point_from_rows(
    rows: &[LambdaRow],
    cfg: &OptimizerConfig,
) -> Result<f64, OptimizerError> {
    let bounds: Vec<f64> = rows.iter().map(|r| r.bound).collect();
    let Some(k) = sharpest_bend(&bounds) else {
        return Err(OptimizerError::InvalidConfig(
            "turning point needs at least three grid points".into(),
        ));
    };
    let lo_idx = k.saturating_sub(REFINE_HALF_WIDTH);
    let hi_idx = (k + REFINE_HALF_WIDTH).min(rows.len() - 1);
    let lo = rows[lo_idx].lambda;
    let hi = rows[hi_idx].lambda;
    let n = (hi_idx - lo_idx) * REFINE_FACTOR;
    let fine: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let fine_rows = sweep_lambda(&fine, cfg)?;
    let fine_bounds: Vec<f64> = fine_rows.iter().map(|r| r.bound).collect();
    let j = sharpest_bend(&fine_bounds).expect("refined grid has interior points");
    Ok(fine[j])
}

pub fn find_turning_point(
    range: &LambdaRange,
    cfg: &OptimizerConfig,
) -> Result<f64, OptimizerError> {
    let rows = sweep_lambda(&range.grid(), cfg)?;
    turning_point_from_rows(&rows, cfg)
}

/// Schmidt angle in `[0, π/2]` at which the numerically maximized pure-state
/// bound reaches 2.
pub fn theta_threshold(cfg: &OptimizerConfig) -> Result<f64, OptimizerError> {
    let numeric = cfg.numeric_only();
    bisect_increasing(
        |theta| {
            let rho = schmidt_to_pure(&SchmidtForm::new(theta, 0.0)?).to_density();
            Ok::<_, OptimizerError>(maximize_bound(&rho, &numeric)?.value - CLASSICAL_BOUND)
        },
        0.0,
        FRAC_PI_2,
        THRESHOLD_TOL,
    )
}
