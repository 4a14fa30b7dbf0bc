//! Acceptance criteria, one pass/fail line each. Exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::process::{Command, ExitCode};
use std::time::Instant;

use chsh_vertical::bell::{
    canonical_w, chsh_value, max_violating_state, tsirelson_rhs, MeasurementSetting,
    TSIRELSON_BOUND,
};
use chsh_vertical::entanglement::{concurrence, horodecki_max, von_neumann_entropy};
use chsh_vertical::linalg::CVector4;
use chsh_vertical::optimizer::{
    lambda_grid, maximize_bound, objective, objective_direct, onset_from_rows, pure_bound_analytic,
    sweep_lambda, sweep_theta, theta_threshold, turning_point_from_rows, ProductUnitary,
};
use chsh_vertical::states::{
    lambda_state, schmidt_to_pure, DensityMatrix, LambdaFamily, SchmidtForm,
};
use chsh_vertical::OptimizerConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let h = FRAC_1_SQRT_2;
    let eta = |v: [f64; 4]| CVector4::from_real(v.map(|x| x * h)).projector();
    let expected_values = [-2.0 * SQRT_2, 0.0, 0.0, 2.0 * SQRT_2];
    let eig = canonical_w().herm_eig().map_err(|e| e.to_string())?;
    let value_err = eig
        .values
        .iter()
        .zip(expected_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let p = |i: usize| eig.vectors[i].projector();
    let errs = [
        p(0).max_abs_diff(&eta([1.0, 0.0, 0.0, 1.0])),
        p(3).max_abs_diff(&eta([0.0, -1.0, 1.0, 0.0])),
        (p(1) + p(2)).max_abs_diff(&(eta([-1.0, 0.0, 0.0, 1.0]) + eta([0.0, 1.0, 1.0, 0.0]))),
    ];
    let vector_err = errs.into_iter().fold(0.0, f64::max);
    ensure(
        value_err <= 1e-9 && vector_err <= 1e-9,
        format!("eigenvalue error {value_err:.1e}, projector error {vector_err:.1e}"),
    )
}

const CHIS: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

fn theta_points() -> Vec<f64> {
    (0..200).map(|k| PI * k as f64 / 199.0).collect()
}

fn criterion_2_and_3() -> (Outcome, Outcome) {
    let cfg = OptimizerConfig::default();
    let rows = match sweep_theta(&theta_points(), &CHIS, &cfg) {
        Ok(rows) => rows,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let max_err = rows
        .iter()
        .map(|r| (r.bound_numeric - pure_bound_analytic(r.theta)).abs())
        .fold(0.0, f64::max);
    let max_spread = rows
        .chunks(CHIS.len())
        .map(|group| {
            let hi = group
                .iter()
                .map(|r| r.bound_numeric)
                .fold(f64::MIN, f64::max);
            let lo = group
                .iter()
                .map(|r| r.bound_numeric)
                .fold(f64::MAX, f64::min);
            hi - lo
        })
        .fold(0.0, f64::max);

    let c2 = theta_threshold(&cfg).map_err(|e| e.to_string()).and_then(|theta| {
        let threshold_err = (theta - (SQRT_2 - 1.0).asin()).abs();
        let psi = schmidt_to_pure(&SchmidtForm::new(theta, 0.0).map_err(|e| e.to_string())?);
        let entropy = von_neumann_entropy(&psi.to_density());
        ensure(
            rows.len() == 800
                && max_err <= 1e-4
                && threshold_err <= 1e-6
                && (entropy - 0.2644).abs() <= 1e-3,
            format!(
                "{} rows, max |numeric - analytic| {max_err:.1e}, threshold error {threshold_err:.1e}, entropy {entropy:.6}",
                rows.len()
            ),
        )
    });
    let c3 = ensure(
        max_spread <= 2e-4,
        format!("max spread across chi {max_spread:.1e}"),
    );
    (c2, c3)
}

fn criterion_4() -> Outcome {
    let concurrence_err = (0..400)
        .map(|k| {
            let lambda = 4.0 * k as f64 / 399.0;
            let rho = lambda_state(&LambdaFamily::new(lambda).expect("in range"));
            (concurrence(&rho) - 2.0 * lambda / 9.0).abs()
        })
        .fold(0.0, f64::max);

    let cfg = OptimizerConfig::default();
    let rows = sweep_lambda(&lambda_grid(0.01), &cfg).map_err(|e| e.to_string())?;
    let onset = onset_from_rows(&rows, &cfg).map_err(|e| e.to_string())?;
    let turning = turning_point_from_rows(&rows, &cfg).map_err(|e| e.to_string())?;
    let max_bound = rows.iter().map(|r| r.bound).fold(0.0, f64::max);
    ensure(
        concurrence_err <= 1e-9
            && (2.80..=2.95).contains(&onset.lambda)
            && (0.58..=0.66).contains(&onset.concurrence)
            && (3.40..=3.60).contains(&turning)
            && max_bound <= 16.0 * SQRT_2 / 9.0 + 1e-4,
        format!(
            "concurrence error {concurrence_err:.1e}, onset {:.6} (concurrence {:.6}), turning point {turning:.4}, max bound {max_bound:.6}",
            onset.lambda, onset.concurrence
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut max_err: f64 = 0.0;
    let mut passed = 0;
    for _ in 0..1000 {
        let u = ProductUnitary::random(&mut rng);
        let rho = DensityMatrix::random(&mut rng);
        let err = (objective(&u, &rho) - objective_direct(&u, &rho)).abs();
        max_err = max_err.max(err);
        passed += usize::from(err <= 1e-10);
    }
    ensure(
        passed == 1000,
        format!("{passed}/1000 pairs, max error {max_err:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = OptimizerConfig::default();
    let mut dominated = 0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..1000 {
        let rho = DensityMatrix::random(&mut rng);
        let bound = maximize_bound(&rho, &cfg).map_err(|e| e.to_string())?.value;
        let ceiling = horodecki_max(&rho);
        min_gap = min_gap.min(ceiling - bound);
        let ok = bound >= 0.0 && bound <= ceiling + 1e-6 && ceiling <= TSIRELSON_BOUND;
        dominated += usize::from(ok);
    }
    let mut classical = 0;
    let mut max_chsh: f64 = 0.0;
    for _ in 0..1000 {
        let rho = DensityMatrix::random_separable(&mut rng);
        let s = MeasurementSetting::random(&mut rng);
        let value = chsh_value(&s, &rho).abs();
        max_chsh = max_chsh.max(value);
        classical += usize::from(value <= 2.0 + 1e-8);
    }
    ensure(
        dominated == 1000 && classical == 1000,
        format!(
            "dominance {dominated}/1000 (min horodecki_max - bound {min_gap:.1e}), separable {classical}/1000 (max |chsh| {max_chsh:.6})"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_err: f64 = 0.0;
    for _ in 0..100 {
        let s = MeasurementSetting::random(&mut rng);
        let (psi, value) = max_violating_state(&s);
        max_err = max_err.max((value - tsirelson_rhs(&s, &psi.to_density())).abs());
    }
    ensure(
        max_err <= 1e-6,
        format!("100 settings, max |value - rhs| {max_err:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_chsh-vertical"))
            .args(["sweep-lambda", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(
        a.status.success() && a.stdout == b.stdout && a.stderr == b.stderr && !a.stdout.is_empty(),
        format!(
            "{} bytes of output, identical: {}",
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (c2, c3) = criterion_2_and_3();
    let results = [
        ("1 canonical spectrum", criterion_1()),
        ("2 pure-state formula", c2),
        ("3 chi independence", c3),
        ("4 lambda family", criterion_4()),
        ("5 spectral identity", criterion_5()),
        ("6 dominance and classical bound", criterion_6()),
        ("7 tsirelson tightness", criterion_7()),
        ("8 determinism", criterion_8()),
    ];
    let mut failures = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failures += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        results.len() - failures,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
