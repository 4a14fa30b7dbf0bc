//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a verification property failed, `2` bad
//! input (unreadable or invalid state file, bad flags, unwritable output).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::bell::{CLASSICAL_BOUND, TSIRELSON_BOUND};
use crate::entanglement::EntanglementReport;
use crate::io::{read_state_file, Cell, LoadedState, StateFileError, StateKind, Table};
use crate::optimizer::{
    lambda_grid, maximize_bound, onset_from_rows, sweep_lambda, sweep_theta, theta_grid,
    turning_point_from_rows, BoundResult, OptimizerConfig, OptimizerError,
};
use crate::states::schmidt_angle;
use crate::verify::{run_all, VerifyConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PROPERTY_FAILURE: u8 = 1;
pub const EXIT_INPUT_ERROR: u8 = 2;

/// Values at least this close to `2√2` are reported as maximal violations.
pub const MAXIMAL_TOL: f64 = 1e-4;

const DEFAULT_THETA_STEP: f64 = PI / 200.0;
const DEFAULT_LAMBDA_STEP: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(
    name = "chsh-vertical",
    version,
    about = "CHSH bound of two-qubit states under local vertical measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// State file (JSON) for `state-info` and `bound`.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Optimizer start points.
    #[arg(long, global = true, default_value_t = 64, value_parser = positive_usize)]
    pub starts: usize,

    /// Simplex convergence tolerance on the objective spread.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = positive_f64)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Sweep grid spacing [default: π/200 for θ, 0.01 for λ].
    #[arg(long, global = true, value_parser = positive_f64)]
    pub grid_step: Option<f64>,

    /// Comma-separated azimuthal angles for `sweep-theta` [default: 0,π/2,π,3π/2].
    #[arg(long, global = true, value_delimiter = ',', value_parser = finite_f64)]
    pub chi: Vec<f64>,

    /// Sample count of the randomized `verify` suites.
    #[arg(long, global = true, default_value_t = 1000, value_parser = positive_usize)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Purity and entanglement measures of a state.
    StateInfo,
    /// Largest CHSH value reachable with vertical measurements.
    Bound,
    /// Bound of pure states over the Schmidt angle.
    SweepTheta,
    /// Bound of the λ-family, with violation onset and turning point.
    SweepLambda,
    /// Run the randomized property suites.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn finite_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a number, got `{s}`")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    State(#[from] StateFileError),
    #[error("--input is required for this subcommand")]
    MissingInput,
    #[error("chi must lie in [0, 2π), got {0}")]
    ChiOutOfRange(f64),
    #[error("{0}")]
    Optimizer(#[from] OptimizerError),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Goes to `--output` or standard output.
    pub body: String,
    /// Goes to standard error.
    pub diagnostics: String,
    pub exit_code: u8,
}

impl Cli {
    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            num_starts: self.starts,
            f_tol: self.tol,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }

    fn chis(&self) -> Result<Vec<f64>, CliError> {
        if self.chi.is_empty() {
            return Ok(vec![0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]);
        }
        match self.chi.iter().find(|c| !(0.0..2.0 * PI).contains(*c)) {
            Some(bad) => Err(CliError::ChiOutOfRange(*bad)),
            None => Ok(self.chi.clone()),
        }
    }

    fn state(&self) -> Result<LoadedState, CliError> {
        let path = self.input.as_ref().ok_or(CliError::MissingInput)?;
        Ok(read_state_file(path)?)
    }
}

/// Runs one command and renders its output, without touching the process
/// streams.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::StateInfo => state_info(cli),
        Command::Bound => bound(cli),
        Command::SweepTheta => cmd_sweep_theta(cli),
        Command::SweepLambda => cmd_sweep_lambda(cli),
        Command::Verify => verify(cli),
    }
}

/// Parses the process arguments, runs, and writes the results.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_OK
            });
        }
    };
    let result = execute(&cli).and_then(|report| {
        match &cli.output {
            Some(path) => fs::write(path, &report.body)?,
            None => std::io::stdout().write_all(report.body.as_bytes())?,
        }
        eprint!("{}", report.diagnostics);
        Ok(report.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

fn ok(body: String) -> Result<Report, CliError> {
    Ok(Report {
        body,
        diagnostics: String::new(),
        exit_code: EXIT_OK,
    })
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
struct StateInfo {
    kind: StateKind,
    purity: f64,
    entropy: f64,
    concurrence: f64,
    horodecki_m: f64,
    horodecki_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

fn state_info(cli: &Cli) -> Result<Report, CliError> {
    let state = cli.state()?;
    let rho = state.density();
    let e = EntanglementReport::of(&rho);
    let info = StateInfo {
        kind: state.kind(),
        purity: rho.purity(),
        entropy: e.entropy,
        concurrence: e.concurrence,
        horodecki_m: e.horodecki_m,
        horodecki_max: e.horodecki_max,
        theta: match state {
            LoadedState::Pure(p) => Some(schmidt_angle(&p).theta),
            LoadedState::Density(_) => None,
        },
    };
    match cli.format {
        Format::Json => ok(json_line(&info)),
        Format::Csv => {
            let mut t = Table::new(&[
                "kind",
                "purity",
                "entropy",
                "concurrence",
                "horodecki_m",
                "horodecki_max",
                "theta",
            ]);
            let kind = match info.kind {
                StateKind::Pure => "pure",
                StateKind::Density => "density",
            };
            t.push(vec![
                Cell::Text(kind.into()),
                Cell::Num(info.purity),
                Cell::Num(info.entropy),
                Cell::Num(info.concurrence),
                Cell::Num(info.horodecki_m),
                Cell::Num(info.horodecki_max),
                info.theta.map_or(Cell::Empty, Cell::Num),
            ]);
            ok(t.to_csv_string())
        }
    }
}

/// `maximal` within [`MAXIMAL_TOL`] of `2√2`, else `violation` above the
/// classical bound, else `no-violation`.
pub fn verdict(value: f64) -> &'static str {
    if value >= TSIRELSON_BOUND - MAXIMAL_TOL {
        "maximal"
    } else if value > CLASSICAL_BOUND {
        "violation"
    } else {
        "no-violation"
    }
}

fn bound(cli: &Cli) -> Result<Report, CliError> {
    let rho = cli.state()?.density();
    let r: BoundResult = maximize_bound(&rho, &cli.optimizer())?;
    let method = match r.method {
        crate::optimizer::BoundMethod::Analytic => "analytic",
        crate::optimizer::BoundMethod::Numeric => "numeric",
    };
    match cli.format {
        Format::Json => ok(json_line(&json!({
            "value": r.value,
            "method": r.method,
            "starts_converged": r.starts_converged,
            "evaluations": r.evaluations,
            "params": r.best_params,
            "verdict": verdict(r.value),
        }))),
        Format::Csv => {
            let mut t = Table::new(&[
                "value",
                "method",
                "starts_converged",
                "evaluations",
                "alpha_a",
                "beta_a",
                "gamma_a",
                "delta_a",
                "alpha_b",
                "beta_b",
                "gamma_b",
                "delta_b",
                "verdict",
            ]);
            let (a, b) = (r.best_params.a, r.best_params.b);
            let mut row = vec![
                Cell::Num(r.value),
                Cell::Text(method.into()),
                Cell::Int(r.starts_converged as i64),
                Cell::Int(r.evaluations as i64),
            ];
            for p in [a, b] {
                row.extend([p.alpha, p.beta, p.gamma, p.delta].map(Cell::Num));
            }
            row.push(Cell::Text(verdict(r.value).into()));
            t.push(row);
            ok(t.to_csv_string())
        }
    }
}

fn cmd_sweep_theta(cli: &Cli) -> Result<Report, CliError> {
    let grid = theta_grid(cli.grid_step.unwrap_or(DEFAULT_THETA_STEP));
    let rows = sweep_theta(&grid, &cli.chis()?, &cli.optimizer())?;
    match cli.format {
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "theta": r.theta,
                        "chi": r.chi,
                        "bound_analytic": r.bound_analytic,
                        "bound_numeric": r.bound_numeric,
                        "entropy": r.entropy,
                        "classical_bound": CLASSICAL_BOUND,
                    })
                })
                .collect();
            ok(json_line(&json!({ "rows": rows })))
        }
        Format::Csv => {
            let mut t = Table::new(&[
                "theta",
                "chi",
                "bound_analytic",
                "bound_numeric",
                "entropy",
                "classical_bound",
            ]);
            for r in &rows {
                t.push(
                    [
                        r.theta,
                        r.chi,
                        r.bound_analytic,
                        r.bound_numeric,
                        r.entropy,
                        CLASSICAL_BOUND,
                    ]
                    .map(Cell::Num)
                    .to_vec(),
                );
            }
            ok(t.to_csv_string())
        }
    }
}

#[derive(Debug, Serialize)]
struct LambdaSummary {
    onset: Option<f64>,
    onset_concurrence: Option<f64>,
    turning_point: f64,
}

fn cmd_sweep_lambda(cli: &Cli) -> Result<Report, CliError> {
    let cfg = cli.optimizer();
    let grid = lambda_grid(cli.grid_step.unwrap_or(DEFAULT_LAMBDA_STEP));
    let rows = sweep_lambda(&grid, &cfg)?;
    let onset = match onset_from_rows(&rows, &cfg) {
        Ok(o) => Some(o),
        Err(OptimizerError::NoOnsetInRange { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = LambdaSummary {
        onset: onset.map(|o| o.lambda),
        onset_concurrence: onset.map(|o| o.concurrence),
        turning_point: turning_point_from_rows(&rows, &cfg)?,
    };
    match cli.format {
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "lambda": r.lambda,
                        "bound": r.bound,
                        "concurrence": r.concurrence,
                        "horodecki_max": r.horodecki_max,
                        "classical_bound": CLASSICAL_BOUND,
                    })
                })
                .collect();
            ok(json_line(&json!({ "rows": rows, "summary": summary })))
        }
        Format::Csv => {
            let mut t = Table::new(&[
                "lambda",
                "bound",
                "concurrence",
                "horodecki_max",
                "classical_bound",
            ]);
            for r in &rows {
                t.push(
                    [
                        r.lambda,
                        r.bound,
                        r.concurrence,
                        r.horodecki_max,
                        CLASSICAL_BOUND,
                    ]
                    .map(Cell::Num)
                    .to_vec(),
                );
            }
            let opt = |x: Option<f64>| x.map_or("none".to_string(), crate::io::format_sig6);
            let diagnostics = format!(
                "onset={}\nonset_concurrence={}\nturning_point={}\n",
                opt(summary.onset),
                opt(summary.onset_concurrence),
                crate::io::format_sig6(summary.turning_point),
            );
            Ok(Report {
                body: t.to_csv_string(),
                diagnostics,
                exit_code: EXIT_OK,
            })
        }
    }
}

fn verify(cli: &Cli) -> Result<Report, CliError> {
    let cfg = VerifyConfig {
        seed: cli.seed,
        samples: cli.samples,
        optimizer: cli.optimizer(),
    };
    cfg.optimizer.validate()?;
    let reports = run_all(&cfg);
    let all_ok = reports.iter().all(|r| r.ok());
    let body = match cli.format {
        Format::Json => json_line(&json!({ "suites": reports, "passed": all_ok })),
        Format::Csv => {
            let mut t = Table::new(&["suite", "checked", "passed", "status", "note"]);
            for r in &reports {
                t.push(vec![
                    Cell::Text(r.name.into()),
                    Cell::Int(r.checked as i64),
                    Cell::Int(r.passed as i64),
                    Cell::Text(if r.ok() { "ok" } else { "failed" }.into()),
                    r.note.clone().map_or(Cell::Empty, Cell::Text),
                ]);
            }
            t.to_csv_string()
        }
    };
    let diagnostics: String = reports
        .iter()
        .filter(|r| !r.ok())
        .map(|r| format!("{}\n", r.summary_line()))
        .collect();
    Ok(Report {
        body,
        diagnostics,
        exit_code: if all_ok {
            EXIT_OK
        } else {
            EXIT_PROPERTY_FAILURE
        },
    })
}
