//! Nelder–Mead simplex minimization over `D` unconstrained parameters.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop once `max f - min f` over the simplex is below this.
    pub f_tol: f64,
    /// Stop once every vertex is within this (max-norm) of the best one.
    pub x_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOutcome<const D: usize> {
    pub x: [f64; D],
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from an axis-aligned initial simplex `x0 + steps[i] eᵢ`.
pub fn minimize<const D: usize, F>(
    mut f: F,
    x0: [f64; D],
    steps: [f64; D],
    opts: &NelderMeadOptions,
) -> NelderMeadOutcome<D>
where
    F: FnMut(&[f64; D]) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64; D]| {
        evaluations += 1;
        f(x)
    };

    // D + 1 vertices; kept sorted by value, best first.
    let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    simplex.push((x0, eval(&x0)));
    for i in 0..D {
        let mut x = x0;
        x[i] += steps[i];
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if spread_f(&simplex) <= opts.f_tol || spread_x(&simplex) <= opts.x_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        iterations += 1;

        let centroid = centroid(&simplex[..D]);
        let (worst, f_worst) = simplex[D];
        let f_best = simplex[0].1;
        let f_second_worst = simplex[D - 1].1;

        let reflected = along(&centroid, &worst, -REFLECT);
        let f_reflected = eval(&reflected);

        if f_reflected < f_best {
            let expanded = along(&centroid, &worst, -REFLECT * EXPAND);
            let f_expanded = eval(&expanded);
            simplex[D] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < f_second_worst {
            simplex[D] = (reflected, f_reflected);
            continue;
        }

        let contracted = if f_reflected < f_worst {
            // Outside contraction.
            let x = along(&centroid, &worst, -REFLECT * CONTRACT);
            let fx = eval(&x);
            (fx <= f_reflected).then_some((x, fx))
        } else {
            let x = along(&centroid, &worst, CONTRACT);
            let fx = eval(&x);
            (fx < f_worst).then_some((x, fx))
        };
        match contracted {
            Some(vertex) => simplex[D] = vertex,
            None => {
                let best = simplex[0].0;
                for vertex in simplex.iter_mut().skip(1) {
                    let mut x = best;
                    for k in 0..D {
                        x[k] += SHRINK * (vertex.0[k] - best[k]);
                    }
                    *vertex = (x, eval(&x));
                }
            }
        }
    }

    let (x, f) = simplex[0];
    NelderMeadOutcome {
        x,
        f,
        iterations,
        evaluations,
        converged,
    }
}

/// `c + t (p - c)`.
fn along<const D: usize>(c: &[f64; D], p: &[f64; D], t: f64) -> [f64; D] {
    std::array::from_fn(|k| c[k] + t * (p[k] - c[k]))
}

fn centroid<const D: usize>(vertices: &[([f64; D], f64)]) -> [f64; D] {
    let n = vertices.len() as f64;
    std::array::from_fn(|k| vertices.iter().map(|v| v.0[k]).sum::<f64>() / n)
}

fn spread_f<const D: usize>(simplex: &[([f64; D], f64)]) -> f64 {
    let f0 = simplex[0].1;
    simplex.iter().map(|v| (v.1 - f0).abs()).fold(0.0, f64::max)
}

fn spread_x<const D: usize>(simplex: &[([f64; D], f64)]) -> f64 {
    let x0 = &simplex[0].0;
    simplex
        .iter()
        .flat_map(|v| v.0.iter().zip(x0.iter()).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTS: NelderMeadOptions = NelderMeadOptions {
        max_iters: 5000,
        f_tol: 1e-14,
        x_tol: 1e-10,
    };

    #[test]
    fn quadratic_bowl() {
        let out = minimize(
            |x: &[f64; 3]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 3.0 * x[2].powi(2),
            [0.0; 3],
            [0.5; 3],
            &OPTS,
        );
        assert!(out.converged);
        assert!(out.f < 1e-12);
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] + 0.5).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let out = minimize(
            |x: &[f64; 2]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            [-1.2, 1.0],
            [0.1, 0.1],
            &OPTS,
        );
        assert!(out.converged);
        assert!(
            (out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4,
            "{out:?}"
        );
    }

    #[test]
    fn flat_function_stops_immediately() {
        let out = minimize(|_: &[f64; 6]| 0.0, [0.3; 6], [1.0; 6], &OPTS);
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, [0.3; 6]);
        assert_eq!(out.evaluations, 7);
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let opts = NelderMeadOptions {
            max_iters: 3,
            ..OPTS
        };
        let out = minimize(
            |x: &[f64; 2]| x[0].powi(2) + x[1].powi(2),
            [5.0, 5.0],
            [0.1, 0.1],
            &opts,
        );
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
    }
}
