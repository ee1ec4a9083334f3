//! Nelder-Mead simplex search with the standard coefficients
//! (reflect 1, expand 2, contract 0.5, shrink 0.5).
//!
//! The initial simplex is the start point plus a 0.1 perturbation along
//! each coordinate. `max_iterations` caps objective evaluations; the
//! search converges when the objective spread across the simplex falls
//! below `function_tolerance`.

use super::{FitOptions, MinimizeOutcome};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.1;

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

pub fn minimize_nelder_mead(
    f: &impl Fn(&[f64]) -> f64,
    x0: &[f64],
    opts: &FitOptions,
) -> MinimizeOutcome {
    let n = x0.len();
    let mut evals = 0usize;
    let budget = opts.max_iterations;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<Vertex> = Vec::with_capacity(n + 1);
    simplex.push(Vertex {
        x: x0.to_vec(),
        f: eval(x0, &mut evals),
    });
    for j in 0..n {
        let mut x = x0.to_vec();
        x[j] += INITIAL_STEP;
        let fx = eval(&x, &mut evals);
        simplex.push(Vertex { x, f: fx });
    }

    let order = |s: &mut Vec<Vertex>| {
        s.sort_by(|a, b| a.f.partial_cmp(&b.f).unwrap_or(std::cmp::Ordering::Equal));
    };
    order(&mut simplex);

    let mut converged = false;
    while evals < budget {
        let spread = simplex[n].f - simplex[0].f;
        if spread.is_finite() && spread < opts.function_tolerance {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for v in simplex.iter().take(n) {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi / n as f64;
            }
        }
        let worst = &simplex[n];
        let reflected: Vec<f64> = (0..n)
            .map(|i| centroid[i] + REFLECT * (centroid[i] - worst.x[i]))
            .collect();
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < simplex[0].f {
            let expanded: Vec<f64> = (0..n)
                .map(|i| centroid[i] + EXPAND * (reflected[i] - centroid[i]))
                .collect();
            let f_expanded = eval(&expanded, &mut evals);
            simplex[n] = if f_expanded < f_reflected {
                Vertex { x: expanded, f: f_expanded }
            } else {
                Vertex { x: reflected, f: f_reflected }
            };
        } else if f_reflected < simplex[n - 1].f {
            simplex[n] = Vertex { x: reflected, f: f_reflected };
        } else {
            let contracted: Vec<f64> = if f_reflected < simplex[n].f {
                (0..n)
                    .map(|i| centroid[i] + CONTRACT * (reflected[i] - centroid[i]))
                    .collect()
            } else {
                (0..n)
                    .map(|i| centroid[i] - CONTRACT * (centroid[i] - simplex[n].x[i]))
                    .collect()
            };
            let f_contracted = eval(&contracted, &mut evals);
            if f_contracted < simplex[n].f.min(f_reflected) {
                simplex[n] = Vertex { x: contracted, f: f_contracted };
            } else {
                // Shrink everything toward the best vertex.
                let best = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    for i in 0..n {
                        v.x[i] = best[i] + SHRINK * (v.x[i] - best[i]);
                    }
                    v.f = eval(&v.x, &mut evals);
                    if evals >= budget {
                        break;
                    }
                }
            }
        }
        order(&mut simplex);
    }

    order(&mut simplex);
    let best = &simplex[0];
    MinimizeOutcome {
        x: best.x.clone(),
        f: best.f,
        iterations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_convex_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + (x[1] + 0.5).powi(2);
        let out = minimize_nelder_mead(&f, &[0.0, 0.0], &FitOptions::nelder_mead());
        assert!(out.converged);
        assert!((out.x[0] - 1.5).abs() < 1e-3);
        assert!((out.x[1] + 0.5).abs() < 1e-3);
    }

    #[test]
    fn handles_infinite_regions() {
        // Asymmetric around the minimum so a straddling simplex cannot
        // satisfy the spread criterion away from it.
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.37).powi(2) + 0.4 * (x[0] - 0.37).powi(3)
            }
        };
        let out = minimize_nelder_mead(&f, &[1.3], &FitOptions::nelder_mead());
        assert!((out.x[0] - 0.37).abs() < 1e-3, "x = {:?}", out.x);
    }

    #[test]
    fn evaluation_budget_is_respected() {
        let mut opts = FitOptions::nelder_mead();
        opts.max_iterations = 20;
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = minimize_nelder_mead(&f, &[-1.2, 1.0], &opts);
        assert!(!out.converged);
        assert!(out.iterations <= 22); // a shrink step may finish in flight
    }
}
