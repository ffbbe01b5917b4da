//! Nelder-Mead simplex minimization over function values only.
//!
//! The variational loop needs a derivative-free local method with a hard
//! budget on function evaluations and fully deterministic behavior; the
//! classic simplex scheme with standard coefficients fits.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Result of a simplex minimization.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    /// Best point found (best-ever across all evaluations).
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub value: f64,
    /// Function evaluations spent.
    pub evals: usize,
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Minimize `f` from `x0` with an initial simplex spread of `step` per
/// coordinate, spending at most `max_evals` function evaluations.
///
/// The returned point is the best one ever evaluated, so the result never
/// exceeds `f(x0)`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, max_evals: usize) -> MinimizeResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evals = 0usize;
    let mut best_x = x0.to_vec();
    let mut best_val = f64::INFINITY;

    let mut eval = |x: &[f64], evals: &mut usize, best_x: &mut Vec<f64>, best_val: &mut f64| {
        let v = f(x);
        *evals += 1;
        if v < *best_val {
            *best_val = v;
            *best_x = x.to_vec();
        }
        v
    };

    // Initial simplex: x0 plus one step along each axis.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals, &mut best_x, &mut best_val);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        if evals >= max_evals {
            return MinimizeResult {
                x: best_x,
                value: best_val,
                evals,
            };
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals, &mut best_x, &mut best_val);
        simplex.push((x, v));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() < 1e-12 {
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = alloc::vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + ALPHA * (c - w))
            .collect();
        let fr = eval(&reflected, &mut evals, &mut best_x, &mut best_val);

        if fr < simplex[0].1 {
            // Try to expand past the reflection.
            if evals < max_evals {
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + GAMMA * ALPHA * (c - w))
                    .collect();
                let fe = eval(&expanded, &mut evals, &mut best_x, &mut best_val);
                simplex[dim] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
            } else {
                simplex[dim] = (reflected, fr);
            }
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            // Contract toward the better of worst/reflected.
            let (toward, f_toward) = if fr < worst.1 {
                (&reflected, fr)
            } else {
                (&worst.0, worst.1)
            };
            if evals >= max_evals {
                break;
            }
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(toward)
                .map(|(c, t)| c + RHO * (t - c))
                .collect();
            let fc = eval(&contracted, &mut evals, &mut best_x, &mut best_val);
            if fc < f_toward {
                simplex[dim] = (contracted, fc);
            } else {
                // Shrink everything toward the best point.
                let best_point = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    if evals >= max_evals {
                        break;
                    }
                    let shrunk: Vec<f64> = best_point
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, x)| b + SIGMA * (x - b))
                        .collect();
                    let fv = eval(&shrunk, &mut evals, &mut best_x, &mut best_val);
                    *entry = (shrunk, fv);
                }
            }
        }
    }

    MinimizeResult {
        x: best_x,
        value: best_val,
        evals,
    }
}
