//! SMO-style solver for the soft-margin dual problem.
//!
//! Maximizes L(a) = sum a_n - 1/2 sum_nm a_n a_m t_n t_m K(x_n, x_m)
//! subject to 0 <= a_n <= C and sum a_n t_n = 0, by repeatedly optimizing the
//! maximal-violating pair of multipliers in closed form. The hard-margin
//! problem is the C -> infinity limit.

use super::kernel::GramMatrix;
use super::SvmError;

/// Guaranteed bound on the KKT violation gap of a converged solution.
pub const KKT_TOLERANCE: f64 = 1e-3;

/// Actual stopping gap. Tighter than the guarantee because a first-order
/// stop at 1e-3 can leave the dual objective more than 1e-6 away from the
/// true optimum, which downstream correctness checks compare against.
const STOPPING_TOLERANCE: f64 = 1e-5;

/// Hard cap on pair updates before giving up.
pub const MAX_PAIR_UPDATES: usize = 1_000_000;

/// Curvature floor for degenerate pairs (duplicate points).
const ETA_FLOOR: f64 = 1e-12;

/// Solver output. `converged` is false when the iteration cap was hit; the
/// fields then hold the best iterate found.
#[derive(Debug, Clone)]
pub struct DualSolution {
    /// Lagrange multipliers, one per training point, in [0, C].
    pub alpha: Vec<f64>,
    /// Bias term of the decision function.
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The dual objective L(a).
pub fn dual_objective(gram: &GramMatrix, targets: &[f64], alpha: &[f64]) -> f64 {
    let n = gram.n();
    let mut linear = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        linear += alpha[i];
        for j in 0..n {
            quad += alpha[i] * alpha[j] * targets[i] * targets[j] * gram.get(i, j);
        }
    }
    linear - 0.5 * quad
}

fn validate(gram: &GramMatrix, targets: &[f64], c: f64) -> Result<(), SvmError> {
    let n = gram.n();
    if n < 2 {
        return Err(SvmError::TooFewSamples { needed: 2, got: n });
    }
    if targets.len() != n {
        return Err(SvmError::DimensionMismatch {
            expected: n,
            got: targets.len(),
        });
    }
    if let Some(&t) = targets.iter().find(|t| t.abs() != 1.0) {
        return Err(SvmError::InvalidTarget(t));
    }
    if !targets.iter().any(|&t| t > 0.0) || !targets.iter().any(|&t| t < 0.0) {
        return Err(SvmError::SingleClass);
    }
    let asym = gram.max_asymmetry();
    if asym > 1e-9 {
        return Err(SvmError::AsymmetricGram(asym));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(SvmError::InvalidBoxBound(c));
    }
    Ok(())
}

/// Solves the box-constrained dual to [`KKT_TOLERANCE`].
pub fn solve_dual(gram: &GramMatrix, targets: &[f64], c: f64) -> Result<DualSolution, SvmError> {
    validate(gram, targets, c)?;
    let n = gram.n();
    let mut alpha = vec![0.0f64; n];
    // gradient of the (minimization form) objective: Q a - 1; starts at -1.
    let mut grad = vec![-1.0f64; n];
    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        // Maximal violating pair over the feasible ascent/descent sets.
        let mut up_best = f64::NEG_INFINITY;
        let mut low_best = f64::INFINITY;
        let mut i_up = usize::MAX;
        let mut i_low = usize::MAX;
        for k in 0..n {
            let violation = -targets[k] * grad[k];
            let in_up = (targets[k] > 0.0 && alpha[k] < c) || (targets[k] < 0.0 && alpha[k] > 0.0);
            let in_low = (targets[k] < 0.0 && alpha[k] < c) || (targets[k] > 0.0 && alpha[k] > 0.0);
            if in_up && violation > up_best {
                up_best = violation;
                i_up = k;
            }
            if in_low && violation < low_best {
                low_best = violation;
                i_low = k;
            }
        }
        if up_best - low_best <= STOPPING_TOLERANCE {
            converged = true;
            break;
        }
        if iterations >= MAX_PAIR_UPDATES {
            break;
        }
        let (i, j) = (i_up, i_low);

        // Optimal step along a_i += t_i d, a_j -= t_j d, clipped to the box.
        let eta = (gram.get(i, i) + gram.get(j, j) - 2.0 * gram.get(i, j)).max(ETA_FLOOR);
        let mut delta = (up_best - low_best) / eta;
        let room_i = if targets[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if targets[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        delta = delta.min(room_i).min(room_j);

        alpha[i] = (alpha[i] + targets[i] * delta).clamp(0.0, c);
        alpha[j] = (alpha[j] - targets[j] * delta).clamp(0.0, c);
        for k in 0..n {
            grad[k] += delta * targets[k] * (gram.get(k, i) - gram.get(k, j));
        }
        iterations += 1;
    }

    // For a free support vector the KKT conditions give
    // t_n - sum_m a_m t_m K(x_n, x_m) = -t_n * grad_n exactly. With no free
    // vectors that expression is unconstrained, and only the midpoint of the
    // final violation interval keeps every KKT margin within tolerance.
    let free_eps = c * 1e-8;
    let b_candidates: Vec<f64> = (0..n)
        .filter(|&k| alpha[k] > free_eps && alpha[k] < c - free_eps)
        .map(|k| -targets[k] * grad[k])
        .collect();
    let bias = if !b_candidates.is_empty() {
        b_candidates.iter().sum::<f64>() / b_candidates.len() as f64
    } else {
        let mut up_best = f64::NEG_INFINITY;
        let mut low_best = f64::INFINITY;
        for k in 0..n {
            let violation = -targets[k] * grad[k];
            if (targets[k] > 0.0 && alpha[k] < c) || (targets[k] < 0.0 && alpha[k] > 0.0) {
                up_best = up_best.max(violation);
            }
            if (targets[k] < 0.0 && alpha[k] < c) || (targets[k] > 0.0 && alpha[k] > 0.0) {
                low_best = low_best.min(violation);
            }
        }
        if up_best.is_finite() && low_best.is_finite() {
            (up_best + low_best) / 2.0
        } else if up_best.is_finite() {
            up_best
        } else {
            low_best
        }
    };

    Ok(DualSolution {
        alpha,
        bias,
        iterations,
        converged,
    })
}
