//! Independent reference implementations used by the integration suites.
//!
//! Everything here is deliberately written as direct summation or exhaustive
//! enumeration so it shares no code path with the library.

use std::f64::consts::{PI, TAU};

/// O(N^2) direct-summation DFT power spectrum, bins 0..=N/2.
pub fn dft_power_direct(frame: &[f64]) -> Vec<f64> {
    let n = frame.len();
    (0..n / 2 + 1)
        .map(|k| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (t, &x) in frame.iter().enumerate() {
                let angle = -TAU * k as f64 * t as f64 / n as f64;
                re += x * angle.cos();
                im += x * angle.sin();
            }
            re * re + im * im
        })
        .collect()
}

/// Direct cosine-sum DCT-II (unnormalized).
pub fn dct_ii_direct(input: &[f64]) -> Vec<f64> {
    let n = input.len();
    (0..n)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .map(|(t, &x)| {
                    x * (PI * k as f64 * (2.0 * t as f64 + 1.0) / (2.0 * n as f64)).cos()
                })
                .sum()
        })
        .collect()
}

/// Dual objective sum a - 1/2 sum a a t t K, from raw slices.
pub fn dual_objective_direct(kernel: &[Vec<f64>], targets: &[f64], alpha: &[f64]) -> f64 {
    let n = targets.len();
    let mut linear = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        linear += alpha[i];
        for j in 0..n {
            quad += alpha[i] * alpha[j] * targets[i] * targets[j] * kernel[i][j];
        }
    }
    linear - 0.5 * quad
}

/// Solves a dense linear system by Gaussian elimination with partial
/// pivoting. Returns None when the pivot degenerates.
#[allow(clippy::needless_range_loop)]
fn solve_linear(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Brute-force QP oracle: the exact optimum of
///     max sum a - 1/2 sum a a t t K   s.t. 0 <= a <= C, sum a t = 0
/// found by enumerating every lower/upper/free assignment of the N
/// multipliers and solving the stationarity system on each free set.
/// Exponential in N; meant for N <= 8.
pub fn qp_oracle_objective(kernel: &[Vec<f64>], targets: &[f64], c: f64) -> f64 {
    let n = targets.len();
    assert!(n <= 12, "oracle is exponential in N");
    let q = |i: usize, j: usize| targets[i] * targets[j] * kernel[i][j];
    let mut best = f64::NEG_INFINITY;
    let mut assignment = vec![0u8; n]; // 0 = at 0, 1 = at C, 2 = free

    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        for slot in assignment.iter_mut() {
            *slot = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| assignment[i] == 2).collect();
        let mut alpha = vec![0.0f64; n];
        for i in 0..n {
            if assignment[i] == 1 {
                alpha[i] = c;
            }
        }

        if free.is_empty() {
            let balance: f64 = alpha.iter().zip(targets).map(|(a, t)| a * t).sum();
            if balance.abs() > 1e-9 {
                continue;
            }
        } else {
            // Stationarity on the free set with multiplier mu for sum a t = 0:
            //   Q_FF a_F + mu t_F = 1 - Q_F,fixed a_fixed
            //   t_F' a_F          = -sum_fixed t a
            let m = free.len();
            let mut a = vec![vec![0.0f64; m + 1]; m + 1];
            let mut rhs = vec![0.0f64; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (cidx, &j) in free.iter().enumerate() {
                    a[r][cidx] = q(i, j);
                }
                a[r][m] = targets[i];
                let fixed_term: f64 = (0..n)
                    .filter(|&j| assignment[j] == 1)
                    .map(|j| q(i, j) * c)
                    .sum();
                rhs[r] = 1.0 - fixed_term;
            }
            for (cidx, &j) in free.iter().enumerate() {
                a[m][cidx] = targets[j];
            }
            rhs[m] = -(0..n)
                .filter(|&j| assignment[j] == 1)
                .map(|j| targets[j] * c)
                .sum::<f64>();
            let Some(solution) = solve_linear(a, rhs) else {
                continue;
            };
            let mut feasible = true;
            for (slot, &i) in free.iter().enumerate() {
                let v = solution[slot];
                if !(-1e-9..=c + 1e-9).contains(&v) {
                    feasible = false;
                    break;
                }
                alpha[i] = v.clamp(0.0, c);
            }
            if !feasible {
                continue;
            }
        }

        let objective = dual_objective_direct(kernel, targets, &alpha);
        if objective > best {
            best = objective;
        }
    }
    best
}
