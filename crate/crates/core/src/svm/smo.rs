//! Sequential minimal optimisation for the soft-margin SVM dual
//!
//! ```text
//! max  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
//! s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! Each step picks the maximal violating pair with second-order working-set
//! selection, solves the two-variable subproblem in closed form and clips it
//! to the box. The solver stops once the largest KKT violation falls below
//! `tol`, which bounds every `y_i f(x_i)` margin condition by `tol`.

use super::kernel::KernelRows;
use super::SvmError;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoParams {
    /// KKT tolerance on the margins `y_i f(x_i)`.
    pub tol: f64,
    /// Iteration cap; `None` means `max(10_000_000, 100 n)`.
    pub max_iterations: Option<usize>,
    /// Record the dual objective after every step.
    pub trace_objective: bool,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iterations: None,
            trace_objective: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Dual objective before the first step and after each step, when
    /// requested.
    pub objective_trace: Vec<f64>,
}

impl DualSolution {
    /// `alpha_i * y_i`
    pub fn dual_coeffs(&self, y: &[f64]) -> Vec<f64> {
        self.alphas.iter().zip(y).map(|(a, y)| a * y).collect()
    }
}

fn is_upper(alpha: f64, c: f64) -> bool {
    alpha >= c
}

fn is_lower(alpha: f64) -> bool {
    alpha <= 0.0
}

/// `sum a - 1/2 a'Qa` from the gradient `G = Qa - 1`.
fn objective_from_gradient(alphas: &[f64], grad: &[f64]) -> f64 {
    -0.5 * alphas.iter().zip(grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>()
}

pub fn solve_dual<K: KernelRows + ?Sized>(
    kernel: &K,
    y: &[f64],
    c: f64,
    params: &SmoParams,
) -> Result<DualSolution, SvmError> {
    let n = kernel.len();
    if y.len() != n {
        return Err(SvmError::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(SvmError::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if params.tol.is_nan() || params.tol <= 0.0 {
        return Err(SvmError::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            params.tol
        )));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(SvmError::InvalidParameter(format!("labels must be +1 or -1, got {bad}")));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(SvmError::SingleClass);
    }

    let diag: Vec<f64> = (0..n).map(|i| kernel.diagonal(i)).collect();
    if diag.iter().any(|d| !d.is_finite()) {
        return Err(SvmError::NonFinite);
    }
    let mut alphas = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut row_i = vec![0.0; n];
    let mut row_j = vec![0.0; n];
    let max_iterations = params.max_iterations.unwrap_or((100 * n).max(10_000_000));
    let mut trace = Vec::new();
    if params.trace_objective {
        trace.push(0.0);
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        // i: maximal -y_t G_t over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !is_upper(alphas[t], c) } else { !is_lower(alphas[t]) };
            if in_up && v >= gmax {
                gmax = v;
                i = t;
            }
        }
        if i == usize::MAX {
            converged = true;
            break;
        }
        kernel.fill_row(i, &mut row_i);
        if row_i.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::NonFinite);
        }

        // j: second-order choice over I_low
        let mut gmin_side = f64::NEG_INFINITY;
        let mut best = f64::INFINITY;
        let mut j = usize::MAX;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !is_lower(alphas[t]) } else { !is_upper(alphas[t], c) };
            if !in_low {
                continue;
            }
            let v = -y[t] * grad[t];
            gmin_side = gmin_side.max(-v);
            let diff = gmax - v;
            if diff > 0.0 {
                let quad = diag[i] + diag[t] - 2.0 * row_i[t];
                let gain = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                if gain <= best {
                    best = gain;
                    j = t;
                }
            }
        }
        if gmax + gmin_side < params.tol || j == usize::MAX {
            converged = true;
            break;
        }
        kernel.fill_row(j, &mut row_j);
        iterations += 1;

        let (old_i, old_j) = (alphas[i], alphas[j]);
        let kij = row_i[j];
        if y[i] != y[j] {
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alphas[i] - alphas[j];
            alphas[i] += delta;
            alphas[j] += delta;
            if diff > 0.0 {
                if alphas[j] < 0.0 {
                    alphas[j] = 0.0;
                    alphas[i] = diff;
                }
            } else if alphas[i] < 0.0 {
                alphas[i] = 0.0;
                alphas[j] = -diff;
            }
            if diff > 0.0 {
                if alphas[i] > c {
                    alphas[i] = c;
                    alphas[j] = c - diff;
                }
            } else if alphas[j] > c {
                alphas[j] = c;
                alphas[i] = c + diff;
            }
        } else {
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alphas[i] + alphas[j];
            alphas[i] -= delta;
            alphas[j] += delta;
            if sum > c {
                if alphas[i] > c {
                    alphas[i] = c;
                    alphas[j] = sum - c;
                }
            } else if alphas[j] < 0.0 {
                alphas[j] = 0.0;
                alphas[i] = sum;
            }
            if sum > c {
                if alphas[j] > c {
                    alphas[j] = c;
                    alphas[i] = sum - c;
                }
            } else if alphas[i] < 0.0 {
                alphas[i] = 0.0;
                alphas[j] = sum;
            }
        }

        let (di, dj) = (alphas[i] - old_i, alphas[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * row_i[t] * di + y[j] * row_j[t] * dj);
        }
        if params.trace_objective {
            trace.push(objective_from_gradient(&alphas, &grad));
        }
    }
    if !converged {
        log::warn!("SMO stopped after {iterations} iterations without reaching tol {}", params.tol);
    }

    Ok(DualSolution {
        bias: bias_from_gradient(&alphas, &grad, y, c),
        alphas,
        iterations,
        converged,
        objective_trace: trace,
    })
}

/// Average of `-y_i G_i` over free multipliers, or the midpoint of the
/// feasible interval when every multiplier is at a bound.
fn bias_from_gradient(alphas: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for ((&a, &g), &yi) in alphas.iter().zip(grad).zip(y) {
        let v = yi * g;
        if is_upper(a, c) {
            if yi < 0.0 {
                upper = upper.min(v);
            } else {
                lower = lower.max(v);
            }
        } else if is_lower(a) {
            if yi > 0.0 {
                upper = upper.min(v);
            } else {
                lower = lower.max(v);
            }
        } else {
            free += 1;
            free_sum += v;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    };
    -rho
}

/// `sum a - 1/2 sum_ij a_i a_j y_i y_j K_ij`, after checking the box and
/// equality constraints (`|sum a y| <= 1e-6 c`).
pub fn dual_objective<K: KernelRows + ?Sized>(
    kernel: &K,
    y: &[f64],
    c: f64,
    alphas: &[f64],
) -> Result<f64, SvmError> {
    let n = kernel.len();
    if y.len() != n || alphas.len() != n {
        return Err(SvmError::DimensionMismatch {
            expected: n,
            got: alphas.len().min(y.len()),
        });
    }
    if let Some(a) = alphas.iter().find(|&&a| !(0.0..=c).contains(&a)) {
        return Err(SvmError::Infeasible(format!("alpha {a} outside [0, {c}]")));
    }
    let balance: f64 = alphas.iter().zip(y).map(|(a, y)| a * y).sum();
    if balance.abs() > 1e-6 * c {
        return Err(SvmError::Infeasible(format!("sum alpha*y = {balance}")));
    }
    let mut row = vec![0.0; n];
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        kernel.fill_row(i, &mut row);
        for j in 0..n {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * row[j];
        }
    }
    Ok(alphas.iter().sum::<f64>() - 0.5 * quad)
}
