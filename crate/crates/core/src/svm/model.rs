use std::fmt::Write as _;

use rayon::prelude::*;

use super::kernel::{GramMatrix, KernelSpec, OnDemandKernel, DENSE_CACHE_LIMIT};
use super::smo::{solve_dual, DualSolution, SmoParams};
use super::SvmError;

/// Trained binary classifier. `decision(x) = sum_i dual_coeffs[i] k(sv_i, x) + bias`;
/// a positive decision votes for `classes[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub support_indices: Vec<usize>,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c: f64,
    /// `[negative class, positive class]`
    pub classes: [usize; 2],
}

fn check_rows(x: &[Vec<f64>]) -> Result<usize, SvmError> {
    let dim = x.first().map_or(0, Vec::len);
    for row in x {
        if row.len() != dim {
            return Err(SvmError::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::NonFinite);
        }
    }
    Ok(dim)
}

/// Dual solution on `x`, through a dense kernel matrix when `x` has at
/// most [`DENSE_CACHE_LIMIT`] rows.
pub fn solve_on_rows(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: &KernelSpec,
    c: f64,
    params: &SmoParams,
) -> Result<DualSolution, SvmError> {
    check_rows(x)?;
    if x.len() <= DENSE_CACHE_LIMIT {
        solve_dual(&GramMatrix::compute(x, kernel), y, c, params)
    } else {
        solve_dual(&OnDemandKernel { rows: x, spec: *kernel }, y, c, params)
    }
}

/// Trains a binary soft-margin SVM on labels in `{-1, +1}`.
pub fn train_binary(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: KernelSpec,
    c: f64,
    params: &SmoParams,
) -> Result<SvmModel, SvmError> {
    if x.len() != y.len() {
        return Err(SvmError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let solution = solve_on_rows(x, y, &kernel, c, params)?;
    Ok(SvmModel::from_solution(x, y, &solution, kernel, c, [0, 1]))
}

impl SvmModel {
    pub(crate) fn from_solution(
        x: &[Vec<f64>],
        y: &[f64],
        solution: &DualSolution,
        kernel: KernelSpec,
        c: f64,
        classes: [usize; 2],
    ) -> Self {
        let mut model = Self {
            support_indices: Vec::new(),
            support_vectors: Vec::new(),
            dual_coeffs: Vec::new(),
            bias: solution.bias,
            kernel,
            c,
            classes,
        };
        for (i, &a) in solution.alphas.iter().enumerate() {
            if a > 0.0 {
                model.support_indices.push(i);
                model.support_vectors.push(x[i].clone());
                model.dual_coeffs.push(a * y[i]);
            }
        }
        model
    }

    /// Model that always returns `bias`, for class pairs with no training
    /// examples of one side.
    pub fn constant(bias: f64, kernel: KernelSpec, c: f64, classes: [usize; 2]) -> Self {
        Self {
            support_indices: Vec::new(),
            support_vectors: Vec::new(),
            dual_coeffs: Vec::new(),
            bias,
            kernel,
            c,
            classes,
        }
    }

    pub fn decision(&self, x: &[f64]) -> Result<f64, SvmError> {
        if let Some(sv) = self.support_vectors.first() {
            if sv.len() != x.len() {
                return Err(SvmError::DimensionMismatch {
                    expected: sv.len(),
                    got: x.len(),
                });
            }
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.dual_coeffs)
            .map(|(sv, coef)| coef * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias)
    }

    /// Class voted for by `decision`.
    pub fn predict(&self, x: &[f64]) -> Result<usize, SvmError> {
        Ok(self.classes[(self.decision(x)? > 0.0) as usize])
    }

    /// Plain-text form: a header with kernel, gamma, C and the class pair,
    /// one `index coefficient` line per support vector, then the bias.
    /// Floats use the shortest representation that parses back exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let gamma = self.kernel.gamma().map_or("-".to_string(), |g| format!("{g:?}"));
        let _ = writeln!(out, "kernel {}", self.kernel.name());
        let _ = writeln!(out, "gamma {gamma}");
        let _ = writeln!(out, "c {:?}", self.c);
        let _ = writeln!(out, "classes {} {}", self.classes[0], self.classes[1]);
        let _ = writeln!(out, "support_vectors {}", self.support_indices.len());
        for (i, coef) in self.support_indices.iter().zip(&self.dual_coeffs) {
            let _ = writeln!(out, "{i} {coef:?}");
        }
        let _ = writeln!(out, "bias {:?}", self.bias);
        out
    }

    /// Parses [`SvmModel::to_text`] output; support vectors are recovered
    /// from `training_rows` by index.
    pub fn from_text(text: &str, training_rows: &[Vec<f64>]) -> Result<Self, SvmError> {
        let bad = |msg: String| SvmError::ModelFormat(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut field = |key: &str| -> Result<Vec<String>, SvmError> {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{key}` line")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(bad(format!("expected `{key}`, found `{line}`")));
            }
            Ok(parts.map(str::to_string).collect())
        };
        let num = |s: &str| -> Result<f64, SvmError> {
            s.parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")))
        };
        let kind = field("kernel")?;
        let gamma = field("gamma")?;
        let kernel = match (kind.first().map(String::as_str), gamma.first()) {
            (Some("linear"), _) => KernelSpec::Linear,
            (Some("gaussian"), Some(g)) => KernelSpec::gaussian(num(g)?)?,
            _ => return Err(bad(format!("unknown kernel {kind:?}"))),
        };
        let c = num(field("c")?.first().ok_or_else(|| bad("empty c".into()))?)?;
        let classes = field("classes")?;
        let class = |i: usize| -> Result<usize, SvmError> {
            classes
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("malformed classes line".into()))
        };
        let classes = [class(0)?, class(1)?];
        let count: usize = field("support_vectors")?
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed support_vectors line".into()))?;
        let mut model = Self::constant(0.0, kernel, c, classes);
        for _ in 0..count {
            let line = lines.next().ok_or_else(|| bad("truncated support vectors".into()))?;
            let (idx, coef) = line
                .split_once(' ')
                .ok_or_else(|| bad(format!("malformed support line `{line}`")))?;
            let idx: usize = idx.parse().map_err(|_| bad(format!("bad index `{idx}`")))?;
            let row = training_rows
                .get(idx)
                .ok_or_else(|| bad(format!("support index {idx} outside the training rows")))?;
            model.support_indices.push(idx);
            model.support_vectors.push(row.clone());
            model.dual_coeffs.push(num(coef.trim())?);
        }
        let mut lines_rest = lines;
        let bias_line = lines_rest.next().ok_or_else(|| bad("missing bias".into()))?;
        model.bias = match bias_line.split_once(' ') {
            Some(("bias", v)) => num(v.trim())?,
            _ => return Err(bad(format!("expected bias, found `{bias_line}`"))),
        };
        Ok(model)
    }
}

/// Majority vote over one-vs-one decisions. `pairs[k] = (a, b)` with
/// `a < b`; a positive `decisions[k]` votes for `b`. Ties go to the
/// smallest class id.
pub fn vote(num_classes: usize, pairs: &[(usize, usize)], decisions: &[f64]) -> usize {
    let mut votes = vec![0usize; num_classes];
    for (&(a, b), &d) in pairs.iter().zip(decisions) {
        votes[if d > 0.0 { b } else { a }] += 1;
    }
    let best = votes.iter().copied().max().unwrap_or(0);
    votes.iter().position(|&v| v == best).unwrap_or(0)
}

/// All unordered class pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn class_pairs(num_classes: usize) -> Vec<(usize, usize)> {
    (0..num_classes)
        .flat_map(|a| (a + 1..num_classes).map(move |b| (a, b)))
        .collect()
}

/// One binary model per class pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassModel {
    pub num_classes: usize,
    pub pairs: Vec<(usize, usize)>,
    pub models: Vec<SvmModel>,
}

impl MulticlassModel {
    /// Trains the `C(k, 2)` pairwise models, in parallel. A pair with no
    /// training examples on one side gets a constant model voting for the
    /// side that is present.
    pub fn train(
        x: &[Vec<f64>],
        labels: &[usize],
        num_classes: usize,
        kernel: KernelSpec,
        c: f64,
        params: &SmoParams,
    ) -> Result<Self, SvmError> {
        if x.len() != labels.len() {
            return Err(SvmError::DimensionMismatch {
                expected: x.len(),
                got: labels.len(),
            });
        }
        if num_classes < 2 {
            return Err(SvmError::SingleClass);
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(SvmError::InvalidParameter(format!("class {l} >= {num_classes}")));
        }
        check_rows(x)?;
        let pairs = class_pairs(num_classes);
        let models = pairs
            .par_iter()
            .map(|&(a, b)| {
                let (rows, y): (Vec<Vec<f64>>, Vec<f64>) = x
                    .iter()
                    .zip(labels)
                    .filter(|(_, &l)| l == a || l == b)
                    .map(|(row, &l)| (row.clone(), if l == b { 1.0 } else { -1.0 }))
                    .unzip();
                let has_pos = y.contains(&1.0);
                let has_neg = y.contains(&-1.0);
                if !(has_pos && has_neg) {
                    let bias = if has_pos { 1.0 } else { -1.0 };
                    return Ok(SvmModel::constant(bias, kernel, c, [a, b]));
                }
                let solution = solve_on_rows(&rows, &y, &kernel, c, params)?;
                Ok(SvmModel::from_solution(&rows, &y, &solution, kernel, c, [a, b]))
            })
            .collect::<Result<Vec<_>, SvmError>>()?;
        Ok(Self {
            num_classes,
            pairs,
            models,
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, SvmError> {
        let decisions = self
            .models
            .iter()
            .map(|m| m.decision(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(vote(self.num_classes, &self.pairs, &decisions))
    }
}
