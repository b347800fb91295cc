use std::fmt;

use rayon::prelude::*;

use super::SvmError;

/// Largest training set for which a dense kernel matrix is materialised.
pub const DENSE_CACHE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    /// `exp(-gamma * |x - y|^2)`
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self, SvmError> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(Self::Gaussian { gamma })
        } else {
            Err(SvmError::InvalidParameter(format!("gamma must be positive, got {gamma}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Gaussian { .. } => "gaussian",
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Self::Linear => None,
            Self::Gaussian { gamma } => Some(gamma),
        }
    }

    /// Evaluation without a length check, for hot loops.
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Self::Linear => dot(x, y),
            Self::Gaussian { gamma } => (-gamma * squared_distance(x, y)).exp(),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("linear"),
            Self::Gaussian { gamma } => write!(f, "gaussian(gamma={gamma})"),
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64, SvmError> {
    if x.len() != y.len() {
        return Err(SvmError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(spec.eval_unchecked(x, y))
}

/// Row access to a symmetric kernel matrix.
pub trait KernelRows: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn diagonal(&self, i: usize) -> f64;

    /// Writes row `i` into `out`, which has length `self.len()`.
    fn fill_row(&self, i: usize, out: &mut [f64]);

    /// Writes the entries `(i, columns[k])` into `out[k]`.
    fn fill_row_at(&self, i: usize, columns: &[usize], out: &mut [f64]) {
        let mut full = vec![0.0; self.len()];
        self.fill_row(i, &mut full);
        for (slot, &j) in out.iter_mut().zip(columns) {
            *slot = full[j];
        }
    }
}

/// Dense symmetric `n x n` matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    fn from_pairwise<V: AsRef<[f64]> + Sync>(rows: &[V], f: impl Fn(&[f64], &[f64]) -> f64 + Sync) -> Self {
        let n = rows.len();
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, out)| {
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = f(rows[i].as_ref(), rows[j].as_ref());
            }
        });
        Self { n, data }
    }

    /// Kernel matrix of `rows`. Rows are computed in parallel.
    pub fn compute<V: AsRef<[f64]> + Sync>(rows: &[V], spec: &KernelSpec) -> Self {
        Self::from_pairwise(rows, |x, y| spec.eval_unchecked(x, y))
    }

    /// Matrix of pairwise squared Euclidean distances, the shared input of
    /// every Gaussian kernel matrix over the same rows.
    pub fn squared_distances<V: AsRef<[f64]> + Sync>(rows: &[V]) -> Self {
        Self::from_pairwise(rows, squared_distance)
    }

    /// `exp(-gamma * d)` applied entrywise to a squared-distance matrix.
    pub fn gaussian_from_squared_distances(sq: &GramMatrix, gamma: f64) -> Self {
        Self {
            n: sq.n,
            data: sq.data.par_iter().map(|&d| (-gamma * d).exp()).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

impl KernelRows for GramMatrix {
    fn len(&self) -> usize {
        self.n
    }

    fn diagonal(&self, i: usize) -> f64 {
        self.get(i, i)
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        out.copy_from_slice(self.row(i));
    }

    fn fill_row_at(&self, i: usize, columns: &[usize], out: &mut [f64]) {
        let row = self.row(i);
        for (slot, &j) in out.iter_mut().zip(columns) {
            *slot = row[j];
        }
    }
}

/// Kernel rows computed from the feature vectors on every request.
pub struct OnDemandKernel<'a, V> {
    pub rows: &'a [V],
    pub spec: KernelSpec,
}

impl<V: AsRef<[f64]> + Sync> KernelRows for OnDemandKernel<'_, V> {
    fn len(&self) -> usize {
        self.rows.len()
    }

    fn diagonal(&self, i: usize) -> f64 {
        let x = self.rows[i].as_ref();
        self.spec.eval_unchecked(x, x)
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        let x = self.rows[i].as_ref();
        for (slot, y) in out.iter_mut().zip(self.rows) {
            *slot = self.spec.eval_unchecked(x, y.as_ref());
        }
    }

    fn fill_row_at(&self, i: usize, columns: &[usize], out: &mut [f64]) {
        let x = self.rows[i].as_ref();
        for (slot, &j) in out.iter_mut().zip(columns) {
            *slot = self.spec.eval_unchecked(x, self.rows[j].as_ref());
        }
    }
}

/// The principal submatrix of `inner` selected by `index`.
pub struct SubKernel<'a, K: ?Sized> {
    pub inner: &'a K,
    pub index: &'a [usize],
}

impl<K: KernelRows + ?Sized> KernelRows for SubKernel<'_, K> {
    fn len(&self) -> usize {
        self.index.len()
    }

    fn diagonal(&self, i: usize) -> f64 {
        self.inner.diagonal(self.index[i])
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        self.inner.fill_row_at(self.index[i], self.index, out);
    }
}
