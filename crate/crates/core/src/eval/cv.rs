//! Repeated stratified cross-validation with nested model selection.
//!
//! For every repetition `r` the data is split into stratified folds using
//! seed `seed + r`. For every held-out fold the SVM kernel and `C` are
//! chosen by an inner stratified CV that only sees the training split; the
//! winner is retrained on the whole training split and scored on the
//! held-out fold.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::folds::{complement, stratified_folds};
use super::EvalError;
use crate::features::{FeatureConfig, GraphVector};
use crate::svm::{
    class_pairs, solve_dual, vote, GramMatrix, KernelRows, KernelSpec, OnDemandKernel, SmoParams, SubKernel,
    DENSE_CACHE_LIMIT,
};

pub const DEFAULT_C_GRID: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];
pub const DEFAULT_GAMMA_GRID: [f64; 5] = [1e-2, 1e-1, 1.0, 1e1, 1e2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    Linear,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub kernel_kinds: Vec<KernelKind>,
    /// Folds of the model-selection CV run inside each training split.
    pub inner_folds: usize,
    pub smo: SmoParams,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            repetitions: 10,
            seed: 0,
            c_grid: DEFAULT_C_GRID.to_vec(),
            gamma_grid: DEFAULT_GAMMA_GRID.to_vec(),
            kernel_kinds: vec![KernelKind::Linear, KernelKind::Gaussian],
            inner_folds: 3,
            smo: SmoParams::default(),
        }
    }
}

impl CvConfig {
    /// Kernels searched, in grid order: linear first, then Gaussian by
    /// ascending position in `gamma_grid`.
    pub fn kernels(&self) -> Vec<KernelSpec> {
        let mut out = Vec::new();
        if self.kernel_kinds.contains(&KernelKind::Linear) {
            out.push(KernelSpec::Linear);
        }
        if self.kernel_kinds.contains(&KernelKind::Gaussian) {
            out.extend(self.gamma_grid.iter().map(|&gamma| KernelSpec::Gaussian { gamma }));
        }
        out
    }

    /// Every `(kernel, C)` pair in grid order.
    pub fn model_grid(&self) -> Vec<ModelChoice> {
        self.kernels()
            .into_iter()
            .flat_map(|kernel| self.c_grid.iter().map(move |&c| ModelChoice { kernel, c }))
            .collect()
    }

    fn validate(&self) -> Result<(), EvalError> {
        if self.folds < 2 || self.inner_folds < 2 {
            return Err(EvalError::InvalidConfig("folds and inner folds must be at least 2".into()));
        }
        if self.repetitions == 0 {
            return Err(EvalError::InvalidConfig("repetitions must be positive".into()));
        }
        if self.model_grid().is_empty() {
            return Err(EvalError::EmptyGrid);
        }
        if let Some(c) = self.c_grid.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
            return Err(EvalError::InvalidConfig(format!("C must be positive, got {c}")));
        }
        if self.kernel_kinds.contains(&KernelKind::Gaussian) {
            if let Some(g) = self.gamma_grid.iter().find(|&&g| !(g > 0.0 && g.is_finite())) {
                return Err(EvalError::InvalidConfig(format!("gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelChoice {
    pub kernel: KernelSpec,
    pub c: f64,
}

/// Outcome of one held-out fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub repetition: usize,
    pub fold: usize,
    pub choice: ModelChoice,
    pub accuracy: f64,
    /// Inner-CV accuracy of every grid point, in grid order.
    pub inner_scores: Vec<(ModelChoice, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub feature_config: FeatureConfig,
    /// `accuracies[r][f]` is the accuracy on fold `f` of repetition `r`.
    pub accuracies: Vec<Vec<f64>>,
    pub mean_accuracy: f64,
    /// Population standard deviation of the per-repetition means.
    pub std_accuracy: f64,
    /// Model selected most often across folds (earliest in grid order on
    /// ties).
    pub winning_model: ModelChoice,
    pub fold_results: Vec<FoldResult>,
}

impl CvReport {
    pub fn repetition_means(&self) -> Vec<f64> {
        self.accuracies.iter().map(|r| mean(r)).collect()
    }

    pub fn winning_config(&self) -> (FeatureConfig, KernelSpec, f64) {
        (self.feature_config, self.winning_model.kernel, self.winning_model.c)
    }

    /// One row per repetition and fold.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("repetition,fold,kernel,gamma,c,accuracy\n");
        for f in &self.fold_results {
            let _ = writeln!(
                out,
                "{},{},{},{},{:?},{:?}",
                f.repetition,
                f.fold,
                f.choice.kernel.name(),
                gamma_text(&f.choice.kernel),
                f.choice.c,
                f.accuracy
            );
        }
        out
    }

    pub fn summary_line(&self) -> String {
        let (_, kernel, c) = self.winning_config();
        format!(
            "mean_accuracy={:.4} std={:.4} folds={} config=[{}] kernel={} c={}",
            self.mean_accuracy,
            self.std_accuracy,
            self.fold_results.len(),
            self.feature_config,
            kernel,
            c
        )
    }

    /// Every evaluated `(feature config, kernel, C, fold, accuracy)` tuple:
    /// inner-CV scores with stage `inner`, held-out scores with stage `test`.
    pub fn audit_rows(&self) -> String {
        let mut out = String::new();
        let fc = &self.feature_config;
        let mut row = |stage: &str, f: &FoldResult, m: &ModelChoice, acc: f64| {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{:?},{:?}",
                fc.bins,
                fc.aggregation,
                fc.normalization,
                fc.scale,
                fc.use_sum,
                fc.use_label,
                fc.use_distance,
                f.repetition,
                f.fold,
                stage,
                m.kernel.name(),
                gamma_text(&m.kernel),
                m.c,
                acc
            );
        };
        for f in &self.fold_results {
            for (m, acc) in &f.inner_scores {
                row("inner", f, m, *acc);
            }
            row("test", f, &f.choice, f.accuracy);
        }
        out
    }
}

pub const AUDIT_HEADER: &str =
    "bins,aggregation,normalization,scale,use_sum,use_label,use_distance,repetition,fold,stage,kernel,gamma,c,accuracy";

fn gamma_text(kernel: &KernelSpec) -> String {
    kernel.gamma().map_or_else(String::new, |g| format!("{g:?}"))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Kernel rows over the whole dataset: a dense matrix when it fits,
/// otherwise rows recomputed from the vectors.
enum KernelSource<'a> {
    Dense(GramMatrix),
    OnDemand(OnDemandKernel<'a, GraphVector>),
}

impl KernelSource<'_> {
    fn rows(&self) -> &dyn KernelRows {
        match self {
            Self::Dense(g) => g,
            Self::OnDemand(k) => k,
        }
    }
}

/// Builds kernel sources one at a time, sharing the squared-distance matrix
/// between Gaussian kernels.
struct KernelFactory<'a> {
    vectors: &'a [GraphVector],
    squared: Option<GramMatrix>,
}

impl<'a> KernelFactory<'a> {
    fn new(vectors: &'a [GraphVector]) -> Self {
        Self { vectors, squared: None }
    }

    fn source(&mut self, spec: KernelSpec) -> KernelSource<'a> {
        if self.vectors.len() > DENSE_CACHE_LIMIT {
            return KernelSource::OnDemand(OnDemandKernel {
                rows: self.vectors,
                spec,
            });
        }
        match spec {
            KernelSpec::Linear => KernelSource::Dense(GramMatrix::compute(self.vectors, &spec)),
            KernelSpec::Gaussian { gamma } => {
                let vectors = self.vectors;
                let sq = self
                    .squared
                    .get_or_insert_with(|| GramMatrix::squared_distances(vectors));
                KernelSource::Dense(GramMatrix::gaussian_from_squared_distances(sq, gamma))
            }
        }
    }
}

/// Trains one-vs-one models on `train` and predicts every index of `test`.
/// Only kernel entries among `train` and between `test` and `train` are read.
fn fit_predict(
    kernel: &dyn KernelRows,
    labels: &[usize],
    num_classes: usize,
    train: &[usize],
    test: &[usize],
    c: f64,
    smo: &SmoParams,
) -> Result<Vec<usize>, EvalError> {
    let pairs = class_pairs(num_classes);
    // decisions[k][t] for pair k, test point t
    let mut decisions = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let idx: Vec<usize> = train
            .iter()
            .copied()
            .filter(|&i| labels[i] == a || labels[i] == b)
            .collect();
        let y: Vec<f64> = idx.iter().map(|&i| if labels[i] == b { 1.0 } else { -1.0 }).collect();
        let has_pos = y.contains(&1.0);
        let has_neg = y.contains(&-1.0);
        if !(has_pos && has_neg) {
            let constant = if has_pos { 1.0 } else { -1.0 };
            decisions.push(vec![constant; test.len()]);
            continue;
        }
        let solution = solve_dual(&SubKernel { inner: kernel, index: &idx }, &y, c, smo)?;
        let (sv, coef): (Vec<usize>, Vec<f64>) = idx
            .iter()
            .zip(&solution.alphas)
            .zip(&y)
            .filter(|((_, &a), _)| a > 0.0)
            .map(|((&i, &a), &yi)| (i, a * yi))
            .unzip();
        let mut row = vec![0.0; sv.len()];
        let pair_decisions = test
            .iter()
            .map(|&t| {
                kernel.fill_row_at(t, &sv, &mut row);
                row.iter().zip(&coef).map(|(k, a)| k * a).sum::<f64>() + solution.bias
            })
            .collect();
        decisions.push(pair_decisions);
    }
    Ok((0..test.len())
        .map(|t| {
            let d: Vec<f64> = decisions.iter().map(|col| col[t]).collect();
            vote(num_classes, &pairs, &d)
        })
        .collect())
}

fn accuracy(predicted: &[usize], labels: &[usize], test: &[usize]) -> f64 {
    let correct = predicted.iter().zip(test).filter(|(&p, &t)| p == labels[t]).count();
    correct as f64 / test.len() as f64
}

/// One held-out fold: its training split, test split and the inner folds
/// of the training split (as global indices).
struct OuterJob {
    repetition: usize,
    fold: usize,
    train: Vec<usize>,
    test: Vec<usize>,
    inner: Vec<(Vec<usize>, Vec<usize>)>,
}

fn inner_seed(seed: u64, repetition: usize, fold: usize) -> u64 {
    seed.wrapping_add(repetition as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(fold as u64 + 1)
}

fn build_jobs(labels: &[usize], cv: &CvConfig) -> Result<Vec<OuterJob>, EvalError> {
    let n = labels.len();
    let mut jobs = Vec::new();
    for repetition in 0..cv.repetitions {
        let folds = stratified_folds(labels, cv.folds, cv.seed.wrapping_add(repetition as u64))?;
        for (fold, test) in folds.into_iter().enumerate() {
            let train = complement(n, &test);
            let train_labels: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
            let inner = stratified_folds(&train_labels, cv.inner_folds, inner_seed(cv.seed, repetition, fold))
                .map_err(|e| EvalError::DegenerateFold(format!("repetition {repetition} fold {fold}: {e}")))?
                .into_iter()
                .map(|local_test| {
                    let local_train = complement(train.len(), &local_test);
                    let global = |ix: Vec<usize>| ix.into_iter().map(|i| train[i]).collect::<Vec<_>>();
                    (global(local_train), global(local_test))
                })
                .collect();
            jobs.push(OuterJob {
                repetition,
                fold,
                train,
                test,
                inner,
            });
        }
    }
    Ok(jobs)
}

/// Pooled inner-CV accuracy of `(kernel, c)` on one training split. Takes
/// only the inner folds, which are drawn from the training split.
fn inner_score(
    kernel: &dyn KernelRows,
    labels: &[usize],
    num_classes: usize,
    inner: &[(Vec<usize>, Vec<usize>)],
    c: f64,
    smo: &SmoParams,
) -> Result<f64, EvalError> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for (train, test) in inner {
        let predicted = fit_predict(kernel, labels, num_classes, train, test, c, smo)?;
        correct += predicted.iter().zip(test).filter(|(&p, &t)| p == labels[t]).count();
        total += test.len();
    }
    Ok(correct as f64 / total as f64)
}

pub fn cross_validate(
    vectors: &[GraphVector],
    labels: &[usize],
    feature_config: &FeatureConfig,
    cv: &CvConfig,
) -> Result<CvReport, EvalError> {
    if vectors.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            vectors: vectors.len(),
            labels: labels.len(),
        });
    }
    cv.validate()?;
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    if num_classes < 2 {
        return Err(EvalError::DegenerateFold("fewer than two classes".into()));
    }
    let jobs = build_jobs(labels, cv)?;
    let kernels = cv.kernels();
    let grid = cv.model_grid();
    let mut factory = KernelFactory::new(vectors);

    // inner[job][grid point]
    let mut inner = vec![Vec::with_capacity(grid.len()); jobs.len()];
    for &spec in &kernels {
        let source = factory.source(spec);
        let rows = source.rows();
        let scores = jobs
            .par_iter()
            .map(|job| {
                cv.c_grid
                    .iter()
                    .map(|&c| inner_score(rows, labels, num_classes, &job.inner, c, &cv.smo))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (slot, s) in inner.iter_mut().zip(scores) {
            slot.extend(s);
        }
    }

    let winners: Vec<usize> = inner
        .iter()
        .map(|scores| {
            let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            scores.iter().position(|&s| s == best).unwrap_or(0)
        })
        .collect();

    let mut outer = vec![f64::NAN; jobs.len()];
    for (k, &spec) in kernels.iter().enumerate() {
        let range = k * cv.c_grid.len()..(k + 1) * cv.c_grid.len();
        let mine: Vec<usize> = (0..jobs.len()).filter(|&j| range.contains(&winners[j])).collect();
        if mine.is_empty() {
            continue;
        }
        let source = factory.source(spec);
        let rows = source.rows();
        let results = mine
            .par_iter()
            .map(|&j| {
                let job = &jobs[j];
                let c = grid[winners[j]].c;
                let predicted = fit_predict(rows, labels, num_classes, &job.train, &job.test, c, &cv.smo)?;
                Ok(accuracy(&predicted, labels, &job.test))
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        for (&j, acc) in mine.iter().zip(results) {
            outer[j] = acc;
        }
    }

    let fold_results: Vec<FoldResult> = jobs
        .iter()
        .enumerate()
        .map(|(j, job)| FoldResult {
            repetition: job.repetition,
            fold: job.fold,
            choice: grid[winners[j]],
            accuracy: outer[j],
            inner_scores: grid.iter().copied().zip(inner[j].iter().copied()).collect(),
        })
        .collect();

    let accuracies: Vec<Vec<f64>> = fold_results
        .chunks(cv.folds)
        .map(|rep| rep.iter().map(|f| f.accuracy).collect())
        .collect();
    let all: Vec<f64> = accuracies.iter().flatten().copied().collect();
    let rep_means: Vec<f64> = accuracies.iter().map(|r| mean(r)).collect();

    let mut tally = vec![0usize; grid.len()];
    for &w in &winners {
        tally[w] += 1;
    }
    let top = tally.iter().copied().max().unwrap_or(0);
    let winning_model = grid[tally.iter().position(|&t| t == top).unwrap_or(0)];

    Ok(CvReport {
        feature_config: *feature_config,
        mean_accuracy: mean(&all),
        std_accuracy: population_std(&rep_means),
        accuracies,
        winning_model,
        fold_results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn blobs(per_class: usize, seed: u64) -> (Vec<GraphVector>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..2 * per_class {
            let class = i % 2;
            let center = if class == 0 { 0.2 } else { 0.8 };
            x.push(GraphVector::new(
                (0..4).map(|_| center + rng.gen_range(-0.05..0.05)).collect(),
            ));
            y.push(class);
        }
        (x, y)
    }

    fn small_cv() -> CvConfig {
        CvConfig {
            folds: 5,
            repetitions: 2,
            c_grid: vec![0.1, 10.0],
            gamma_grid: vec![1.0],
            ..Default::default()
        }
    }

    #[test]
    fn separable_blobs_are_perfect() {
        let (x, y) = blobs(15, 1);
        let report = cross_validate(&x, &y, &FeatureConfig::default(), &small_cv()).unwrap();
        assert_eq!(report.mean_accuracy, 1.0);
        assert_eq!(report.accuracies.len(), 2);
        assert_eq!(report.accuracies[0].len(), 5);
        assert_eq!(report.std_accuracy, 0.0);
    }

    #[test]
    fn grid_order_and_errors() {
        let cv = CvConfig {
            kernel_kinds: vec![KernelKind::Gaussian, KernelKind::Linear],
            c_grid: vec![1.0],
            gamma_grid: vec![0.5, 2.0],
            ..Default::default()
        };
        let grid = cv.model_grid();
        assert_eq!(grid[0].kernel, KernelSpec::Linear);
        assert_eq!(grid[2].kernel, KernelSpec::Gaussian { gamma: 2.0 });
        let (x, y) = blobs(5, 0);
        let empty = CvConfig {
            c_grid: vec![],
            ..small_cv()
        };
        assert!(matches!(
            cross_validate(&x, &y, &FeatureConfig::default(), &empty),
            Err(EvalError::EmptyGrid)
        ));
        assert!(matches!(
            cross_validate(&x[..3], &y, &FeatureConfig::default(), &small_cv()),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert!(cross_validate(&x, &[0; 10], &FeatureConfig::default(), &small_cv()).is_err());
    }

    #[test]
    fn inner_folds_stay_inside_training_split() {
        let (_, y) = blobs(20, 3);
        let jobs = build_jobs(&y, &small_cv()).unwrap();
        assert_eq!(jobs.len(), 10);
        for job in &jobs {
            let mut seen: Vec<usize> = job.train.iter().chain(&job.test).copied().collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..y.len()).collect::<Vec<_>>());
            for (tr, te) in &job.inner {
                for i in tr.iter().chain(te) {
                    assert!(job.train.binary_search(i).is_ok());
                    assert!(job.test.binary_search(i).is_err());
                }
            }
        }
    }

    #[test]
    fn csv_layouts() {
        let (x, y) = blobs(10, 2);
        let report = cross_validate(&x, &y, &FeatureConfig::default(), &small_cv()).unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 1 + 10);
        let audit = report.audit_rows();
        // 4 grid points (2 kernels x 2 C) plus one test row per fold
        assert_eq!(audit.lines().count(), 10 * 5);
        let cols = AUDIT_HEADER.split(',').count();
        assert!(audit.lines().all(|l| l.split(',').count() == cols));
    }
}
