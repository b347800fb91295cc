use super::cv::{cross_validate, CvConfig, CvReport};
use super::EvalError;
use crate::features::{featurize_dataset, FeatureConfig};
use crate::graph::Dataset;

/// Cross-validation results of every feature configuration tried.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchReport {
    pub reports: Vec<CvReport>,
    /// Index into `reports` of the highest mean accuracy; the earliest
    /// candidate wins ties.
    pub best: usize,
}

impl GridSearchReport {
    pub fn best(&self) -> &CvReport {
        &self.reports[self.best]
    }
}

/// Runs [`cross_validate`] once per feature configuration.
pub fn grid_search(
    dataset: &Dataset,
    candidates: &[FeatureConfig],
    cv: &CvConfig,
) -> Result<GridSearchReport, EvalError> {
    grid_search_with(dataset, candidates, cv, |_, _| {})
}

/// [`grid_search`] with a callback after each candidate finishes.
pub fn grid_search_with(
    dataset: &Dataset,
    candidates: &[FeatureConfig],
    cv: &CvConfig,
    mut on_done: impl FnMut(usize, &CvReport),
) -> Result<GridSearchReport, EvalError> {
    if candidates.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let labels = dataset.class_labels();
    let mut reports = Vec::with_capacity(candidates.len());
    for (i, config) in candidates.iter().enumerate() {
        let vectors = featurize_dataset(dataset, config)?;
        let report = cross_validate(&vectors, &labels, config, cv)?;
        on_done(i, &report);
        reports.push(report);
    }
    let mut best = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.mean_accuracy > reports[best].mean_accuracy {
            best = i;
        }
    }
    Ok(GridSearchReport { reports, best })
}
