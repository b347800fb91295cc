use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ldp::eval::{cross_validate, report_table, CvConfig, CvReport, Table, Variant, AUDIT_HEADER};
use ldp::features::{
    featurize_dataset, feature_grid, Aggregation, FeatureConfig, Normalization, Scale, DEFAULT_BIN_GRID,
};
use ldp::tu::{load_dataset, locate_dataset, BENCHMARK_PREFIXES};
use ldp::{Dataset, GraphVector};

use crate::settings::Settings;
use crate::CliError;

pub const DEFAULT_DATA_DIR: &str = "data";
pub const DEFAULT_OUT_DIR: &str = "ldp-out";

/// One fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub dataset: String,
    pub data_dir: PathBuf,
    pub variant: Variant,
    pub feature_grid: Vec<FeatureConfig>,
    pub cv: CvConfig,
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    /// `search` selects the grid defaults used by `evaluate` and `grid`;
    /// without it unset axes fall back to the single default configuration.
    pub fn from_settings(s: &Settings, search: bool) -> Result<Self, CliError> {
        let dataset = s
            .dataset
            .clone()
            .ok_or_else(|| CliError::Usage("--dataset is required".into()))?;
        let variant = s.variant.unwrap_or(Variant::Base);
        let defaults = FeatureConfig::default();
        let bins = s.bins.clone().unwrap_or_else(|| {
            if search {
                DEFAULT_BIN_GRID.to_vec()
            } else {
                vec![defaults.bins]
            }
        });
        let aggregations = s.aggregation.clone().unwrap_or_else(|| vec![Aggregation::Histogram]);
        let normalizations = s.normalization.clone().unwrap_or_else(|| {
            if search {
                vec![Normalization::PerGraph, Normalization::Dataset]
            } else {
                vec![Normalization::PerGraph]
            }
        });
        let scales = s.scale.clone().unwrap_or_else(|| vec![Scale::Linear]);
        let base = FeatureConfig {
            use_sum: s.use_sum.unwrap_or(false),
            ..defaults
        };
        let grid = feature_grid(variant.feature_base(base), &bins, &aggregations, &normalizations, &scales);
        if grid.is_empty() {
            return Err(CliError::Usage("empty feature grid".into()));
        }
        if let Some(b) = grid.iter().find(|c| c.bins < 2) {
            return Err(CliError::Usage(format!("bins must be at least 2, got {}", b.bins)));
        }

        let mut cv = CvConfig::default();
        if let Some(v) = s.seed {
            cv.seed = v;
        }
        if let Some(v) = s.folds {
            cv.folds = v;
        }
        if let Some(v) = s.reps {
            cv.repetitions = v;
        }
        if let Some(v) = s.inner_folds {
            cv.inner_folds = v;
        }
        if let Some(v) = &s.c_grid {
            cv.c_grid = v.clone();
        }
        if let Some(v) = &s.gamma_grid {
            cv.gamma_grid = v.clone();
        }
        let cv = variant.cv_config(&cv);

        Ok(Self {
            dataset,
            data_dir: s.data_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR)),
            variant,
            feature_grid: grid,
            cv,
            out: s.out.clone(),
        })
    }

    pub fn load(&self) -> Result<Dataset, CliError> {
        let dataset = load_dataset(&self.data_dir, &self.dataset)?;
        for config in &self.feature_grid {
            config.validate(&dataset)?;
        }
        Ok(dataset)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

/// Outcome of evaluating every configuration of one spec.
pub struct Evaluation {
    pub reports: Vec<CvReport>,
    pub best: usize,
    pub best_vectors: Vec<GraphVector>,
    pub labels: Vec<usize>,
    pub featurization: Duration,
}

impl Evaluation {
    pub fn best(&self) -> &CvReport {
        &self.reports[self.best]
    }
}

/// Cross-validates every candidate configuration; the first configuration
/// with the highest mean accuracy wins.
pub fn evaluate(spec: &ExperimentSpec, dataset: &Dataset) -> Result<Evaluation, CliError> {
    let labels = dataset.class_labels();
    let mut featurization = Duration::ZERO;
    let mut reports: Vec<CvReport> = Vec::with_capacity(spec.feature_grid.len());
    let mut best = 0;
    let mut best_vectors = Vec::new();
    for (i, config) in spec.feature_grid.iter().enumerate() {
        let start = Instant::now();
        let vectors = featurize_dataset(dataset, config)?;
        featurization += start.elapsed();
        let report = cross_validate(&vectors, &labels, config, &spec.cv)?;
        log::info!("[{}/{}] {}", i + 1, spec.feature_grid.len(), report.summary_line());
        if i == 0 || report.mean_accuracy > reports[best].mean_accuracy {
            best = i;
            best_vectors = vectors;
        }
        reports.push(report);
    }
    Ok(Evaluation {
        reports,
        best,
        best_vectors,
        labels,
        featurization,
    })
}

/// Up to 9 significant digits, shortest form, `%g`-style.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let text = if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("scientific notation");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    };
    if text == "-0" {
        "0".into()
    } else {
        text
    }
}

/// One line per graph: class label, then the feature values.
pub fn features_csv(vectors: &[GraphVector], labels: &[usize]) -> String {
    let mut out = String::new();
    for (v, &label) in vectors.iter().zip(labels) {
        let _ = write!(out, "{label}");
        for &x in v.values() {
            out.push(',');
            out.push_str(&format_sig9(x));
        }
        out.push('\n');
    }
    out
}

/// File-name stem identifying a feature configuration.
pub fn config_slug(c: &FeatureConfig) -> String {
    let mut s = format!("b{}_{}_{}_{}", c.bins, c.aggregation, c.normalization, c.scale);
    for (on, name) in [(c.use_sum, "sum"), (c.use_label, "label"), (c.use_distance, "distance")] {
        if on {
            s.push('_');
            s.push_str(name);
        }
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes the artifacts of one evaluated spec into `dir`.
pub fn write_evaluation(dir: &Path, spec: &ExperimentSpec, eval: &Evaluation) -> Result<Table, CliError> {
    let best = eval.best();
    write_file(&dir.join("cv_report.csv"), &best.to_csv())?;
    let mut audit = format!("{AUDIT_HEADER}\n");
    for r in &eval.reports {
        audit.push_str(&r.audit_rows());
    }
    write_file(&dir.join("audit.csv"), &audit)?;
    let mut summary = String::new();
    for r in &eval.reports {
        let _ = writeln!(summary, "{}", r.summary_line());
    }
    let _ = writeln!(summary, "best: {}", best.summary_line());
    write_file(&dir.join("summary.txt"), &summary)?;
    write_file(&dir.join("best_config.txt"), &best.feature_config.to_config_text())?;
    write_file(
        &dir.join(format!("features_{}.csv", config_slug(&best.feature_config))),
        &features_csv(&eval.best_vectors, &eval.labels),
    )?;
    let table = report_table(&[(spec.dataset.clone(), spec.variant, best.mean_accuracy)]);
    write_file(&dir.join("table.txt"), &table.to_text())?;
    write_file(&dir.join("table.csv"), &table.to_csv())?;
    Ok(table)
}

/// Names whose archives can be found under `data_dir`, in catalogue order.
pub fn available_benchmarks(data_dir: &Path) -> Vec<String> {
    BENCHMARK_PREFIXES
        .iter()
        .filter(|(name, _)| locate_dataset(data_dir, name).is_ok())
        .map(|(name, _)| name.to_string())
        .collect()
}

/// Aligned rows in the column order name, graphs, classes, average nodes,
/// average edges, node labels (`-` when unlabelled).
pub fn stats_table(rows: &[(String, &Dataset)]) -> (String, String) {
    let header = ["dataset", "graph #", "class #", "average_nodes #", "average edges #", "label #"];
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for (name, d) in rows {
        let s = d.stats();
        let labels = if s.label_count == 0 {
            "-".to_string()
        } else {
            s.label_count.to_string()
        };
        cells.push(vec![
            name.clone(),
            s.graph_count.to_string(),
            s.class_count.to_string(),
            format!("{:.2}", s.avg_nodes),
            format!("{:.2}", s.avg_edges),
            labels,
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|i| cells.iter().map(|r| r[i].len()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    let mut csv = String::new();
    for row in &cells {
        let _ = write!(text, "{:<w$}", row[0], w = widths[0]);
        for (v, w) in row.iter().zip(&widths).skip(1) {
            let _ = write!(text, "  {v:>w$}");
        }
        text.push('\n');
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    (text, csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(0.25), "0.25");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(2.0 / 3.0), "0.666666667");
        assert_eq!(format_sig9(123456789.0), "123456789");
        assert_eq!(format_sig9(1.5e-7), "1.5e-7");
        assert_eq!(format_sig9(-0.0), "0");
        for x in [0.1, 0.123456789, 0.04, 1e-6 / 3.0] {
            let back: f64 = format_sig9(x).parse().unwrap();
            assert!((back - x).abs() <= x.abs() * 1e-8, "{x}");
        }
    }

    #[test]
    fn search_defaults() {
        let s = Settings {
            dataset: Some("MUTAG".into()),
            ..Default::default()
        };
        let spec = ExperimentSpec::from_settings(&s, true).unwrap();
        assert_eq!(spec.feature_grid.len(), DEFAULT_BIN_GRID.len() * 2);
        assert_eq!(spec.cv, CvConfig::default());
        let single = ExperimentSpec::from_settings(&s, false).unwrap();
        assert_eq!(single.feature_grid, vec![FeatureConfig::default()]);
        assert!(matches!(
            ExperimentSpec::from_settings(&Settings::default(), true),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn variant_shapes_the_grid() {
        let s = Settings {
            dataset: Some("MUTAG".into()),
            variant: Some(Variant::PlusLabel),
            bins: Some(vec![10]),
            ..Default::default()
        };
        let spec = ExperimentSpec::from_settings(&s, true).unwrap();
        assert!(spec.feature_grid.iter().all(|c| c.use_label && c.bins == 10));
        let star = Settings {
            variant: Some(Variant::LinearOnly),
            ..s
        };
        let spec = ExperimentSpec::from_settings(&star, true).unwrap();
        assert_eq!(spec.cv.kernel_kinds, vec![ldp::eval::KernelKind::Linear]);
    }

    #[test]
    fn slugs() {
        let c = FeatureConfig {
            use_distance: true,
            ..Default::default()
        };
        assert_eq!(config_slug(&c), "b50_histogram_graph_linear_distance");
    }
}
