//! Local degree profiles and their aggregation into fixed-length graph
//! vectors.
//!
//! Every node contributes `degree(v)` and the min, max, mean and
//! population standard deviation of the degrees of its neighbours
//! (`DN(v)`). Optional channels add `sum(DN(v))`, the node label and the
//! pairwise shortest-path distance distribution. Each channel is scaled into
//! `[0, 1]` and aggregated into a histogram or empirical distribution block;
//! blocks are concatenated in the fixed order
//! `deg, dn_min, dn_max, dn_mean, dn_std, [sum], [label], [distance]`.

mod aggregate;
mod config;
mod distance;

use std::ops::Deref;

use rayon::prelude::*;
use thiserror::Error;

pub use aggregate::aggregate;
pub use config::{feature_grid, Aggregation, FeatureConfig, Normalization, Scale, DEFAULT_BIN_GRID};
pub use distance::{distance_counts, distance_multiset};

use crate::graph::{Dataset, Graph, GraphError};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("bins must be at least 2, got {0}")]
    TooFewBins(usize),
    #[error("value {0} outside [0, 1]")]
    ValueOutOfRange(f64),
    #[error("dataset `{0}` has no node labels")]
    MissingNodeLabels(String),
    #[error("invalid feature config: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeProfile {
    pub deg: f64,
    pub dn_min: f64,
    pub dn_max: f64,
    pub dn_mean: f64,
    pub dn_std: f64,
    pub dn_sum: Option<f64>,
    pub label_value: Option<f64>,
}

/// Integer neighbour-degree summary. All statistics derive from these sums,
/// so they do not depend on neighbour order.
#[derive(Debug, Clone, Copy)]
struct DegreeSummary {
    deg: u64,
    min: u64,
    max: u64,
    sum: u64,
    sum_sq: u64,
}

impl DegreeSummary {
    fn of(adjacency: &[Vec<usize>], v: usize) -> Self {
        let neighbors = &adjacency[v];
        let mut s = Self {
            deg: neighbors.len() as u64,
            min: u64::MAX,
            max: 0,
            sum: 0,
            sum_sq: 0,
        };
        for &u in neighbors {
            let d = adjacency[u].len() as u64;
            s.min = s.min.min(d);
            s.max = s.max.max(d);
            s.sum += d;
            s.sum_sq += d * d;
        }
        if neighbors.is_empty() {
            s.min = 0;
        }
        s
    }

    fn mean(&self) -> f64 {
        if self.deg == 0 {
            0.0
        } else {
            self.sum as f64 / self.deg as f64
        }
    }

    /// Population standard deviation `sqrt(n·Σd² − (Σd)²) / n`.
    fn std(&self) -> f64 {
        if self.deg <= 1 {
            return 0.0;
        }
        let n = self.deg as u128;
        let spread = n * self.sum_sq as u128 - (self.sum as u128) * (self.sum as u128);
        (spread as f64).sqrt() / self.deg as f64
    }
}

pub fn node_profile(g: &Graph, v: usize, config: &FeatureConfig) -> Result<NodeProfile, FeatureError> {
    g.degree(v)?;
    let s = DegreeSummary::of(g.adjacency(), v);
    let label_value = if config.use_label {
        let labels = g
            .node_labels()
            .ok_or_else(|| FeatureError::MissingNodeLabels("graph".into()))?;
        Some(labels[v] as f64)
    } else {
        None
    };
    Ok(NodeProfile {
        deg: s.deg as f64,
        dn_min: s.min as f64,
        dn_max: s.max as f64,
        dn_mean: s.mean(),
        dn_std: s.std(),
        dn_sum: config.use_sum.then_some(s.sum as f64),
        label_value,
    })
}

fn transform(x: f64, scale: Scale) -> f64 {
    match scale {
        Scale::Linear => x,
        Scale::Log => x.ln_1p(),
    }
}

/// Divisor that maps `transform(x)` for `x` in `[0, max]` onto `[0, 1]`.
fn denominator_for(max: f64, scale: Scale) -> f64 {
    if max > 0.0 {
        transform(max, scale)
    } else {
        1.0
    }
}

/// Shared divisor for the five degree channels: the largest degree in `g`
/// or in all of `d`, passed through the scale transform, or 1 when that
/// largest degree is 0.
pub fn normalization_denominator(d: &Dataset, g: &Graph, config: &FeatureConfig) -> f64 {
    let max = match config.normalization {
        Normalization::PerGraph => g.max_degree(),
        Normalization::Dataset => d.max_degree(),
    };
    denominator_for(max as f64, config.scale)
}

/// Dense per-graph feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphVector(Vec<f64>);

impl GraphVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for GraphVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for GraphVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Dataset-level quantities needed by the `Dataset` normalisation scope and
/// the label channel, computed once per featurisation batch.
#[derive(Debug, Clone, Copy)]
struct DatasetScope {
    max_degree: usize,
    max_dn_sum: u64,
    /// Largest node label id; label ids are divided by it.
    max_label: u32,
}

impl DatasetScope {
    fn new(d: &Dataset, config: &FeatureConfig) -> Self {
        let max_dn_sum = if config.use_sum && config.normalization == Normalization::Dataset {
            d.graphs().iter().map(max_dn_sum).max().unwrap_or(0)
        } else {
            0
        };
        Self {
            max_degree: d.max_degree(),
            max_dn_sum,
            max_label: d
                .graphs()
                .iter()
                .filter_map(Graph::node_labels)
                .flat_map(|l| l.iter().copied())
                .max()
                .unwrap_or(0),
        }
    }
}

fn max_dn_sum(g: &Graph) -> u64 {
    let adj = g.adjacency();
    adj.iter()
        .map(|list| list.iter().map(|&u| adj[u].len() as u64).sum())
        .max()
        .unwrap_or(0)
}

fn featurize_in_scope(
    g: &Graph,
    scope: &DatasetScope,
    config: &FeatureConfig,
) -> Result<GraphVector, FeatureError> {
    let bins = config.bins;
    let mode = config.aggregation;
    let n = g.node_count();
    let summaries: Vec<DegreeSummary> = (0..n).map(|v| DegreeSummary::of(g.adjacency(), v)).collect();
    let mut out = Vec::with_capacity(config.dimension());

    let per_graph = config.normalization == Normalization::PerGraph;
    let max_degree = if per_graph { g.max_degree() } else { scope.max_degree };
    let den = denominator_for(max_degree as f64, config.scale);
    let scaled = |x: f64, den: f64| transform(x, config.scale) / den;

    let degree_channels: [fn(&DegreeSummary) -> f64; 5] = [
        |s| s.deg as f64,
        |s| s.min as f64,
        |s| s.max as f64,
        DegreeSummary::mean,
        DegreeSummary::std,
    ];
    for channel in degree_channels {
        let values = summaries.iter().map(|s| (scaled(channel(s), den), 1));
        out.extend(aggregate::aggregate_weighted(values, bins, mode)?);
    }

    if config.use_sum {
        let max = if per_graph { max_dn_sum(g) } else { scope.max_dn_sum };
        let den = denominator_for(max as f64, config.scale);
        let values = summaries.iter().map(|s| (scaled(s.sum as f64, den), 1));
        out.extend(aggregate::aggregate_weighted(values, bins, mode)?);
    }

    if config.use_label {
        let labels = g
            .node_labels()
            .ok_or_else(|| FeatureError::MissingNodeLabels("graph".into()))?;
        let span = scope.max_label;
        let values = labels.iter().map(|&l| {
            let x = if span == 0 { 0.0 } else { l as f64 / span as f64 };
            (x, 1)
        });
        out.extend(aggregate::aggregate_weighted(values, bins, mode)?);
    }

    if config.use_distance {
        let counts = distance_counts(g);
        let den = denominator_for((counts.len() - 1) as f64, config.scale);
        let values = counts
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, &c)| (scaled(d as f64, den), c));
        out.extend(aggregate::aggregate_weighted(values, bins, mode)?);
    }

    Ok(GraphVector(out))
}

/// Feature vector of one graph of `d`.
pub fn featurize(d: &Dataset, g: &Graph, config: &FeatureConfig) -> Result<GraphVector, FeatureError> {
    config.validate(d)?;
    featurize_in_scope(g, &DatasetScope::new(d, config), config)
}

/// Feature vectors of every graph of `d`, in dataset order. Graphs are
/// processed in parallel on the current rayon pool; the output does not
/// depend on the schedule.
pub fn featurize_dataset(d: &Dataset, config: &FeatureConfig) -> Result<Vec<GraphVector>, FeatureError> {
    config.validate(d)?;
    let scope = DatasetScope::new(d, config);
    d.graphs()
        .par_iter()
        .map(|g| featurize_in_scope(g, &scope, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn profile(g: &Graph, v: usize) -> [f64; 5] {
        let p = node_profile(g, v, &FeatureConfig::default()).unwrap();
        [p.deg, p.dn_min, p.dn_max, p.dn_mean, p.dn_std]
    }

    fn single(g: Graph) -> Dataset {
        Dataset::new("one", vec![g], 1).unwrap()
    }

    #[test]
    fn profiles_of_small_graphs() {
        assert_eq!(profile(&triangle(), 1), [2.0, 2.0, 2.0, 2.0, 0.0]);
        assert_eq!(profile(&star(3), 0), [3.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(profile(&star(3), 2), [1.0, 3.0, 3.0, 3.0, 0.0]);
        assert_eq!(profile(&path(4), 1), [2.0, 1.0, 2.0, 1.5, 0.5]);
        assert_eq!(profile(&isolated(1), 0), [0.0; 5]);
        assert!(node_profile(&path(4), 4, &FeatureConfig::default()).is_err());
    }

    #[test]
    fn optional_profile_fields() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)], Some(vec![4, 2, 0]), 0).unwrap();
        let config = FeatureConfig {
            use_sum: true,
            use_label: true,
            ..Default::default()
        };
        let p = node_profile(&g, 1, &config).unwrap();
        assert_eq!(p.dn_sum, Some(2.0));
        assert_eq!(p.label_value, Some(2.0));
        assert!(node_profile(&triangle(), 0, &config).is_err());
    }

    #[test]
    fn denominators() {
        let linear = FeatureConfig::default();
        let t = triangle();
        assert_eq!(normalization_denominator(&single(t.clone()), &t, &linear), 2.0);
        let d = Dataset::new("pair", vec![triangle(), star(3)], 1).unwrap();
        let dataset = FeatureConfig {
            normalization: Normalization::Dataset,
            ..linear
        };
        assert_eq!(normalization_denominator(&d, &d.graphs()[0], &dataset), 3.0);
        let lone = isolated(1);
        assert_eq!(normalization_denominator(&single(lone.clone()), &lone, &linear), 1.0);
        let log = FeatureConfig {
            scale: Scale::Log,
            ..linear
        };
        assert_eq!(normalization_denominator(&single(t.clone()), &t, &log), 2f64.ln_1p());
    }

    #[test]
    fn triangle_vector() {
        let config = FeatureConfig {
            bins: 2,
            ..Default::default()
        };
        let t = triangle();
        let v = featurize(&single(t.clone()), &t, &config).unwrap();
        assert_eq!(v.values(), &[0., 1., 0., 1., 0., 1., 0., 1., 1., 0.]);
    }

    #[test]
    fn edgeless_graph_vector() {
        let config = FeatureConfig {
            bins: 4,
            ..Default::default()
        };
        let g = isolated(5);
        let v = featurize(&single(g.clone()), &g, &config).unwrap();
        for block in v.chunks(4) {
            assert_eq!(block, &[1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn empty_graph_is_all_zero() {
        let g = isolated(0);
        let v = featurize(&single(g.clone()), &g, &FeatureConfig::default()).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn optional_channels_extend_the_vector() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)], Some(vec![0, 1, 2, 1]), 0).unwrap();
        let d = single(g.clone());
        let config = FeatureConfig {
            bins: 4,
            use_sum: true,
            use_label: true,
            use_distance: true,
            ..Default::default()
        };
        let v = featurize(&d, &g, &config).unwrap();
        assert_eq!(v.len(), 32);
        // sum(DN): 2, 3, 3, 2 over max 3
        assert_eq!(&v[20..24], &[0.0, 0.0, 0.5, 0.5]);
        // labels 0, 1, 2, 1 over span 2
        assert_eq!(&v[24..28], &[0.25, 0.0, 0.5, 0.25]);
        // distances {1,1,1,2,2,3} over max 3
        assert_eq!(&v[28..32], &[0.0, 0.5, 1.0 / 3.0, 1.0 / 6.0]);
    }

    #[test]
    fn label_channel_needs_labels() {
        let config = FeatureConfig {
            use_label: true,
            ..Default::default()
        };
        assert!(matches!(
            featurize_dataset(&single(triangle()), &config),
            Err(FeatureError::MissingNodeLabels(_))
        ));
    }

    #[test]
    fn log_scale_keeps_range() {
        let d = Dataset::new("pair", vec![star(9), path(5)], 1).unwrap();
        for normalization in [Normalization::PerGraph, Normalization::Dataset] {
            let config = FeatureConfig {
                bins: 10,
                scale: Scale::Log,
                normalization,
                use_sum: true,
                use_distance: true,
                ..Default::default()
            };
            for v in featurize_dataset(&d, &config).unwrap() {
                for block in v.chunks(10) {
                    assert!((block.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
