use std::fmt;
use std::str::FromStr;

use super::FeatureError;
use crate::graph::Dataset;

/// Default bin grid searched by the experiment drivers.
pub const DEFAULT_BIN_GRID: [usize; 4] = [30, 50, 70, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aggregation {
    Histogram,
    Edf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Normalization {
    /// Divide by the largest degree in the graph itself.
    PerGraph,
    /// Divide by the largest degree anywhere in the dataset.
    Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scale {
    Linear,
    /// `ln(1 + x)` before normalisation.
    Log,
}

macro_rules! text_enum {
    ($ty:ty, $($variant:path => [$name:literal $(, $alias:literal)*]),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = FeatureError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name $(| $alias)* => Ok($variant),)+
                    other => Err(FeatureError::Config(format!(
                        "unknown {} `{other}`",
                        stringify!($ty).to_ascii_lowercase()
                    ))),
                }
            }
        }
    };
}

text_enum!(Aggregation, Aggregation::Histogram => ["histogram", "hist"], Aggregation::Edf => ["edf"]);
text_enum!(Normalization, Normalization::PerGraph => ["graph", "per-graph", "pergraph"], Normalization::Dataset => ["dataset"]);
text_enum!(Scale, Scale::Linear => ["linear", "lin"], Scale::Log => ["log"]);

/// Every featurisation hyperparameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureConfig {
    pub bins: usize,
    pub aggregation: Aggregation,
    pub normalization: Normalization,
    pub scale: Scale,
    pub use_sum: bool,
    pub use_label: bool,
    pub use_distance: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            bins: 50,
            aggregation: Aggregation::Histogram,
            normalization: Normalization::PerGraph,
            scale: Scale::Linear,
            use_sum: false,
            use_label: false,
            use_distance: false,
        }
    }
}

impl FeatureConfig {
    /// Number of per-feature blocks.
    pub fn channel_count(&self) -> usize {
        5 + self.use_sum as usize + self.use_label as usize + self.use_distance as usize
    }

    pub fn dimension(&self) -> usize {
        self.channel_count() * self.bins
    }

    pub fn validate(&self, dataset: &Dataset) -> Result<(), FeatureError> {
        if self.bins < 2 {
            return Err(FeatureError::TooFewBins(self.bins));
        }
        if self.use_label && !dataset.has_node_labels() {
            return Err(FeatureError::MissingNodeLabels(dataset.name().to_string()));
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn from_config_text(text: &str) -> Result<Self, FeatureError> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| FeatureError::Config(format!("line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`"))?;
            let value = value.trim();
            let flag = || -> Result<bool, FeatureError> {
                value.parse().map_err(|_| bad("expected true or false"))
            };
            match key.trim() {
                "bins" => config.bins = value.parse().map_err(|_| bad("bins must be an integer"))?,
                "aggregation" => config.aggregation = value.parse()?,
                "normalization" => config.normalization = value.parse()?,
                "scale" => config.scale = value.parse()?,
                "use_sum" => config.use_sum = flag()?,
                "use_label" => config.use_label = flag()?,
                "use_distance" => config.use_distance = flag()?,
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        if config.bins < 2 {
            return Err(FeatureError::TooFewBins(config.bins));
        }
        Ok(config)
    }

    pub fn to_config_text(&self) -> String {
        format!(
            "bins = {}\naggregation = {}\nnormalization = {}\nscale = {}\nuse_sum = {}\nuse_label = {}\nuse_distance = {}\n",
            self.bins,
            self.aggregation,
            self.normalization,
            self.scale,
            self.use_sum,
            self.use_label,
            self.use_distance
        )
    }
}

impl fmt::Display for FeatureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bins={} agg={} norm={} scale={}",
            self.bins, self.aggregation, self.normalization, self.scale
        )?;
        for (on, name) in [
            (self.use_sum, "sum"),
            (self.use_label, "label"),
            (self.use_distance, "distance"),
        ] {
            if on {
                write!(f, " +{name}")?;
            }
        }
        Ok(())
    }
}

/// Cartesian product of the searched axes, with the optional channels
/// fixed by `base`.
pub fn feature_grid(
    base: FeatureConfig,
    bins: &[usize],
    aggregations: &[Aggregation],
    normalizations: &[Normalization],
    scales: &[Scale],
) -> Vec<FeatureConfig> {
    let mut out = Vec::new();
    for &b in bins {
        for &aggregation in aggregations {
            for &normalization in normalizations {
                for &scale in scales {
                    out.push(FeatureConfig {
                        bins: b,
                        aggregation,
                        normalization,
                        scale,
                        ..base
                    });
                }
            }
        }
    }
    out
}
