//! Experiment settings gathered from flags and an optional config file.
//!
//! The config file uses `key = value` lines with the long flag names as
//! keys (`bins = 30,50`, `data-dir = /data`); `#` starts a comment. Flags
//! given on the command line win over the file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use ldp::eval::Variant;
use ldp::features::{Aggregation, Normalization, Scale};

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    /// Dataset name or file prefix, e.g. `MUTAG` or `IMDB BINARY`.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Directory holding the unpacked benchmark archives.
    #[arg(long, env = "LDP_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long, value_delimiter = ',')]
    pub bins: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub aggregation: Option<Vec<Aggregation>>,
    #[arg(long, value_delimiter = ',')]
    pub normalization: Option<Vec<Normalization>>,
    #[arg(long, value_delimiter = ',')]
    pub scale: Option<Vec<Scale>>,
    /// Add the sum-of-neighbour-degrees channel.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub use_sum: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub inner_folds: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub gamma_grid: Option<Vec<f64>>,
    /// Worker threads for featurization and fold evaluation.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Config file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(|v| one(key, v.trim()))
        .collect()
}

fn one<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value `{value}` for `{key}`")))
}

impl Settings {
    pub fn from_config_text(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected `key = value`", origin.display(), i + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "dataset" => s.dataset = Some(value.to_string()),
                "data-dir" => s.data_dir = Some(PathBuf::from(value)),
                "variant" => s.variant = Some(one(&key, value)?),
                "bins" => s.bins = Some(list(&key, value)?),
                "aggregation" => s.aggregation = Some(list(&key, value)?),
                "normalization" => s.normalization = Some(list(&key, value)?),
                "scale" => s.scale = Some(list(&key, value)?),
                "use-sum" => s.use_sum = Some(one(&key, value)?),
                "seed" => s.seed = Some(one(&key, value)?),
                "folds" => s.folds = Some(one(&key, value)?),
                "reps" => s.reps = Some(one(&key, value)?),
                "inner-folds" => s.inner_folds = Some(one(&key, value)?),
                "c-grid" => s.c_grid = Some(list(&key, value)?),
                "gamma-grid" => s.gamma_grid = Some(list(&key, value)?),
                "threads" => s.threads = Some(one(&key, value)?),
                "out" => s.out = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::Usage(format!(
                        "{}:{}: unknown key `{other}`",
                        origin.display(),
                        i + 1
                    )))
                }
            }
        }
        Ok(s)
    }

    /// Reads `--config` if given and fills every unset field from it.
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
        Ok(self.or(Self::from_config_text(&text, &path)?))
    }

    fn or(self, file: Self) -> Self {
        Self {
            dataset: self.dataset.or(file.dataset),
            data_dir: self.data_dir.or(file.data_dir),
            variant: self.variant.or(file.variant),
            bins: self.bins.or(file.bins),
            aggregation: self.aggregation.or(file.aggregation),
            normalization: self.normalization.or(file.normalization),
            scale: self.scale.or(file.scale),
            use_sum: self.use_sum.or(file.use_sum),
            seed: self.seed.or(file.seed),
            folds: self.folds.or(file.folds),
            reps: self.reps.or(file.reps),
            inner_folds: self.inner_folds.or(file.inner_folds),
            c_grid: self.c_grid.or(file.c_grid),
            gamma_grid: self.gamma_grid.or(file.gamma_grid),
            threads: self.threads.or(file.threads),
            out: self.out.or(file.out),
            config: self.config,
        }
    }
}
