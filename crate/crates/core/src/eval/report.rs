use std::fmt;
use std::str::FromStr;

use super::cv::{CvConfig, KernelKind};
use super::EvalError;
use crate::features::FeatureConfig;

/// Method variants reported side by side, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Degree channels, linear and Gaussian kernels.
    Base,
    /// Degree channels, linear kernel only.
    LinearOnly,
    /// Degree channels plus the node-label channel.
    PlusLabel,
    /// Degree channels plus the shortest-path distance channel.
    PlusDistance,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Self::Base, Self::LinearOnly, Self::PlusLabel, Self::PlusDistance];

    pub fn column(&self) -> &'static str {
        match self {
            Self::Base => "LDP",
            Self::LinearOnly => "LDP*",
            Self::PlusLabel => "LDP+Label",
            Self::PlusDistance => "LDP+distance",
        }
    }

    /// Switches on the optional channel this variant adds.
    pub fn feature_base(&self, base: FeatureConfig) -> FeatureConfig {
        FeatureConfig {
            use_label: *self == Self::PlusLabel || base.use_label,
            use_distance: *self == Self::PlusDistance || base.use_distance,
            ..base
        }
    }

    /// Restricts the kernel search for [`Variant::LinearOnly`].
    pub fn cv_config(&self, base: &CvConfig) -> CvConfig {
        let mut cv = base.clone();
        if *self == Self::LinearOnly {
            cv.kernel_kinds = vec![KernelKind::Linear];
        }
        cv
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Base => "base",
            Self::LinearOnly => "star",
            Self::PlusLabel => "label",
            Self::PlusDistance => "distance",
        })
    }
}

impl FromStr for Variant {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "base" => Ok(Self::Base),
            "star" | "linear" => Ok(Self::LinearOnly),
            "label" => Ok(Self::PlusLabel),
            "distance" => Ok(Self::PlusDistance),
            other => Err(EvalError::InvalidConfig(format!("unknown variant `{other}`"))),
        }
    }
}

/// Datasets as rows, variants as columns, mean accuracies in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Variant>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

fn cell(acc: Option<f64>) -> String {
    acc.map_or_else(|| "-".to_string(), |a| format!("{:.1}", a * 100.0))
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset");
        for c in &self.columns {
            out.push(',');
            out.push_str(c.column());
        }
        out.push('\n');
        for (name, cells) in &self.rows {
            out.push_str(name);
            for &c in cells {
                out.push(',');
                out.push_str(&cell(c));
            }
            out.push('\n');
        }
        out
    }

    /// Left-aligned first column, right-aligned accuracy columns.
    pub fn to_text(&self) -> String {
        let header: Vec<String> = std::iter::once("dataset".to_string())
            .chain(self.columns.iter().map(|c| c.column().to_string()))
            .collect();
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(name, cells)| {
                std::iter::once(name.clone())
                    .chain(cells.iter().map(|&c| cell(c)))
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                std::iter::once(&header)
                    .chain(&body)
                    .map(|r| r[i].len())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |r: &[String]| {
            let mut s = format!("{:<w$}", r[0], w = widths[0]);
            for (v, w) in r.iter().zip(&widths).skip(1) {
                s.push_str(&format!("  {v:>w$}"));
            }
            s.push('\n');
            s
        };
        let mut out = line(&header);
        for r in &body {
            out.push_str(&line(r));
        }
        out
    }
}

/// Builds a table from `(dataset, variant, mean accuracy)` entries. Rows
/// keep first-appearance order; only variants that occur get a column.
pub fn report_table(entries: &[(String, Variant, f64)]) -> Table {
    let mut columns: Vec<Variant> = entries.iter().map(|e| e.1).collect();
    columns.sort_unstable();
    columns.dedup();
    let mut rows: Vec<(String, Vec<Option<f64>>)> = Vec::new();
    for (name, variant, acc) in entries {
        let col = columns.iter().position(|c| c == variant).expect("column exists");
        let row = match rows.iter().position(|(n, _)| n == name) {
            Some(i) => i,
            None => {
                rows.push((name.clone(), vec![None; columns.len()]));
                rows.len() - 1
            }
        };
        rows[row].1[col] = Some(*acc);
    }
    Table { columns, rows }
}
