use super::{Aggregation, FeatureError};

fn edge(k: usize, bins: usize) -> f64 {
    k as f64 / bins as f64
}

/// Cell of `x` among `bins` uniform cells `[k/bins, (k+1)/bins)`, the last
/// cell closed on the right.
fn histogram_cell(x: f64, bins: usize) -> usize {
    let mut k = ((x * bins as f64).floor() as usize).min(bins - 1);
    while k > 0 && x < edge(k, bins) {
        k -= 1;
    }
    while k + 1 < bins && x >= edge(k + 1, bins) {
        k += 1;
    }
    k
}

/// Smallest `k` in `1..=bins` with `x <= k/bins`.
fn edf_point(x: f64, bins: usize) -> usize {
    let mut k = ((x * bins as f64).ceil() as usize).clamp(1, bins);
    while k > 1 && x <= edge(k - 1, bins) {
        k -= 1;
    }
    while k < bins && x > edge(k, bins) {
        k += 1;
    }
    k
}

/// Aggregates weighted values in `[0, 1]`. The output is normalised by
/// the total weight, so a zero total weight gives the all-zero vector.
pub(crate) fn aggregate_weighted(
    values: impl IntoIterator<Item = (f64, u64)>,
    bins: usize,
    mode: Aggregation,
) -> Result<Vec<f64>, FeatureError> {
    if bins < 2 {
        return Err(FeatureError::TooFewBins(bins));
    }
    let mut counts = vec![0u64; bins];
    let mut total = 0u64;
    for (x, w) in values {
        if !(0.0..=1.0).contains(&x) {
            return Err(FeatureError::ValueOutOfRange(x));
        }
        let slot = match mode {
            Aggregation::Histogram => histogram_cell(x, bins),
            Aggregation::Edf => edf_point(x, bins) - 1,
        };
        counts[slot] += w;
        total += w;
    }
    if total == 0 {
        return Ok(vec![0.0; bins]);
    }
    if mode == Aggregation::Edf {
        for k in 1..bins {
            counts[k] += counts[k - 1];
        }
    }
    let total = total as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Maps values in `[0, 1]` to a histogram of frequencies over `bins`
/// uniform cells, or to the empirical distribution function sampled at the
/// cell right edges `k/bins`.
pub fn aggregate(values: &[f64], bins: usize, mode: Aggregation) -> Result<Vec<f64>, FeatureError> {
    aggregate_weighted(values.iter().map(|&x| (x, 1)), bins, mode)
}
