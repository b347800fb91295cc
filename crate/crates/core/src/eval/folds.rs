use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// Partitions `0..labels.len()` into `folds` disjoint sets so that each
/// class is spread as evenly as possible: per-class counts differ by at
/// most one between folds.
///
/// Members of each class are shuffled with `seed` and dealt round-robin,
/// each class continuing from the fold where the previous one stopped so
/// fold sizes also stay within one of each other. Indices inside a fold are
/// sorted.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if folds < 2 {
        return Err(EvalError::InvalidConfig(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() < folds {
        return Err(EvalError::TooFewExamples {
            folds,
            examples: labels.len(),
        });
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for (class, mut members) in by_class {
        if members.len() < folds {
            log::warn!(
                "class {class} has {} members for {folds} folds; some folds will miss it",
                members.len()
            );
        }
        members.shuffle(&mut rng);
        for i in members {
            out[next].push(i);
            next = (next + 1) % folds;
        }
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

/// Sorted complement of `fold` within `0..n`.
pub(crate) fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    for &i in fold {
        held[i] = true;
    }
    (0..n).filter(|&i| !held[i]).collect()
}
