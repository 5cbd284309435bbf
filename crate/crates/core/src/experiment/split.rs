//! Stratified train/test splitting.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ExperimentError;

/// Disjoint index sets covering the dataset, both sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits clip indices per class so each class keeps its proportion.
///
/// Per class of size n the test side takes round(n * fraction) clips,
/// clamped so both sides keep at least one. Deterministic per seed.
pub fn split_indices(
    labels: &[String],
    test_fraction: f64,
    seed: u64,
) -> Result<Split, ExperimentError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(ExperimentError::InvalidTestFraction(test_fraction));
    }
    // BTreeMap so classes are visited in sorted order regardless of input.
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut indices) in by_class {
        if indices.len() < 2 {
            return Err(ExperimentError::ClassTooSmall {
                label: label.to_string(),
                count: indices.len(),
            });
        }
        indices.shuffle(&mut rng);
        let n = indices.len();
        let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
        test.extend_from_slice(&indices[..n_test]);
        train.extend_from_slice(&indices[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(counts: &[(&str, usize)]) -> Vec<String> {
        counts
            .iter()
            .flat_map(|(name, n)| std::iter::repeat_n(name.to_string(), *n))
            .collect()
    }

    #[test]
    fn proportions_are_preserved_per_class() {
        let l = labels(&[("a", 100), ("b", 100)]);
        let split = split_indices(&l, 0.2, 0).unwrap();
        for class in ["a", "b"] {
            let test_n = split.test.iter().filter(|&&i| l[i] == class).count();
            let train_n = split.train.iter().filter(|&&i| l[i] == class).count();
            assert_eq!(test_n, 20);
            assert_eq!(train_n, 80);
        }
    }

    #[test]
    fn partitions_are_disjoint_and_cover() {
        let l = labels(&[("a", 7), ("b", 11), ("c", 5)]);
        let split = split_indices(&l, 0.3, 42).unwrap();
        let mut all: Vec<usize> = split.train.iter().chain(&split.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..l.len()).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_reproduces_different_seeds_differ() {
        let l = labels(&[("a", 20), ("b", 20)]);
        let s0 = split_indices(&l, 0.25, 0).unwrap();
        let s0_again = split_indices(&l, 0.25, 0).unwrap();
        assert_eq!(s0, s0_again);
        let s1 = split_indices(&l, 0.25, 1).unwrap();
        assert_ne!(s0, s1);
    }

    #[test]
    fn both_sides_keep_at_least_one_clip() {
        let l = labels(&[("a", 2), ("b", 2)]);
        for fraction in [0.01, 0.5, 0.99] {
            let split = split_indices(&l, fraction, 3).unwrap();
            for class in ["a", "b"] {
                assert_eq!(split.test.iter().filter(|&&i| l[i] == class).count(), 1);
                assert_eq!(split.train.iter().filter(|&&i| l[i] == class).count(), 1);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let l = labels(&[("a", 4), ("b", 1)]);
        assert!(matches!(
            split_indices(&l, 0.2, 0),
            Err(ExperimentError::ClassTooSmall { count: 1, .. })
        ));
        let ok = labels(&[("a", 4), ("b", 4)]);
        assert!(matches!(
            split_indices(&ok, 0.0, 0),
            Err(ExperimentError::InvalidTestFraction(_))
        ));
        assert!(matches!(
            split_indices(&ok, 1.0, 0),
            Err(ExperimentError::InvalidTestFraction(_))
        ));
    }
}
