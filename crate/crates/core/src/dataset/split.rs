//! Stratified train/dev/test splitting and k-fold partitioning.
//!
//! Both operations stratify by label so the roughly 12%-positive class keeps
//! its share in every partition. Per-stratum quotas use largest-remainder
//! rounding with ties to the later partition; fold assignment deals a single
//! round-robin cursor across strata so overall fold sizes differ by at most
//! one.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
    /// Fold count for cross-validation runs.
    pub k: usize,
    pub seed: u64,
}

impl SplitSpec {
    /// The 80/10/10, 10-fold configuration.
    pub fn standard(seed: u64) -> SplitSpec {
        SplitSpec { train: 0.8, dev: 0.1, test: 0.1, k: 10, seed }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let sum = self.train + self.dev + self.test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::InvalidSplit {
                reason: alloc::format!("fractions sum to {sum}, expected 1.0"),
            });
        }
        if self.train < 0.0 || self.dev < 0.0 || self.test < 0.0 {
            return Err(DatasetError::InvalidSplit { reason: "negative fraction".to_string() });
        }
        if self.k < 2 {
            return Err(DatasetError::InvalidSplit {
                reason: alloc::format!("k = {}, expected at least 2", self.k),
            });
        }
        Ok(())
    }
}

/// Indices per label, in dataset order. Only labels that occur form strata.
fn strata(ds: &Dataset) -> Vec<(u8, Vec<usize>)> {
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for (i, s) in ds.samples().iter().enumerate() {
        if s.label == 1 {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    let mut out = Vec::new();
    if !neg.is_empty() {
        out.push((0, neg));
    }
    if !pos.is_empty() {
        out.push((1, pos));
    }
    out
}

/// Largest-remainder apportionment of `n` into parts proportional to
/// `fractions`; remainder ties go to the later part.
fn apportion(n: usize, fractions: &[f64]) -> Vec<usize> {
    let mut base: Vec<usize> = Vec::with_capacity(fractions.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(fractions.len());
    for (i, f) in fractions.iter().enumerate() {
        let quota = n as f64 * f;
        let floor = quota as usize;
        base.push(floor);
        remainders.push((quota - floor as f64, i));
    }
    let mut extras = n - base.iter().sum::<usize>();
    remainders.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(b.1.cmp(&a.1))
    });
    for (_, i) in remainders {
        if extras == 0 {
            break;
        }
        base[i] += 1;
        extras -= 1;
    }
    base
}

/// Stratified train/dev/test split. Partition membership is random (seeded);
/// within each partition, samples keep their dataset order.
pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset, Dataset), DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fractions = [spec.train, spec.dev, spec.test];
    let mut parts: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (_, mut indices) in strata(ds) {
        indices.shuffle(&mut rng);
        let counts = apportion(indices.len(), &fractions);
        let mut cursor = 0;
        for (part, &count) in parts.iter_mut().zip(&counts) {
            part.extend(&indices[cursor..cursor + count]);
            cursor += count;
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    let [train, dev, test] = parts;
    Ok((ds.subset(&train), ds.subset(&dev), ds.subset(&test)))
}

/// Stratified k-fold partition; returns each fold's indices into `ds`,
/// ascending within a fold.
pub fn folds(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, DatasetError> {
    if k < 2 {
        return Err(DatasetError::InvalidSplit {
            reason: alloc::format!("k = {k}, expected at least 2"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<usize>> = alloc::vec![Vec::new(); k];
    let mut cursor = 0usize;
    for (label, mut indices) in strata(ds) {
        if indices.len() < k {
            return Err(DatasetError::InsufficientClassSamples {
                label,
                count: indices.len(),
                k,
            });
        }
        indices.shuffle(&mut rng);
        for idx in indices {
            out[cursor % k].push(idx);
            cursor += 1;
        }
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::testutil::dataset;
    use std::collections::BTreeSet;

    #[test]
    fn test_balanced_hundred_into_ten_folds() {
        let ds = dataset(50, 50);
        let f = folds(&ds, 10, 7).unwrap();
        assert_eq!(f.len(), 10);
        for fold in &f {
            assert_eq!(fold.len(), 10);
            let pos = fold.iter().filter(|&&i| ds.samples()[i].label == 1).count();
            assert_eq!(pos, 5, "fold lost stratification");
        }
    }

    #[test]
    fn test_skewed_folds_sizes_differ_by_at_most_one() {
        let ds = dataset(15, 85);
        let f = folds(&ds, 10, 3).unwrap();
        let sizes: Vec<usize> = f.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 100);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, "{sizes:?}");
    }

    #[test]
    fn test_folds_are_disjoint_and_cover() {
        let ds = dataset(20, 60);
        let f = folds(&ds, 5, 11).unwrap();
        let mut seen = BTreeSet::new();
        for fold in &f {
            for &i in fold {
                assert!(seen.insert(i), "index {i} in two folds");
            }
        }
        assert_eq!(seen.len(), 80);
    }

    #[test]
    fn test_insufficient_class_samples() {
        let ds = dataset(4, 50);
        let err = folds(&ds, 10, 0).unwrap_err();
        assert_eq!(
            err,
            DatasetError::InsufficientClassSamples { label: 1, count: 4, k: 10 }
        );
    }

    #[test]
    fn test_split_sizes_match_largest_remainder() {
        // The published corpus size: 1496 positive, 10629 negative.
        let ds = dataset(1496, 10629);
        let (train, dev, test) = split(&ds, &SplitSpec::standard(42)).unwrap();
        assert_eq!(train.len(), 9700);
        assert_eq!(dev.len(), 1212);
        assert_eq!(test.len(), 1213);
        // Stratification: positive quotas 1197/149/150.
        assert_eq!(train.class_counts().0, 1197);
        assert_eq!(dev.class_counts().0, 149);
        assert_eq!(test.class_counts().0, 150);
    }

    #[test]
    fn test_split_partitions_are_disjoint() {
        let ds = dataset(30, 70);
        let (train, dev, test) = split(&ds, &SplitSpec::standard(5)).unwrap();
        let names = |d: &Dataset| -> BTreeSet<String> {
            d.samples().iter().map(|s| s.key.qualified_name.clone()).collect()
        };
        use alloc::string::String;
        let (a, b, c) = (names(&train), names(&dev), names(&test));
        assert!(a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c));
        assert_eq!(a.len() + b.len() + c.len(), 100);
    }

    #[test]
    fn test_same_seed_reproduces_split_and_folds() {
        let ds = dataset(25, 75);
        let s1 = split(&ds, &SplitSpec::standard(9)).unwrap();
        let s2 = split(&ds, &SplitSpec::standard(9)).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(folds(&ds, 4, 9).unwrap(), folds(&ds, 4, 9).unwrap());
    }

    #[test]
    fn test_bad_fractions_rejected() {
        let ds = dataset(5, 5);
        let spec = SplitSpec { train: 0.7, dev: 0.1, test: 0.1, k: 10, seed: 0 };
        assert!(matches!(
            split(&ds, &spec),
            Err(DatasetError::InvalidSplit { .. })
        ));
    }

    #[test]
    fn test_apportion_tie_goes_to_later_partition() {
        // 1496 * [0.8, 0.1, 0.1]: remainders 0.8, 0.6, 0.6; the two extras go
        // to train (largest) and test (tie broken later-first).
        assert_eq!(apportion(1496, &[0.8, 0.1, 0.1]), [1197, 149, 150]);
        assert_eq!(apportion(10629, &[0.8, 0.1, 0.1]), [8503, 1063, 1063]);
    }
}
