//! Conjunction-rule evaluation: membership, WRAcc, coverage, contrast.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::bitset::conjunction_counts;
use crate::dataset::BinaryDataset;

/// A conjunction rule over the selected features, stored as a bitmask:
/// bit `i` set means "feature `i` must equal 1".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FeatureSubset(pub u32);

impl FeatureSubset {
    /// Empty rule; by convention it matches every record.
    pub const EMPTY: FeatureSubset = FeatureSubset(0);

    /// Build from feature indices.
    pub fn from_features(indices: &[usize]) -> Self {
        let mut mask = 0u32;
        for &i in indices {
            debug_assert!(i < 32);
            mask |= 1 << i;
        }
        FeatureSubset(mask)
    }

    /// Number of selected features.
    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    /// Whether feature `i` is selected.
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Rule extended by feature `i`.
    pub fn with_feature(self, i: usize) -> Self {
        FeatureSubset(self.0 | 1 << i)
    }

    /// Selected feature indices in ascending order.
    pub fn features(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(tz)
            }
        })
    }

    /// Human-readable conjunction under aligned semantics, e.g.
    /// `"count = 1 AND service_http = 1"`. The empty rule renders as
    /// `"<all records>"`.
    pub fn render(self, names: &[String]) -> String {
        if self.0 == 0 {
            return String::from("<all records>");
        }
        let mut out = String::new();
        for (pos, i) in self.features().enumerate() {
            if pos > 0 {
                out.push_str(" AND ");
            }
            out.push_str(&names[i]);
            out.push_str(" = 1");
        }
        out
    }
}

/// Quality metrics of one subgroup on one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubgroupMetrics {
    /// Member record count |sg|.
    pub size: usize,
    /// |sg| / N.
    pub coverage: f64,
    /// Attack rate within the subgroup; `None` when the subgroup is empty.
    pub positive_rate: Option<f64>,
    /// |p(sg) - p0|; 0 for an empty subgroup.
    pub contrast: f64,
    /// coverage * contrast.
    pub wracc: f64,
}

/// Evaluate a conjunction rule: a record is a member iff every selected
/// binarized feature equals 1. The empty rule covers all records and scores
/// WRAcc 0 by definition (its rate equals the baseline).
pub fn evaluate_subgroup(bd: &BinaryDataset, subset: FeatureSubset) -> SubgroupMetrics {
    let cols: Vec<&crate::bitset::RowSet> =
        subset.features().map(|i| &bd.columns()[i]).collect();
    let (size, hits) = conjunction_counts(&cols, bd.positives(), bd.n_rows());
    let n = bd.n_rows() as f64;
    if size == 0 {
        return SubgroupMetrics {
            size: 0,
            coverage: 0.0,
            positive_rate: None,
            contrast: 0.0,
            wracc: 0.0,
        };
    }
    let coverage = size as f64 / n;
    let rate = hits as f64 / size as f64;
    let contrast = (rate - bd.baseline_rate()).abs();
    SubgroupMetrics {
        size,
        coverage,
        positive_rate: Some(rate),
        contrast,
        wracc: coverage * contrast,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("f{i}")).collect()
    }

    #[test]
    fn empty_mask_covers_everything_with_zero_wracc() {
        let rows = vec![vec![true], vec![false], vec![true], vec![false]];
        let bd = BinaryDataset::from_rows(&rows, names(1), &[true, false, false, true]).unwrap();
        let m = evaluate_subgroup(&bd, FeatureSubset::EMPTY);
        assert_eq!(m.size, 4);
        assert_eq!(m.positive_rate, Some(bd.baseline_rate()));
        assert_eq!(m.wracc, 0.0);
    }

    #[test]
    fn hand_evaluated_example() {
        // N=10, p0=0.5, subgroup of 5 rows with 4 positives -> wracc 0.15.
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let member = i < 5;
            let positive = if member { i < 4 } else { i < 6 };
            rows.push(vec![member]);
            labels.push(positive);
        }
        let bd = BinaryDataset::from_rows(&rows, names(1), &labels).unwrap();
        let m = evaluate_subgroup(&bd, FeatureSubset(1));
        assert_eq!(m.size, 5);
        assert!((m.wracc - 0.15).abs() < 1e-12);
        assert!((m.contrast - 0.3).abs() < 1e-12);
        assert_eq!(m.positive_rate, Some(0.8));
    }

    #[test]
    fn empty_subgroup_has_defined_metrics() {
        let rows = vec![vec![true, false], vec![false, true]];
        let bd = BinaryDataset::from_rows(&rows, names(2), &[true, false]).unwrap();
        let m = evaluate_subgroup(&bd, FeatureSubset(0b11));
        assert_eq!(m.size, 0);
        assert_eq!(m.positive_rate, None);
        assert_eq!(m.contrast, 0.0);
        assert_eq!(m.wracc, 0.0);
    }

    #[test]
    fn rule_rendering() {
        let s = FeatureSubset::from_features(&[0, 2]);
        let rendered = s.render(&["a".to_string(), "b".to_string(), "c".to_string()]);
        assert_eq!(rendered, "a = 1 AND c = 1");
        assert_eq!(FeatureSubset::EMPTY.render(&[]), "<all records>");
    }

    /// Independent oracle: interpret the rule row by row.
    fn naive_metrics(rows: &[Vec<bool>], labels: &[bool], s: FeatureSubset, p0: f64) -> SubgroupMetrics {
        let members: Vec<usize> = (0..rows.len())
            .filter(|&i| s.features().all(|f| rows[i][f]))
            .collect();
        let size = members.len();
        if size == 0 {
            return SubgroupMetrics {
                size: 0,
                coverage: 0.0,
                positive_rate: None,
                contrast: 0.0,
                wracc: 0.0,
            };
        }
        let hits = members.iter().filter(|&&i| labels[i]).count();
        let coverage = size as f64 / rows.len() as f64;
        let rate = hits as f64 / size as f64;
        SubgroupMetrics {
            size,
            coverage,
            positive_rate: Some(rate),
            contrast: (rate - p0).abs(),
            wracc: coverage * (rate - p0).abs(),
        }
    }

    proptest! {
        #[test]
        fn bitset_evaluation_matches_naive_interpreter(
            rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 5), 2..60),
            labels in proptest::collection::vec(any::<bool>(), 60),
            mask in 0u32..32,
        ) {
            let labels = &labels[..rows.len()];
            if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
                return Ok(());
            }
            let bd = BinaryDataset::from_rows(&rows, names(5), labels).unwrap();
            let s = FeatureSubset(mask);
            let fast = evaluate_subgroup(&bd, s);
            let slow = naive_metrics(&rows, labels, s, bd.baseline_rate());
            prop_assert_eq!(fast.size, slow.size);
            prop_assert!((fast.wracc - slow.wracc).abs() < 1e-12);
            prop_assert_eq!(fast.positive_rate.is_none(), slow.positive_rate.is_none());
        }

        #[test]
        fn monotone_membership_and_wracc_bound(
            rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 4..50),
            labels in proptest::collection::vec(any::<bool>(), 50),
            mask in 1u32..64,
            extra in 0usize..6,
        ) {
            let labels = &labels[..rows.len()];
            if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
                return Ok(());
            }
            let bd = BinaryDataset::from_rows(&rows, names(6), labels).unwrap();
            let s = FeatureSubset(mask);
            let grown = s.with_feature(extra);
            let m1 = evaluate_subgroup(&bd, s);
            let m2 = evaluate_subgroup(&bd, grown);
            prop_assert!(m2.size <= m1.size);
            let p0 = bd.baseline_rate();
            prop_assert!(m1.wracc <= p0 * (1.0 - p0) + 1e-12);
        }
    }
}
