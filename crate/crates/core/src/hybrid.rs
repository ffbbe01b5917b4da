//! Two-tier hybrid intrusion detection evaluation: subgroup rules as a
//! deterministic first tier, a pluggable classifier as the second.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::bitset::RowSet;
use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::subgroup::FeatureSubset;

/// Where a rule came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RuleSource {
    /// Beam-search result.
    Classical,
    /// QAOA-sampled result.
    Quantum,
    /// Found by both searches.
    Both,
}

/// A deduplicated set of tier-1 rules with source tags.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    rules: Vec<(FeatureSubset, RuleSource)>,
}

impl RuleSet {
    /// Merge classical and quantum rule lists; masks present in both are
    /// tagged `Both`.
    pub fn from_parts(classical: &[FeatureSubset], quantum: &[FeatureSubset]) -> Self {
        let mut rules: Vec<(FeatureSubset, RuleSource)> = Vec::new();
        for &s in classical {
            if !rules.iter().any(|(m, _)| *m == s) {
                rules.push((s, RuleSource::Classical));
            }
        }
        for &s in quantum {
            if let Some(entry) = rules.iter_mut().find(|(m, _)| *m == s) {
                entry.1 = RuleSource::Both;
            } else {
                rules.push((s, RuleSource::Quantum));
            }
        }
        RuleSet { rules }
    }

    /// Rules with their source tags.
    pub fn rules(&self) -> &[(FeatureSubset, RuleSource)] {
        &self.rules
    }

    /// Rule count.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// True when no rules are present.
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Apply tier-1 rules: a record is flagged iff it satisfies at least one
/// rule. Returns the flagged set and the tier-1 precision (attacks among
/// flagged; `None` when nothing was flagged).
pub fn tier1_apply(rules: &RuleSet, test: &BinaryDataset) -> (RowSet, Option<f64>) {
    let n = test.n_rows();
    let mut flagged = RowSet::new(n);
    for &(subset, _) in &rules.rules {
        let mut membership = RowSet::full(n);
        for f in subset.features() {
            membership.and_assign(&test.columns()[f]);
        }
        if subset.cardinality() > 0 {
            flagged.or_assign(&membership);
        }
    }
    let count = flagged.count_ones();
    let precision = if count == 0 {
        None
    } else {
        Some(flagged.and_count(test.positives()) as f64 / count as f64)
    };
    (flagged, precision)
}

/// Independent per-feature likelihood classifier over binarized features
/// with additive smoothing of 1, thresholded at posterior 0.5. Deterministic
/// and deliberately simple; any probabilistic classifier over a
/// `BinaryDataset` can stand in for it behind [`TierTwoClassifier`].
#[derive(Debug, Clone)]
pub struct ReferenceClassifier {
    log_prior_pos: f64,
    log_prior_neg: f64,
    // Per feature: log P(bit=v | class), smoothed.
    log_one_pos: Vec<f64>,
    log_one_neg: Vec<f64>,
    log_zero_pos: Vec<f64>,
    log_zero_neg: Vec<f64>,
}

/// Tier-2 contract: score each record of a binarized dataset as attack or
/// normal.
pub trait TierTwoClassifier {
    /// Predicted-positive row set over `data`.
    fn predict(&self, data: &BinaryDataset) -> RowSet;
}

/// Train the reference tier-2 classifier.
pub fn train_reference_classifier(train: &BinaryDataset) -> Result<ReferenceClassifier> {
    let n = train.n_rows();
    let pos = train.positives().count_ones();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut log_one_pos = Vec::with_capacity(train.n_features());
    let mut log_one_neg = Vec::with_capacity(train.n_features());
    let mut log_zero_pos = Vec::with_capacity(train.n_features());
    let mut log_zero_neg = Vec::with_capacity(train.n_features());
    for col in train.columns() {
        let one_pos = col.and_count(train.positives());
        let one_neg = col.count_ones() - one_pos;
        // Additive smoothing keeps unseen feature values at finite likelihood.
        log_one_pos.push(((one_pos + 1) as f64 / (pos + 2) as f64).ln());
        log_one_neg.push(((one_neg + 1) as f64 / (neg + 2) as f64).ln());
        log_zero_pos.push(((pos - one_pos + 1) as f64 / (pos + 2) as f64).ln());
        log_zero_neg.push(((neg - one_neg + 1) as f64 / (neg + 2) as f64).ln());
    }
    Ok(ReferenceClassifier {
        log_prior_pos: (pos as f64 / n as f64).ln(),
        log_prior_neg: (neg as f64 / n as f64).ln(),
        log_one_pos,
        log_one_neg,
        log_zero_pos,
        log_zero_neg,
    })
}

impl TierTwoClassifier for ReferenceClassifier {
    fn predict(&self, data: &BinaryDataset) -> RowSet {
        let n = data.n_rows();
        let mut out = RowSet::new(n);
        for i in 0..n {
            let mut score_pos = self.log_prior_pos;
            let mut score_neg = self.log_prior_neg;
            for (f, col) in data.columns().iter().enumerate() {
                if col.get(i) {
                    score_pos += self.log_one_pos[f];
                    score_neg += self.log_one_neg[f];
                } else {
                    score_pos += self.log_zero_pos[f];
                    score_neg += self.log_zero_neg[f];
                }
            }
            if score_pos > score_neg {
                out.set(i);
            }
        }
        out
    }
}

/// Precision/recall/F1 trio for one prediction set.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TierMetrics {
    /// Recall on attacks.
    pub detection_rate: f64,
    /// Harmonic mean of precision and recall (0 when both vanish).
    pub f1: f64,
    /// Precision; `None` when nothing was predicted positive.
    pub precision: Option<f64>,
}

fn prediction_metrics(predicted: &RowSet, actual: &RowSet) -> TierMetrics {
    let tp = predicted.and_count(actual);
    let fp = predicted.count_ones() - tp;
    let pos = actual.count_ones();
    let detection_rate = if pos == 0 { 0.0 } else { tp as f64 / pos as f64 };
    let precision = if tp + fp == 0 {
        None
    } else {
        Some(tp as f64 / (tp + fp) as f64)
    };
    let f1 = match precision {
        Some(p) if p + detection_rate > 0.0 => 2.0 * p * detection_rate / (p + detection_rate),
        _ => 0.0,
    };
    TierMetrics {
        detection_rate,
        f1,
        precision,
    }
}

/// Two-tier evaluation report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TierReport {
    /// Recall of the combined prediction on attacks.
    pub detection_rate: f64,
    /// F1 of the combined prediction.
    pub f1: f64,
    /// Precision of tier-1 flags alone; `None` when nothing was flagged.
    pub tier1_precision: Option<f64>,
    /// Records flagged by tier 1.
    pub tier1_flagged: usize,
    /// Metrics of tier 2 on the records tier 1 passed through.
    pub tier2: TierMetrics,
}

/// Evaluate the hybrid: tier-1 flags are final; pass-through records go to
/// the classifier; the combined prediction is their union.
pub fn evaluate_hybrid<C: TierTwoClassifier>(
    rules: &RuleSet,
    classifier: &C,
    test: &BinaryDataset,
) -> TierReport {
    let (flagged, tier1_precision) = tier1_apply(rules, test);
    let clf_positive = classifier.predict(test);

    // Tier-2 metrics are scoped to the pass-through records.
    let pass_through = flagged.complement();
    let mut tier2_pred = clf_positive.clone();
    tier2_pred.and_assign(&pass_through);
    let mut tier2_actual = test.positives().clone();
    tier2_actual.and_assign(&pass_through);
    let tier2 = prediction_metrics(&tier2_pred, &tier2_actual);

    let mut combined = flagged.clone();
    combined.or_assign(&tier2_pred);
    let overall = prediction_metrics(&combined, test.positives());

    TierReport {
        detection_rate: overall.detection_rate,
        f1: overall.f1,
        tier1_precision,
        tier1_flagged: flagged.count_ones(),
        tier2,
    }
}
