//! Turn QAOA samples into scored subgroups: top-N decoding, the dual
//! approximation ratios, QAOA-unique identification, and held-out
//! generalization.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::binarize::{apply_binarization, BinarizationModel, Side};
use crate::dataset::{BinaryDataset, EncodedDataset};
use crate::error::{Error, Result};
use crate::qaoa::QaoaRun;
use crate::search::SearchResult;
use crate::subgroup::{evaluate_subgroup, FeatureSubset, SubgroupMetrics};

/// Decode the `n_top` most probable bitstrings of the exact distribution
/// into feature subsets. Probability ties break toward the smaller
/// bitstring; zero-probability states never appear.
pub fn decode_top_n(run: &QaoaRun, n_top: usize) -> Vec<(FeatureSubset, f64)> {
    let mut order: Vec<(u32, f64)> = run
        .probabilities
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(mask, &p)| (mask as u32, p))
        .collect();
    order.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite probability")
            .then_with(|| a.0.cmp(&b.0))
    });
    order
        .into_iter()
        .take(n_top)
        .map(|(mask, p)| (FeatureSubset(mask), p))
        .collect()
}

/// Feature subsets present in the shot sample (count > 0).
pub fn sampled_subsets(run: &QaoaRun) -> Vec<FeatureSubset> {
    run.samples.support().map(FeatureSubset).collect()
}

/// Energy approximation ratio r_E = E_best_sampled / E_ground.
///
/// The numerator is the lowest Ising energy among the sampled bitstrings;
/// the denominator is the exact ground energy over all 2^n. `None` when the
/// ground energy is zero.
pub fn energy_ratio(run: &QaoaRun, energies: &[f64]) -> (Option<f64>, f64, f64) {
    let e_ground = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let e_best = run
        .samples
        .support()
        .map(|mask| energies[mask as usize])
        .fold(f64::INFINITY, f64::min);
    let ratio = if e_ground == 0.0 {
        None
    } else {
        Some(e_best / e_ground)
    };
    (ratio, e_best, e_ground)
}

/// WRAcc approximation ratio r_W.
///
/// The numerator is the best WRAcc among `samples` at the target cardinality
/// (any cardinality in free mode); the denominator is the exhaustive optimum
/// at the target cardinality (the global optimum in free mode). A missing
/// sample at the target cardinality yields 0; a zero denominator yields
/// `None`.
pub fn wracc_ratio(
    samples: &[FeatureSubset],
    bd: &BinaryDataset,
    k_target: u32,
    exhaustive: &SearchResult,
    free_cardinality: bool,
) -> Result<(Option<f64>, f64, f64)> {
    let denominator_entry = if free_cardinality {
        exhaustive.best()
    } else {
        exhaustive.best_per_cardinality.get(&k_target)
    };
    let wracc_star = denominator_entry
        .map(|e| e.metrics.wracc)
        .ok_or(Error::CardinalityUnavailable { k: k_target })?;
    let best = samples
        .iter()
        .filter(|s| free_cardinality || s.cardinality() == k_target)
        .map(|&s| evaluate_subgroup(bd, s).wracc)
        .fold(f64::NEG_INFINITY, f64::max);
    let wracc_best = if best.is_finite() { best } else { 0.0 };
    let ratio = if wracc_star == 0.0 {
        None
    } else {
        Some(wracc_best / wracc_star)
    };
    Ok((ratio, wracc_best, wracc_star))
}

/// Both approximation ratios with their raw ingredients.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ApproximationRatios {
    /// Energy ratio; `None` when the ground energy is zero.
    pub r_e: Option<f64>,
    /// WRAcc ratio; `None` when the exhaustive optimum is zero.
    pub r_w: Option<f64>,
    /// Lowest sampled Ising energy.
    pub e_qaoa_best: f64,
    /// Exact ground energy.
    pub e_ground: f64,
    /// Best sampled WRAcc at the target cardinality (or any, in free mode).
    pub wracc_best_at_k: f64,
    /// Exhaustive optimum used as the denominator.
    pub wracc_star: f64,
    /// Whether free-cardinality scoring was used.
    pub free_cardinality: bool,
}

/// Compute r_E and r_W for one depth run.
pub fn approximation_ratios(
    run: &QaoaRun,
    energies: &[f64],
    bd: &BinaryDataset,
    k_target: u32,
    exhaustive: &SearchResult,
    free_cardinality: bool,
) -> Result<ApproximationRatios> {
    let (r_e, e_qaoa_best, e_ground) = energy_ratio(run, energies);
    let samples = sampled_subsets(run);
    let (r_w, wracc_best_at_k, wracc_star) =
        wracc_ratio(&samples, bd, k_target, exhaustive, free_cardinality)?;
    Ok(ApproximationRatios {
        r_e,
        r_w,
        e_qaoa_best,
        e_ground,
        wracc_best_at_k,
        wracc_star,
        free_cardinality,
    })
}

/// Subsets present in the QAOA samples but absent from the beam results,
/// by exact mask equality.
pub fn qaoa_unique(samples: &[FeatureSubset], beam: &SearchResult) -> Vec<FeatureSubset> {
    let beam_masks: BTreeSet<FeatureSubset> = beam.entries.iter().map(|e| e.subset).collect();
    let mut seen = BTreeSet::new();
    samples
        .iter()
        .filter(|s| !beam_masks.contains(s) && seen.insert(**s))
        .copied()
        .collect()
}

/// Evaluate subgroups on held-out data binarized with the train-fitted
/// model. `selected_names` maps mask bits to encoded column names; a name
/// missing from the test encoding is an error.
pub fn test_generalization(
    subsets: &[FeatureSubset],
    model: &BinarizationModel,
    test: &EncodedDataset,
    selected_names: &[String],
    side: Side,
) -> Result<Vec<SubgroupMetrics>> {
    let test_bits = apply_binarization(model, test, side)?;
    let indices: Vec<usize> = selected_names
        .iter()
        .map(|name| {
            test_bits
                .feature_names()
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| {
                    Error::ColumnMismatch(alloc::format!(
                        "feature '{name}' missing from test encoding"
                    ))
                })
        })
        .collect::<Result<_>>()?;
    let restricted = test_bits.restrict(&indices);
    Ok(subsets
        .iter()
        .map(|&s| evaluate_subgroup(&restricted, s))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qaoa::{QaoaParams, SampledCounts};
    use crate::search::{exhaustive_enumerate, SearchEntry};
    use alloc::string::ToString;
    use alloc::vec;

    fn fabricated_run(probs: Vec<f64>, counts: Vec<(u32, u64)>) -> QaoaRun {
        let shots = counts.iter().map(|&(_, c)| c).sum();
        QaoaRun {
            depth: 1,
            params: QaoaParams {
                gammas: vec![0.1],
                betas: vec![0.2],
            },
            expectation: 0.0,
            start_expectation: 0.0,
            restarts_tried: 1,
            probabilities: probs,
            samples: SampledCounts { counts, shots },
        }
    }

    #[test]
    fn decode_truncation_and_ties() {
        // Three support points with n_top=50: all three come back.
        let run = fabricated_run(vec![0.5, 0.0, 0.3, 0.2], vec![(0, 5)]);
        let out = decode_top_n(&run, 50);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].0, FeatureSubset(0));
        // Uniform: ties break toward lexicographically smaller bitstrings.
        let run = fabricated_run(vec![0.125; 8], vec![(0, 1)]);
        let out = decode_top_n(&run, 4);
        let masks: Vec<u32> = out.iter().map(|(s, _)| s.0).collect();
        assert_eq!(masks, vec![0, 1, 2, 3]);
    }

    #[test]
    fn energy_ratio_cases() {
        let energies = vec![0.5, -0.25, -1.0, 0.75];
        // Ground state sampled: r_E = 1.
        let run = fabricated_run(vec![0.25; 4], vec![(2, 10)]);
        let (r, best, ground) = energy_ratio(&run, &energies);
        assert_eq!(r, Some(1.0));
        assert_eq!(best, -1.0);
        assert_eq!(ground, -1.0);
        // Missed ground state with a positive best: ratio is negative.
        let run = fabricated_run(vec![0.25; 4], vec![(0, 3), (3, 7)]);
        let (r, best, _) = energy_ratio(&run, &energies);
        assert_eq!(best, 0.5);
        assert_eq!(r, Some(-0.5));
        // Simple arithmetic: -0.5 / -1.0.
        let run = fabricated_run(vec![0.25; 4], vec![(1, 1)]);
        let half = energy_ratio(&run, &[0.0, -0.5, -1.0, 0.0]);
        assert_eq!(half.0, Some(0.5));
        // Zero ground energy is reported as undefined.
        let run = fabricated_run(vec![0.25; 4], vec![(0, 1)]);
        let zero = energy_ratio(&run, &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(zero.0, None);
    }

    fn planted_dataset() -> BinaryDataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..240 {
            let attack = i % 4 == 0;
            rows.push(vec![
                attack || i % 7 == 0,
                attack || i % 5 == 0,
                i % 3 == 0,
            ]);
            labels.push(attack);
        }
        BinaryDataset::from_rows(
            &rows,
            vec!["a".to_string(), "b".to_string(), "c".to_string()],
            &labels,
        )
        .unwrap()
    }

    #[test]
    fn wracc_ratio_restricted_and_free() {
        let bd = planted_dataset();
        let exh = exhaustive_enumerate(&bd, 3, 50_000);
        let best2 = exh.best_per_cardinality[&2].subset;
        // Samples containing the exhaustive optimum: r_W = 1.
        let samples = vec![best2, FeatureSubset(0b100)];
        let (r, _, star) = wracc_ratio(&samples, &bd, 2, &exh, false).unwrap();
        assert_eq!(r, Some(1.0));
        assert!(star > 0.0);
        // No sample at the target cardinality: numerator 0.
        let samples = vec![FeatureSubset(0b001)];
        let (r, best, _) = wracc_ratio(&samples, &bd, 2, &exh, false).unwrap();
        assert_eq!(best, 0.0);
        assert_eq!(r, Some(0.0));
        // Free mode scores any cardinality against the global optimum.
        let global = exh.best().unwrap().subset;
        let (r, _, _) = wracc_ratio(&[global], &bd, 2, &exh, true).unwrap();
        assert_eq!(r, Some(1.0));
        // Restricted-mode ratio never exceeds 1.
        for mask in 1u32..8 {
            let (r, _, _) = wracc_ratio(&[FeatureSubset(mask)], &bd, 2, &exh, false).unwrap();
            if let Some(r) = r {
                assert!(r <= 1.0 + 1e-12);
            }
        }
        // Hardware-row arithmetic: 0.101770 / 0.103515.
        let manual = 0.101770 / 0.103515;
        assert!((manual - 0.98314).abs() < 1e-4);
    }

    #[test]
    fn qaoa_unique_set_difference() {
        let bd = planted_dataset();
        let exh = exhaustive_enumerate(&bd, 3, 50_000);
        // Beam superset of the samples: nothing unique.
        let samples: Vec<FeatureSubset> = exh.entries.iter().take(3).map(|e| e.subset).collect();
        assert!(qaoa_unique(&samples, &exh).is_empty());
        // Disjoint: everything is unique (deduplicated).
        let beam = SearchResult {
            entries: vec![SearchEntry {
                subset: FeatureSubset(0b111),
                metrics: evaluate_subgroup(&bd, FeatureSubset(0b111)),
            }],
            best_per_cardinality: Default::default(),
            skipped_cardinalities: vec![],
        };
        let samples = vec![FeatureSubset(1), FeatureSubset(2), FeatureSubset(1)];
        let unique = qaoa_unique(&samples, &beam);
        assert_eq!(unique, vec![FeatureSubset(1), FeatureSubset(2)]);
    }

    #[test]
    fn generalization_uses_stored_model() {
        use crate::binarize::{fit_binarization, ThresholdStrategy};
        use crate::dataset::AttackCategory;
        // Train and test share columns; the train-fitted thresholds carry over.
        let train = EncodedDataset {
            columns: vec![vec![0.0, 1.0, 4.0, 5.0, 9.0, 10.0]],
            column_names: vec!["m".to_string()],
            labels: vec![false, false, false, true, true, true],
            categories: vec![AttackCategory::Normal; 6],
        };
        let test = EncodedDataset {
            columns: vec![vec![0.5, 8.0, 9.5]],
            column_names: vec!["m".to_string()],
            labels: vec![false, true, false],
            categories: vec![AttackCategory::Normal; 3],
        };
        let model = fit_binarization(&train, ThresholdStrategy::EntropyOptimal, true).unwrap();
        let subsets = [FeatureSubset(1)];
        let metrics =
            test_generalization(&subsets, &model, &test, &["m".to_string()], Side::Both).unwrap();
        assert_eq!(metrics[0].size, 2);
        assert_eq!(metrics[0].positive_rate, Some(0.5));
        // A missing feature name is an error.
        assert!(test_generalization(
            &subsets,
            &model,
            &test,
            &["absent".to_string()],
            Side::Both
        )
        .is_err());
        // Subgroups matching nothing have sentinel metrics.
        let none = test_generalization(
            &[FeatureSubset(1)],
            &model,
            &EncodedDataset {
                columns: vec![vec![-5.0, -6.0]],
                column_names: vec!["m".to_string()],
                labels: vec![true, false],
                categories: vec![AttackCategory::Normal; 2],
            },
            &["m".to_string()],
            Side::Both,
        )
        .unwrap();
        assert_eq!(none[0].size, 0);
        assert_eq!(none[0].positive_rate, None);
        assert_eq!(none[0].wracc, 0.0);
    }
}
