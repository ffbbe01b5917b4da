//! Classical baselines: exhaustive enumeration (ground truth) and beam
//! search, plus beam-recall reporting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::subgroup::{evaluate_subgroup, FeatureSubset, SubgroupMetrics};

/// Default cap on combinations enumerated per cardinality.
pub const DEFAULT_ENUMERATION_CAP: u64 = 50_000;
/// Exhaustive search never goes deeper than this cardinality.
pub const MAX_EXHAUSTIVE_CARDINALITY: u32 = 8;

/// Beam search configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeamConfig {
    /// Seeds retained per depth.
    pub width: usize,
    /// Maximum conjunction length explored.
    pub max_depth: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            width: 10,
            max_depth: 10,
        }
    }
}

/// One scored subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchEntry {
    /// The conjunction rule.
    pub subset: FeatureSubset,
    /// Training metrics.
    pub metrics: SubgroupMetrics,
}

/// Deduplicated subgroups sorted by WRAcc descending (ties by mask value),
/// with per-cardinality bests.
#[derive(Debug, Clone, Default)]
pub struct SearchResult {
    /// All discovered subgroups, sorted.
    pub entries: Vec<SearchEntry>,
    /// Best entry per cardinality.
    pub best_per_cardinality: BTreeMap<u32, SearchEntry>,
    /// Cardinalities skipped because their combination count exceeded the cap.
    pub skipped_cardinalities: Vec<u32>,
}

impl SearchResult {
    fn from_entries(mut entries: Vec<SearchEntry>, skipped: Vec<u32>) -> Self {
        entries.sort_by(|a, b| {
            b.metrics
                .wracc
                .partial_cmp(&a.metrics.wracc)
                .expect("finite wracc")
                .then_with(|| a.subset.0.cmp(&b.subset.0))
        });
        let mut best: BTreeMap<u32, SearchEntry> = BTreeMap::new();
        for e in &entries {
            best.entry(e.subset.cardinality()).or_insert_with(|| e.clone());
        }
        SearchResult {
            entries,
            best_per_cardinality: best,
            skipped_cardinalities: skipped,
        }
    }

    /// Best WRAcc across every discovered subgroup.
    pub fn best(&self) -> Option<&SearchEntry> {
        self.entries.first()
    }

    /// Entries of one cardinality, in sorted order.
    pub fn at_cardinality(&self, k: u32) -> impl Iterator<Item = &SearchEntry> {
        self.entries.iter().filter(move |e| e.subset.cardinality() == k)
    }

    /// Whether a mask was discovered.
    pub fn contains(&self, s: FeatureSubset) -> bool {
        self.entries.iter().any(|e| e.subset == s)
    }
}

/// C(n, k) with saturation; sufficient for the cap comparison.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Iterate all n-bit masks of popcount k in ascending numeric order
/// (Gosper's hack).
fn masks_of_cardinality(n: u32, k: u32) -> impl Iterator<Item = u32> {
    let limit = 1u64 << n;
    let mut current: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut done = k > n;
    core::iter::from_fn(move || {
        if done || current >= limit {
            return None;
        }
        let out = current as u32;
        if k == 0 {
            done = true;
            return Some(out);
        }
        let c = current & current.wrapping_neg();
        let r = current + c;
        current = (((r ^ current) >> 2) / c) | r;
        Some(out)
    })
}

/// Enumerate every feature subset of cardinality 1..=min(8, n, k_max),
/// skipping (with a record) any cardinality whose C(n, k) exceeds `cap`.
pub fn exhaustive_enumerate(bd: &BinaryDataset, k_max: u32, cap: u64) -> SearchResult {
    let n = bd.n_features() as u32;
    let k_hi = MAX_EXHAUSTIVE_CARDINALITY.min(n).min(k_max);
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for k in 1..=k_hi {
        if binomial(n as u64, k as u64) > cap {
            skipped.push(k);
            continue;
        }
        for mask in masks_of_cardinality(n, k) {
            let subset = FeatureSubset(mask);
            entries.push(SearchEntry {
                subset,
                metrics: evaluate_subgroup(bd, subset),
            });
        }
    }
    SearchResult::from_entries(entries, skipped)
}

/// Level-wise beam search. Depth-1 candidates are all single features; each
/// depth extends every seed by one unused feature, the candidate pool is
/// deduplicated after the full inner loop, and only the top `width` by WRAcc
/// (ties toward the smaller mask) seed the next depth. Subgroups discovered
/// at every depth are all retained in the result.
pub fn beam_search(bd: &BinaryDataset, cfg: BeamConfig) -> SearchResult {
    let n = bd.n_features();
    let mut all: BTreeMap<FeatureSubset, SubgroupMetrics> = BTreeMap::new();
    let mut seeds: Vec<FeatureSubset> = Vec::new();

    for depth in 1..=cfg.max_depth {
        let mut pool: BTreeSet<FeatureSubset> = BTreeSet::new();
        if depth == 1 {
            for f in 0..n {
                pool.insert(FeatureSubset::EMPTY.with_feature(f));
            }
        } else {
            for seed in &seeds {
                for f in 0..n {
                    if !seed.contains(f) {
                        pool.insert(seed.with_feature(f));
                    }
                }
            }
        }
        if pool.is_empty() {
            break;
        }
        let mut scored: Vec<SearchEntry> = pool
            .into_iter()
            .map(|subset| SearchEntry {
                subset,
                metrics: evaluate_subgroup(bd, subset),
            })
            .collect();
        scored.sort_by(|a, b| {
            b.metrics
                .wracc
                .partial_cmp(&a.metrics.wracc)
                .expect("finite wracc")
                .then_with(|| a.subset.0.cmp(&b.subset.0))
        });
        seeds = scored
            .iter()
            .take(cfg.width)
            .map(|e| e.subset)
            .collect();
        for e in scored {
            all.insert(e.subset, e.metrics);
        }
    }

    SearchResult::from_entries(
        all.into_iter()
            .map(|(subset, metrics)| SearchEntry { subset, metrics })
            .collect(),
        Vec::new(),
    )
}

/// How many of the exhaustive top-`top` subgroups at cardinality `k` the
/// beam search also discovered.
pub fn beam_recall(
    exhaustive: &SearchResult,
    beam: &SearchResult,
    k: u32,
    top: usize,
) -> Result<usize> {
    if exhaustive.skipped_cardinalities.contains(&k)
        || !exhaustive.entries.iter().any(|e| e.subset.cardinality() == k)
    {
        return Err(Error::CardinalityUnavailable { k });
    }
    let beam_masks: BTreeSet<FeatureSubset> = beam.entries.iter().map(|e| e.subset).collect();
    Ok(exhaustive
        .at_cardinality(k)
        .take(top)
        .filter(|e| beam_masks.contains(&e.subset))
        .count())
}
