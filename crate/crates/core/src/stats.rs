//! Statistical validation: Fisher's exact test, label-permutation testing,
//! and rank correlation.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::conjunction_counts;
use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::subgroup::FeatureSubset;

/// Fisher's exact test result for a 2x2 table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FisherResult {
    /// (a*d)/(b*c); `None` when b*c = 0 or the table is degenerate.
    pub odds_ratio: Option<f64>,
    /// Two-sided exact p-value.
    pub p_value: f64,
}

/// Two-sided Fisher's exact test on the table [a, b, c, d] laid out as
/// rows (in-subgroup, outside) x columns (attack, normal).
///
/// The two-sided p sums the hypergeometric probabilities of every table,
/// with the observed margins, that is no more likely than the observed one.
/// For totals up to 64 the tail inclusion is decided in exact integer
/// arithmetic; larger tables use log-factorials with a small relative slack
/// on the comparison.
pub fn fisher_exact(table: [u64; 4]) -> FisherResult {
    let [a, b, c, d] = table;
    let n = a + b + c + d;
    let r1 = a + b;
    let c1 = a + c;
    let odds_ratio = if b * c == 0 {
        None
    } else {
        Some((a as f64 * d as f64) / (b as f64 * c as f64))
    };
    if n == 0 || r1 == 0 || r1 == n || c1 == 0 || c1 == n {
        // A zero row or column admits only one table.
        return FisherResult {
            odds_ratio: None,
            p_value: 1.0,
        };
    }
    let lo = c1.saturating_sub(n - r1);
    let hi = r1.min(c1);
    let p_value = if n <= 64 {
        exact_tail_sum(a, r1, c1, n, lo, hi)
    } else {
        log_tail_sum(a, r1, c1, n, lo, hi)
    };
    FisherResult {
        odds_ratio,
        p_value: p_value.min(1.0),
    }
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn exact_tail_sum(a: u64, r1: u64, c1: u64, n: u64, lo: u64, hi: u64) -> f64 {
    let weight = |k: u64| binomial_u128(r1, k) * binomial_u128(n - r1, c1 - k);
    let observed = weight(a);
    let mut included: u128 = 0;
    let mut total: u128 = 0;
    for k in lo..=hi {
        let w = weight(k);
        total += w;
        if w <= observed {
            included += w;
        }
    }
    included as f64 / total as f64
}

fn log_tail_sum(a: u64, r1: u64, c1: u64, n: u64, lo: u64, hi: u64) -> f64 {
    let lnfact = {
        let mut t = Vec::with_capacity(n as usize + 1);
        t.push(0.0f64);
        for i in 1..=n {
            t.push(t[i as usize - 1] + (i as f64).ln());
        }
        t
    };
    let ln_weight = |k: u64| -> f64 {
        let f = |x: u64| lnfact[x as usize];
        f(r1) - f(k) - f(r1 - k) + f(n - r1) - f(c1 - k) - f(n - r1 - (c1 - k))
    };
    let ln_obs = ln_weight(a);
    let mut ln_max = f64::NEG_INFINITY;
    for k in lo..=hi {
        ln_max = ln_max.max(ln_weight(k));
    }
    let mut included = 0.0;
    let mut total = 0.0;
    for k in lo..=hi {
        let lw = ln_weight(k);
        let w = (lw - ln_max).exp();
        total += w;
        if lw <= ln_obs + 1e-7 {
            included += w;
        }
    }
    included / total
}

/// Fisher's exact test of a subgroup's membership against the attack labels.
pub fn fisher_exact_subgroup(bd: &BinaryDataset, subset: FeatureSubset) -> Result<FisherResult> {
    let cols: Vec<&crate::bitset::RowSet> =
        subset.features().map(|i| &bd.columns()[i]).collect();
    let (size, hits) = conjunction_counts(&cols, bd.positives(), bd.n_rows());
    if size == 0 {
        return Err(Error::EmptySubgroup);
    }
    let positives = bd.positives().count_ones();
    let a = hits as u64;
    let b = (size - hits) as u64;
    let c = (positives - hits) as u64;
    let d = (bd.n_rows() - size - (positives - hits)) as u64;
    Ok(fisher_exact([a, b, c, d]))
}

/// Permutation test result.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PermutationResult {
    /// (#{permuted WRAcc >= observed} + 1) / (permutations + 1).
    pub p_value: f64,
    /// Standardized observed WRAcc against the null; `None` when the null
    /// distribution has zero spread.
    pub z_score: Option<f64>,
    /// Number of label permutations drawn.
    pub permutations: usize,
}

/// Label-permutation test of a subgroup's WRAcc: shuffle the attack labels,
/// recompute WRAcc with the subgroup membership fixed, and report the
/// add-one-smoothed fraction of permuted values reaching the observed one.
pub fn permutation_test(
    bd: &BinaryDataset,
    subset: FeatureSubset,
    permutations: usize,
    seed: u64,
) -> Result<PermutationResult> {
    if permutations == 0 {
        return Err(Error::InvalidConfig(alloc::string::String::from(
            "permutation test requires at least one permutation",
        )));
    }
    let cols: Vec<&crate::bitset::RowSet> =
        subset.features().map(|i| &bd.columns()[i]).collect();
    let n = bd.n_rows();
    let (size, hits) = conjunction_counts(&cols, bd.positives(), n);
    if size == 0 {
        return Err(Error::EmptySubgroup);
    }
    let coverage = size as f64 / n as f64;
    let p0 = bd.baseline_rate();
    let observed = coverage * (hits as f64 / size as f64 - p0).abs();

    // Membership is fixed; only the labels move.
    let members: Vec<u32> = {
        let mut members = Vec::with_capacity(size);
        let mut acc = crate::bitset::RowSet::full(n);
        for col in &cols {
            acc.and_assign(col);
        }
        members.extend(acc.iter_ones().map(|i| i as u32));
        members
    };
    let mut labels: Vec<bool> = (0..n).map(|i| bd.positives().get(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut null = Vec::with_capacity(permutations);
    let mut ge = 0usize;
    for _ in 0..permutations {
        labels.shuffle(&mut rng);
        let perm_hits = members.iter().filter(|&&i| labels[i as usize]).count();
        let w = coverage * (perm_hits as f64 / size as f64 - p0).abs();
        if w >= observed {
            ge += 1;
        }
        null.push(w);
    }
    let mean = null.iter().sum::<f64>() / permutations as f64;
    let z_score = if permutations < 2 {
        None
    } else {
        let var = null.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>()
            / (permutations - 1) as f64;
        let std = var.sqrt();
        if std > 0.0 {
            Some((observed - mean) / std)
        } else {
            None
        }
    };
    Ok(PermutationResult {
        p_value: (ge + 1) as f64 / (permutations + 1) as f64,
        z_score,
        permutations,
    })
}

/// Average ranks (1-based) with ties sharing the mean rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite values"));
    let mut out = alloc::vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; 0 when either input has no rank variance.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < 2 {
        return 0.0;
    }
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va.sqrt() * vb.sqrt())
}
