//! Least-squares QUBO surrogate of the negated WRAcc landscape, cardinality
//! penalty calibration, and QUBO-to-Ising conversion.
//!
//! The fitted quadratic has one unknown per feature (diagonal) and one per
//! feature pair (off-diagonal), V = n + n(n-1)/2 in total. A design row for
//! bitstring x carries x_i in the first n slots and 2*x_i*x_j for each pair
//! i < j; the target is -WRAcc(x), so QUBO minimization corresponds to WRAcc
//! maximization.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::stats::spearman;
use crate::subgroup::{evaluate_subgroup, FeatureSubset};

/// Exact enumeration limit for the fit and for calibration.
pub const EXACT_FIT_MAX_QUBITS: usize = 15;
/// Minimum cardinality penalty weight.
pub const PENALTY_FLOOR: f64 = 0.1;
/// Safety factor over the maximum needed penalty.
pub const PENALTY_SAFETY: f64 = 1.5;
/// Ridge damping added to the normal equations for rank-deficient samples.
const RIDGE: f64 = 1e-10;

/// Symmetric QUBO over n binary variables: energy(x) = x^T Q x + offset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuboModel {
    /// Variable count.
    pub n: usize,
    /// Row-major symmetric n*n matrix.
    q: Vec<f64>,
    /// Constant offset (collects the penalty constant).
    pub offset: f64,
}

impl QuboModel {
    /// All-zero QUBO.
    pub fn zero(n: usize) -> Self {
        QuboModel {
            n,
            q: vec![0.0; n * n],
            offset: 0.0,
        }
    }

    /// Entry Q[i][j].
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    /// Set Q[i][j] and Q[j][i].
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.q[i * self.n + j] = v;
        self.q[j * self.n + i] = v;
    }

    /// Add to Q[i][j] and, when off-diagonal, Q[j][i].
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        self.q[i * self.n + j] += v;
        if i != j {
            self.q[j * self.n + i] += v;
        }
    }

    /// Energy of a bitstring: sum_i Q_ii x_i + 2 sum_{i<j} Q_ij x_i x_j + offset.
    pub fn energy(&self, mask: u32) -> f64 {
        let mut e = self.offset;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            e += self.get(i, i);
            let mut rest = bits;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                e += 2.0 * self.get(i, j);
            }
        }
        e
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.q.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Model scaled so the largest absolute entry is 1 (identity for an
    /// all-zero matrix); the offset scales identically, preserving the
    /// argmin and every energy ordering.
    pub fn normalized(&self) -> QuboModel {
        let s = self.max_abs();
        if s == 0.0 {
            return self.clone();
        }
        QuboModel {
            n: self.n,
            q: self.q.iter().map(|v| v / s).collect(),
            offset: self.offset / s,
        }
    }

    /// Maximum absolute symmetry violation; zero for models built here.
    pub fn symmetry_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Regression fit quality over the fitted sample.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitQuality {
    /// Coefficient of determination (weighted when the fit is weighted).
    pub r_squared: f64,
    /// Spearman rank correlation between predicted and true targets.
    pub spearman_rho: f64,
}

/// Which bitstrings the exact fit regresses on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitSample {
    /// All 2^n bitstrings, equally weighted.
    All,
    /// All 2^n bitstrings with double weight at the target cardinality.
    WeightedTarget,
    /// Only bitstrings at the target cardinality.
    TargetOnly,
}

/// Fit a QUBO to explicit (bitstring, target) samples by weighted
/// least squares on the normal equations. Exposed so oracle tests can drive
/// the regression directly.
pub fn fit_qubo_from_samples(
    n: usize,
    masks: &[u32],
    targets: &[f64],
    weights: Option<&[f64]>,
) -> Result<(QuboModel, FitQuality)> {
    assert_eq!(masks.len(), targets.len());
    let v = n + n * (n - 1) / 2;
    if masks.len() < v {
        return Err(Error::Underdetermined {
            samples: masks.len(),
            unknowns: v,
        });
    }
    let pair_index = |i: usize, j: usize| n + i * (2 * n - i - 1) / 2 + (j - i - 1);

    // Sparse accumulation of G = A^T W A and rhs = A^T W t: a design row has
    // at most k + k(k-1)/2 nonzeros for a weight-k bitstring.
    let mut gram = vec![0.0f64; v * v];
    let mut rhs = vec![0.0f64; v];
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(v);
    for (s, (&mask, &t)) in masks.iter().zip(targets).enumerate() {
        let w = weights.map_or(1.0, |ws| ws[s]);
        row.clear();
        let subset = FeatureSubset(mask);
        for i in subset.features() {
            row.push((i, 1.0));
        }
        for i in subset.features() {
            for j in subset.features() {
                if i < j {
                    row.push((pair_index(i, j), 2.0));
                }
            }
        }
        for &(a, va) in &row {
            rhs[a] += w * va * t;
            for &(b, vb) in &row {
                gram[a * v + b] += w * va * vb;
            }
        }
    }
    for d in 0..v {
        gram[d * v + d] += RIDGE;
    }
    let beta = solve_dense(&mut gram, &mut rhs, v)?;

    let mut model = QuboModel::zero(n);
    for i in 0..n {
        model.set_sym(i, i, beta[i]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            model.set_sym(i, j, beta[pair_index(i, j)]);
        }
    }

    // Fit quality over the fitted sample.
    let predictions: Vec<f64> = masks.iter().map(|&m| model.energy(m)).collect();
    let w_total: f64 = (0..masks.len())
        .map(|s| weights.map_or(1.0, |ws| ws[s]))
        .sum();
    let t_mean: f64 = targets
        .iter()
        .enumerate()
        .map(|(s, t)| weights.map_or(1.0, |ws| ws[s]) * t)
        .sum::<f64>()
        / w_total;
    let mut rss = 0.0;
    let mut tss = 0.0;
    for s in 0..masks.len() {
        let w = weights.map_or(1.0, |ws| ws[s]);
        rss += w * (targets[s] - predictions[s]) * (targets[s] - predictions[s]);
        tss += w * (targets[s] - t_mean) * (targets[s] - t_mean);
    }
    let r_squared = if tss <= f64::MIN_POSITIVE {
        // Zero-variance target: define R^2 = 1 on a zero residual.
        if rss < 1e-12 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - rss / tss
    };
    let spearman_rho = spearman(&predictions, targets);
    Ok((model, FitQuality { r_squared, spearman_rho }))
}

/// Gaussian elimination with partial pivoting; consumes its inputs.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for r in (col + 1)..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Err(Error::Underdetermined {
                samples: n,
                unknowns: n,
            });
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
            }
            b.swap(pivot, col);
        }
        let diag = a[col * n + col];
        for r in (col + 1)..n {
            let factor = a[r * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for c in (col + 1)..n {
            acc -= a[col * n + c] * x[c];
        }
        x[col] = acc / a[col * n + col];
    }
    Ok(x)
}

fn negated_wracc_targets(bd: &BinaryDataset, masks: &[u32]) -> Vec<f64> {
    masks
        .iter()
        .map(|&m| -evaluate_subgroup(bd, FeatureSubset(m)).wracc)
        .collect()
}

/// Exact-mode fit: enumerate WRAcc for all 2^n bitstrings (n <= 15) and
/// regress per the configured sample mode.
pub fn fit_qubo_exact(
    bd: &BinaryDataset,
    k_target: u32,
    sample: FitSample,
) -> Result<(QuboModel, FitQuality)> {
    let n = bd.n_features();
    if n > EXACT_FIT_MAX_QUBITS {
        return Err(Error::ExactFitTooLarge {
            n,
            max: EXACT_FIT_MAX_QUBITS,
        });
    }
    let all: Vec<u32> = (0u32..(1u32 << n)).collect();
    let (masks, weights): (Vec<u32>, Option<Vec<f64>>) = match sample {
        FitSample::All => (all, None),
        FitSample::WeightedTarget => {
            let w = all
                .iter()
                .map(|m| if m.count_ones() == k_target { 2.0 } else { 1.0 })
                .collect();
            (all, Some(w))
        }
        FitSample::TargetOnly => (
            all.into_iter()
                .filter(|m| m.count_ones() == k_target)
                .collect(),
            None,
        ),
    };
    let targets = negated_wracc_targets(bd, &masks);
    fit_qubo_from_samples(n, &masks, &targets, weights.as_deref())
}

/// Surrogate-mode fit: draw `oversample * V` distinct bitstrings with
/// Hamming weights uniform over 1..=n and positions uniform at random, then
/// regress on the sample. Returns the sampled bitstrings for downstream
/// penalty calibration.
pub fn fit_qubo_surrogate(
    bd: &BinaryDataset,
    oversample: usize,
    seed: u64,
) -> Result<(QuboModel, FitQuality, Vec<u32>)> {
    let n = bd.n_features();
    let v = n + n * (n - 1) / 2;
    let m_goal = oversample.max(1) * v;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut masks = Vec::with_capacity(m_goal);
    let mut indices: Vec<usize> = (0..n).collect();
    let mut attempts = 0usize;
    while masks.len() < m_goal && attempts < 50 * m_goal {
        attempts += 1;
        let k = rng.random_range(1..=n);
        // Partial Fisher-Yates: the first k entries become the subset.
        for i in 0..k {
            let j = rng.random_range(i..n);
            indices.swap(i, j);
        }
        let mask = FeatureSubset::from_features(&indices[..k]).0;
        if seen.insert(mask) {
            masks.push(mask);
        }
    }
    if masks.len() < v {
        return Err(Error::Underdetermined {
            samples: masks.len(),
            unknowns: v,
        });
    }
    let targets = negated_wracc_targets(bd, &masks);
    let (model, quality) = fit_qubo_from_samples(n, &masks, &targets, None)?;
    Ok((model, quality, masks))
}

/// Calibrated cardinality penalty.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PenaltyCalibration {
    /// Penalty weight.
    pub lambda: f64,
    /// Target cardinality K.
    pub k_target: u32,
    /// Best objective energy found per cardinality during calibration.
    pub best_energy_per_k: Vec<(u32, f64)>,
    /// Cardinalities with no candidate bitstrings (surrogate mode only).
    pub excluded_k: Vec<u32>,
}

/// Core calibration rule, exposed for direct oracle testing: the minimal
/// lambda making the target-cardinality optimum favorable is, per competitor
/// cardinality k, the energy slack divided by the penalty gain (k-K)^2; the
/// final weight is 1.5x the worst case with a floor of 0.1.
pub fn calibration_from_energies(best_per_k: &[(u32, f64)], k_target: u32) -> PenaltyCalibration {
    let e_target = best_per_k
        .iter()
        .find(|(k, _)| *k == k_target)
        .map(|(_, e)| *e)
        .expect("target cardinality present in calibration energies");
    let mut needed = 0.0f64;
    for &(k, e) in best_per_k {
        if k == k_target {
            continue;
        }
        let gap = (k as f64 - k_target as f64) * (k as f64 - k_target as f64);
        needed = needed.max((e_target - e) / gap);
    }
    PenaltyCalibration {
        lambda: (PENALTY_SAFETY * needed).max(PENALTY_FLOOR),
        k_target,
        best_energy_per_k: best_per_k.to_vec(),
        excluded_k: Vec::new(),
    }
}

/// Calibrate the penalty weight for a pre-normalized objective QUBO.
///
/// With `candidates = None` the best energy per cardinality is found by full
/// enumeration (requires n <= 15); otherwise the provided bitstrings (for
/// example the surrogate fit sample) are used, and cardinalities with no
/// candidates are recorded as excluded.
pub fn calibrate_penalty(
    q: &QuboModel,
    k_target: u32,
    candidates: Option<&[u32]>,
) -> Result<PenaltyCalibration> {
    let n = q.n;
    let mut best: BTreeMap<u32, f64> = BTreeMap::new();
    match candidates {
        None => {
            if n > EXACT_FIT_MAX_QUBITS {
                return Err(Error::InvalidConfig(String::from(
                    "penalty calibration by enumeration requires n <= 15; pass sampled candidates",
                )));
            }
            for mask in 0u32..(1u32 << n) {
                let e = q.energy(mask);
                let k = mask.count_ones();
                best.entry(k)
                    .and_modify(|cur| *cur = cur.min(e))
                    .or_insert(e);
            }
        }
        Some(masks) => {
            for &mask in masks {
                let e = q.energy(mask);
                let k = mask.count_ones();
                best.entry(k)
                    .and_modify(|cur| *cur = cur.min(e))
                    .or_insert(e);
            }
        }
    }
    if !best.contains_key(&k_target) {
        return Err(Error::InvalidConfig(alloc::format!(
            "no calibration candidates at target cardinality {k_target}"
        )));
    }
    let pairs: Vec<(u32, f64)> = best.iter().map(|(&k, &e)| (k, e)).collect();
    let mut cal = calibration_from_energies(&pairs, k_target);
    cal.excluded_k = (0..=n as u32).filter(|k| !best.contains_key(k)).collect();
    Ok(cal)
}

/// Add the calibrated cardinality penalty lambda*(sum x - K)^2 and apply the
/// final normalization. Expanding the square with x_i^2 = x_i contributes
/// lambda*(1-2K) to each diagonal, 2*lambda to each off-diagonal pair, and
/// lambda*K^2 to the offset. In free-cardinality mode the model is returned
/// unchanged.
pub fn add_penalty(
    q: &QuboModel,
    cal: &PenaltyCalibration,
    free_cardinality: bool,
) -> QuboModel {
    if free_cardinality {
        return q.clone();
    }
    let mut out = q.clone();
    let lambda = cal.lambda;
    let k = cal.k_target as f64;
    for i in 0..out.n {
        out.add_sym(i, i, lambda * (1.0 - 2.0 * k));
        for j in (i + 1)..out.n {
            out.add_sym(i, j, lambda);
        }
    }
    out.offset += lambda * k * k;
    out.normalized()
}

/// Ising form of a QUBO: local fields, upper-triangular couplings, constant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsingModel {
    /// Spin count.
    pub n: usize,
    /// Local fields h_i.
    pub h: Vec<f64>,
    /// Couplings J_ij for i < j, row-major upper triangle.
    j: Vec<f64>,
    /// Constant offset; does not affect the ground state.
    pub c: f64,
}

impl IsingModel {
    fn pair_slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Coupling J_ij (i < j).
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.j[self.pair_slot(i, j)]
    }

    /// Nonzero structure as (i, j, J_ij) triples over i < j.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).map(move |j| (i, j, self.coupling(i, j)))
        })
    }

    /// Energy of the spin assignment induced by bitstring `mask` via
    /// z_i = 1 - 2*x_i.
    pub fn energy(&self, mask: u32) -> f64 {
        let z = |i: usize| if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = self.c;
        for i in 0..self.n {
            e += self.h[i] * z(i);
            for j in (i + 1)..self.n {
                e += self.coupling(i, j) * z(i) * z(j);
            }
        }
        e
    }
}

/// Convert a QUBO to Ising form via x_i = (1 - z_i)/2 and verify the two
/// representations agree on all-zeros, all-ones, and at least 100 random
/// bitstrings (all bitstrings for small n) to within 1e-9.
pub fn qubo_to_ising(q: &QuboModel) -> Result<IsingModel> {
    let n = q.n;
    let mut h = vec![0.0f64; n];
    let mut j = vec![0.0f64; n * (n - 1) / 2];
    let mut row_sum_total = 0.0;
    let mut trace = 0.0;
    for i in 0..n {
        let mut row_sum = 0.0;
        for col in 0..n {
            row_sum += q.get(i, col);
        }
        h[i] = -row_sum / 2.0;
        row_sum_total += row_sum;
        trace += q.get(i, i);
    }
    let mut slot = 0;
    for i in 0..n {
        for col in (i + 1)..n {
            j[slot] = q.get(i, col) / 2.0;
            slot += 1;
        }
    }
    let ising = IsingModel {
        n,
        h,
        j,
        c: (row_sum_total + trace) / 4.0 + q.offset,
    };

    let check = |mask: u32| -> Result<()> {
        let eq = q.energy(mask);
        let ei = ising.energy(mask);
        if (eq - ei).abs() > 1e-9 * eq.abs().max(1.0) {
            return Err(Error::IsingConsistency {
                mask,
                qubo: eq,
                ising: ei,
            });
        }
        Ok(())
    };
    if n <= 7 {
        for mask in 0u32..(1u32 << n) {
            check(mask)?;
        }
    } else {
        check(0)?;
        check(if n == 32 { u32::MAX } else { (1u32 << n) - 1 })?;
        let mut state = 0x9E3779B97F4A7C15u64;
        for _ in 0..100 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            check((state as u32) & if n == 32 { u32::MAX } else { (1u32 << n) - 1 })?;
        }
    }
    Ok(ising)
}
