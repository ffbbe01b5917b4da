//! Exact statevector simulation of depth-p QAOA for diagonal cost
//! Hamiltonians, the multi-start variational loop with warm starting, and
//! final shot sampling.
//!
//! Basis-state index bit i corresponds to variable x_i (little-endian). The
//! cost layer multiplies each amplitude by exp(-i*gamma*E(x)); the mixer
//! applies the single-qubit rotation exp(-i*beta*X) to every qubit.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optim::nelder_mead;
use crate::qubo::IsingModel;

/// Default qubit cap for the dense simulator.
pub const DEFAULT_MAX_QUBITS: usize = 24;
/// Default optimizer restarts per depth.
pub const DEFAULT_RESTARTS: usize = 5;
/// Default function-evaluation budget per restart.
pub const DEFAULT_MAX_ITERS: usize = 100;
/// Default number of measurement shots.
pub const DEFAULT_SHOTS: u64 = 100_000;

/// Variational angles for a depth-p circuit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QaoaParams {
    /// Cost-layer angles, one per layer.
    pub gammas: Vec<f64>,
    /// Mixer-layer angles, one per layer.
    pub betas: Vec<f64>,
}

impl QaoaParams {
    /// Layer count p.
    pub fn depth(&self) -> usize {
        debug_assert_eq!(self.gammas.len(), self.betas.len());
        self.gammas.len()
    }

    fn from_flat(flat: &[f64]) -> Self {
        let p = flat.len() / 2;
        QaoaParams {
            gammas: flat[..p].to_vec(),
            betas: flat[p..].to_vec(),
        }
    }

    fn to_flat(&self) -> Vec<f64> {
        let mut v = self.gammas.clone();
        v.extend_from_slice(&self.betas);
        v
    }
}

/// Per-bitstring Ising energies E(x) for all 2^n assignments, with
/// z_i = 1 - 2*x_i. Guarded by `max_qubits` to bound memory.
pub fn energy_table(ising: &IsingModel, max_qubits: usize) -> Result<Vec<f64>> {
    let n = ising.n;
    if n > max_qubits {
        return Err(Error::TooManyQubits { n, max: max_qubits });
    }
    Ok((0u32..(1u64 << n) as u32)
        .map(|mask| ising.energy(mask))
        .collect())
}

/// Multiply each amplitude by the cost phase exp(-i*gamma*E(x)).
pub fn apply_cost_phase(amps: &mut [Complex64], energies: &[f64], gamma: f64) {
    for (a, &e) in amps.iter_mut().zip(energies) {
        let theta = -gamma * e;
        *a *= Complex64::new(theta.cos(), theta.sin());
    }
}

/// Apply the transverse-field mixer exp(-i*beta*X) on every qubit:
/// amplitude pairs (a, b) across bit i map to
/// (cos(beta)*a - i*sin(beta)*b, -i*sin(beta)*a + cos(beta)*b).
pub fn apply_mixer(amps: &mut [Complex64], n: usize, beta: f64) {
    let cos_b = Complex64::new(beta.cos(), 0.0);
    let m_isin_b = Complex64::new(0.0, -beta.sin());
    for qubit in 0..n {
        let stride = 1usize << qubit;
        let mut base = 0usize;
        while base < amps.len() {
            for off in base..base + stride {
                let a = amps[off];
                let b = amps[off + stride];
                amps[off] = cos_b * a + m_isin_b * b;
                amps[off + stride] = m_isin_b * a + cos_b * b;
            }
            base += 2 * stride;
        }
    }
}

/// Prepare the depth-p variational state from the uniform superposition.
pub fn statevector(energies: &[f64], n: usize, params: &QaoaParams) -> Vec<Complex64> {
    let dim = 1usize << n;
    debug_assert_eq!(energies.len(), dim);
    let amp0 = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let mut amps = vec![amp0; dim];
    for (gamma, beta) in params.gammas.iter().zip(&params.betas) {
        apply_cost_phase(&mut amps, energies, *gamma);
        apply_mixer(&mut amps, n, *beta);
    }
    amps
}

/// Measurement probabilities |amplitude|^2.
pub fn probabilities(amps: &[Complex64]) -> Vec<f64> {
    amps.iter().map(|a| a.norm_sqr()).collect()
}

/// Exact expectation F = sum_x |amp_x|^2 E(x); no shot noise.
pub fn expectation(energies: &[f64], n: usize, params: &QaoaParams) -> f64 {
    let amps = statevector(energies, n, params);
    amps.iter()
        .zip(energies)
        .map(|(a, &e)| a.norm_sqr() * e)
        .sum()
}

/// Shot counts drawn from a probability vector, sparse over the sampled
/// bitstrings and sorted by bitstring value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampledCounts {
    /// (bitstring, count) with count > 0.
    pub counts: Vec<(u32, u64)>,
    /// Total shots drawn.
    pub shots: u64,
}

impl SampledCounts {
    /// Sampled support (bitstrings with count > 0).
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.counts.iter().map(|&(mask, _)| mask)
    }
}

/// Multinomial sampling from exact probabilities via inverse-CDF lookups.
pub fn sample(probs: &[f64], shots: u64, seed: u64) -> SampledCounts {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: alloc::collections::BTreeMap<u32, u64> = alloc::collections::BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c < u).min(probs.len() - 1);
        *counts.entry(idx as u32).or_insert(0) += 1;
    }
    SampledCounts {
        counts: counts.into_iter().collect(),
        shots,
    }
}

/// Optimizer configuration for one depth run.
#[derive(Debug, Clone, Copy)]
pub struct OptimizeConfig {
    /// Random restarts per depth (the first uses the default or warm start).
    pub restarts: usize,
    /// Function-evaluation budget per restart.
    pub max_iters: usize,
    /// Seed for the restart and warm-padding random streams.
    pub seed: u64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            restarts: DEFAULT_RESTARTS,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
        }
    }
}

/// Optimized parameters for one depth.
#[derive(Debug, Clone)]
pub struct OptimizedParams {
    /// Best parameters found.
    pub params: QaoaParams,
    /// Expectation value at `params`.
    pub expectation: f64,
    /// Restarts executed.
    pub restarts_tried: usize,
    /// Expectation at the first restart's starting point (the warm start
    /// when one was supplied).
    pub start_expectation: f64,
}

/// Minimize F(gamma, beta) with multi-start simplex descent.
///
/// Restart 1 starts from pi/4 on every angle, or from the warm-start
/// parameters padded with small random values in [-0.01, 0.01] for layers
/// added since the previous depth; the remaining restarts start from
/// uniformly random angles in [0, pi]. The best restart by expectation wins,
/// ties resolved by restart order.
pub fn optimize(
    energies: &[f64],
    n: usize,
    depth: usize,
    warm: Option<&QaoaParams>,
    cfg: &OptimizeConfig,
) -> Result<OptimizedParams> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidConfig(alloc::string::String::from(
            "at least one optimizer restart is required",
        )));
    }
    if depth == 0 {
        return Err(Error::InvalidConfig(alloc::string::String::from(
            "depth must be at least 1",
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let objective = |flat: &[f64]| expectation(energies, n, &QaoaParams::from_flat(flat));

    let first_start: Vec<f64> = match warm {
        Some(w) if w.depth() <= depth => {
            let mut params = QaoaParams {
                gammas: w.gammas.clone(),
                betas: w.betas.clone(),
            };
            while params.gammas.len() < depth {
                params.gammas.push(rng.random_range(-0.01..=0.01));
                params.betas.push(rng.random_range(-0.01..=0.01));
            }
            params.to_flat()
        }
        _ => vec![core::f64::consts::FRAC_PI_4; 2 * depth],
    };

    let mut best: Option<MinState> = None;
    let mut start_expectation = 0.0;
    for restart in 0..cfg.restarts {
        let start: Vec<f64> = if restart == 0 {
            first_start.clone()
        } else {
            (0..2 * depth)
                .map(|_| rng.random_range(0.0..core::f64::consts::PI))
                .collect()
        };
        if restart == 0 {
            start_expectation = objective(&start);
        }
        let r = nelder_mead(&objective, &start, 0.35, cfg.max_iters);
        let better = match &best {
            None => true,
            Some(b) => r.value < b.value,
        };
        if better {
            best = Some(MinState {
                x: r.x,
                value: r.value,
            });
        }
    }
    let best = best.expect("at least one restart ran");
    Ok(OptimizedParams {
        params: QaoaParams::from_flat(&best.x),
        expectation: best.value,
        restarts_tried: cfg.restarts,
        start_expectation,
    })
}

struct MinState {
    x: Vec<f64>,
    value: f64,
}

/// One complete depth run: optimized parameters, the exact distribution at
/// the optimum, and the sampled counts.
#[derive(Debug, Clone)]
pub struct QaoaRun {
    /// Circuit depth p.
    pub depth: usize,
    /// Optimized variational parameters.
    pub params: QaoaParams,
    /// Converged expectation value.
    pub expectation: f64,
    /// Expectation at the first restart's start point.
    pub start_expectation: f64,
    /// Restarts executed.
    pub restarts_tried: usize,
    /// Exact measurement probabilities at the optimum, indexed by bitstring.
    pub probabilities: Vec<f64>,
    /// Final shot sample.
    pub samples: SampledCounts,
}

impl QaoaRun {
    /// Probability mass per Hamming weight, length n+1.
    pub fn hamming_mass(&self, n: usize) -> Vec<f64> {
        let mut mass = vec![0.0; n + 1];
        for (mask, &p) in self.probabilities.iter().enumerate() {
            mass[(mask as u32).count_ones() as usize] += p;
        }
        mass
    }
}

/// Run the depth schedule in ascending order, threading each depth's optimal
/// parameters into the next depth's warm start, then sample each optimum.
pub fn run_depth_schedule(
    ising: &IsingModel,
    depths: &[usize],
    cfg: &OptimizeConfig,
    shots: u64,
    shot_seed: u64,
    max_qubits: usize,
) -> Result<Vec<QaoaRun>> {
    if depths.is_empty() || depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(alloc::string::String::from(
            "depth schedule must be non-empty and strictly ascending",
        )));
    }
    let n = ising.n;
    let energies = energy_table(ising, max_qubits)?;
    let mut warm: Option<QaoaParams> = None;
    let mut runs = Vec::with_capacity(depths.len());
    for (di, &depth) in depths.iter().enumerate() {
        let depth_cfg = OptimizeConfig {
            seed: cfg.seed.wrapping_add(di as u64),
            ..*cfg
        };
        let opt = optimize(&energies, n, depth, warm.as_ref(), &depth_cfg)?;
        let amps = statevector(&energies, n, &opt.params);
        let probs = probabilities(&amps);
        let samples = sample(&probs, shots, shot_seed.wrapping_add(di as u64));
        warm = Some(opt.params.clone());
        runs.push(QaoaRun {
            depth,
            params: opt.params,
            expectation: opt.expectation,
            start_expectation: opt.start_expectation,
            restarts_tried: opt.restarts_tried,
            probabilities: probs,
            samples,
        });
    }
    Ok(runs)
}
