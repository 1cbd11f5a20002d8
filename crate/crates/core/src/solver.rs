//! QUBO minimization: multi-restart Metropolis simulated annealing and
//! exhaustive Gray-code enumeration.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{Assignment, Qubo, QuboIndex};

/// Hard ceiling on exhaustive enumeration.
pub const EXACT_VAR_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub sweeps: usize,
    pub beta_hot: f64,
    pub beta_cold: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig { sweeps: 5000, beta_hot: 0.05, beta_cold: 20.0, restarts: 32, seed: 1 }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidConfig("sweeps must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        let finite_positive = |b: f64| b.is_finite() && b > 0.0;
        if !finite_positive(self.beta_hot) || !finite_positive(self.beta_cold) {
            return Err(Error::InvalidConfig("inverse temperatures must be finite and positive".into()));
        }
        if self.beta_hot >= self.beta_cold {
            return Err(Error::InvalidConfig(format!(
                "beta_hot ({}) must be below beta_cold ({})",
                self.beta_hot, self.beta_cold
            )));
        }
        Ok(())
    }

    /// Geometric interpolation from `beta_hot` to `beta_cold`, one value per sweep.
    pub fn schedule(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_hot];
        }
        let ratio = (self.beta_cold / self.beta_hot).ln() / (self.sweeps - 1) as f64;
        (0..self.sweeps).map(|k| self.beta_hot * (ratio * k as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_energy: i64,
    #[serde(rename = "bits")]
    pub best_assignment: Assignment,
    pub restart_of_best: usize,
    /// `(energy, count)` over the per-restart bests, ascending by energy.
    #[serde(rename = "histogram")]
    pub energy_histogram: Vec<(i64, usize)>,
}

impl SolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of restart `r`, independent of how restarts are scheduled.
pub fn restart_seed(seed: u64, restart: usize) -> u64 {
    splitmix64(seed ^ splitmix64(restart as u64))
}

struct RestartOutcome {
    energy: i64,
    bits: Vec<bool>,
}

fn anneal_once(q: &Qubo, index: &QuboIndex, schedule: &[f64], seed: u64) -> Result<RestartOutcome> {
    let n = index.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut fields = index.local_fields(&bits);
    let mut energy = q.energy(&Assignment::from_bits(bits.clone()))?;
    let mut best = RestartOutcome { energy, bits: bits.clone() };
    let mut order: Vec<usize> = (0..n).collect();

    for &beta in schedule {
        order.shuffle(&mut rng);
        for &k in &order {
            let delta = if bits[k] { -fields[k] } else { fields[k] };
            if delta <= 0 || rng.gen::<f64>() < (-beta * delta as f64).exp() {
                index.apply_flip(&mut bits, &mut fields, k);
                energy += delta;
                if energy < best.energy {
                    best.energy = energy;
                    best.bits.copy_from_slice(&bits);
                }
            }
        }
    }
    Ok(best)
}

/// Multi-restart simulated annealing on the current rayon pool.
///
/// Restart `r` draws from its own generator seeded by
/// [`restart_seed`]`(cfg.seed, r)`, and the merge takes the lowest energy
/// with ties going to the lowest restart index, so the result does not
/// depend on the number of worker threads.
pub fn anneal(q: &Qubo, cfg: &AnnealConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if q.num_vars() == 0 {
        return Ok(SolveResult {
            best_energy: q.offset(),
            best_assignment: Assignment::zeros(0),
            restart_of_best: 0,
            energy_histogram: vec![(q.offset(), cfg.restarts)],
        });
    }
    let index = q.index()?;
    let schedule = cfg.schedule();
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| anneal_once(q, index, &schedule, restart_seed(cfg.seed, r)))
        .collect::<Result<_>>()?;

    let (restart_of_best, best) = outcomes
        .iter()
        .enumerate()
        .min_by_key(|(r, o)| (o.energy, *r))
        .expect("at least one restart");
    let mut histogram = BTreeMap::new();
    for o in &outcomes {
        *histogram.entry(o.energy).or_insert(0usize) += 1;
    }
    let best_assignment = Assignment::from_bits(best.bits.clone());
    debug_assert_eq!(q.energy(&best_assignment)?, best.energy);
    Ok(SolveResult {
        best_energy: best.energy,
        best_assignment,
        restart_of_best,
        energy_histogram: histogram.into_iter().collect(),
    })
}

/// [`anneal`] on a dedicated pool of `threads` workers.
pub fn anneal_with_threads(q: &Qubo, cfg: &AnnealConfig, threads: usize) -> Result<SolveResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| anneal(q, cfg))
}

/// Bit positions flipped by the reflected binary Gray code on `width` bits:
/// step `t` (1-based) flips bit `trailing_zeros(t)`. Starting from all
/// zeros, the `2^width − 1` flips visit every assignment exactly once.
pub fn gray_flips(width: u32) -> impl Iterator<Item = u32> {
    (1u64..(1u64 << width)).map(|t| t.trailing_zeros())
}

/// `true` when `a` precedes `b` lexicographically as bit vectors
/// `(b₀, b₁, …)`, with variable `k` stored at mask bit `k`.
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (1 << diff.trailing_zeros()) == 0
}

/// Exact minimum by visiting all `2^num_vars` assignments in Gray-code
/// order. Ties resolve to the lexicographically smallest bit vector.
pub fn exact_solve(q: &Qubo, max_vars: usize) -> Result<SolveResult> {
    let cap = max_vars.min(EXACT_VAR_CAP);
    let n = q.num_vars();
    if n > cap {
        return Err(Error::TooManyVariables { num_vars: n, cap });
    }
    let index = q.index()?;

    // Low Gray positions flip most often; give them the sparsest variables.
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&k| (index.couplings(k).len(), k));

    let mut bits = vec![false; n];
    let mut fields = index.local_fields(&bits);
    let mut energy = q.offset();
    let mut mask = 0u64;
    let (mut best_energy, mut best_mask) = (energy, 0u64);

    for pos in gray_flips(n as u32) {
        let k = by_degree[pos as usize];
        energy += index.apply_flip(&mut bits, &mut fields, k);
        mask ^= 1 << k;
        if energy < best_energy || (energy == best_energy && lex_less(mask, best_mask)) {
            best_energy = energy;
            best_mask = mask;
        }
    }

    Ok(SolveResult {
        best_energy,
        best_assignment: Assignment::from_mask(best_mask, n),
        restart_of_best: 0,
        energy_histogram: vec![(best_energy, 1)],
    })
}
