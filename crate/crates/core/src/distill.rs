//! Privacy amplification on the common variable `J_XY`.
//!
//! Both parties compute `J = J_XY` on each of `n` copies and hash the
//! sequence `j^n` to a key `K` in `{0, .., |K|-1}`. Eve holds `z^n`. The
//! leakage `log|K| - H(K|Z^n)` is evaluated exactly by enumerating the
//! i.i.d. product over the support of `p(j, z)`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::common;
use crate::dist::{TripartiteDistribution, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::info;
use crate::rng::{self, SplitMix64};

/// Bound on `|J|^n * |Z|^n` for exact enumeration.
pub const EXACT_STATE_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeakageMode {
    Exact,
    /// Average `H(K|z^n)` over `z_samples` draws of `z^n`.
    Sampled { z_samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub n: usize,
    /// Target bits per copy; `|K| = floor(2^(n * rate))`.
    pub rate: f64,
    pub trials: usize,
    pub seed: u64,
    pub mode: LeakageMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 4,
            rate: 0.5,
            trials: 64,
            seed: 0,
            mode: LeakageMode::Exact,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(Error::InvalidConfig(format!("rate must be positive, got {}", self.rate)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if let LeakageMode::Sampled { z_samples: 0 } = self.mode {
            return Err(Error::InvalidConfig("z_samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn key_size(&self) -> Result<u64> {
        let bits = self.n as f64 * self.rate;
        if bits >= 63.0 {
            return Err(Error::SizeBound {
                states: bits.exp2(),
                limit: 2f64.powi(63),
            });
        }
        Ok(bits.exp2().floor() as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub n: usize,
    pub key_size: u64,
    /// `Pr[f = g = K]`; both parties compute the same `J`, so this is 1.
    pub agreement: f64,
    /// Minimum leakage over trials, in bits.
    pub leakage: f64,
    /// `log|K| / n`.
    pub rate_achieved: f64,
    pub per_trial: Vec<f64>,
    pub best_trial: usize,
}

/// A map from sequence indices to keys.
pub trait KeyHash: Sync {
    fn key_size(&self) -> u64;
    fn hash(&self, index: u64) -> u64;
}

/// A uniformly random function, evaluated lazily: the key of index `i` is
/// the `i`-th SplitMix64 output of the trial seed, reduced below `|K|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomFunction {
    pub seed: u64,
    pub key_size: u64,
}

impl KeyHash for RandomFunction {
    fn key_size(&self) -> u64 {
        self.key_size
    }

    fn hash(&self, index: u64) -> u64 {
        rng::below(rng::nth(self.seed, index), self.key_size)
    }
}

// Per-copy support of (j, z), and the base-|J| sequence encoding.
struct Source {
    nj: usize,
    nz: usize,
    /// For each z, the `(j, p(j|z))` pairs with positive mass.
    given_z: Vec<Vec<(usize, f64)>>,
    pz: Vec<f64>,
}

impl Source {
    fn new(d: &TripartiteDistribution) -> Self {
        let j = common::global_partition(d);
        let nj = j.len();
        let nz = d.z().len();
        let pjz = common::common_variable_joint(d, &j);
        let pz: Vec<f64> = (0..nz).map(|z| (0..nj).map(|b| pjz[b * nz + z]).sum()).collect();
        let given_z = (0..nz)
            .map(|z| {
                (0..nj)
                    .filter(|&b| pjz[b * nz + z] > SUPPORT_TOL)
                    .map(|b| (b, pjz[b * nz + z] / pz[z]))
                    .collect()
            })
            .collect();
        Self {
            nj,
            nz,
            given_z,
            pz,
        }
    }

    fn check_exact(&self, n: usize) -> Result<()> {
        let states = ((self.nj * self.nz) as f64).powi(n as i32);
        if states > EXACT_STATE_LIMIT {
            return Err(Error::SizeBound {
                states,
                limit: EXACT_STATE_LIMIT,
            });
        }
        Ok(())
    }

    /// All `(j^n index, p(j^n|z^n))` for one `z^n`.
    fn sequences_given(&self, zs: &[usize]) -> Vec<(u64, f64)> {
        let mut out = vec![(0u64, 1.0)];
        for &z in zs {
            let mut next = Vec::with_capacity(out.len() * self.given_z[z].len());
            for &(idx, p) in &out {
                for &(j, q) in &self.given_z[z] {
                    next.push((idx * self.nj as u64 + j as u64, p * q));
                }
            }
            out = next;
        }
        out
    }

    /// Every supported `z^n` with its probability, lexicographic order.
    fn z_sequences(&self, n: usize) -> Vec<(Vec<usize>, f64)> {
        let support: Vec<usize> = (0..self.nz).filter(|&z| self.pz[z] > SUPPORT_TOL).collect();
        let mut out = vec![(Vec::new(), 1.0)];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * support.len());
            for (zs, p) in &out {
                for &z in &support {
                    let mut s: Vec<usize> = zs.clone();
                    s.push(z);
                    next.push((s, p * self.pz[z]));
                }
            }
            out = next;
        }
        out
    }

    fn sample_z(&self, n: usize, r: &mut SplitMix64) -> Vec<usize> {
        (0..n)
            .map(|_| {
                let u = r.next_f64();
                let mut acc = 0.0;
                for z in 0..self.nz {
                    acc += self.pz[z];
                    if u < acc {
                        return z;
                    }
                }
                (0..self.nz).rev().find(|&z| self.pz[z] > 0.0).unwrap_or(0)
            })
            .collect()
    }
}

fn key_entropy(seqs: &[(u64, f64)], hash: &dyn KeyHash) -> f64 {
    let mut mass: HashMap<u64, f64> = HashMap::with_capacity(seqs.len());
    for &(idx, p) in seqs {
        *mass.entry(hash.hash(idx)).or_insert(0.0) += p;
    }
    let mut probs: Vec<(u64, f64)> = mass.into_iter().collect();
    probs.sort_unstable_by_key(|&(k, _)| k);
    let p: Vec<f64> = probs.into_iter().map(|(_, p)| p).collect();
    info::entropy(&p)
}

// Conditional slices `(p(z^n), [(j^n, p(j^n|z^n))])` for exact evaluation.
type Slices = Vec<(f64, Vec<(u64, f64)>)>;

fn exact_slices(src: &Source, n: usize) -> Result<Slices> {
    src.check_exact(n)?;
    Ok(src
        .z_sequences(n)
        .into_iter()
        .map(|(zs, p)| (p, src.sequences_given(&zs)))
        .collect())
}

fn leakage_on(slices: &Slices, hash: &dyn KeyHash) -> f64 {
    let h: f64 = slices.iter().map(|(p, seqs)| p * key_entropy(seqs, hash)).sum();
    (hash.key_size() as f64).log2() - h
}

/// Exact `log|K| - H(K|Z^n)` for a given hash, by full enumeration.
pub fn leakage_oracle(d: &TripartiteDistribution, n: usize, hash: &dyn KeyHash) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let src = Source::new(d);
    Ok(leakage_on(&exact_slices(&src, n)?, hash))
}

/// Hashes `J_XY^n` with `trials` random functions and reports the best one.
pub fn simulate_privacy_amplification(d: &TripartiteDistribution, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let key_size = cfg.key_size()?;
    let src = Source::new(d);
    let slices = match cfg.mode {
        LeakageMode::Exact => exact_slices(&src, cfg.n)?,
        LeakageMode::Sampled { z_samples } => {
            let per_z = (src.nj as f64).powi(cfg.n as i32);
            if per_z > EXACT_STATE_LIMIT {
                return Err(Error::SizeBound {
                    states: per_z,
                    limit: EXACT_STATE_LIMIT,
                });
            }
            // Sub-stream 0 draws Eve's sequences; trials use 1.. below.
            let mut r = SplitMix64::new(rng::derive(cfg.seed, 0));
            let w = 1.0 / z_samples as f64;
            (0..z_samples)
                .map(|_| (w, src.sequences_given(&src.sample_z(cfg.n, &mut r))))
                .collect()
        }
    };
    let trial_seed = |t: usize| match cfg.mode {
        LeakageMode::Exact => rng::derive(cfg.seed, t as u64),
        LeakageMode::Sampled { .. } => rng::derive(cfg.seed, t as u64 + 1),
    };
    let per_trial: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let hash = RandomFunction {
                seed: trial_seed(t),
                key_size,
            };
            leakage_on(&slices, &hash)
        })
        .collect();
    let (best_trial, leakage) = per_trial
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    Ok(SimResult {
        n: cfg.n,
        key_size,
        agreement: 1.0,
        leakage,
        rate_achieved: (key_size as f64).log2() / cfg.n as f64,
        per_trial,
        best_trial,
    })
}
