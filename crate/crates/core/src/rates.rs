//! Key-rate bounds: intrinsic information (upper), the one-way lower bounds
//! of the Ahlswede–Csiszár formula, the four-Markov-chain certificate for a
//! one-way rate of `I(X:Y|Z)`, and the double-Markov criterion.

use rayon::prelude::*;
use serde::Serialize;

use crate::common;
use crate::dist::{Alphabet, Channel, TripartiteDistribution, Var};
use crate::error::{Error, Result};
use crate::info::{self, JointPmf};
use crate::optim::{logits_of, softmax_rows, NelderMead};
use crate::rng::{self, SplitMix64};

/// Deterministic channels are enumerated exhaustively up to this many maps.
pub const DETERMINISTIC_SCAN_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 2000,
            seed: 0,
        }
    }
}

impl OptimizerOptions {
    fn nelder_mead(&self) -> NelderMead {
        NelderMead {
            max_iters: self.iterations,
            ..NelderMead::default()
        }
    }
}

// Odometer over all maps {0..n} -> {0..m}, first coordinate slowest.
fn all_maps(n: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = m.checked_pow(n as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut i| {
        let mut map = vec![0; n];
        for slot in map.iter_mut().rev() {
            *slot = i % m;
            i /= m;
        }
        map
    })
}

fn map_count(n: usize, m: usize) -> usize {
    m.checked_pow(n as u32).unwrap_or(usize::MAX)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicBound {
    /// `I(X:Y|Zbar)` at the witness channel; an upper bound on `I(X:Y↓Z)`.
    pub value: f64,
    pub channel: Channel,
}

struct CmiAfterChannel<'a> {
    d: &'a TripartiteDistribution,
    nxy: usize,
    nz: usize,
}

impl CmiAfterChannel<'_> {
    fn eval(&self, t: &[f64]) -> f64 {
        let (nxy, nz) = (self.nxy, self.nz);
        let p = self.d.probs();
        let mut q = vec![0.0; nxy * nz];
        for xy in 0..nxy {
            for z in 0..nz {
                let v = p[xy * nz + z];
                if v == 0.0 {
                    continue;
                }
                for zb in 0..nz {
                    q[xy * nz + zb] += v * t[z * nz + zb];
                }
            }
        }
        let [nx, ny, _] = self.d.shape();
        info::conditional_mutual_information_tensor(nx, ny, nz, &q)
    }
}

/// Upper bound on the intrinsic information `min I(X:Y|Zbar)` over channels
/// `Zbar|Z` with `|Zbar| = |Z|`.
///
/// Candidates are the identity, every deterministic map `Z -> Z` (when there
/// are at most [`DETERMINISTIC_SCAN_LIMIT`]), a simplex search started from the
/// best of those, and `restarts` searches from seeded random logits.
pub fn intrinsic_information_upper(d: &TripartiteDistribution, opts: &OptimizerOptions) -> IntrinsicBound {
    let [nx, ny, nz] = d.shape();
    let obj = CmiAfterChannel { d, nxy: nx * ny, nz };

    let identity = Channel::identity(d.z());
    let mut best_t = identity.matrix().to_vec();
    let mut best = obj.eval(&best_t);
    if map_count(nz, nz) <= DETERMINISTIC_SCAN_LIMIT {
        for map in all_maps(nz, nz) {
            let t = Channel::deterministic(d.z(), d.z(), &map)
                .expect("map in range")
                .matrix()
                .to_vec();
            let v = obj.eval(&t);
            if v < best {
                best = v;
                best_t = t;
            }
        }
    }

    let nm = opts.nelder_mead();
    let search = |x0: Vec<f64>| {
        let m = nm.minimize(|l| obj.eval(&softmax_rows(l, nz)), &x0);
        let t = softmax_rows(&m.x, nz);
        (obj.eval(&t), t)
    };
    let mut starts = vec![logits_of(&best_t, 1e-4)];
    starts.extend((0..opts.restarts).map(|r| random_logits(opts.seed, r, nz * nz)));
    let results: Vec<(f64, Vec<f64>)> = starts.into_par_iter().map(search).collect();
    for (v, t) in results {
        if v < best {
            best = v;
            best_t = t;
        }
    }

    let channel = Channel::new(d.z().clone(), d.z().clone(), best_t).expect("softmax rows are stochastic");
    let value = d
        .apply_channel_to_z(&channel)
        .expect("channel matches Z")
        .conditional_mutual_information();
    IntrinsicBound { value, channel }
}

fn random_logits(seed: u64, restart: usize, len: usize) -> Vec<f64> {
    let mut r = SplitMix64::new(rng::derive(seed, restart as u64));
    (0..len).map(|_| 4.0 * r.next_f64() - 2.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneWayBounds {
    /// `max(0, I(X:Y) - I(X:Z))`.
    pub alice_to_bob: f64,
    /// `max(0, I(X:Y) - I(Y:Z))`.
    pub bob_to_alice: f64,
}

pub fn oneway_lower_bounds(d: &TripartiteDistribution) -> OneWayBounds {
    let ixy = d.mutual_information(&[Var::X], &[Var::Y]);
    let ixz = d.mutual_information(&[Var::X], &[Var::Z]);
    let iyz = d.mutual_information(&[Var::Y], &[Var::Z]);
    OneWayBounds {
        alice_to_bob: (ixy - ixz).max(0.0),
        bob_to_alice: (ixy - iyz).max(0.0),
    }
}

/// Auxiliary variables `(K, U)` generated from `X` alone, so the Markov chain
/// `KU - X - YZ` holds by construction. `|K| = |U| = |X| + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxiliarySystem {
    channel: Channel,
    #[serde(skip)]
    card: usize,
}

impl AuxiliarySystem {
    pub fn new(channel: Channel) -> Result<Self> {
        let card = channel.input().len() + 1;
        if channel.output().len() != card * card {
            return Err(Error::AlphabetMismatch {
                expected: card * card,
                found: channel.output().len(),
            });
        }
        Ok(Self { channel, card })
    }

    fn alphabets(nx: usize) -> (Alphabet, Alphabet) {
        let card = nx + 1;
        let k = Alphabet::range(card);
        let ku = k.product(&k).expect("numeric labels are distinct");
        (Alphabet::range(nx), ku)
    }

    /// `K = k_of[x]`, `U = u_of[x]`.
    pub fn deterministic(k_of: &[usize], u_of: &[usize]) -> Result<Self> {
        if k_of.len() != u_of.len() {
            return Err(Error::AlphabetMismatch {
                expected: k_of.len(),
                found: u_of.len(),
            });
        }
        let card = k_of.len() + 1;
        let (input, output) = Self::alphabets(k_of.len());
        let map: Vec<usize> = k_of
            .iter()
            .zip(u_of)
            .map(|(&k, &u)| if k < card && u < card { Ok(k * card + u) } else { Err(()) })
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::AlphabetMismatch {
                expected: card,
                found: card + 1,
            })?;
        Self::new(Channel::deterministic(&input, &output, &map)?)
    }

    /// From a `|X| x (|X|+1)^2` row-stochastic matrix, column `k * (|X|+1) + u`.
    pub fn from_matrix(nx: usize, t: Vec<f64>) -> Result<Self> {
        let (input, output) = Self::alphabets(nx);
        Self::new(Channel::new(input, output, t)?)
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn k_card(&self) -> usize {
        self.card
    }

    pub fn u_card(&self) -> usize {
        self.card
    }

    pub fn input_len(&self) -> usize {
        self.channel.input().len()
    }
}

/// `I(K:Y|U) - I(K:Z|U)` for a `|X| x (|K||U|)` matrix.
fn ac_objective(d: &TripartiteDistribution, card: usize, t: &[f64]) -> f64 {
    let [nx, ny, nz] = d.shape();
    let nku = card * card;
    // (k, y, u) and (k, z, u) tensors.
    let mut kyu = vec![0.0; card * ny * card];
    let mut kzu = vec![0.0; card * nz * card];
    for x in 0..nx {
        let row = &t[x * nku..(x + 1) * nku];
        for y in 0..ny {
            for z in 0..nz {
                let p = d.get(x, y, z);
                if p == 0.0 {
                    continue;
                }
                for (ku, &w) in row.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let (k, u) = (ku / card, ku % card);
                    let v = p * w;
                    kyu[(k * ny + y) * card + u] += v;
                    kzu[(k * nz + z) * card + u] += v;
                }
            }
        }
    }
    info::conditional_mutual_information_tensor(card, ny, card, &kyu)
        - info::conditional_mutual_information_tensor(card, nz, card, &kzu)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcBound {
    /// Best `I(K:Y|U) - I(K:Z|U)` found; a lower bound on the one-way rate.
    pub value: f64,
    pub aux: AuxiliarySystem,
}

/// Best-effort maximization of the one-way (Alice to Bob) rate expression.
///
/// Every evaluated point is feasible, so the result is a certified lower
/// bound; the landscape is non-convex and the true rate may be larger.
/// Seeds: `K = X`, `K = J_XY` (both with constant `U`), every deterministic
/// `(K, U)` when there are at most [`DETERMINISTIC_SCAN_LIMIT`], a simplex
/// search from the best seed, and `restarts` random searches. Restart `r`
/// depends only on `(seed, r)`, so more restarts never lower the result.
pub fn ac_rate_optimize(d: &TripartiteDistribution, opts: &OptimizerOptions) -> AcBound {
    let nx = d.x().len();
    let card = nx + 1;
    let cols = card * card;
    let eval = |t: &[f64]| ac_objective(d, card, t);

    let j = common::global_partition(d);
    let k_is_x: Vec<usize> = (0..nx).collect();
    let k_is_j: Vec<usize> = (0..nx).map(|x| j.block_of_x(x).unwrap_or(0)).collect();
    let mut seeds = vec![
        AuxiliarySystem::deterministic(&k_is_x, &vec![0; nx]).expect("in range"),
        AuxiliarySystem::deterministic(&k_is_j, &vec![0; nx]).expect("in range"),
    ];
    if map_count(2 * nx, card) <= DETERMINISTIC_SCAN_LIMIT {
        seeds.extend(
            all_maps(2 * nx, card).map(|m| AuxiliarySystem::deterministic(&m[..nx], &m[nx..]).expect("in range")),
        );
    } else if map_count(nx, card) <= DETERMINISTIC_SCAN_LIMIT {
        seeds.extend(all_maps(nx, card).map(|k| AuxiliarySystem::deterministic(&k, &vec![0; nx]).expect("in range")));
    }
    let mut best_t = seeds[0].channel.matrix().to_vec();
    let mut best = eval(&best_t);
    for s in &seeds[1..] {
        let v = eval(s.channel.matrix());
        if v > best {
            best = v;
            best_t = s.channel.matrix().to_vec();
        }
    }

    let nm = opts.nelder_mead();
    let search = |x0: Vec<f64>| {
        let m = nm.minimize(|l| -eval(&softmax_rows(l, cols)), &x0);
        let t = softmax_rows(&m.x, cols);
        (eval(&t), t)
    };
    let mut starts = vec![logits_of(&best_t, 1e-4)];
    starts.extend((0..opts.restarts).map(|r| random_logits(opts.seed, r, nx * cols)));
    let results: Vec<(f64, Vec<f64>)> = starts.into_par_iter().map(search).collect();
    for (v, t) in results {
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let aux = AuxiliarySystem::from_matrix(nx, best_t).expect("softmax rows are stochastic");
    AcBound {
        value: eval(aux.channel.matrix()),
        aux,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    /// The distribution seen by the communicating party as `X`.
    pub fn orient(self, d: &TripartiteDistribution) -> TripartiteDistribution {
        match self {
            Self::AliceToBob => d.clone(),
            Self::BobToAlice => d.swap_xy(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma4Certificate {
    /// Residuals of `KU-X-YZ`, `X-KUZ-Y`, `U-Z-Y` and `K-YU-Z` as the
    /// corresponding conditional mutual informations.
    pub residuals: [f64; 4],
    /// `I(K:Y|U) - I(K:Z|U)`.
    pub objective: f64,
    pub holds: bool,
}

impl Lemma4Certificate {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Builds the joint of `(K, U, X, Y, Z)` and measures the four Markov chains
/// whose simultaneous validity certifies a one-way rate of `I(X:Y|Z)`.
pub fn check_lemma4_certificate(d: &TripartiteDistribution, aux: &AuxiliarySystem, tol: f64) -> Result<Lemma4Certificate> {
    let [nx, ny, nz] = d.shape();
    if aux.input_len() != nx {
        return Err(Error::AlphabetMismatch {
            expected: nx,
            found: aux.input_len(),
        });
    }
    let (nk, nu) = (aux.k_card(), aux.u_card());
    let mut p = vec![0.0; nk * nu * nx * ny * nz];
    for k in 0..nk {
        for u in 0..nu {
            for x in 0..nx {
                let w = aux.channel.get(x, k * nu + u);
                if w == 0.0 {
                    continue;
                }
                for y in 0..ny {
                    for z in 0..nz {
                        p[(((k * nu + u) * nx + x) * ny + y) * nz + z] = w * d.get(x, y, z);
                    }
                }
            }
        }
    }
    let j = JointPmf::new(vec![nk, nu, nx, ny, nz], p)?;
    let (k, u, x, y, z) = (0, 1, 2, 3, 4);
    let residuals = [
        j.conditional_mutual_information(&[k, u], &[y, z], &[x]),
        j.conditional_mutual_information(&[x], &[y], &[k, u, z]),
        j.conditional_mutual_information(&[u], &[y], &[z]),
        j.conditional_mutual_information(&[k], &[z], &[y, u]),
    ];
    let objective = j.conditional_mutual_information(&[k], &[y], &[u]) - j.conditional_mutual_information(&[k], &[z], &[u]);
    Ok(Lemma4Certificate {
        residuals,
        objective,
        holds: residuals.iter().all(|&r| r < tol),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterministicScan {
    pub direction: Direction,
    pub candidates: usize,
    /// Deterministic `(K, U)` maps whose certificate holds at `tol`.
    pub passing: Vec<(Vec<usize>, Vec<usize>)>,
    /// Smallest worst-chain residual over all candidates.
    pub min_max_residual: f64,
}

/// Checks every deterministic pair `K(X), U(X)` with ranges of size
/// `|X| + 1` against the four-chain certificate.
pub fn lemma4_deterministic_scan(d: &TripartiteDistribution, direction: Direction, tol: f64) -> Result<DeterministicScan> {
    let d = direction.orient(d);
    let nx = d.x().len();
    let card = nx + 1;
    if map_count(2 * nx, card) > DETERMINISTIC_SCAN_LIMIT {
        return Err(Error::SizeBound {
            states: (card as f64).powi(2 * nx as i32),
            limit: DETERMINISTIC_SCAN_LIMIT as f64,
        });
    }
    let mut passing = Vec::new();
    let mut min_max_residual = f64::INFINITY;
    let mut candidates = 0;
    for m in all_maps(2 * nx, card) {
        let aux = AuxiliarySystem::deterministic(&m[..nx], &m[nx..])?;
        let cert = check_lemma4_certificate(&d, &aux, tol)?;
        candidates += 1;
        min_max_residual = min_max_residual.min(cert.max_residual());
        if cert.holds {
            passing.push((m[..nx].to_vec(), m[nx..].to_vec()));
        }
    }
    Ok(DeterministicScan {
        direction,
        candidates,
        passing,
        min_max_residual,
    })
}

/// A joint over `X, Y, Z, W` stored as a tripartite distribution whose third
/// alphabet is the product `Z x W` (index `z * |W| + w`).
#[derive(Debug, Clone, PartialEq)]
pub struct FourVariableJoint {
    dist: TripartiteDistribution,
    nz: usize,
    nw: usize,
}

impl FourVariableJoint {
    pub fn new(dist: TripartiteDistribution, nz: usize, nw: usize) -> Result<Self> {
        if nz == 0 || nw == 0 || dist.z().len() != nz * nw {
            return Err(Error::MalformedProduct(format!(
                "third alphabet has {} symbols, expected {nz} x {nw}",
                dist.z().len()
            )));
        }
        Ok(Self { dist, nz, nw })
    }

    pub fn from_fn(
        x: Alphabet,
        y: Alphabet,
        z: Alphabet,
        w: Alphabet,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let (nz, nw) = (z.len(), w.len());
        let zw = z.product(&w)?;
        let dist = TripartiteDistribution::from_fn(x, y, zw, |a, b, c| f(a, b, c / nw, c % nw))?;
        Self::new(dist, nz, nw)
    }

    pub fn dist(&self) -> &TripartiteDistribution {
        &self.dist
    }

    /// The marginal `p_XYZ` with `W` summed out.
    pub fn xyz(&self) -> TripartiteDistribution {
        let [nx, ny, _] = self.dist.shape();
        let z = Alphabet::range(self.nz);
        TripartiteDistribution::from_fn(self.dist.x().clone(), self.dist.y().clone(), z, |x, y, z| {
            (0..self.nw).map(|w| self.dist.get(x, y, z * self.nw + w)).sum()
        })
        .inspect(|d| debug_assert_eq!(d.shape()[..2], [nx, ny]))
        .expect("marginal of a valid joint is valid")
    }

    fn joint(&self) -> JointPmf {
        let [nx, ny, _] = self.dist.shape();
        JointPmf::new(vec![nx, ny, self.nz, self.nw], self.dist.probs().to_vec()).expect("shape is consistent")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleMarkovResidual {
    /// `max(I(X:W|YZ), I(Y:W|XZ))`.
    pub chains: f64,
    /// `I(XY:W | J_{XY|Z} Z)`.
    pub criterion: f64,
}

pub fn double_markov_residual(j: &FourVariableJoint) -> DoubleMarkovResidual {
    let joint = j.joint();
    let (x, y, z, w) = (0, 1, 2, 3);
    let chains = joint
        .conditional_mutual_information(&[x], &[w], &[y, z])
        .max(joint.conditional_mutual_information(&[y], &[w], &[x, z]));

    let xyz = j.xyz();
    let cond = common::conditional_common_partition(&xyz);
    let [nx, ny, nz] = xyz.shape();
    let nj = cond.slices.iter().map(|s| s.partition.len()).max().unwrap_or(1);
    let nc = nz * nj;
    let mut t = vec![0.0; nx * ny * j.nw * nc];
    for s in &cond.slices {
        for xi in 0..nx {
            let Some(b) = s.partition.block_of_x(xi) else { continue };
            for yi in 0..ny {
                for wi in 0..j.nw {
                    t[((xi * ny + yi) * j.nw + wi) * nc + s.z * nj + b] += j.dist.get(xi, yi, s.z * j.nw + wi);
                }
            }
        }
    }
    let criterion = info::conditional_mutual_information_tensor(nx * ny, j.nw, nc, &t);
    DoubleMarkovResidual { chains, criterion }
}
