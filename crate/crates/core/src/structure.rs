//! Structural classes of tripartite distributions and the necessary
//! conditions for a key rate of `I(X:Y|Z)`.
//!
//! * uniform block (UB): every slice partition `J_{XY|Z=z}` coincides with the
//!   unconditional partition `J_XY` on the slice support;
//! * uniform block independent (UBI): UB with `X` and `Y` independent inside
//!   every `(z, block)` cell, exactly the distributions whose no-communication
//!   key rate equals `I(X:Y|Z)`;
//! * the one-way condition: distinct blocks of any slice must have zero
//!   cross mass in `p_XY`;
//! * the two-way condition: a dominance relation between two slices plus a
//!   pair that is possible in one and impossible in the other yields an
//!   explicit channel on `Z` that strictly lowers `I(X:Y|Z)`.

use std::fmt;

use serde::Serialize;

use crate::common::{self, Block, CommonPartition};
use crate::dist::{BipartiteDistribution, Channel, TripartiteDistribution, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::info;

/// Threshold below which an information residual counts as zero.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Largest to smallest mixing weight tried by [`construct_reducing_channel`].
pub const EPSILON_GRID: std::ops::RangeInclusive<i32> = 1..=20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformBlockCheck {
    pub holds: bool,
    /// `H(J_{XY|Z} | Z, J_XY)`.
    pub residual: f64,
    /// First `z` whose slice partition strictly refines `J_XY`.
    pub witness: Option<usize>,
}

pub fn is_uniform_block(d: &TripartiteDistribution) -> UniformBlockCheck {
    let global = common::global_partition(d);
    let cond = common::conditional_common_partition(d);
    let mut residual = 0.0;
    let mut witness = None;
    for s in &cond.slices {
        let h = refinement_entropy(d, s.z, &global, &s.partition);
        residual += s.weight * h;
        if witness.is_none() && h > RESIDUAL_TOL {
            witness = Some(s.z);
        }
    }
    UniformBlockCheck {
        holds: residual < RESIDUAL_TOL,
        residual,
        witness,
    }
}

// H(slice block | global block) under p_{XY|Z=z}.
fn refinement_entropy(
    d: &TripartiteDistribution,
    z: usize,
    global: &CommonPartition,
    local: &CommonPartition,
) -> f64 {
    let [nx, ny, _] = d.shape();
    let (ng, nl) = (global.len(), local.len());
    let mut joint = vec![0.0; ng * nl];
    for x in 0..nx {
        let (Some(g), Some(l)) = (global.block_of_x(x), local.block_of_x(x)) else {
            continue;
        };
        for y in 0..ny {
            joint[g * nl + l] += d.get(x, y, z);
        }
    }
    let total: f64 = joint.iter().sum();
    let joint: Vec<f64> = joint.iter().map(|v| v / total).collect();
    let outer: Vec<f64> = joint.chunks(nl).map(|r| r.iter().sum()).collect();
    (info::entropy(&joint) - info::entropy(&outer)).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UbiCheck {
    pub uniform_block: UniformBlockCheck,
    /// `I(X:Y | Z, J_XY)`.
    pub within_block_cmi: f64,
    pub holds: bool,
}

pub fn ubi_check(d: &TripartiteDistribution) -> UbiCheck {
    let uniform_block = is_uniform_block(d);
    let within_block_cmi = common::cmi_given_common(d);
    let holds = uniform_block.holds && within_block_cmi < RESIDUAL_TOL;
    UbiCheck {
        uniform_block,
        within_block_cmi,
        holds,
    }
}

pub fn is_ubi(d: &TripartiteDistribution) -> bool {
    ubi_check(d).holds
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem3Violation {
    pub z: usize,
    pub block_i: Block,
    pub block_j: Block,
    /// `p_XY(X_i, Y_j)`.
    pub mass: f64,
}

/// Scans every slice for ordered pairs of distinct blocks whose cross
/// rectangle `X_i x Y_j` carries mass in `p_XY`. An empty result means the
/// one-way necessary condition holds (in either direction).
pub fn check_theorem3(d: &TripartiteDistribution) -> Vec<Theorem3Violation> {
    let pxy = d.marginal_xy();
    let mut out = Vec::new();
    for s in common::conditional_common_partition(d).slices {
        let blocks = s.partition.blocks();
        for (i, bi) in blocks.iter().enumerate() {
            for (j, bj) in blocks.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mass: f64 = bi
                    .xs
                    .iter()
                    .flat_map(|&x| bj.ys.iter().map(move |&y| (x, y)))
                    .map(|(x, y)| pxy.get(x, y))
                    .sum();
                if mass > SUPPORT_TOL {
                    out.push(Theorem3Violation {
                        z: s.z,
                        block_i: bi.clone(),
                        block_j: bj.clone(),
                        mass,
                    });
                }
            }
        }
    }
    out
}

/// Which clause of the dominance relation `q ◀ p` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DominanceCase {
    /// (i) `q` is a product distribution.
    Uncorrelated,
    /// (ii) `supp q_Y ⊆ supp p_Y`.
    SupportInclusion,
    /// (iii) every `y ∈ supp q_Y \ supp p_Y` has `H(X|Y=y) = 0` under `q`.
    DeterministicColumns,
}

impl fmt::Display for DominanceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uncorrelated => "(i)",
            Self::SupportInclusion => "(ii)",
            Self::DeterministicColumns => "(iii)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dominance {
    pub case: DominanceCase,
    /// The relation holds with the roles of `X` and `Y` exchanged.
    pub swapped: bool,
}

/// All clauses under which `q ◀ p` holds, identity orientation first.
pub fn dominance_cases(q: &BipartiteDistribution, p: &BipartiteDistribution) -> Vec<Dominance> {
    let mut out: Vec<Dominance> = oriented_cases(q, p)
        .into_iter()
        .map(|case| Dominance {
            case,
            swapped: false,
        })
        .collect();
    out.extend(
        oriented_cases(&q.transpose(), &p.transpose())
            .into_iter()
            .map(|case| Dominance {
                case,
                swapped: true,
            }),
    );
    out
}

/// The first clause under which `q ◀ p` holds, trying (i), (ii), (iii) in the
/// identity orientation and then with `X` and `Y` exchanged.
pub fn dominates(q: &BipartiteDistribution, p: &BipartiteDistribution) -> Option<Dominance> {
    dominance_cases(q, p).into_iter().next()
}

fn oriented_cases(q: &BipartiteDistribution, p: &BipartiteDistribution) -> Vec<DominanceCase> {
    let (qx, px) = (q.support_x(), p.support_x());
    if qx.iter().zip(&px).any(|(&a, &b)| a && !b) {
        return Vec::new();
    }
    let mut cases = Vec::new();
    let (mx, my) = (q.marginal_x(), q.marginal_y());
    let uncorrelated = (0..q.nx())
        .all(|x| (0..q.ny()).all(|y| (q.get(x, y) - mx[x] * my[y]).abs() <= SUPPORT_TOL));
    if uncorrelated {
        cases.push(DominanceCase::Uncorrelated);
    }
    let (qy, py) = (q.support_y(), p.support_y());
    let extra: Vec<usize> = (0..q.ny()).filter(|&y| qy[y] && !py[y]).collect();
    if extra.is_empty() {
        cases.push(DominanceCase::SupportInclusion);
    }
    let deterministic = extra.iter().all(|&y| {
        let column: Vec<f64> = (0..q.nx()).map(|x| q.get(x, y) / my[y]).collect();
        info::entropy(&column) < RESIDUAL_TOL
    });
    if deterministic {
        cases.push(DominanceCase::DeterministicColumns);
    }
    cases
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem4Witness {
    pub z0: usize,
    pub z1: usize,
    pub dominance: Dominance,
    /// `(x, y)` in the marginal supports of slice `z0` that is possible under
    /// `z1` and impossible under `z0`.
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem4Check {
    pub witnesses: Vec<Theorem4Witness>,
    /// Any witness certifies `K(X:Y||Z) < I(X:Y|Z)`.
    pub strict_gap: bool,
}

pub fn check_theorem4(d: &TripartiteDistribution) -> Theorem4Check {
    let slices = d.slices();
    let mut witnesses = Vec::new();
    for s0 in &slices {
        for s1 in &slices {
            if s0.z == s1.z {
                continue;
            }
            if let Some(w) = theorem4_pair(&s0.dist, &s1.dist) {
                witnesses.push(Theorem4Witness {
                    z0: s0.z,
                    z1: s1.z,
                    dominance: w.0,
                    pair: w.1,
                });
            }
        }
    }
    Theorem4Check {
        strict_gap: !witnesses.is_empty(),
        witnesses,
    }
}

fn theorem4_pair(
    p0: &BipartiteDistribution,
    p1: &BipartiteDistribution,
) -> Option<(Dominance, (usize, usize))> {
    let dominance = dominates(p1, p0)?;
    let (sx, sy) = (p0.support_x(), p0.support_y());
    for x in (0..p0.nx()).filter(|&x| sx[x]) {
        for y in (0..p0.ny()).filter(|&y| sy[y]) {
            if p1.get(x, y) > SUPPORT_TOL && p0.get(x, y) <= SUPPORT_TOL {
                return Some((dominance, (x, y)));
            }
        }
    }
    None
}

/// Samples of `f(t) = I(X:Y)` under `(1-t) p_{XY|Z=z0} + t p_{XY|Z=z1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingCurve {
    pub z0: usize,
    pub z1: usize,
    pub samples: Vec<(f64, f64)>,
    pub f0: f64,
    pub f1: f64,
    /// `max_t [(1-t) f(0) + t f(1) - f(t)]` over the samples.
    pub chord_gap: f64,
    pub chord_gap_at: f64,
}

pub fn mixing_curve(d: &TripartiteDistribution, z0: usize, z1: usize, grid: usize) -> Result<MixingCurve> {
    if grid == 0 {
        return Err(Error::InvalidConfig("mixing grid needs at least one step".into()));
    }
    let (p0, _) = d.condition_on_z(z0)?;
    let (p1, _) = d.condition_on_z(z1)?;
    let samples: Vec<(f64, f64)> = (0..=grid)
        .map(|i| {
            let t = i as f64 / grid as f64;
            (t, p0.mix(&p1, t).mutual_information())
        })
        .collect();
    let f0 = samples[0].1;
    let f1 = samples[grid].1;
    let (mut chord_gap, mut chord_gap_at) = (0.0, 0.0);
    for &(t, f) in &samples {
        let gap = (1.0 - t) * f0 + t * f1 - f;
        if gap > chord_gap {
            chord_gap = gap;
            chord_gap_at = t;
        }
    }
    Ok(MixingCurve {
        z0,
        z1,
        samples,
        f0,
        f1,
        chord_gap,
        chord_gap_at,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducingChannel {
    pub channel: Channel,
    pub epsilon: f64,
    /// `I(X:Y|Z)`.
    pub original: f64,
    /// `I(X:Y|Zbar)` after the channel.
    pub reduced: f64,
}

/// The channel sending `z1` to `z0` with probability `epsilon` and fixing
/// every other symbol.
pub fn mixing_channel(d: &TripartiteDistribution, z0: usize, z1: usize, epsilon: f64) -> Channel {
    let nz = d.z().len();
    let mut t = vec![0.0; nz * nz];
    for z in 0..nz {
        t[z * nz + z] = 1.0;
    }
    t[z1 * nz + z1] = 1.0 - epsilon;
    t[z1 * nz + z0] = epsilon;
    Channel::new(d.z().clone(), d.z().clone(), t).expect("rows are stochastic")
}

/// Finds the largest `epsilon = 2^-k` whose mixing channel strictly lowers
/// `I(X:Y|Z)`, certifying the two-way key-rate gap numerically.
pub fn construct_reducing_channel(
    d: &TripartiteDistribution,
    z0: usize,
    z1: usize,
) -> Result<ReducingChannel> {
    let check = check_theorem4(d);
    if !check.witnesses.iter().any(|w| w.z0 == z0 && w.z1 == z1) {
        return Err(Error::Precondition(format!(
            "no dominance witness for z0 = {}, z1 = {}",
            d.z().labels().get(z0).map_or("?", |s| s),
            d.z().labels().get(z1).map_or("?", |s| s),
        )));
    }
    let original = d.conditional_mutual_information();
    let mut best = f64::INFINITY;
    for k in EPSILON_GRID {
        let epsilon = (0.5f64).powi(k);
        let channel = mixing_channel(d, z0, z1, epsilon);
        let reduced = d.apply_channel_to_z(&channel)?.conditional_mutual_information();
        if reduced < original - RESIDUAL_TOL {
            return Ok(ReducingChannel {
                channel,
                epsilon,
                original,
                reduced,
            });
        }
        best = best.min(reduced);
    }
    Err(Error::NoStrictDecrease { original, best })
}
