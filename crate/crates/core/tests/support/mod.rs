//! Reference computations written directly against raw arrays, plus
//! distribution generators for property tests.
#![allow(dead_code)]

use proptest::prelude::*;
use skdist::{Alphabet, TripartiteDistribution};

pub fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// `I(X:Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z)`.
pub fn cmi(d: &TripartiteDistribution) -> f64 {
    let [nx, ny, nz] = d.shape();
    let mut xz = vec![0.0; nx * nz];
    let mut yz = vec![0.0; ny * nz];
    let mut z = vec![0.0; nz];
    for x in 0..nx {
        for y in 0..ny {
            for k in 0..nz {
                let v = d.get(x, y, k);
                xz[x * nz + k] += v;
                yz[y * nz + k] += v;
                z[k] += v;
            }
        }
    }
    h(&xz) + h(&yz) - h(d.probs()) - h(&z)
}

/// Component label of every x in the support graph of an `nx x ny` matrix,
/// by depth-first search.
pub fn components(nx: usize, ny: usize, m: &[f64]) -> Vec<Option<usize>> {
    let mut comp = vec![None; nx];
    let mut next = 0;
    for start in 0..nx {
        if comp[start].is_some() || (0..ny).all(|y| m[start * ny + y] <= 1e-12) {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = Some(next);
        while let Some(x) = stack.pop() {
            for y in (0..ny).filter(|&y| m[x * ny + y] > 1e-12) {
                for x2 in (0..nx).filter(|&x2| m[x2 * ny + y] > 1e-12) {
                    if comp[x2].is_none() {
                        comp[x2] = Some(next);
                        stack.push(x2);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}

/// All maps `{0..n} -> {0..m}`.
pub fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..m.pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = c % m;
                    c /= m;
                    v
                })
                .collect()
        })
        .collect()
}

/// Common functions of `p_XY`: every `f` on X for which some `g` on Y has
/// `f(X) = g(Y)` almost surely.
pub fn common_functions(nx: usize, ny: usize, pxy: &[f64]) -> Vec<Vec<usize>> {
    all_maps(nx, nx)
        .into_iter()
        .filter(|f| {
            (0..ny).all(|y| {
                let vals: Vec<usize> = (0..nx).filter(|&x| pxy[x * ny + y] > 1e-12).map(|x| f[x]).collect();
                vals.windows(2).all(|w| w[0] == w[1])
            })
        })
        .collect()
}

/// The maximum-entropy common function's level sets on the support of X.
pub fn brute_force_partition(nx: usize, ny: usize, pxy: &[f64]) -> Vec<Vec<usize>> {
    let px: Vec<f64> = (0..nx).map(|x| (0..ny).map(|y| pxy[x * ny + y]).sum()).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for f in common_functions(nx, ny, pxy) {
        let mut pf = vec![0.0; nx];
        for x in 0..nx {
            pf[f[x]] += px[x];
        }
        let e = h(&pf);
        if best.as_ref().is_none_or(|(b, _)| e > b + 1e-12) {
            best = Some((e, f));
        }
    }
    let f = best.unwrap().1;
    let mut sets: Vec<Vec<usize>> = (0..nx)
        .map(|v| (0..nx).filter(|&x| px[x] > 1e-12 && f[x] == v).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    sets.sort();
    sets
}

pub fn dist(nx: usize, ny: usize, nz: usize, weights: &[u32]) -> TripartiteDistribution {
    let total: u32 = weights.iter().sum();
    let p: Vec<f64> = if total == 0 {
        let mut p = vec![0.0; weights.len()];
        p[0] = 1.0;
        p
    } else {
        weights.iter().map(|&w| w as f64 / total as f64).collect()
    };
    TripartiteDistribution::new(Alphabet::range(nx), Alphabet::range(ny), Alphabet::range(nz), p).unwrap()
}

/// Small distributions with many exact zeros.
pub fn arb_dist(max: usize) -> impl Strategy<Value = TripartiteDistribution> {
    (1..=max, 1..=max, 1..=max).prop_flat_map(|(nx, ny, nz)| {
        proptest::collection::vec(prop_oneof![2 => Just(0u32), 3 => 1u32..20], nx * ny * nz)
            .prop_map(move |w| dist(nx, ny, nz, &w))
    })
}
