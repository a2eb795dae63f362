//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! Reference values come from oracles coded here against raw arrays, not
//! from the library's own helpers.

use std::process::Command;
use std::time::Instant;

use skdist::common;
use skdist::corpus::{self, ENTRIES};
use skdist::distill::{self, LeakageMode, SimConfig};
use skdist::rates::{self, AuxiliarySystem, Direction, FourVariableJoint, OptimizerOptions};
use skdist::rng::SplitMix64;
use skdist::structure;
use skdist::{Alphabet, TripartiteDistribution};

fn report(n: &str, ok: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn corpus_dist(name: &str) -> TripartiteDistribution {
    corpus::find(name).unwrap().distribution().unwrap()
}

// ---- independent oracles -------------------------------------------------

fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// I(X:Y|Z) from a dense x-major, z-fastest tensor, via four joint entropies.
fn cmi_oracle(nx: usize, ny: usize, nz: usize, p: &[f64]) -> f64 {
    let mut xz = vec![0.0; nx * nz];
    let mut yz = vec![0.0; ny * nz];
    let mut z = vec![0.0; nz];
    for x in 0..nx {
        for y in 0..ny {
            for k in 0..nz {
                let v = p[(x * ny + y) * nz + k];
                xz[x * nz + k] += v;
                yz[y * nz + k] += v;
                z[k] += v;
            }
        }
    }
    h(&xz) + h(&yz) - h(p) - h(&z)
}

fn cmi_of(d: &TripartiteDistribution) -> f64 {
    let [nx, ny, nz] = d.shape();
    cmi_oracle(nx, ny, nz, d.probs())
}

/// max over common functions f(X) = g(Y) of H(f(X)|Z), by enumerating every
/// f: X -> {0..|X|-1} and keeping those constant on each y's neighbourhood.
fn brute_force_common_rate(d: &TripartiteDistribution) -> f64 {
    let [nx, ny, nz] = d.shape();
    let pxy = |x: usize, y: usize| (0..nz).map(|z| d.get(x, y, z)).sum::<f64>();
    let total = nx.pow(nx as u32);
    let mut best = 0.0f64;
    for code in 0..total {
        let f: Vec<usize> = (0..nx).map(|i| code / nx.pow(i as u32) % nx).collect();
        let consistent = (0..ny).all(|y| {
            let mut seen = None;
            (0..nx).filter(|&x| pxy(x, y) > 1e-12).all(|x| match seen {
                None => {
                    seen = Some(f[x]);
                    true
                }
                Some(v) => v == f[x],
            })
        });
        if !consistent {
            continue;
        }
        let mut fz = vec![0.0; nx * nz];
        let mut pz = vec![0.0; nz];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    fz[f[x] * nz + z] += d.get(x, y, z);
                    pz[z] += d.get(x, y, z);
                }
            }
        }
        best = best.max(h(&fz) - h(&pz));
    }
    best
}

/// Connected components of the support of an `nx x ny` matrix, by DFS.
/// Returns the component of every x (None for null symbols).
fn components(nx: usize, ny: usize, m: &[f64]) -> Vec<Option<usize>> {
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

// ---- random instances ----------------------------------------------------

fn normalize(mut p: Vec<f64>) -> Vec<f64> {
    let s: f64 = p.iter().sum();
    if s == 0.0 {
        p[0] = 1.0;
        return p;
    }
    p.iter_mut().for_each(|v| *v /= s);
    p
}

fn sparse_random(r: &mut SplitMix64, nx: usize, ny: usize, nz: usize) -> TripartiteDistribution {
    let p = normalize(
        (0..nx * ny * nz)
            .map(|_| if r.next_f64() < 0.5 { 0.0 } else { r.next_f64() })
            .collect(),
    );
    TripartiteDistribution::new(Alphabet::range(nx), Alphabet::range(ny), Alphabet::range(nz), p).unwrap()
}

/// Random block structure with independent X, Y inside each block and slice.
fn blocky_random(r: &mut SplitMix64, nx: usize, ny: usize, nz: usize) -> TripartiteDistribution {
    let nb = 1 + r.below(nx.min(ny) as u64) as usize;
    let bx: Vec<usize> = (0..nx).map(|x| if x < nb { x } else { r.below(nb as u64) as usize }).collect();
    let by: Vec<usize> = (0..ny).map(|y| if y < nb { y } else { r.below(nb as u64) as usize }).collect();
    let qx: Vec<f64> = (0..nx * nz).map(|_| 0.1 + r.next_f64()).collect();
    let qy: Vec<f64> = (0..ny * nz).map(|_| 0.1 + r.next_f64()).collect();
    let wb: Vec<f64> = (0..nb * nz).map(|_| if r.next_f64() < 0.3 { 0.0 } else { r.next_f64() }).collect();
    let mut p = vec![0.0; nx * ny * nz];
    for z in 0..nz {
        for b in 0..nb {
            let sx: f64 = (0..nx).filter(|&x| bx[x] == b).map(|x| qx[x * nz + z]).sum();
            let sy: f64 = (0..ny).filter(|&y| by[y] == b).map(|y| qy[y * nz + z]).sum();
            for x in (0..nx).filter(|&x| bx[x] == b) {
                for y in (0..ny).filter(|&y| by[y] == b) {
                    p[(x * ny + y) * nz + z] = wb[b * nz + z] * qx[x * nz + z] / sx * qy[y * nz + z] / sy;
                }
            }
        }
    }
    let p = normalize(p);
    TripartiteDistribution::new(Alphabet::range(nx), Alphabet::range(ny), Alphabet::range(nz), p).unwrap()
}

fn random_instance(r: &mut SplitMix64, max: usize) -> TripartiteDistribution {
    let mut size = || 1 + r.below(max as u64) as usize;
    let (nx, ny, nz) = (size(), size(), size());
    if r.next_f64() < 0.5 {
        sparse_random(r, nx, ny, nz)
    } else {
        blocky_random(r, nx, ny, nz)
    }
}

// ---- criteria ------------------------------------------------------------

#[test]
fn criterion_1_ubi_equivalence() {
    let start = Instant::now();
    let mut r = SplitMix64::new(1);
    let mut dists: Vec<TripartiteDistribution> = ENTRIES.iter().map(|e| e.distribution().unwrap()).collect();
    dists.extend((0..1000).map(|_| random_instance(&mut r, 3)));
    let mut mismatches = 0;
    let mut ubi = 0;
    for d in &dists {
        let lhs = structure::is_ubi(d);
        let rhs = (brute_force_common_rate(d) - cmi_of(d)).abs() < 1e-7;
        ubi += lhs as usize;
        mismatches += (lhs != rhs) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "1",
        mismatches == 0 && ubi > 0 && ubi < dists.len() && secs < 10.0,
        format!("{} instances, {ubi} UBI, {mismatches} mismatches, {secs:.2}s", dists.len()),
    );
}

#[test]
fn criterion_2_common_rate_oracle() {
    let start = Instant::now();
    let mut r = SplitMix64::new(2);
    let mut dists: Vec<TripartiteDistribution> = ENTRIES
        .iter()
        .map(|e| e.distribution().unwrap())
        .filter(|d| d.x().len() <= 4 && d.y().len() <= 4)
        .collect();
    dists.extend((0..3000).map(|_| random_instance(&mut r, 4)));
    let mut worst = 0.0f64;
    for d in &dists {
        worst = worst.max((common::no_comm_key_rate(d) - brute_force_common_rate(d)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "2",
        worst <= 1e-9 && secs < 30.0,
        format!("{} instances, max deviation {worst:.2e}, {secs:.2}s", dists.len()),
    );
}

/// Rational `p(x,y|z)` read straight from the corpus text.
fn exact_conditional(text: &str, x: &str, y: &str, z: &str) -> (i128, i128) {
    let (mut num, mut den) = ((0i128, 1i128), (0i128, 1i128));
    let add = |acc: (i128, i128), v: (i128, i128)| (acc.0 * v.1 + v.0 * acc.1, acc.1 * v.1);
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 || line.contains(':') {
            continue;
        }
        let v = match f[3].split_once('/') {
            Some((a, b)) => (a.parse().unwrap(), b.parse().unwrap()),
            None => panic!("corpus entry uses a decimal: {line}"),
        };
        if f[2] == z {
            den = add(den, v);
            if f[0] == x && f[1] == y {
                num = add(num, v);
            }
        }
    }
    let (a, b) = (num.0 * den.1, num.1 * den.0);
    let g = gcd(a, b);
    (a / g, b / g)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs().max(1)
    } else {
        gcd(b, a % b)
    }
}

/// `I(X:Y|Zbar)` after pushing `Z` through a channel matrix, recomputed here.
fn reduced_cmi(d: &TripartiteDistribution, t: &[f64]) -> f64 {
    let [nx, ny, nz] = d.shape();
    let mut q = vec![0.0; nx * ny * nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                for zb in 0..nz {
                    q[(x * ny + y) * nz + zb] += d.get(x, y, z) * t[z * nz + zb];
                }
            }
        }
    }
    cmi_oracle(nx, ny, nz, &q)
}

#[test]
fn criterion_3_reducing_channel_certificate() {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, z0, z1) in [("mix-corr-uncorr", "corr", "unc"), ("fig2b-demo", "2", "1")] {
        let d = corpus_dist(name);
        let (i0, i1) = (d.z().index_of(z0).unwrap(), d.z().index_of(z1).unwrap());
        match structure::construct_reducing_channel(&d, i0, i1) {
            Ok(c) => {
                let before = cmi_of(&d);
                let after = reduced_cmi(&d, c.channel.matrix());
                ok &= after <= before - 1e-6;
                detail.push(format!("{name}: {before:.6} -> {after:.6}"));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{name}: {e}"));
            }
        }
    }
    let ubi = corpus_dist("ubi-demo");
    let none = structure::check_theorem4(&ubi).witnesses.is_empty();
    ok &= none;
    detail.push(format!("ubi-demo witnesses: {}", if none { "none" } else { "some" }));
    let text = corpus::find("fig2b-demo").unwrap().embedded_text();
    let p1 = exact_conditional(text, "1", "1", "1");
    let p2 = exact_conditional(text, "1", "1", "2");
    ok &= p1 == (1, 3) && p2.0 == 0;
    detail.push(format!("p(1,1|1) = {}/{}, p(1,1|2) = {}/{}", p1.0, p1.1, p2.0, p2.1));
    report("3", ok, detail.join("; "));
}

#[test]
fn criterion_4_cross_block_checker() {
    let fig2a = structure::check_theorem3(&corpus_dist("fig2a-demo"));
    let ubi = structure::check_theorem3(&corpus_dist("ubi-demo"));
    let fig4 = corpus_dist("fig4-demo");
    let fig4_violations = structure::check_theorem3(&fig4);
    let scan = rates::lemma4_deterministic_scan(&fig4, Direction::AliceToBob, 1e-9).unwrap();
    let aux = AuxiliarySystem::deterministic(&[0, 1, 2], &[1, 1, 0]).unwrap();
    let cert = rates::check_lemma4_certificate(&fig4.swap_xy(), &aux, 1e-9).unwrap();
    let ok = fig2a.len() == 1
        && ubi.is_empty()
        && fig4_violations.is_empty()
        && scan.passing.is_empty()
        && cert.residuals.iter().all(|&r| r < 1e-9)
        && (cert.objective - 1.0 / 3.0).abs() <= 1e-9;
    report(
        "4",
        ok,
        format!(
            "fig2a {} violation(s), ubi-demo {}, fig4 {}; A->B scan {}/{} pass (min residual {:.3}); \
             B->A residuals {:?}, objective {:.12}",
            fig2a.len(),
            ubi.len(),
            fig4_violations.len(),
            scan.passing.len(),
            scan.candidates,
            scan.min_max_residual,
            cert.residuals,
            cert.objective
        ),
    );
}

#[test]
fn criterion_5_intrinsic_sandwich() {
    let start = Instant::now();
    let opts = OptimizerOptions::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for e in ENTRIES {
        let d = e.distribution().unwrap();
        if !structure::is_ubi(&d) {
            continue;
        }
        let b = rates::intrinsic_information_upper(&d, &opts);
        let gap = (b.value - cmi_of(&d)).abs();
        ok &= gap < 1e-7;
        detail.push(format!("{} gap {gap:.1e}", e.name));
    }
    let d = corpus_dist("mix-corr-uncorr");
    let opt = rates::intrinsic_information_upper(&d, &opts).value;
    let mut grid = f64::INFINITY;
    for i in 0..=1000 {
        for j in 0..=1000 {
            let (a, b) = (i as f64 / 1000.0, j as f64 / 1000.0);
            grid = grid.min(reduced_cmi(&d, &[a, 1.0 - a, b, 1.0 - b]));
        }
    }
    ok &= (opt - grid).abs() < 1e-4;
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    detail.push(format!("mix-corr-uncorr optimizer {opt:.9} vs grid {grid:.9}, {secs:.2}s"));
    report("5", ok, detail.join("; "));
}

#[test]
fn criterion_6_privacy_amplification_decay() {
    let start = Instant::now();
    let d = corpus_dist("ubi-demo");
    let sweep = |rate: f64| -> Vec<(usize, u64, f64)> {
        [2, 4, 6, 8]
            .into_iter()
            .map(|n| {
                let cfg = SimConfig {
                    n,
                    rate,
                    trials: 64,
                    seed: 6,
                    mode: LeakageMode::Exact,
                };
                let r = distill::simulate_privacy_amplification(&d, &cfg).unwrap();
                (n, r.key_size, r.leakage)
            })
            .collect()
    };
    let below = sweep(0.4);
    let above = sweep(0.8);
    let decreasing = below.windows(2).all(|w| w[1].2 < w[0].2);
    let bounded_away = above.iter().all(|r| r.2 > 0.05);
    let again = sweep(0.4);
    let deterministic = again == below;
    let secs = start.elapsed().as_secs_f64();
    let fmt = |v: &[(usize, u64, f64)]| {
        v.iter()
            .map(|(n, k, l)| format!("n={n} |K|={k} {l:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    report(
        "6",
        decreasing && bounded_away && deterministic && secs < 120.0,
        format!(
            "rate 0.4 [{}] strictly decreasing: {decreasing}; rate 0.8 [{}] > 0.05: {bounded_away}; \
             deterministic: {deterministic}; {secs:.2}s",
            fmt(&below),
            fmt(&above)
        ),
    );
}

fn random_four_variable(r: &mut SplitMix64) -> FourVariableJoint {
    let mut size = || 1 + r.below(3) as usize;
    let (nx, ny, nz, nw) = (size(), size(), size(), size());
    let base = sparse_random(r, nx, ny, nz);
    // Half the instances draw W from (J_{XY|Z}, Z) only, the rest from (X, Y, Z).
    let via_common = r.next_f64() < 0.5;
    let mut kernel = |_: usize| -> Vec<f64> {
        normalize((0..nw).map(|_| if r.next_f64() < 0.3 { 0.0 } else { r.next_f64() }).collect())
    };
    let mut p = vec![0.0; nx * ny * nz * nw];
    for z in 0..nz {
        let slice: Vec<f64> = (0..nx * ny).map(|i| base.get(i / ny, i % ny, z)).collect();
        let comp = components(nx, ny, &slice);
        let per_block: Vec<Vec<f64>> = (0..nx).map(&mut kernel).collect();
        for x in 0..nx {
            for y in 0..ny {
                let w_dist = if via_common {
                    per_block[comp[x].unwrap_or(0)].clone()
                } else {
                    kernel(0)
                };
                for w in 0..nw {
                    p[((x * ny + y) * nz + z) * nw + w] = slice[x * ny + y] * w_dist[w];
                }
            }
        }
    }
    FourVariableJoint::from_fn(
        Alphabet::range(nx),
        Alphabet::range(ny),
        Alphabet::range(nz),
        Alphabet::range(nw),
        |x, y, z, w| p[((x * ny + y) * nz + z) * nw + w],
    )
    .unwrap()
}

#[test]
fn criterion_7_double_markov_equivalence() {
    let start = Instant::now();
    let mut r = SplitMix64::new(7);
    let (mut both, mut neither, mut mismatched) = (0, 0, 0);
    for _ in 0..500 {
        let j = random_four_variable(&mut r);
        let res = rates::double_markov_residual(&j);
        match (res.chains < 1e-9, res.criterion < 1e-9) {
            (true, true) => both += 1,
            (false, false) => neither += 1,
            _ => mismatched += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "7",
        mismatched == 0 && both > 0 && neither > 0 && secs < 20.0,
        format!("500 joints: {both} Markov, {neither} not, {mismatched} disagreements, {secs:.2}s"),
    );
}

#[test]
fn criterion_8_rate_ordering_chain() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut check = |label: String, d: &TripartiteDistribution, opts: &OptimizerOptions| {
        let cmi = cmi_of(d);
        let no_comm = common::no_comm_key_rate(d);
        let helper = common::helper_no_comm_key_rate(d);
        let upper = rates::intrinsic_information_upper(d, opts).value;
        let lb = rates::oneway_lower_bounds(d);
        let ab = rates::ac_rate_optimize(d, opts).value;
        let ba = rates::ac_rate_optimize(&Direction::BobToAlice.orient(d), opts).value;
        let ok = no_comm >= 0.0
            && no_comm <= helper + 1e-9
            && helper <= cmi + 1e-9
            && upper <= cmi + 1e-9
            && lb.alice_to_bob <= ab + 1e-6
            && lb.bob_to_alice <= ba + 1e-6
            && ab <= cmi + 1e-6
            && ba <= cmi + 1e-6;
        if !ok {
            failures.push(format!(
                "{label}: no_comm {no_comm} helper {helper} upper {upper} cmi {cmi} lb {lb:?} ac {ab} {ba}"
            ));
        }
    };
    for e in ENTRIES {
        check(e.name.to_string(), &e.distribution().unwrap(), &OptimizerOptions::default());
    }
    let quick = OptimizerOptions {
        restarts: 4,
        iterations: 400,
        seed: 8,
    };
    let mut r = SplitMix64::new(8);
    for i in 0..100 {
        check(format!("random #{i}"), &random_instance(&mut r, 3), &quick);
    }
    let out = Command::new(env!("CARGO_BIN_EXE_skdist"))
        .args(["corpus", "verify"])
        .output()
        .unwrap();
    let verify_ok = out.status.success();
    let secs = start.elapsed().as_secs_f64();
    report(
        "8",
        failures.is_empty() && verify_ok,
        format!(
            "{} corpus + 100 random instances, {} chain failures {:?}; corpus verify exit {}; {secs:.2}s",
            ENTRIES.len(),
            failures.len(),
            failures.first(),
            out.status.code().unwrap_or(-1)
        ),
    );
}
