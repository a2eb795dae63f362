//! Human-readable output. Symbols are printed by label.

use std::fmt::Write as _;

use skdist::common::{Block, CommonPartition, ConditionalCommonPartition};
use skdist::distill::{LeakageMode, SimConfig, SimResult};
use skdist::rates::{AcBound, DeterministicScan, Direction, IntrinsicBound, OneWayBounds};
use skdist::report::{Report, StructureReport};
use skdist::structure::{MixingCurve, ReducingChannel, Theorem3Violation, Theorem4Witness};
use skdist::{Alphabet, Error, TripartiteDistribution};

/// Six decimals with trailing zeros removed.
pub fn num(v: f64) -> String {
    let v = if v.abs() < 5e-7 { 0.0 } else { v };
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn set(a: &Alphabet, idx: &[usize]) -> String {
    let labels: Vec<&str> = idx.iter().map(|&i| a.label(i)).collect();
    format!("{{{}}}", labels.join(","))
}

fn block(d: &TripartiteDistribution, b: &Block) -> String {
    format!("{}x{}", set(d.x(), &b.xs), set(d.y(), &b.ys))
}

fn header(out: &mut String, name: &str, d: &TripartiteDistribution) {
    let [nx, ny, nz] = d.shape();
    let _ = writeln!(out, "distribution: {name} ({nx}x{ny}x{nz})");
}

fn witness(d: &TripartiteDistribution, w: &Theorem4Witness) -> String {
    format!(
        "z0={}, z1={}, case {}{}, pair ({},{})",
        d.z().label(w.z0),
        d.z().label(w.z1),
        w.dominance.case,
        if w.dominance.swapped { " with X,Y exchanged" } else { "" },
        d.x().label(w.pair.0),
        d.y().label(w.pair.1),
    )
}

fn violation(d: &TripartiteDistribution, v: &Theorem3Violation) -> String {
    format!(
        "z={}: blocks {} and {}, p_XY(X_i,Y_j) = {}",
        d.z().label(v.z),
        block(d, &v.block_i),
        block(d, &v.block_j),
        num(v.mass)
    )
}

pub fn analysis(name: &str, d: &TripartiteDistribution, r: &Report) -> String {
    let s = &r.structure;
    let q = &r.rates;
    let mut out = String::new();
    header(&mut out, name, d);
    let _ = writeln!(out, "I(X:Y|Z) = {}", num(s.cmi));
    let _ = writeln!(out, "I(X:Y) = {}", num(s.mutual_information));
    let _ = writeln!(out, "H(J_XY) = {} ({} blocks)", num(s.common_information), s.common_blocks);
    let _ = writeln!(out, "H(J_XY|Z) = {}", num(s.no_comm_key_rate));
    let _ = writeln!(out, "H(J_XY|Z) with helper = {}", num(s.helper_key_rate));
    let _ = writeln!(out, "I(X:Y|Z J_XY) = {}", num(s.cmi_given_common));
    let _ = writeln!(out, "UB: {}", yes(s.ubi.uniform_block.holds));
    let _ = writeln!(out, "UBI: {}", yes(s.ubi.holds));
    if s.ubi.holds {
        let _ = writeln!(out, "K^c.r. = I(X:Y|Z) = {}", num(s.cmi));
    } else {
        let _ = writeln!(out, "K^c.r. = {} < I(X:Y|Z) = {}", num(s.no_comm_key_rate), num(s.cmi));
    }
    if s.theorem3_violations.is_empty() {
        let _ = writeln!(out, "Thm3: pass");
    } else {
        let _ = writeln!(out, "Thm3: {} violations", s.theorem3_violations.len());
        for v in &s.theorem3_violations {
            let _ = writeln!(out, "  {}", violation(d, v));
        }
    }
    match s.theorem4_witnesses.first() {
        None => {
            let _ = writeln!(out, "Thm4: no witness");
        }
        Some(w) => {
            let _ = writeln!(out, "Thm4 witness ({}) => K < I(X:Y|Z) = {}", witness(d, w), num(s.cmi));
        }
    }
    let _ = writeln!(
        out,
        "one-way lower bounds: A->B {}, B->A {}",
        num(q.oneway_lower.alice_to_bob),
        num(q.oneway_lower.bob_to_alice)
    );
    let _ = writeln!(
        out,
        "one-way optimized (best-effort lower bound): A->B {}, B->A {}",
        num(q.ac_alice_to_bob.value),
        num(q.ac_bob_to_alice.value)
    );
    let _ = writeln!(out, "intrinsic upper bound: {}", num(q.intrinsic_upper.value));
    out
}

fn partition_lines(out: &mut String, d: &TripartiteDistribution, p: &CommonPartition, indent: &str) {
    for b in p.blocks() {
        let _ = writeln!(out, "{indent}{} weight {}", block(d, b), num(b.weight));
    }
    let (nx, ny) = (p.null_x(), p.null_y());
    if !nx.is_empty() || !ny.is_empty() {
        let _ = writeln!(out, "{indent}null: x {} y {}", set(d.x(), &nx), set(d.y(), &ny));
    }
}

pub fn partitions(
    name: &str,
    d: &TripartiteDistribution,
    global: &CommonPartition,
    cond: &ConditionalCommonPartition,
) -> String {
    let mut out = String::new();
    header(&mut out, name, d);
    let _ = writeln!(out, "J_XY: {} blocks, H(J_XY) = {}", global.len(), num(global.entropy()));
    partition_lines(&mut out, d, global, "  ");
    for s in &cond.slices {
        let _ = writeln!(
            out,
            "z={} (p = {}): {} blocks",
            d.z().label(s.z),
            num(s.weight),
            s.partition.len()
        );
        partition_lines(&mut out, d, &s.partition, "  ");
    }
    out
}

pub fn classification(name: &str, s: &StructureReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "distribution: {name}");
    let _ = writeln!(out, "I(X:Y|Z) = {}", num(s.cmi));
    let _ = writeln!(out, "H(J_XY|Z) = {}", num(s.no_comm_key_rate));
    let _ = writeln!(out, "H(J_XY|Z) with helper = {}", num(s.helper_key_rate));
    let _ = writeln!(
        out,
        "UB: {} (residual {})",
        yes(s.ubi.uniform_block.holds),
        num(s.ubi.uniform_block.residual)
    );
    let _ = writeln!(out, "UBI: {} (I(X:Y|Z J_XY) = {})", yes(s.ubi.holds), num(s.ubi.within_block_cmi));
    out
}

pub fn oneway(
    name: &str,
    d: &TripartiteDistribution,
    violations: &[Theorem3Violation],
    bounds: &OneWayBounds,
    scans: &[Result<DeterministicScan, Error>],
) -> String {
    let mut out = String::new();
    header(&mut out, name, d);
    let _ = writeln!(out, "I(X:Y|Z) = {}", num(d.conditional_mutual_information()));
    if violations.is_empty() {
        let _ = writeln!(out, "Thm3: pass");
    } else {
        let _ = writeln!(out, "Thm3: {} violations => one-way K < I(X:Y|Z)", violations.len());
        for v in violations {
            let _ = writeln!(out, "  {}", violation(d, v));
        }
    }
    let _ = writeln!(
        out,
        "lower bounds: A->B {}, B->A {}",
        num(bounds.alice_to_bob),
        num(bounds.bob_to_alice)
    );
    for s in scans {
        match s {
            Ok(s) => {
                let dir = match s.direction {
                    Direction::AliceToBob => "A->B",
                    Direction::BobToAlice => "B->A",
                };
                let _ = writeln!(
                    out,
                    "certificate scan {dir}: {} of {} deterministic (K,U) pass, min residual {}",
                    s.passing.len(),
                    s.candidates,
                    num(s.min_max_residual)
                );
            }
            Err(e) => {
                let _ = writeln!(out, "certificate scan skipped: {e}");
            }
        }
    }
    out
}

type TwowayDetail = (Theorem4Witness, Result<ReducingChannel, Error>, MixingCurve);

pub fn twoway(name: &str, d: &TripartiteDistribution, details: &[TwowayDetail]) -> String {
    let mut out = String::new();
    header(&mut out, name, d);
    let _ = writeln!(out, "I(X:Y|Z) = {}", num(d.conditional_mutual_information()));
    if details.is_empty() {
        let _ = writeln!(out, "Thm4: no witness");
    }
    for (w, c, curve) in details {
        let _ = writeln!(out, "witness: {}", witness(d, w));
        match c {
            Ok(c) => {
                let _ = writeln!(
                    out,
                    "  reducing channel: epsilon = 2^-{}, I(X:Y|Zbar) = {:.9} < {:.9}",
                    (-c.epsilon.log2()).round(),
                    c.reduced,
                    c.original
                );
            }
            Err(e) => {
                let _ = writeln!(out, "  reducing channel: {e}");
            }
        }
        let _ = writeln!(
            out,
            "  mixing curve: f(0) = {}, f(1) = {}, chord gap {} at t = {}",
            num(curve.f0),
            num(curve.f1),
            num(curve.chord_gap),
            num(curve.chord_gap_at)
        );
    }
    out
}

pub fn intrinsic(name: &str, cmi: f64, b: &IntrinsicBound) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "distribution: {name}");
    let _ = writeln!(out, "I(X:Y|Z) = {}", num(cmi));
    let _ = writeln!(out, "intrinsic upper bound: {:.9}", b.value);
    let n = b.channel.input().len();
    for i in 0..n {
        let row: Vec<String> = b.channel.row(i).iter().map(|v| format!("{v:.4}")).collect();
        let _ = writeln!(out, "  {} -> [{}]", b.channel.input().label(i), row.join(" "));
    }
    out
}

pub fn oneway_opt(name: &str, dir: Direction, cmi: f64, simple: f64, b: &AcBound) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "distribution: {name}");
    let dir = match dir {
        Direction::AliceToBob => "A->B",
        Direction::BobToAlice => "B->A",
    };
    let _ = writeln!(out, "direction: {dir}");
    let _ = writeln!(out, "I(X:Y|Z) = {}", num(cmi));
    let _ = writeln!(out, "simple bound: {}", num(simple));
    let _ = writeln!(out, "optimized I(K:Y|U) - I(K:Z|U) = {:.9} (best-effort lower bound)", b.value);
    out
}

pub fn simulation(name: &str, cfg: &SimConfig, h: f64, r: &SimResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "distribution: {name}");
    let mode = match cfg.mode {
        LeakageMode::Exact => "exact".to_string(),
        LeakageMode::Sampled { z_samples } => format!("sampled ({z_samples} z^n)"),
    };
    let _ = writeln!(
        out,
        "n = {}, rate = {}, |K| = {}, trials = {}, seed = {}, {mode}",
        cfg.n, cfg.rate, r.key_size, cfg.trials, cfg.seed
    );
    let _ = writeln!(out, "H(J_XY|Z) = {}", num(h));
    let _ = writeln!(out, "agreement = {}", num(r.agreement));
    let _ = writeln!(out, "leakage = {:.9} (trial {})", r.leakage, r.best_trial);
    let _ = writeln!(out, "rate achieved = {}", num(r.rate_achieved));
    out
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn numbers_are_trimmed() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(1.0 / 3.0), "0.333333");
        assert_eq!(num(-1e-12), "0");
    }
}
