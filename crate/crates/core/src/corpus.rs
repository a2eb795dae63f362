//! Built-in example distributions, each with the properties it is meant to
//! exhibit as machine-checkable predicates.
//!
//! Entries whose exact weights are not fixed by their description use uniform
//! weights on the described support, adjusted only where a stated number
//! forces it; each file's header comment records the choice. Setting
//! `SKDIST_CORPUS_DIR` loads `<dir>/<name>.dist` instead of the embedded text.

use std::path::PathBuf;

use serde::Serialize;

use crate::common;
use crate::dist::{TripartiteDistribution, Var};
use crate::error::{Error, Result};
use crate::format::{self, DistributionFile};
use crate::rates::{self, Direction};
use crate::structure::{self, DominanceCase};

pub const CORPUS_DIR_ENV: &str = "SKDIST_CORPUS_DIR";

type Check = fn(&TripartiteDistribution) -> bool;

pub struct Predicate {
    pub description: &'static str,
    pub check: Check,
}

pub struct CorpusEntry {
    pub name: &'static str,
    pub summary: &'static str,
    text: &'static str,
    pub predicates: &'static [Predicate],
}

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < TOL
}

fn cmi(d: &TripartiteDistribution) -> f64 {
    d.conditional_mutual_information()
}

fn cond(d: &TripartiteDistribution, x: &str, y: &str, z: &str) -> f64 {
    let (xi, yi) = (d.x().index_of(x).unwrap(), d.y().index_of(y).unwrap());
    let (b, _) = d.condition_on_label(z).unwrap();
    b.get(xi, yi)
}

fn scan_fails(d: &TripartiteDistribution, dir: Direction) -> bool {
    rates::lemma4_deterministic_scan(d, dir, TOL).is_ok_and(|s| s.passing.is_empty())
}

const fn p(description: &'static str, check: Check) -> Predicate {
    Predicate { description, check }
}

macro_rules! entry {
    ($name:literal, $summary:literal, [$($pred:expr),* $(,)?]) => {
        CorpusEntry {
            name: $name,
            summary: $summary,
            text: include_str!(concat!("../corpus/", $name, ".dist")),
            predicates: &[$($pred),*],
        }
    };
}

/// The fig4-demo one-way certificate from Bob's side: `K = Y` on `Y ∈ {0,1}`,
/// `K = 2` otherwise, and `U = [Y ∈ {0,1}]`.
pub fn fig4_bob_certificate(d: &TripartiteDistribution) -> Result<rates::Lemma4Certificate> {
    let aux = rates::AuxiliarySystem::deterministic(&[0, 1, 2], &[1, 1, 0])?;
    rates::check_lemma4_certificate(&Direction::BobToAlice.orient(d), &aux, TOL)
}

pub static ENTRIES: &[CorpusEntry] = &[
    entry!("perfect-bit", "X = Y uniform bit, Eve independent", [
        p("I(X:Y|Z) = 1", |d| close(cmi(d), 1.0)),
        p("H(J_XY|Z) = 1", |d| close(common::no_comm_key_rate(d), 1.0)),
        p("UBI", structure::is_ubi),
    ]),
    entry!("independent-cube", "three independent uniform bits", [
        p("I(X:Y|Z) = 0", |d| close(cmi(d), 0.0)),
        p("J_XY is constant", |d| common::global_partition(d).len() == 1),
        p("UBI", structure::is_ubi),
    ]),
    entry!("mix-corr-uncorr", "Eve knows whether X,Y are correlated or independent", [
        p("Z is a uniform bit", |d| d.marginal_z().iter().all(|&v| close(v, 0.5))),
        p("I(X:Y|Z) = 1/2", |d| close(cmi(d), 0.5)),
        p("I(X:Y) = 1 - h(1/4)", |d| {
            close(d.mutual_information(&[Var::X], &[Var::Y]), 1.0 - crate::info::binary_entropy(0.25))
        }),
        p("not UBI", |d| !structure::is_ubi(d)),
        p("Thm4 witness (corr, unc), case (i), pair (0,1)", |d| {
            structure::check_theorem4(d).witnesses.iter().any(|w| {
                w.z0 == 0 && w.z1 == 1 && w.dominance.case == DominanceCase::Uncorrelated && w.pair == (0, 1)
            })
        }),
    ]),
    entry!("ubi-demo", "two blocks under z=0, one under z=1", [
        p("UBI", structure::is_ubi),
        p("H(J_XY|Z) = I(X:Y|Z) = 1/2", |d| close(common::no_comm_key_rate(d), 0.5) && close(cmi(d), 0.5)),
        p("Thm3 passes", |d| structure::check_theorem3(d).is_empty()),
        p("no Thm4 witness", |d| !structure::check_theorem4(d).strict_gap),
    ]),
    entry!("not-ub-demo", "partition splits under z=0 only", [
        p("not UB", |d| !structure::is_uniform_block(d).holds),
        p("H(J_XY|Z) = 0", |d| close(common::no_comm_key_rate(d), 0.0)),
        p("H(J_{XY|Z}|Z) = 1/2", |d| close(common::helper_no_comm_key_rate(d), 0.5)),
    ]),
    entry!("ub-not-ubi-demo", "uniform blocks, correlated inside a block", [
        p("UB", |d| structure::is_uniform_block(d).holds),
        p("not UBI", |d| !structure::is_ubi(d)),
        p("p(0,0|1) = p(0,1|1) = p(1,0|1) = 1/3", |d| {
            [("0", "0"), ("0", "1"), ("1", "0")].iter().all(|(x, y)| close(cond(d, x, y, "1"), 1.0 / 3.0))
        }),
    ]),
    entry!("fig1a-demo", "block partition that changes with z", [
        p("not UB", |d| !structure::is_uniform_block(d).holds),
    ]),
    entry!("fig1b-demo", "uniform blocks with correlations in the z=1 block", [
        p("UB", |d| structure::is_uniform_block(d).holds),
        p("not UBI", |d| !structure::is_ubi(d)),
    ]),
    entry!("fig2a-demo", "(1,2) and (2,1) both possible given z=1 while p(1,1) > 0", [
        p("exactly one Thm3 violation, at z=1", |d| {
            let v = structure::check_theorem3(d);
            v.len() == 1 && v[0].z == 1
        }),
        p("p_XY(1,1) > 0", |d| d.marginal_xy().get(1, 1) > 0.0),
    ]),
    entry!("fig2b-demo", "p(1,1|2) = 0 while p(1,1|1) = 1/3", [
        p("p(1,1,1) = 1/6 and p(1,1|1) = 1/3 to 1e-15", |d| {
            d.get(1, 1, 0) == 1.0 / 6.0 && (cond(d, "1", "1", "1") - 1.0 / 3.0).abs() <= 1e-15
        }),
        p("p(1,1|2) = 0", |d| cond(d, "1", "1", "2") == 0.0),
        p("Thm3 passes", |d| structure::check_theorem3(d).is_empty()),
        p("Thm4 witness with z1 = 1, z0 = 2 at pair (1,1)", |d| {
            structure::check_theorem4(d).witnesses.iter().any(|w| w.z1 == 0 && w.z0 == 1 && w.pair == (1, 1))
        }),
    ]),
    entry!("fig3-demo", "slice supports not nested", [
        p("slice z=0 does not dominate slice z=1", |d| {
            let s = d.slices();
            structure::dominates(&s[0].dist, &s[1].dist).is_none()
        }),
        p("no Thm4 witness for (z0=1, z1=0)", |d| {
            !structure::check_theorem4(d).witnesses.iter().any(|w| w.z0 == 1 && w.z1 == 0)
        }),
    ]),
    entry!("fig4-demo", "one-way obstruction from the four Markov chains", [
        p("I(X:Y|Z) = 1/3", |d| close(cmi(d), 1.0 / 3.0)),
        p("Thm3 passes", |d| structure::check_theorem3(d).is_empty()),
        p("deterministic certificate scan fails Alice to Bob", |d| scan_fails(d, Direction::AliceToBob)),
        p("Bob to Alice certificate holds with objective 1/3", |d| {
            fig4_bob_certificate(d).is_ok_and(|c| c.holds && close(c.objective, 1.0 / 3.0))
        }),
    ]),
    entry!("fig5-demo", "fig4-demo with two more outcomes for Eve", [
        p("I(X:Y|Z) = 1/5", |d| close(cmi(d), 0.2)),
        p("deterministic certificate scan fails Alice to Bob", |d| scan_fails(d, Direction::AliceToBob)),
        p("deterministic certificate scan fails Bob to Alice", |d| scan_fails(d, Direction::BobToAlice)),
    ]),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|e| e.name)
}

pub fn find(name: &str) -> Option<&'static CorpusEntry> {
    let name = name.strip_suffix(".dist").unwrap_or(name);
    ENTRIES.iter().find(|e| e.name == name)
}

impl CorpusEntry {
    /// The file text, from `SKDIST_CORPUS_DIR` when set.
    pub fn text(&self) -> Result<String> {
        match std::env::var_os(CORPUS_DIR_ENV) {
            Some(dir) => {
                let path = PathBuf::from(dir).join(format!("{}.dist", self.name));
                std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
            }
            None => Ok(self.text.to_string()),
        }
    }

    pub fn embedded_text(&self) -> &'static str {
        self.text
    }

    pub fn load(&self) -> Result<DistributionFile> {
        format::parse(&self.text()?)
    }

    pub fn distribution(&self) -> Result<TripartiteDistribution> {
        Ok(self.load()?.dist)
    }

    pub fn verify(&self) -> Result<EntryReport> {
        let d = self.distribution()?;
        let results = self
            .predicates
            .iter()
            .map(|p| PredicateResult {
                description: p.description,
                passed: (p.check)(&d),
            })
            .collect();
        Ok(EntryReport {
            name: self.name,
            results,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredicateResult {
    pub description: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: &'static str,
    pub results: Vec<PredicateResult>,
}

impl EntryReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

pub fn verify_all() -> Result<Vec<EntryReport>> {
    ENTRIES.iter().map(CorpusEntry::verify).collect()
}
