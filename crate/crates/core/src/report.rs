//! One-shot aggregation of every analysis on a distribution.

use serde::Serialize;

use crate::common;
use crate::dist::{TripartiteDistribution, Var};
use crate::rates::{self, AcBound, Direction, IntrinsicBound, OneWayBounds, OptimizerOptions};
use crate::structure::{self, Theorem3Violation, Theorem4Witness, UbiCheck};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub cmi: f64,
    pub mutual_information: f64,
    /// `H(J_XY)`.
    pub common_information: f64,
    pub common_blocks: usize,
    pub no_comm_key_rate: f64,
    pub helper_key_rate: f64,
    /// `I(X:Y|Z J_XY)`.
    pub cmi_given_common: f64,
    pub ubi: UbiCheck,
    pub theorem3_violations: Vec<Theorem3Violation>,
    pub theorem4_witnesses: Vec<Theorem4Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub no_comm: f64,
    pub oneway_lower: OneWayBounds,
    /// Optimized one-way rate expression with Alice communicating.
    pub ac_alice_to_bob: AcBound,
    /// The same with Bob communicating.
    pub ac_bob_to_alice: AcBound,
    pub intrinsic_upper: IntrinsicBound,
    /// `K = I(X:Y|Z)` without communication (UBI).
    pub cmi_achieved_without_communication: bool,
    /// A Thm3 violation rules out `K_one-way = I(X:Y|Z)` in that direction.
    pub oneway_obstructed: bool,
    /// A Thm4 witness certifies `K < I(X:Y|Z)` with two-way communication.
    pub twoway_strict_gap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub structure: StructureReport,
    pub rates: RateReport,
}

pub fn structure_report(d: &TripartiteDistribution) -> StructureReport {
    let j = common::global_partition(d);
    StructureReport {
        cmi: d.conditional_mutual_information(),
        mutual_information: d.mutual_information(&[Var::X], &[Var::Y]),
        common_information: j.entropy(),
        common_blocks: j.len(),
        no_comm_key_rate: common::no_comm_key_rate(d),
        helper_key_rate: common::helper_no_comm_key_rate(d),
        cmi_given_common: common::cmi_given_common(d),
        ubi: structure::ubi_check(d),
        theorem3_violations: structure::check_theorem3(d),
        theorem4_witnesses: structure::check_theorem4(d).witnesses,
    }
}

pub fn rate_report(d: &TripartiteDistribution, s: &StructureReport, opts: &OptimizerOptions) -> RateReport {
    RateReport {
        no_comm: s.no_comm_key_rate,
        oneway_lower: rates::oneway_lower_bounds(d),
        ac_alice_to_bob: rates::ac_rate_optimize(d, opts),
        ac_bob_to_alice: rates::ac_rate_optimize(&Direction::BobToAlice.orient(d), opts),
        intrinsic_upper: rates::intrinsic_information_upper(d, opts),
        cmi_achieved_without_communication: s.ubi.holds,
        oneway_obstructed: !s.theorem3_violations.is_empty(),
        twoway_strict_gap: !s.theorem4_witnesses.is_empty(),
    }
}

pub fn analyze(d: &TripartiteDistribution, opts: &OptimizerOptions) -> Report {
    let structure = structure_report(d);
    let rates = rate_report(d, &structure, opts);
    Report { structure, rates }
}
