//! Secret-key distillation analysis for finite tripartite distributions
//! `p_XYZ`, with Alice holding `X`, Bob `Y` and the eavesdropper `Z`.
//!
//! The crate computes Gács–Körner common information and its conditional
//! variant, classifies distributions by block structure, checks the one-way
//! and two-way necessary conditions for a key rate of `I(X:Y|Z)`, bounds the
//! intrinsic information and the one-way key rate numerically, and simulates
//! privacy amplification on the common variable.

pub mod common;
pub mod corpus;
pub mod dist;
pub mod distill;
pub mod error;
pub mod format;
pub mod info;
pub mod optim;
pub mod rates;
pub mod report;
pub mod rng;
pub mod structure;

pub use dist::{Alphabet, BipartiteDistribution, Channel, TripartiteDistribution, Var};
pub use error::{Error, Result};
