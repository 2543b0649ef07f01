//! Reversibility of one-dimensional linear cellular automata over GF(2)
//! under null boundary conditions.
//!
//! The central fact: an n-cell LCA is reversible iff its banded transition
//! matrix is invertible over GF(2), and reversibility as a function of n
//! is periodic with period equal to the period of the rule's polynomial.
//! This crate computes that period by polynomial algebra ([`period`]),
//! decides which residues of n are reversible with the standard-basis-
//! postfix walk ([`sbp`]), cross-checks both against the full-DFA and
//! determinant oracles ([`oracle`]) and brute-force injectivity
//! ([`rule`]), and inversely generates rules realizing a requested period
//! ([`gen`]).
//!
//! Only the binary field is supported: the field size q is 2 everywhere.
//!
//! With the default `parallel` feature, independent work items (per-factor
//! periods, determinant scans, generation verification) fan out over
//! rayon; disabling the feature keeps the same API fully sequential.

mod exec;

pub mod gen;
pub mod gf2poly;
pub mod intfactor;
pub mod oracle;
pub mod period;
pub mod report;
pub mod rule;
pub mod sbp;

pub use gf2poly::Poly;
pub use intfactor::Factorizer;
pub use period::{poly_period, rule_period, PeriodResult};
pub use report::ReversibilityReport;
pub use rule::{Configuration, Rule};
pub use sbp::{reversible_point_query, reversible_residues_sbp};
