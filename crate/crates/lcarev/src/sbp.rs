//! The standard-basis-postfix algorithm: decide the reversible residues
//! within one period by tracking only the rR tuples whose initial
//! postfixes are the standard basis.
//!
//! The full DFA node is a linear image of these rows with step-invariant
//! coefficients, so a node is reversible exactly when the rR postfix rows
//! are linearly independent. That brings the per-node cost down to a rank
//! of an rR x rR bit matrix and the space to rR rows of rL + rR bits,
//! with no structure of 2^rR elements anywhere.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::intfactor::Factorizer;
use crate::oracle::{format_bits, TUPLE_WIDTH_CAP};
use crate::period::{rule_period_with, PeriodError, PeriodResult, DEFAULT_DEGREE_CAP};
use crate::report::{ReversibilityReport, INITIAL_NODE_RESIDUE};
use crate::rule::Rule;

/// Steps a full residue enumeration may take before bailing out with
/// [`SbpError::StepBudget`].
pub const DEFAULT_STEP_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SbpError {
    #[error("rule must be normalized and bilateral for the SBP walk")]
    NotNormalized,
    #[error("subset failed to close after the computed period (upstream bug)")]
    CycleMismatch,
    #[error("walk of {needed} steps exceeds the budget of {budget}")]
    StepBudget { needed: BigUint, budget: u64 },
    #[error("tuple width {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error(transparent)]
    Period(#[from] PeriodError),
}

/// The rR tracked rows; row j is the image of the tuple whose initial
/// postfix is the standard basis vector of numeric value 2^j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetNode {
    rows: Vec<u128>,
    r_left: usize,
    r_right: usize,
    step_index: u64,
}

impl SubsetNode {
    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn row_len(&self) -> usize {
        self.r_left + self.r_right
    }

    /// Row j as a bit string, leftmost tuple element first.
    pub fn row_string(&self, j: usize) -> String {
        format_bits(self.rows[j], self.row_len())
    }

    /// Postfix of row j (its last rR elements) as the low bits.
    pub fn postfix(&self, j: usize) -> u128 {
        self.rows[j] & ((1u128 << self.r_right) - 1)
    }
}

/// Step 1: zero prefixes, postfixes SBP_0 .. SBP_{rR-1}.
pub fn initial_subset(r_left: usize, r_right: usize) -> Result<SubsetNode, SbpError> {
    if r_left < 1 || r_right < 1 {
        return Err(SbpError::NotNormalized);
    }
    if r_left + r_right > TUPLE_WIDTH_CAP {
        return Err(SbpError::CapExceeded { n: r_left + r_right, cap: TUPLE_WIDTH_CAP });
    }
    Ok(SubsetNode {
        rows: (0..r_right).map(|j| 1u128 << j).collect(),
        r_left,
        r_right,
        step_index: 0,
    })
}

fn check_rule(s: &SubsetNode, r: &Rule) -> Result<(), SbpError> {
    if !r.is_normalized()
        || !r.is_bilateral()
        || r.left() != s.r_left
        || r.right() != s.r_right
    {
        return Err(SbpError::NotNormalized);
    }
    Ok(())
}

/// Step 2: advance every row along the 0-labelled edge.
pub fn step_subset(s: &SubsetNode, r: &Rule) -> Result<SubsetNode, SbpError> {
    check_rule(s, r)?;
    let mut next = s.clone();
    advance(&mut next.rows, r.zero_edge_mask(), s.row_len());
    next.step_index += 1;
    Ok(next)
}

/// In-place row advance; the walk allocates nothing.
fn advance(rows: &mut [u128], mask: u128, len: usize) {
    let keep = if len == 128 { u128::MAX } else { (1u128 << len) - 1 };
    for t in rows.iter_mut() {
        let bit = ((*t & mask).count_ones() & 1) as u128;
        *t = ((*t << 1) & keep) | bit;
    }
}

/// Rank over GF(2) of the rR x rR matrix of postfixes; the input is not
/// mutated.
pub fn subset_rank(s: &SubsetNode) -> usize {
    rank_of_postfixes(&s.rows, s.r_right)
}

fn rank_of_postfixes(rows: &[u128], r_right: usize) -> usize {
    let mask = if r_right == 128 { u128::MAX } else { (1u128 << r_right) - 1 };
    let mut basis = [0u128; 128];
    let mut rank = 0;
    for &row in rows {
        let mut v = row & mask;
        while v != 0 {
            let lead = 127 - v.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = v;
                rank += 1;
                break;
            }
            v ^= basis[lead];
        }
    }
    rank
}

/// Full residue enumeration (Steps 3-6): walk exactly one period, marking
/// residue j reversible when the rank at step j is rR, then check the
/// walk closed back on the initial subset.
pub fn reversible_residues_sbp(r: &Rule) -> Result<ReversibilityReport, SbpError> {
    reversible_residues_sbp_with(r, Factorizer::shared(), DEFAULT_DEGREE_CAP, DEFAULT_STEP_BUDGET)
}

pub fn reversible_residues_sbp_with(
    r: &Rule,
    factorizer: &Factorizer,
    degree_cap: usize,
    step_budget: u64,
) -> Result<ReversibilityReport, SbpError> {
    let mut subset = initial_subset(r.left(), r.right())?;
    check_rule(&subset, r)?;
    let result = rule_period_with(r, factorizer, degree_cap)?;
    let period = result
        .period
        .to_u64()
        .filter(|&p| p <= step_budget)
        .ok_or(SbpError::StepBudget { needed: result.period.clone(), budget: step_budget })?;
    let initial_rows = subset.rows.clone();
    let mask = r.zero_edge_mask();
    let len = subset.row_len();
    let rr = r.right();
    let mut residues = std::collections::BTreeSet::new();
    for j in 0..period {
        if rank_of_postfixes(&subset.rows, rr) == rr {
            residues.insert((j + INITIAL_NODE_RESIDUE) % period);
        }
        advance(&mut subset.rows, mask, len);
        subset.step_index += 1;
    }
    if subset.rows != initial_rows {
        return Err(SbpError::CycleMismatch);
    }
    Ok(ReversibilityReport { period: result.period, residues, rule: r.clone() })
}

/// Answer for a single cell count, without enumerating the whole period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointAnswer {
    pub reversible: bool,
    pub period: PeriodResult,
    /// n mod period (the number of steps walked).
    pub residue: u64,
}

/// Point query: is the n-cell LCA reversible? Walks n mod period edges
/// and checks the rank there; memory stays at rR rows regardless of the
/// period.
pub fn reversible_point_query(r: &Rule, n: &BigUint) -> Result<PointAnswer, SbpError> {
    reversible_point_query_with(r, n, Factorizer::shared(), DEFAULT_DEGREE_CAP, DEFAULT_STEP_BUDGET)
}

pub fn reversible_point_query_with(
    r: &Rule,
    n: &BigUint,
    factorizer: &Factorizer,
    degree_cap: usize,
    step_budget: u64,
) -> Result<PointAnswer, SbpError> {
    let mut subset = initial_subset(r.left(), r.right())?;
    check_rule(&subset, r)?;
    let result = rule_period_with(r, factorizer, degree_cap)?;
    let residue_big = n % &result.period;
    let residue = residue_big
        .to_u64()
        .filter(|&k| k <= step_budget)
        .ok_or(SbpError::StepBudget { needed: residue_big, budget: step_budget })?;
    let mask = r.zero_edge_mask();
    let len = subset.row_len();
    let rr = r.right();
    for _ in 0..residue {
        advance(&mut subset.rows, mask, len);
    }
    subset.step_index = residue;
    Ok(PointAnswer {
        reversible: rank_of_postfixes(&subset.rows, rr) == rr,
        period: result,
        residue,
    })
}

/// Drives `visit(step, subset, rank)` through `steps` nodes starting at
/// the initial subset; used for trace dumps.
pub fn walk_sbp<F>(r: &Rule, steps: u64, mut visit: F) -> Result<(), SbpError>
where
    F: FnMut(u64, &SubsetNode, usize),
{
    let mut subset = initial_subset(r.left(), r.right())?;
    check_rule(&subset, r)?;
    let mask = r.zero_edge_mask();
    let len = subset.row_len();
    let rr = r.right();
    for j in 0..steps {
        visit(j, &subset, rank_of_postfixes(&subset.rows, rr));
        advance(&mut subset.rows, mask, len);
        subset.step_index += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{initial_node, next_node, node_reversible, reversible_residues_dfa};
    use crate::rule::normalize_rule;

    fn rule(text: &str, left: usize) -> Rule {
        Rule::parse(text, left).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn initial_subset_examples() {
        let s = initial_subset(3, 3).unwrap();
        let rows: Vec<String> = (0..3).map(|j| s.row_string(j)).collect();
        assert_eq!(rows, vec!["000001", "000010", "000100"]);
        let s = initial_subset(1, 1).unwrap();
        assert_eq!(s.row_string(0), "01");
        let s = initial_subset(2, 2).unwrap();
        assert_eq!((s.row_string(0), s.row_string(1)), ("0001".into(), "0010".into()));
        assert!(initial_subset(0, 1).is_err());
    }

    #[test]
    fn step_examples() {
        let s = initial_subset(2, 2).unwrap();
        let next = step_subset(&s, &rule("11001", 2)).unwrap();
        assert_eq!(next.row_string(0), "0010"); // 0001 -> 0010
        assert_eq!(next.step_index(), 1);
        let s = initial_subset(1, 1).unwrap();
        let next = step_subset(&s, &rule("111", 1)).unwrap();
        assert_eq!(next.row_string(0), "11"); // 01 -> 11
        assert!(step_subset(&s, &rule("110", 1)).is_err());
        assert!(step_subset(&s, &rule("11111", 2)).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(subset_rank(&initial_subset(5, 5).unwrap()), 5);
        let dup = SubsetNode { rows: vec![0b10, 0b10], r_left: 0, r_right: 2, step_index: 0 };
        assert_eq!(subset_rank(&dup), 1);
        let s = initial_subset(1, 1).unwrap();
        let next = step_subset(&s, &rule("101", 1)).unwrap();
        assert_eq!(next.row_string(0), "10"); // postfix bit 0
        assert_eq!(subset_rank(&next), 0);
    }

    #[test]
    fn residue_examples() {
        let rep = reversible_residues_sbp(&rule("11111", 2)).unwrap();
        assert_eq!(rep.period, big(5));
        assert_eq!(rep.residues.iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        let rep = reversible_residues_sbp(&rule("111", 1)).unwrap();
        assert_eq!(rep.period, big(3));
        assert_eq!(rep.residues.iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        let rep = reversible_residues_sbp(&rule("101", 1)).unwrap();
        assert_eq!(rep.period, big(2));
        assert_eq!(rep.residues.iter().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn residue_zero_always_present() {
        // the initial subset has independent postfixes by construction
        for (text, left) in [("11111", 2), ("111", 1), ("11011", 2), ("110011", 3)] {
            let rep = reversible_residues_sbp(&rule(text, left)).unwrap();
            assert!(rep.residues.contains(&0), "{text}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = reversible_residues_sbp_with(
            &rule("11111", 2),
            Factorizer::shared(),
            DEFAULT_DEGREE_CAP,
            3,
        )
        .unwrap_err();
        assert_eq!(err, SbpError::StepBudget { needed: big(5), budget: 3 });
    }

    #[test]
    fn point_query_matches_enumeration() {
        for (text, left) in [("11111", 2), ("11001", 2), ("111", 1), ("101", 1)] {
            let r = rule(text, left);
            let rep = reversible_residues_sbp(&r).unwrap();
            let period = rep.period.to_u64().unwrap();
            for n in 1..=3 * period {
                let ans = reversible_point_query(&r, &big(n)).unwrap();
                assert_eq!(ans.reversible, rep.residues.contains(&(n % period)), "{text} n={n}");
                assert_eq!(ans.residue, n % period);
            }
        }
    }

    #[test]
    fn rows_match_dfa_basis_tuples() {
        // Theorem-7 made literal: SBP rows are the DFA tuples at indices 2^j
        for (text, left) in [("11111", 2), ("11001", 2), ("1010011", 3), ("111", 1)] {
            let r = rule(text, left);
            let mut node = initial_node(r.left(), r.right()).unwrap();
            let mut subset = initial_subset(r.left(), r.right()).unwrap();
            for _ in 0..40 {
                for j in 0..r.right() {
                    assert_eq!(subset.rows()[j], node.tuples()[1 << j], "{text}");
                }
                assert_eq!(subset_rank(&subset) == r.right(), node_reversible(&node), "{text}");
                node = next_node(&node, &r).unwrap();
                subset = step_subset(&subset, &r).unwrap();
            }
        }
    }

    #[test]
    fn sbp_agrees_with_dfa_small_sweep() {
        for m in 3..=7usize {
            for mid in 0..1u32 << (m - 2) {
                let mut text = String::from("1");
                for b in (0..m - 2).rev() {
                    text.push(if mid >> b & 1 == 1 { '1' } else { '0' });
                }
                text.push('1');
                for left in 1..m - 1 {
                    let (r, _) = normalize_rule(&Rule::parse(&text, left).unwrap()).unwrap();
                    if !r.is_bilateral() {
                        continue;
                    }
                    let sbp = reversible_residues_sbp(&r).unwrap();
                    let dfa = reversible_residues_dfa(&r).unwrap();
                    assert_eq!(sbp.period, dfa.period, "rule {text} left {left}");
                    assert_eq!(sbp.residues, dfa.residues, "rule {text} left {left}");
                }
            }
        }
    }
}
