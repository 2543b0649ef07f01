//! Reference implementations used to validate the fast algorithms: the
//! full DFA over all 2^rR tuples and the transition-matrix determinant.
//!
//! Both are oracles, not production paths: the DFA is capped at rR <= 20
//! and the determinant scan costs O(n^3) bit operations per cell count
//! (word-packed, so usable up to n in the low thousands).

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigUint;

use crate::exec;
use crate::report::{ReversibilityReport, INITIAL_NODE_RESIDUE};
use crate::rule::Rule;

/// Largest rR for which the full DFA (2^rR tuples per node) is attempted.
pub const DFA_RR_CAP: usize = 20;

/// Widest tuple (rL + rR) the packed representation supports.
pub const TUPLE_WIDTH_CAP: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{what} {n} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("rule must be normalized and bilateral for the DFA")]
    NotNormalized,
    #[error("matrix must be square")]
    ShapeError,
    #[error("matrix is singular over GF(2)")]
    Singular,
    #[error("walk exceeded its budget after {steps} edges")]
    Budget { steps: u64 },
}

/// One DFA node: 2^rR tuples of rL + rR elements each, packed into u128s
/// so that the tuple read left to right is the integer read MSB first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    tuples: Vec<u128>,
    r_left: usize,
    r_right: usize,
}

impl Node {
    pub fn tuples(&self) -> &[u128] {
        &self.tuples
    }

    pub fn tuple_len(&self) -> usize {
        self.r_left + self.r_right
    }

    /// Last rR elements of tuple i, as the low bits of the integer.
    pub fn postfix(&self, i: usize) -> u128 {
        self.tuples[i] & ((1u128 << self.r_right) - 1)
    }

    /// Tuple i as a bit string, leftmost element first.
    pub fn tuple_string(&self, i: usize) -> String {
        format_bits(self.tuples[i], self.tuple_len())
    }
}

pub(crate) fn format_bits(v: u128, len: usize) -> String {
    (0..len).rev().map(|b| if v >> b & 1 == 1 { '1' } else { '0' }).collect()
}

fn check_dfa_rule(r: &Rule) -> Result<(), OracleError> {
    if !r.is_normalized() || !r.is_bilateral() {
        return Err(OracleError::NotNormalized);
    }
    if r.right() > DFA_RR_CAP {
        return Err(OracleError::CapExceeded { what: "rR", n: r.right(), cap: DFA_RR_CAP });
    }
    if r.size() - 1 > TUPLE_WIDTH_CAP {
        return Err(OracleError::CapExceeded {
            what: "tuple width",
            n: r.size() - 1,
            cap: TUPLE_WIDTH_CAP,
        });
    }
    Ok(())
}

/// The initial node: zero prefixes, postfixes running through all 2^rR
/// bit patterns; tuple i is the rR-bit binary representation of i.
pub fn initial_node(r_left: usize, r_right: usize) -> Result<Node, OracleError> {
    if r_left < 1 || r_right < 1 {
        return Err(OracleError::NotNormalized);
    }
    if r_right > DFA_RR_CAP {
        return Err(OracleError::CapExceeded { what: "rR", n: r_right, cap: DFA_RR_CAP });
    }
    if r_left + r_right > TUPLE_WIDTH_CAP {
        return Err(OracleError::CapExceeded {
            what: "tuple width",
            n: r_left + r_right,
            cap: TUPLE_WIDTH_CAP,
        });
    }
    Ok(Node {
        tuples: (0..1u128 << r_right).collect(),
        r_left,
        r_right,
    })
}

/// Follows the 0-labelled edge: every tuple sheds its leftmost element and
/// gains parity(tuple & mask) on the right, the unique new element solving
/// the local rule for next-state 0.
pub fn next_node(node: &Node, r: &Rule) -> Result<Node, OracleError> {
    check_dfa_rule(r)?;
    if r.left() != node.r_left || r.right() != node.r_right {
        return Err(OracleError::NotNormalized);
    }
    let mask = r.zero_edge_mask();
    let len = node.tuple_len();
    let keep = if len == 128 { u128::MAX } else { (1u128 << len) - 1 };
    let tuples = node
        .tuples
        .iter()
        .map(|&t| ((t << 1) & keep) | parity(t & mask))
        .collect::<Vec<_>>();
    // Theorem-4 invariant: the all-zero tuple maps to itself
    debug_assert!(
        node.tuples.first() != Some(&0) || tuples.first() == Some(&0),
        "postfix_0 must stay all-zero"
    );
    Ok(Node { tuples, r_left: node.r_left, r_right: node.r_right })
}

fn parity(v: u128) -> u128 {
    (v.count_ones() & 1) as u128
}

/// Number of edges until the walk first returns to the initial node.
pub fn dfa_period(r: &Rule) -> Result<u64, OracleError> {
    dfa_period_bounded(r, None)
}

/// Same walk with a wall-clock deadline for benchmark harnesses.
pub fn dfa_period_bounded(r: &Rule, deadline: Option<Instant>) -> Result<u64, OracleError> {
    let initial = initial_node(r.left(), r.right())?;
    let mut node = next_node(&initial, r)?;
    let mut steps = 1u64;
    while node != initial {
        node = next_node(&node, r)?;
        steps += 1;
        if steps.is_multiple_of(1024) {
            if let Some(d) = deadline {
                if Instant::now() > d {
                    return Err(OracleError::Budget { steps });
                }
            }
        }
    }
    Ok(steps)
}

/// A node is reversible iff its 2^rR postfixes are pairwise distinct.
pub fn node_reversible(node: &Node) -> bool {
    let count = node.tuples.len();
    let mut seen = vec![0u64; count.div_ceil(64)];
    for i in 0..count {
        let p = node.postfix(i) as usize;
        if seen[p / 64] >> (p % 64) & 1 == 1 {
            return false;
        }
        seen[p / 64] |= 1 << (p % 64);
    }
    true
}

/// Walks one full cycle and reports the reversible residues; the initial
/// node carries residue [`INITIAL_NODE_RESIDUE`].
pub fn reversible_residues_dfa(r: &Rule) -> Result<ReversibilityReport, OracleError> {
    let initial = initial_node(r.left(), r.right())?;
    let mut residues = BTreeSet::new();
    let mut node = initial.clone();
    let mut step = 0u64;
    loop {
        if node_reversible(&node) {
            residues.insert(step + INITIAL_NODE_RESIDUE);
        }
        node = next_node(&node, r)?;
        step += 1;
        if node == initial {
            break;
        }
    }
    Ok(ReversibilityReport {
        period: BigUint::from(step),
        residues,
        rule: r.clone(),
    })
}

/// The full node cycle (for DFA dumps); memory is period * 2^rR tuples.
pub fn dfa_cycle(r: &Rule, max_nodes: u64) -> Result<Vec<Node>, OracleError> {
    let initial = initial_node(r.left(), r.right())?;
    let mut nodes = vec![initial.clone()];
    loop {
        let next = next_node(nodes.last().unwrap(), r)?;
        if next == initial {
            return Ok(nodes);
        }
        if nodes.len() as u64 >= max_nodes {
            return Err(OracleError::Budget { steps: nodes.len() as u64 });
        }
        nodes.push(next);
    }
}

/// A dense GF(2) matrix with word-packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = i * self.words + j / 64;
        if v {
            self.data[w] |= 1 << (j % 64);
        } else {
            self.data[w] &= !(1 << (j % 64));
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    fn xor_row(&mut self, dst: usize, src: usize, from_word: usize) {
        let (d, s) = (dst * self.words, src * self.words);
        for w in from_word..self.words {
            let v = self.data[s + w];
            self.data[d + w] ^= v;
        }
    }

    /// Matrix-vector product over GF(2); `v[i]` is cell i.
    pub fn mul_vec(&self, v: &[bool]) -> Vec<bool> {
        assert_eq!(v.len(), self.cols);
        let mut packed = vec![0u64; self.words];
        for (i, &b) in v.iter().enumerate() {
            if b {
                packed[i / 64] |= 1 << (i % 64);
            }
        }
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.words..(i + 1) * self.words];
                let ones: u32 = row.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
                ones & 1 == 1
            })
            .collect()
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, OracleError> {
        if self.cols != other.rows {
            return Err(OracleError::ShapeError);
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let (d, s) = (i * out.words, k * other.words);
                    for w in 0..out.words {
                        out.data[d + w] ^= other.data[s + w];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// The banded global-map matrix: entry (i, j) = λ_{j-i} inside the band.
pub fn transition_matrix(r: &Rule, n: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(n, n);
    for i in 0..n {
        for (k, &lambda) in r.coeffs().iter().enumerate() {
            if !lambda {
                continue;
            }
            let j = i as isize + k as isize - r.left() as isize;
            if j >= 0 && (j as usize) < n {
                m.set(i, j as usize, true);
            }
        }
    }
    m
}

/// Determinant over GF(2) by Gaussian elimination with row pivoting.
pub fn det_gf2(m: &BitMatrix) -> Result<bool, OracleError> {
    if m.rows != m.cols {
        return Err(OracleError::ShapeError);
    }
    let mut a = m.clone();
    for col in 0..a.cols {
        let (w, b) = (col / 64, col % 64);
        let pivot = (col..a.rows).find(|&r| a.data[r * a.words + w] >> b & 1 == 1);
        let Some(p) = pivot else { return Ok(false) };
        a.swap_rows(col, p);
        for r in col + 1..a.rows {
            if a.data[r * a.words + w] >> b & 1 == 1 {
                a.xor_row(r, col, w);
            }
        }
    }
    Ok(true)
}

/// Inverse over GF(2) via elimination on the augmented [M | I] block.
pub fn invert_gf2(m: &BitMatrix) -> Result<BitMatrix, OracleError> {
    if m.rows != m.cols {
        return Err(OracleError::ShapeError);
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = BitMatrix::identity(n);
    for col in 0..n {
        let (w, b) = (col / 64, col % 64);
        let pivot =
            (col..n).find(|&r| a.data[r * a.words + w] >> b & 1 == 1).ok_or(OracleError::Singular)?;
        a.swap_rows(col, pivot);
        inv.swap_rows(col, pivot);
        for r in 0..n {
            if r != col && a.data[r * a.words + w] >> b & 1 == 1 {
                a.xor_row(r, col, w);
                inv.xor_row(r, col, 0);
            }
        }
    }
    Ok(inv)
}

/// det M_n for n = 1..=n_max: the ground-truth residue oracle. Cell counts
/// are independent, so the scan is data-parallel.
pub fn reversible_residues_matrix(r: &Rule, n_max: usize) -> Vec<bool> {
    exec::map_collect((1..=n_max).collect(), |n| {
        det_gf2(&transition_matrix(r, n)).expect("square by construction")
    })
}

/// Period detection the transition-matrix way: grow the determinant
/// sequence d_1, d_2, ... and accept the smallest period consistent with
/// the prefix once it has held for three repeats (and a fixed extra
/// horizon, so short spurious periods get a chance to break). This is the
/// expensive pre-polynomial method, kept for the benchmark harness.
///
/// Note the det sequence's minimal period divides the polynomial period
/// but can be smaller: a rule reversible for every n has a constant
/// marking even though its DFA cycle is long.
pub fn tms_period(r: &Rule, deadline: Option<Instant>) -> Result<u64, OracleError> {
    let mut dets: Vec<bool> = Vec::new();
    let mut candidate = 1usize;
    let mut seen_one = false;
    for n in 1usize.. {
        let d = det_gf2(&transition_matrix(r, n))?;
        seen_one |= d;
        dets.push(d);
        candidate = minimal_prefix_period(&dets, candidate);
        // a normalized bilateral rule is reversible at n = period, so an
        // all-zero prefix cannot be a full period yet
        if seen_one && dets.len() >= (3 * candidate).max(2 * candidate + 8) {
            return Ok(candidate as u64);
        }
        if let Some(d) = deadline {
            if Instant::now() > d {
                return Err(OracleError::Budget { steps: n as u64 });
            }
        }
    }
    unreachable!()
}

/// Smallest p >= start such that the sequence is p-periodic so far.
fn minimal_prefix_period(seq: &[bool], start: usize) -> usize {
    'outer: for p in start..=seq.len() {
        for i in p..seq.len() {
            if seq[i] != seq[i - p] {
                continue 'outer;
            }
        }
        return p;
    }
    seq.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{normalize_rule, step_config, Configuration, Rule};

    fn rule(text: &str, left: usize) -> Rule {
        Rule::parse(text, left).unwrap()
    }

    #[test]
    fn initial_node_examples() {
        let node = initial_node(2, 2).unwrap();
        let strings: Vec<String> = (0..4).map(|i| node.tuple_string(i)).collect();
        assert_eq!(strings, vec!["0000", "0001", "0010", "0011"]);
        let node = initial_node(1, 1).unwrap();
        assert_eq!((node.tuple_string(0), node.tuple_string(1)), ("00".into(), "01".into()));
        assert!(matches!(initial_node(1, 21), Err(OracleError::CapExceeded { .. })));
        assert!(matches!(initial_node(0, 2), Err(OracleError::NotNormalized)));
    }

    #[test]
    fn next_node_examples() {
        let r = rule("11001", 2);
        let node = initial_node(2, 2).unwrap();
        let next = next_node(&node, &r).unwrap();
        assert_eq!(next.tuple_string(1), "0010"); // 0001 -> 0010
        assert_eq!(next.tuple_string(0), "0000"); // postfix_0 stays zero
        let r = rule("111", 1);
        let node = initial_node(1, 1).unwrap();
        let next = next_node(&node, &r).unwrap();
        assert_eq!(next.tuple_string(1), "11"); // 01 -> 11
        assert!(next_node(&node, &rule("110", 1)).is_err());
    }

    #[test]
    fn adjacency_and_linearity() {
        // next tuple = left shift + new bit, and the edge map is linear
        let r = rule("11011", 2);
        let node = initial_node(2, 2).unwrap();
        let next = next_node(&node, &r).unwrap();
        for i in 0..4 {
            assert_eq!(next.tuples()[i] >> 1, node.tuples()[i] & 0b111);
        }
        let mask = 0b11usize;
        for a in 0..4usize {
            for b in 0..4usize {
                let t = |i: usize| node.tuples()[i];
                let step = |t: u128| next_node(
                    &Node { tuples: vec![t], r_left: 2, r_right: 2 }, &r
                ).unwrap().tuples()[0];
                assert_eq!(step(t(a) ^ t(b)) & mask as u128, (step(t(a)) ^ step(t(b))) & mask as u128);
            }
        }
    }

    #[test]
    fn dfa_period_examples() {
        assert_eq!(dfa_period(&rule("11111", 2)).unwrap(), 5);
        assert_eq!(dfa_period(&rule("11001", 2)).unwrap(), 15);
        assert_eq!(dfa_period(&rule("101", 1)).unwrap(), 2);
    }

    #[test]
    fn node_reversible_examples() {
        assert!(node_reversible(&initial_node(2, 2).unwrap()));
        let after = next_node(&initial_node(1, 1).unwrap(), &rule("101", 1)).unwrap();
        assert!(!node_reversible(&after)); // postfixes {0, 0}
    }

    #[test]
    fn dfa_residue_examples() {
        let report = reversible_residues_dfa(&rule("11111", 2)).unwrap();
        assert_eq!(report.period, BigUint::from(5u32));
        assert_eq!(report.residues.iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        let report = reversible_residues_dfa(&rule("111", 1)).unwrap();
        assert_eq!(report.period, BigUint::from(3u32));
        assert_eq!(report.residues.iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        let report = reversible_residues_dfa(&rule("101", 1)).unwrap();
        assert_eq!(report.period, BigUint::from(2u32));
        assert_eq!(report.residues.iter().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn transition_matrix_examples() {
        let m = transition_matrix(&rule("11111", 2), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert!(m.get(i, j));
            }
        }
        let m = transition_matrix(&rule("1", 0), 4);
        assert_eq!(m, BitMatrix::identity(4));
        let m = transition_matrix(&rule("11", 1), 2);
        assert_eq!(
            (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)),
            (true, false, true, true)
        );
    }

    #[test]
    fn det_examples() {
        assert!(det_gf2(&transition_matrix(&rule("11111", 2), 5)).unwrap());
        assert!(!det_gf2(&transition_matrix(&rule("11111", 2), 3)).unwrap());
        assert!(det_gf2(&BitMatrix::identity(7)).unwrap());
        assert!(det_gf2(&BitMatrix::zeros(3, 4)).is_err());
    }

    #[test]
    fn invert_examples() {
        let id = BitMatrix::identity(5);
        assert_eq!(invert_gf2(&id).unwrap(), id);
        let m = transition_matrix(&rule("11", 1), 2);
        let inv = invert_gf2(&m).unwrap();
        assert_eq!(inv, m); // self-inverse over GF(2)
        assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(2));
        assert!(matches!(
            invert_gf2(&transition_matrix(&rule("11111", 2), 3)),
            Err(OracleError::Singular)
        ));
    }

    #[test]
    fn matrix_residue_examples() {
        let got = reversible_residues_matrix(&rule("11111", 2), 6);
        assert_eq!(got, vec![true, false, false, false, true, true]);
        let got = reversible_residues_matrix(&rule("111", 1), 8);
        assert_eq!(got, vec![true, false, true, true, false, true, true, false]);
        let got = reversible_residues_matrix(&rule("1", 0), 3);
        assert_eq!(got, vec![true, true, true]);
    }

    #[test]
    fn evolution_matches_matrix() {
        for (text, left) in [("11011", 2), ("111", 1), ("1011", 1), ("110011", 3)] {
            let r = rule(text, left);
            for n in 1..=16usize {
                let m = transition_matrix(&r, n);
                for seed in [0u32, 1, 0b1011, 0xffff, 0x5a5a] {
                    let cells: Vec<bool> = (0..n).map(|i| seed >> (i % 32) & 1 == 1).collect();
                    let cfg = Configuration::new(cells.clone());
                    let want = step_config(&r, &cfg);
                    assert_eq!(m.mul_vec(&cells), want.cells());
                }
            }
        }
    }

    #[test]
    fn dfa_agrees_with_matrix_small_sweep() {
        // every bilateral normalized rule of size <= 5, every split
        for m in 3..=5usize {
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
                    let report = reversible_residues_dfa(&r).unwrap();
                    let period: u64 = report.period.to_u64_digits().first().copied().unwrap_or(1);
                    let dets = reversible_residues_matrix(&r, (3 * period) as usize);
                    for (idx, det) in dets.iter().enumerate() {
                        let n = idx as u64 + 1;
                        assert_eq!(
                            report.residues.contains(&(n % period)),
                            *det,
                            "rule {text} left {left} at n = {n}"
                        );
                    }
                }
            }
        }
    }
}
