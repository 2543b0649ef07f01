//! The answer type shared by the DFA oracle and the SBP algorithm.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;

use crate::rule::Rule;

/// Residue carried by the initial node. Both the DFA walk and the SBP walk
/// assign residue (j + INITIAL_NODE_RESIDUE) mod period to the node after j
/// edges; a calibration test against the determinant oracle pins this to 0.
pub const INITIAL_NODE_RESIDUE: u64 = 0;

/// Period of reversibility plus the reversible residues of the cell count.
///
/// A residue r means: every cell count n >= 1 with n ≡ r (mod period) gives
/// a reversible LCA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversibilityReport {
    pub period: BigUint,
    pub residues: BTreeSet<u64>,
    /// The normalized rule the walk ran on, split included.
    pub rule: Rule,
}

impl ReversibilityReport {
    /// Whether a given cell count is reversible according to the report.
    pub fn is_reversible(&self, n: &BigUint) -> bool {
        let r = n % &self.period;
        // enumerated residues always fit u64 (the walk was enumerable)
        let r = r.to_u64_digits().first().copied().unwrap_or(0);
        self.residues.contains(&r)
    }
}

impl fmt::Display for ReversibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let residues: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(
            f,
            "period {}, reversible for n = {} (mod {})",
            self.period,
            residues.join(", "),
            self.period
        )
    }
}
