//! Linear CA rules, rule/polynomial translation, and null-boundary
//! evolution.
//!
//! A rule is the coefficient string λ_{-rL} ... λ_0 ... λ_{rR} together
//! with its split: `left` says how many coefficients sit to the left of
//! the cell itself. The split does not change the period of reversibility
//! but can change which cell counts are reversible, so it is part of the
//! rule's identity.

use std::fmt;

use crate::gf2poly::Poly;

/// Cell counts accepted by the exhaustive injectivity check.
pub const BRUTEFORCE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule text must be a nonempty 0/1 string, got {0:?}")]
    Parse(String),
    #[error("left split {left} out of range for size {size}")]
    SplitOutOfRange { left: usize, size: usize },
    #[error("rule has no nonzero coefficient")]
    ZeroRule,
    #[error("polynomial has no constant term")]
    NoConstantTerm,
    #[error("{what} {n} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
}

/// An LCA rule: coefficients with a neighbor-vector split.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    coeffs: Vec<bool>,
    left: usize,
}

impl Rule {
    pub fn new(coeffs: Vec<bool>, left: usize) -> Result<Self, RuleError> {
        if coeffs.is_empty() {
            return Err(RuleError::Parse(String::new()));
        }
        if left >= coeffs.len() {
            return Err(RuleError::SplitOutOfRange { left, size: coeffs.len() });
        }
        Ok(Rule { coeffs, left })
    }

    /// Parses a 0/1 coefficient string with the given left split.
    pub fn parse(text: &str, left: usize) -> Result<Self, RuleError> {
        if text.is_empty() || !text.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(RuleError::Parse(text.to_string()));
        }
        if left >= text.len() {
            return Err(RuleError::SplitOutOfRange { left, size: text.len() });
        }
        Ok(Rule {
            coeffs: text.bytes().map(|b| b == b'1').collect(),
            left,
        })
    }

    /// The default split: left = floor((m - 1) / 2).
    pub fn symmetric_split(size: usize) -> usize {
        (size - 1) / 2
    }

    /// Size m = rL + rR + 1.
    pub fn size(&self) -> usize {
        self.coeffs.len()
    }

    /// rL.
    pub fn left(&self) -> usize {
        self.left
    }

    /// rR.
    pub fn right(&self) -> usize {
        self.coeffs.len() - 1 - self.left
    }

    pub fn coeffs(&self) -> &[bool] {
        &self.coeffs
    }

    /// λ_j for the offset j (zero outside the neighbor vector).
    pub fn coeff_at_offset(&self, offset: isize) -> bool {
        let idx = offset + self.left as isize;
        if idx < 0 {
            return false;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(false)
    }

    pub fn is_bilateral(&self) -> bool {
        self.left() > 0 && self.right() > 0
    }

    /// Border coefficients are 1 (or the rule is the single coefficient 1).
    pub fn is_normalized(&self) -> bool {
        self.coeffs[0] && *self.coeffs.last().unwrap()
    }

    pub fn text(&self) -> String {
        self.coeffs.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// The mask driving the 0-labelled DFA edge: bit (len-1-k) holds
    /// λ_{k-rL} for k = 0 .. rL+rR-1, so the new rightmost tuple element
    /// is parity(tuple & mask). Requires size <= 128.
    pub(crate) fn zero_edge_mask(&self) -> u128 {
        let len = self.size() - 1;
        debug_assert!(len <= 128);
        let mut mask = 0u128;
        for k in 0..len {
            if self.coeffs[k] {
                mask |= 1 << (len - 1 - k);
            }
        }
        mask
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (left={})", self.text(), self.left)
    }
}

/// Trims border zeros. Returns the trimmed rule and the number of
/// positions the left border moved, so callers can reconstruct the
/// original neighbor vector. When position 0 of the original vector falls
/// outside the trimmed support, the returned split is clamped into range
/// and no longer represents the original geometry; use [`classify`] for
/// reversibility routing in that case.
pub fn normalize_rule(r: &Rule) -> Result<(Rule, usize), RuleError> {
    let first = r.coeffs.iter().position(|&b| b).ok_or(RuleError::ZeroRule)?;
    let last = r.coeffs.iter().rposition(|&b| b).unwrap();
    let coeffs = r.coeffs[first..=last].to_vec();
    let left = r.left.saturating_sub(first).min(coeffs.len() - 1);
    Ok((Rule { coeffs, left }, first))
}

/// Reversibility routing for a raw rule, before any normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleClass {
    /// λ_0 = 1 and all other nonzero coefficients on one side: reversible
    /// for every cell count.
    AlwaysReversible,
    /// All nonzero coefficients strictly on one side of the cell (the
    /// transition matrix is strictly triangular): never reversible.
    NeverReversible,
    /// Nonzero coefficients on both sides; the trimmed rule with its true
    /// split, ready for the DFA/SBP machinery.
    Bilateral(Rule),
}

/// Classifies a rule by the true offsets of its nonzero coefficients.
pub fn classify(r: &Rule) -> Result<RuleClass, RuleError> {
    let first = r.coeffs.iter().position(|&b| b).ok_or(RuleError::ZeroRule)?;
    let last = r.coeffs.iter().rposition(|&b| b).unwrap();
    let min = first as isize - r.left as isize;
    let max = last as isize - r.left as isize;
    if min > 0 || max < 0 {
        return Ok(RuleClass::NeverReversible);
    }
    if min == 0 || max == 0 {
        return Ok(RuleClass::AlwaysReversible);
    }
    let coeffs = r.coeffs[first..=last].to_vec();
    Ok(RuleClass::Bilateral(Rule { coeffs, left: (-min) as usize }))
}

/// Reads the coefficient string as MSB-first polynomial bits:
/// f(x) = sum c_i x^(m-i). Independent of the split.
pub fn rule_to_poly(r: &Rule) -> Poly {
    let m = r.size();
    Poly::from_terms(
        &r.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| m - 1 - i)
            .collect::<Vec<_>>(),
    )
}

/// Inverse of [`rule_to_poly`] with the requested split.
pub fn poly_to_rule(f: &Poly, left: usize) -> Result<Rule, RuleError> {
    if !f.constant_term() {
        return Err(RuleError::NoConstantTerm);
    }
    let deg = f.degree().expect("constant term present");
    if left > deg {
        return Err(RuleError::SplitOutOfRange { left, size: deg + 1 });
    }
    let coeffs = (0..=deg).map(|i| f.coeff(deg - i)).collect();
    Ok(Rule { coeffs, left })
}

/// A configuration of n cells; cells outside 1..n read as 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    cells: Vec<bool>,
}

impl Configuration {
    pub fn new(cells: Vec<bool>) -> Self {
        Configuration { cells }
    }

    /// Parses a bit string, leftmost cell first.
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        if text.is_empty() || !text.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(RuleError::Parse(text.to_string()));
        }
        Ok(Configuration {
            cells: text.bytes().map(|b| b == b'1').collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn text(&self) -> String {
        self.cells.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// One synchronous step of Eq.-style evolution under the null boundary.
pub fn step_config(r: &Rule, c: &Configuration) -> Configuration {
    let n = c.len() as isize;
    let mut next = vec![false; c.len()];
    for (i, slot) in next.iter_mut().enumerate() {
        let mut acc = false;
        for (k, &lambda) in r.coeffs.iter().enumerate() {
            if !lambda {
                continue;
            }
            let j = i as isize + k as isize - r.left as isize;
            if j >= 0 && j < n {
                acc ^= c.cells[j as usize];
            }
        }
        *slot = acc;
    }
    Configuration { cells: next }
}

/// Row masks of the global map as n-bit integers: bit p of mask i is
/// λ_{p-i}. The image of a configuration packed into a u32 is then
/// parity-of-AND per row.
fn row_masks(r: &Rule, n: usize) -> Vec<u32> {
    debug_assert!(n <= 32);
    (0..n)
        .map(|i| {
            let mut mask = 0u32;
            for (k, &lambda) in r.coeffs.iter().enumerate() {
                if !lambda {
                    continue;
                }
                let p = i as isize + k as isize - r.left as isize;
                if p >= 0 && (p as usize) < n {
                    mask |= 1 << p;
                }
            }
            mask
        })
        .collect()
}

/// Decides injectivity of the global map on {0,1}^n by enumerating all 2^n
/// configurations and checking for an image collision.
pub fn injective_bruteforce(r: &Rule, n: usize) -> Result<bool, RuleError> {
    if n > BRUTEFORCE_CAP {
        return Err(RuleError::CapExceeded { what: "cell count", n, cap: BRUTEFORCE_CAP });
    }
    if n == 0 {
        return Ok(true);
    }
    let masks = row_masks(r, n);
    let mut seen = vec![0u64; (1usize << n).div_ceil(64)];
    for cfg in 0u32..(1 << n) {
        let mut img = 0u32;
        for (i, m) in masks.iter().enumerate() {
            img |= ((cfg & m).count_ones() & 1) << i;
        }
        let w = (img / 64) as usize;
        let b = img % 64;
        if seen[w] >> b & 1 == 1 {
            return Ok(false);
        }
        seen[w] |= 1 << b;
    }
    Ok(true)
}

/// Linearity shortcut: the map is injective iff the images of the n basis
/// configurations are linearly independent over GF(2).
pub fn injective_kernel(r: &Rule, n: usize) -> bool {
    if n == 0 {
        return true;
    }
    // images of basis vectors are the matrix columns; rank of the matrix
    // equals rank of its row set
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let words = n.div_ceil(64);
            let mut row = vec![0u64; words];
            for (k, &lambda) in r.coeffs.iter().enumerate() {
                if !lambda {
                    continue;
                }
                let p = i as isize + k as isize - r.left as isize;
                if p >= 0 && (p as usize) < n {
                    row[p as usize / 64] |= 1 << (p % 64);
                }
            }
            row
        })
        .collect();
    // full rank needs a pivot in every column
    for col in 0..n {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (col..n).find(|&r2| rows[r2][w] >> b & 1 == 1) else {
            return false;
        };
        rows.swap(col, pivot);
        let pivot_row = rows[col].clone();
        for (r2, row) in rows.iter_mut().enumerate() {
            if r2 != col && row[w] >> b & 1 == 1 {
                for (a, p) in row.iter_mut().zip(&pivot_row) {
                    *a ^= p;
                }
            }
        }
    }
    true
}

/// For a normalized unilateral rule (rL = 0 or rR = 0), reversibility is
/// decided by λ_0 alone, independent of the cell count. Returns None for
/// bilateral rules.
pub fn unilateral_reversibility(r: &Rule) -> Option<bool> {
    if r.left() == 0 || r.right() == 0 {
        Some(r.coeffs[r.left])
    } else {
        None
    }
}
