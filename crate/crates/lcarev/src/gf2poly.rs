//! Polynomials over GF(2) with bit-packed coefficients.
//!
//! A [`Poly`] stores coefficient k in bit k of a little-endian word vector,
//! so addition is a word-wise XOR and multiplication is a carry-less
//! shift/XOR convolution. The zero polynomial is the empty word vector; any
//! nonzero polynomial keeps its highest set bit as the leading term, which
//! makes every nonzero polynomial monic over GF(2).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

/// Degree bound accepted when parsing polynomials or entering factorization.
/// Plain ring arithmetic is not checked; the bound keeps user-facing entry
/// points from allocating unbounded data.
pub const MAX_DEGREE: usize = 4096;

const BITS: usize = u64::BITS as usize;

/// Errors from polynomial operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivByZero,
    #[error("gcd(0, 0) is undefined")]
    GcdUndefined,
    #[error("modulus must have degree >= 1")]
    InvalidModulus,
    #[error("operation requires a non-constant polynomial")]
    InvalidInput,
    #[error("cannot parse polynomial from {0:?}")]
    Parse(String),
    #[error("degree {0} exceeds the cap of {1}")]
    CapExceeded(usize, usize),
}

/// A polynomial over GF(2), canonical form (no trailing zero words).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    limbs: Vec<u64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { limbs: vec![1] }
    }

    /// The polynomial x.
    pub fn x() -> Self {
        Poly { limbs: vec![2] }
    }

    /// x^k.
    pub fn monomial(k: usize) -> Self {
        let mut p = Poly::zero();
        p.set_coeff(k);
        p
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    pub fn from_terms(exponents: &[usize]) -> Self {
        let mut p = Poly::zero();
        for &k in exponents {
            p.toggle_coeff(k);
        }
        p
    }

    /// Interprets the low `bits(n)` bits of `n` as coefficients
    /// (bit k of `n` is the coefficient of x^k).
    pub fn from_bits_u64(n: u64) -> Self {
        let mut p = Poly { limbs: vec![n] };
        p.normalize();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.limbs.len() == 1 && self.limbs[0] == 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = self.limbs.last()?;
        Some((self.limbs.len() - 1) * BITS + (BITS - 1 - last.leading_zeros() as usize))
    }

    /// Coefficient of x^k.
    pub fn coeff(&self, k: usize) -> bool {
        match self.limbs.get(k / BITS) {
            Some(w) => (w >> (k % BITS)) & 1 == 1,
            None => false,
        }
    }

    /// Constant term.
    pub fn constant_term(&self) -> bool {
        self.coeff(0)
    }

    fn set_coeff(&mut self, k: usize) {
        let w = k / BITS;
        if w >= self.limbs.len() {
            self.limbs.resize(w + 1, 0);
        }
        self.limbs[w] |= 1 << (k % BITS);
    }

    fn toggle_coeff(&mut self, k: usize) {
        let w = k / BITS;
        if w >= self.limbs.len() {
            self.limbs.resize(w + 1, 0);
        }
        self.limbs[w] ^= 1 << (k % BITS);
        self.normalize();
    }

    fn normalize(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    /// Coefficient-wise XOR.
    pub fn add(&self, other: &Poly) -> Poly {
        let (long, short) = if self.limbs.len() >= other.limbs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut limbs = long.limbs.clone();
        for (i, w) in short.limbs.iter().enumerate() {
            limbs[i] ^= w;
        }
        let mut p = Poly { limbs };
        p.normalize();
        p
    }

    /// XOR `other << shift` into `self` (in place, used by mul/divrem).
    fn xor_shifted(&mut self, other: &[u64], shift: usize) {
        let word = shift / BITS;
        let bit = shift % BITS;
        let needed = word + other.len() + 1;
        if self.limbs.len() < needed {
            self.limbs.resize(needed, 0);
        }
        if bit == 0 {
            for (i, w) in other.iter().enumerate() {
                self.limbs[word + i] ^= w;
            }
        } else {
            let mut carry = 0u64;
            for (i, w) in other.iter().enumerate() {
                self.limbs[word + i] ^= (w << bit) | carry;
                carry = w >> (BITS - bit);
            }
            self.limbs[word + other.len()] ^= carry;
        }
        self.normalize();
    }

    /// Carry-less product.
    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        // iterate the sparser operand's set bits
        let (bits, dense) = if self.count_terms() <= other.count_terms() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Poly::zero();
        for (w, limb) in bits.limbs.iter().enumerate() {
            let mut l = *limb;
            while l != 0 {
                let b = l.trailing_zeros() as usize;
                acc.xor_shifted(&dense.limbs, w * BITS + b);
                l &= l - 1;
            }
        }
        acc
    }

    /// Number of nonzero terms.
    pub fn count_terms(&self) -> u32 {
        self.limbs.iter().map(|w| w.count_ones()).sum()
    }

    /// Quotient and remainder with `deg r < deg b`.
    pub fn divrem(&self, b: &Poly) -> Result<(Poly, Poly), PolyError> {
        let db = b.degree().ok_or(PolyError::DivByZero)?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let shift = dr - db;
            q.set_coeff(shift);
            r.xor_shifted(&b.limbs, shift);
        }
        q.normalize();
        Ok((q, r))
    }

    /// Remainder of `self` mod `b`.
    pub fn rem(&self, b: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divrem(b)?.1)
    }

    /// True iff `self` divides `other`.
    pub fn divides(&self, other: &Poly) -> bool {
        match other.rem(self) {
            Ok(r) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Greatest common divisor (monic by construction over GF(2)).
    pub fn gcd(&self, other: &Poly) -> Result<Poly, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::GcdUndefined);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        Ok(a)
    }

    /// Product reduced mod `m`.
    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Result<Poly, PolyError> {
        if m.degree().is_none_or(|d| d == 0) {
            return Err(PolyError::InvalidModulus);
        }
        self.mul(other).rem(m)
    }

    /// Square (bit spreading: coefficient k moves to 2k).
    pub fn square(&self) -> Poly {
        let mut limbs = vec![0u64; self.limbs.len() * 2];
        for (i, w) in self.limbs.iter().enumerate() {
            limbs[2 * i] = spread_u32((w & 0xffff_ffff) as u32);
            limbs[2 * i + 1] = spread_u32((w >> 32) as u32);
        }
        let mut p = Poly { limbs };
        p.normalize();
        p
    }

    /// base^exp mod m by square-and-multiply over the bits of `exp`.
    pub fn powmod(&self, exp: &BigUint, m: &Poly) -> Result<Poly, PolyError> {
        if m.degree().is_none_or(|d| d == 0) {
            return Err(PolyError::InvalidModulus);
        }
        if exp.is_zero() {
            return Ok(Poly::one());
        }
        let base = self.rem(m)?;
        let mut acc = Poly::one();
        for i in (0..exp.bits()).rev() {
            acc = acc.square().rem(m)?;
            if exp.bit(i) {
                acc = acc.mul(&base).rem(m)?;
            }
        }
        Ok(acc)
    }

    /// Formal derivative in characteristic 2: odd-exponent terms survive
    /// with the exponent decremented, even-exponent terms vanish. Bit b of
    /// limb i holds exponent 64i + b, odd exactly when b is odd, so each
    /// limb masks its odd bits and shifts them down independently.
    pub fn derivative(&self) -> Poly {
        const ODD: u64 = 0xaaaa_aaaa_aaaa_aaaa;
        let limbs: Vec<u64> = self.limbs.iter().map(|w| (w & ODD) >> 1).collect();
        let mut p = Poly { limbs };
        p.normalize();
        p
    }

    /// Square root of a perfect square (every exponent even): keeps the
    /// even-indexed coefficients. Caller must ensure the input is a square.
    fn sqrt(&self) -> Poly {
        let mut limbs = vec![0u64; self.limbs.len() / 2 + 1];
        for (i, w) in self.limbs.iter().enumerate() {
            let half = compress_even_bits(*w);
            if i % 2 == 0 {
                limbs[i / 2] |= half;
            } else {
                limbs[i / 2] |= half << 32;
            }
        }
        let mut p = Poly { limbs };
        p.normalize();
        p
    }

    /// Reciprocal polynomial x^deg * f(1/x) (coefficients reversed).
    pub fn reciprocal(&self) -> Poly {
        match self.degree() {
            None => Poly::zero(),
            Some(d) => {
                let mut p = Poly::zero();
                for k in 0..=d {
                    if self.coeff(k) {
                        p.set_coeff(d - k);
                    }
                }
                p
            }
        }
    }

    /// MSB-first bit string ("1011" = x^3+x+1); "0" for zero.
    pub fn to_bit_string(&self) -> String {
        match self.degree() {
            None => "0".to_string(),
            Some(d) => (0..=d).rev().map(|k| if self.coeff(k) { '1' } else { '0' }).collect(),
        }
    }

    /// Sparse form like "x^6+x^4+x^3+x+1".
    pub fn to_sparse_string(&self) -> String {
        let d = match self.degree() {
            None => return "0".to_string(),
            Some(d) => d,
        };
        let mut parts = Vec::new();
        for k in (0..=d).rev() {
            if self.coeff(k) {
                parts.push(match k {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    _ => format!("x^{k}"),
                });
            }
        }
        parts.join("+")
    }
}

/// Spreads the 32 bits of `v` into the even bit positions of a u64.
fn spread_u32(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

/// Gathers the even bit positions of `w` into the low 32 bits.
fn compress_even_bits(w: u64) -> u64 {
    let mut x = w & 0x5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x >> 4)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x >> 8)) & 0x0000_ffff_0000_ffff;
    x = (x | (x >> 16)) & 0x0000_0000_ffff_ffff;
    x
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.to_sparse_string())
    }
}

impl Ord for Poly {
    /// Degree first, then the bit sequence compared as an integer.
    fn cmp(&self, other: &Self) -> Ordering {
        self.limbs
            .len()
            .cmp(&other.limbs.len())
            .then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Poly {
    type Err = PolyError;

    /// Accepts an MSB-first bit string ("1011011") or the sparse form
    /// ("x^6+x^4+x^3+x+1").
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let t = s.trim();
        if t.is_empty() {
            return Err(PolyError::Parse(s.to_string()));
        }
        if t.contains('x') || t.contains('X') {
            return parse_sparse(t);
        }
        if t.len() > MAX_DEGREE + 1 {
            return Err(PolyError::CapExceeded(t.len() - 1, MAX_DEGREE));
        }
        let mut p = Poly::zero();
        let n = t.len();
        for (i, c) in t.chars().enumerate() {
            match c {
                '0' => {}
                '1' => p.set_coeff(n - 1 - i),
                _ => return Err(PolyError::Parse(s.to_string())),
            }
        }
        Ok(p)
    }
}

fn parse_sparse(s: &str) -> Result<Poly, PolyError> {
    let mut p = Poly::zero();
    for term in s.split('+') {
        let term = term.trim();
        let k = if term == "1" {
            0
        } else if term == "x" || term == "X" {
            1
        } else if let Some(rest) = term.strip_prefix("x^").or_else(|| term.strip_prefix("X^")) {
            rest.trim().parse::<usize>().map_err(|_| PolyError::Parse(s.to_string()))?
        } else {
            return Err(PolyError::Parse(s.to_string()));
        };
        if k > MAX_DEGREE {
            return Err(PolyError::CapExceeded(k, MAX_DEGREE));
        }
        p.toggle_coeff(k);
    }
    Ok(p)
}

/// A complete factorization into monic irreducibles with multiplicities,
/// sorted by degree and then by bit-sequence value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(Poly, u32)>,
}

impl Factorization {
    fn from_parts(mut factors: Vec<(Poly, u32)>) -> Self {
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        Factorization { factors }
    }

    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    /// Multiplies the factorization back out.
    pub fn product(&self) -> Poly {
        let mut acc = Poly::one();
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.factors.iter().map(|(_, e)| *e).max().unwrap_or(0)
    }
}

/// Square-free decomposition over GF(2). Returns pairwise-coprime
/// square-free parts with multiplicities whose product reconstructs `f`.
/// Characteristic 2 shows up twice: the derivative can vanish (then `f`
/// is a perfect square and we recurse on its square root, doubling
/// multiplicities), and the gcd residue `c` ends as a perfect square.
pub fn squarefree_decompose(f: &Poly) -> Result<Vec<(Poly, u32)>, PolyError> {
    if f.is_zero() {
        return Err(PolyError::InvalidInput);
    }
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let deriv = f.derivative();
    if deriv.is_zero() {
        for (g, m) in squarefree_decompose(&f.sqrt())? {
            out.push((g, m * 2));
        }
        return Ok(out);
    }
    let mut c = f.gcd(&deriv).expect("f nonzero");
    let mut w = f.divrem(&c)?.0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c).expect("w nonzero");
        let fac = w.divrem(&y)?.0;
        if !fac.is_one() {
            out.push((fac, i));
        }
        c = c.divrem(&y)?.0;
        w = y;
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in squarefree_decompose(&c.sqrt())? {
            out.push((g, m * 2));
        }
    }
    Ok(out)
}

/// Rabin irreducibility test: f of degree n is irreducible over GF(2) iff
/// x^(2^n) == x (mod f) and gcd(x^(2^(n/l)) - x, f) = 1 for each prime l | n.
/// Independent of [`berlekamp_factor`] so the two can cross-check.
pub fn is_irreducible(f: &Poly) -> Result<bool, PolyError> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(PolyError::InvalidInput),
    };
    if n > MAX_DEGREE {
        return Err(PolyError::CapExceeded(n, MAX_DEGREE));
    }
    // chain[k] = x^(2^k) mod f
    let mut chain = Vec::with_capacity(n + 1);
    chain.push(Poly::x().rem(f)?);
    for _ in 0..n {
        let next = chain.last().unwrap().square().rem(f)?;
        chain.push(next);
    }
    if chain[n] != chain[0] {
        return Ok(false);
    }
    for l in prime_divisors(n) {
        let h = chain[n / l].add(&chain[0]);
        if h.is_zero() {
            return Ok(false);
        }
        if !f.gcd(&h).expect("f nonzero").is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Complete factorization into irreducibles: square-free decomposition,
/// then a Berlekamp Q-matrix split of each square-free part. The split is
/// deterministic at q = 2 (both field constants are tried per null-space
/// vector).
pub fn berlekamp_factor(f: &Poly) -> Result<Factorization, PolyError> {
    let deg = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(PolyError::InvalidInput),
    };
    if deg > MAX_DEGREE {
        return Err(PolyError::CapExceeded(deg, MAX_DEGREE));
    }
    let mut parts = Vec::new();
    for (g, mult) in squarefree_decompose(f)? {
        for irr in berlekamp_squarefree(&g)? {
            parts.push((irr, mult));
        }
    }
    Ok(Factorization::from_parts(parts))
}

/// Splits a monic square-free polynomial into its irreducible factors.
fn berlekamp_squarefree(g: &Poly) -> Result<Vec<Poly>, PolyError> {
    let n = g.degree().expect("nonzero");
    if n == 1 {
        return Ok(vec![g.clone()]);
    }
    let basis = berlekamp_subalgebra_basis(g)?;
    let r = basis.len();
    let mut factors = vec![g.clone()];
    if r == 1 {
        return Ok(factors);
    }
    'outer: for v in &basis {
        if v.degree() == Some(0) {
            continue; // the constant vector never splits anything
        }
        let mut next = Vec::with_capacity(factors.len());
        for h in factors.drain(..) {
            if h.degree() == Some(1) {
                next.push(h);
                continue;
            }
            let d0 = h.gcd(v).expect("h nonzero");
            if d0.is_one() || d0 == h {
                // try v + 1, the other field constant
                let d1 = h.gcd(&v.add(&Poly::one())).expect("h nonzero");
                if d1.is_one() || d1 == h {
                    next.push(h);
                } else {
                    let q = h.divrem(&d1)?.0;
                    next.push(d1);
                    next.push(q);
                }
            } else {
                let q = h.divrem(&d0)?.0;
                next.push(d0);
                next.push(q);
            }
        }
        factors = next;
        if factors.len() == r {
            break 'outer;
        }
    }
    debug_assert_eq!(factors.len(), r);
    Ok(factors)
}

/// Basis of {v : v^2 == v mod g}, the Berlekamp subalgebra. Row i of the
/// Q matrix is x^(2i) mod g; we need the left null space of Q - I.
fn berlekamp_subalgebra_basis(g: &Poly) -> Result<Vec<Poly>, PolyError> {
    let n = g.degree().expect("nonzero");
    let words = n.div_ceil(BITS);
    // build (Q - I)^T packed by rows so the null space below is the
    // left null space of Q - I
    let mut mt = vec![0u64; n * words];
    let x2 = Poly::x().square().rem(g)?;
    let mut row = Poly::one();
    for i in 0..n {
        for j in 0..n {
            let mut bit = row.coeff(j);
            if i == j {
                bit ^= true;
            }
            if bit {
                mt[j * words + i / BITS] |= 1 << (i % BITS);
            }
        }
        row = row.mul(&x2).rem(g)?;
    }
    // right null space of the transposed matrix by Gaussian elimination
    let mut pivot_of_col = vec![usize::MAX; n];
    let mut rank = 0;
    for col in 0..n {
        let mut pivot = None;
        for r in rank..n {
            if mt[r * words + col / BITS] >> (col % BITS) & 1 == 1 {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        mt.swap_rows(p, rank, words);
        for r in 0..n {
            if r != rank && mt[r * words + col / BITS] >> (col % BITS) & 1 == 1 {
                for w in 0..words {
                    mt[r * words + w] ^= mt[rank * words + w];
                }
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
    }
    let mut basis = Vec::with_capacity(n - rank);
    for free in 0..n {
        if pivot_of_col[free] != usize::MAX {
            continue;
        }
        let mut v = Poly::zero();
        v.set_coeff(free);
        for (col, &pr) in pivot_of_col.iter().enumerate() {
            if pr != usize::MAX && mt[pr * words + free / BITS] >> (free % BITS) & 1 == 1 {
                v.set_coeff(col);
            }
        }
        v.normalize();
        basis.push(v);
    }
    Ok(basis)
}

trait SwapRows {
    fn swap_rows(&mut self, a: usize, b: usize, words: usize);
}

impl SwapRows for Vec<u64> {
    fn swap_rows(&mut self, a: usize, b: usize, words: usize) {
        if a == b {
            return;
        }
        for w in 0..words {
            self.swap(a * words + w, b * words + w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(p("101").add(&p("11")), p("110")); // (x^2+1)+(x+1) = x^2+x
        assert_eq!(p("1011").add(&p("1011")), Poly::zero());
        assert_eq!(p("1011").add(&p("1000")), p("11")); // leading terms cancel
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("11").mul(&p("11")), p("101")); // (x+1)^2 = x^2+1
        assert_eq!(p("111").mul(&p("1011")), p("110001")); // x^5+x^4+1
        assert_eq!(Poly::zero().mul(&p("1011")), Poly::zero());
    }

    #[test]
    fn divrem_examples() {
        let (q, r) = p("10011").divrem(&p("111")).unwrap();
        assert_eq!((q.clone(), r.clone()), (p("110"), p("1")));
        assert_eq!(q.mul(&p("111")).add(&r), p("10011"));
        assert_eq!(p("1011").divrem(&p("1011")).unwrap(), (Poly::one(), Poly::zero()));
        assert_eq!(p("11").divrem(&p("101")).unwrap(), (Poly::zero(), p("11")));
        assert_eq!(p("11").divrem(&Poly::zero()), Err(PolyError::DivByZero));
    }

    #[test]
    fn gcd_examples() {
        // x^4+x^2+1 = (x^2+x+1)^2, x^3+1 = (x+1)(x^2+x+1)
        assert_eq!(p("10101").gcd(&p("1001")).unwrap(), p("111"));
        assert_eq!(p("1011").gcd(&Poly::zero()).unwrap(), p("1011"));
        assert_eq!(p("1011").gcd(&p("111")).unwrap(), Poly::one());
        assert_eq!(Poly::zero().gcd(&Poly::zero()), Err(PolyError::GcdUndefined));
    }

    #[test]
    fn powmod_examples() {
        let x = Poly::x();
        assert_eq!(x.powmod(&BigUint::from(3u32), &p("111")).unwrap(), Poly::one());
        assert_eq!(x.powmod(&BigUint::from(7u32), &p("1011")).unwrap(), Poly::one());
        assert_eq!(x.powmod(&BigUint::from(1u32), &p("11")).unwrap(), Poly::one());
        assert_eq!(x.powmod(&BigUint::from(3u32), &Poly::one()), Err(PolyError::InvalidModulus));
        assert_eq!(x.powmod(&BigUint::from(3u32), &Poly::zero()), Err(PolyError::InvalidModulus));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("1011").derivative(), p("101")); // d(x^3+x+1) = x^2+1
        assert_eq!(p("10101").derivative(), Poly::zero());
        assert_eq!(p("10").derivative(), Poly::one());
        // high-exponent term crossing a word boundary
        assert_eq!(Poly::monomial(65).derivative(), Poly::monomial(64));
        assert_eq!(Poly::monomial(64).derivative(), Poly::zero());
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_decompose(&p("10101")).unwrap(), vec![(p("111"), 2)]);
        assert_eq!(squarefree_decompose(&p("111")).unwrap(), vec![(p("111"), 1)]);
        assert_eq!(squarefree_decompose(&p("1111")).unwrap(), vec![(p("11"), 3)]);
        assert!(squarefree_decompose(&Poly::zero()).is_err());
    }

    #[test]
    fn berlekamp_examples() {
        let f = berlekamp_factor(&p("10000001")).unwrap(); // x^7+1
        assert_eq!(
            f.factors(),
            &[(p("11"), 1), (p("1011"), 1), (p("1101"), 1)]
        );
        let f = berlekamp_factor(&p("1001001")).unwrap(); // x^6+x^3+1
        assert_eq!(f.factors(), &[(p("1001001"), 1)]);
        let f = berlekamp_factor(&p("111")).unwrap();
        assert_eq!(f.factors(), &[(p("111"), 1)]);
        assert!(berlekamp_factor(&Poly::one()).is_err());
        assert!(berlekamp_factor(&Poly::zero()).is_err());
    }

    #[test]
    fn irreducible_examples() {
        assert!(is_irreducible(&p("111")).unwrap());
        assert!(!is_irreducible(&p("101")).unwrap()); // (x+1)^2
        assert!(is_irreducible(&p("11111")).unwrap());
        assert!(is_irreducible(&p("10")).unwrap()); // x itself
        assert!(is_irreducible(&p("11")).unwrap());
        assert!(is_irreducible(&p("1000000011")).unwrap());
        assert!(is_irreducible(&Poly::one()).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("1011011").to_sparse_string(), "x^6+x^4+x^3+x+1");
        assert_eq!(p("x^6+x^4+x^3+x+1"), p("1011011"));
        assert_eq!(p("0"), Poly::zero());
        assert_eq!(p("0011"), p("11"));
        assert_eq!(p("1").to_sparse_string(), "1");
        assert_eq!(Poly::zero().to_bit_string(), "0");
        assert_eq!(p("x"), Poly::x());
        assert!("12".parse::<Poly>().is_err());
        assert!("".parse::<Poly>().is_err());
        assert!("x^9999999".parse::<Poly>().is_err());
    }

    #[test]
    fn ordering_is_degree_then_value() {
        let mut v = vec![p("1101"), p("11"), p("1011"), p("111")];
        v.sort();
        assert_eq!(v, vec![p("11"), p("111"), p("1011"), p("1101")]);
        assert!(Poly::zero() < Poly::one());
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(p("1011").reciprocal(), p("1101"));
        assert_eq!(p("11").reciprocal(), p("11"));
        assert_eq!(Poly::zero().reciprocal(), Poly::zero());
    }

    fn arb_poly(max_degree: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(any::<bool>(), 0..=max_degree + 1).prop_map(|bits| {
            let mut p = Poly::zero();
            for (k, b) in bits.iter().enumerate() {
                if *b {
                    p.set_coeff(k);
                }
            }
            p.normalize();
            p
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(64), b in arb_poly(64), c in arb_poly(64)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn divrem_round_trip(a in arb_poly(96), b in arb_poly(48)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b).unwrap();
            prop_assert_eq!(q.mul(&b).add(&r), a);
            if let Some(dr) = r.degree() {
                prop_assert!(dr < b.degree().unwrap());
            }
        }

        #[test]
        fn gcd_divides_and_scales(a in arb_poly(32), b in arb_poly(32), c in arb_poly(16)) {
            prop_assume!(!a.is_zero() || !b.is_zero());
            let g = a.gcd(&b).unwrap();
            prop_assert!(g.divides(&a) && g.divides(&b));
            if !c.is_zero() {
                let scaled = a.mul(&c).gcd(&b.mul(&c)).unwrap();
                prop_assert_eq!(scaled, g.mul(&c));
            }
        }

        #[test]
        fn square_is_mul_self(a in arb_poly(100)) {
            prop_assert_eq!(a.square(), a.mul(&a));
        }

        #[test]
        fn frobenius_consistency(f in arb_poly(16), n in 1usize..8) {
            prop_assume!(f.degree().is_some_and(|d| d >= 1));
            let two = BigUint::from(2u32);
            let lhs = Poly::x().powmod(&two.pow(n as u32), &f).unwrap();
            let mut rhs = Poly::x().rem(&f).unwrap();
            for _ in 0..n {
                rhs = rhs.powmod(&two, &f).unwrap();
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn factor_reconstructs(f in arb_poly(64)) {
            prop_assume!(f.degree().is_some_and(|d| d >= 1));
            let fac = berlekamp_factor(&f).unwrap();
            prop_assert_eq!(fac.product(), f);
            for (g, _) in fac.factors() {
                prop_assert!(is_irreducible(g).unwrap());
            }
        }

        #[test]
        fn squarefree_reconstructs(f in arb_poly(48)) {
            prop_assume!(!f.is_zero());
            let parts = squarefree_decompose(&f).unwrap();
            let mut acc = Poly::one();
            for (g, m) in &parts {
                // square-free: gcd(g, g') = 1
                prop_assert!(g.gcd(&g.derivative()).unwrap().is_one());
                for _ in 0..*m {
                    acc = acc.mul(g);
                }
            }
            prop_assert_eq!(acc, f);
        }
    }
}
