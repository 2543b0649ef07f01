//! Inverse problem: construct LCA rules whose period of reversibility is a
//! requested T, and bound from below how many exist.
//!
//! A polynomial has period T = U * 2^t (U odd) exactly when the lcm of its
//! irreducible factors' periods is U and the largest multiplicity lies in
//! (2^(t-1), 2^t]. The generator therefore works over the pool of all
//! irreducibles whose period divides U: the members of period exactly
//! m_i^(e_i) come from the period table or from factoring x^w + 1, and
//! (x+1)^s alone covers the pure power-of-two periods.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::exec;
use crate::gf2poly::{berlekamp_factor, Poly, PolyError, MAX_DEGREE};
use crate::intfactor::{multiplicative_order, FactorError, Factorizer};
use crate::period::{irreducible_period_with, poly_period_with, PeriodError, PeriodTable};
use crate::rule::{poly_to_rule, Rule};

/// Largest polynomial degree the generator will emit.
pub const GEN_DEGREE_CAP: usize = 128;

/// Hard ceiling on raw enumerated factor combinations per call (combos
/// over the degree cap cost a few arithmetic ops each).
const COMBINATION_CEILING: u64 = 1 << 28;

/// Hard ceiling on materialized candidates (built and period-verified).
const CANDIDATE_CEILING: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("period {0} is even; irreducible polynomials have odd periods")]
    NotOdd(BigUint),
    #[error("{what} {n} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("target period is zero")]
    ZeroPeriod,
    #[error("more than {ceiling} factor combinations; pass a limit or pick a smaller period")]
    TooManyCombinations { ceiling: u64 },
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// T split as U * V with U odd and V = 2^t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodSpec {
    pub target: BigUint,
    /// t, so V = 2^t.
    pub two_exponent: u32,
    /// The odd primes of U with their exponents, increasing.
    pub odd_part: Vec<(BigUint, u32)>,
}

impl PeriodSpec {
    pub fn odd_value(&self) -> BigUint {
        let mut u = BigUint::one();
        for (m, e) in &self.odd_part {
            u *= m.pow(*e);
        }
        u
    }
}

/// Everything the generator found for one target period.
#[derive(Debug, Clone)]
pub struct GenOutput {
    pub spec: PeriodSpec,
    /// Verified polynomials with period exactly T, sorted by degree then
    /// bit value, duplicate-free.
    pub polynomials: Vec<Poly>,
    /// One rule per polynomial, default symmetric split.
    pub rules: Vec<Rule>,
    /// The lower-bound formula evaluated with the exact g values.
    pub lower_bound: BigUint,
    /// (modulus m_i^(e_i), number of irreducibles of that exact period).
    pub g_values: Vec<(BigUint, BigUint)>,
    /// Candidates skipped because their degree exceeded [`GEN_DEGREE_CAP`].
    pub skipped_over_cap: u64,
    /// True when `limit` cut the list short.
    pub truncated: bool,
}

/// Factors T and splits out the power of two.
pub fn decompose_period(t: &BigUint, factorizer: &Factorizer) -> Result<PeriodSpec, GenError> {
    if t.is_zero() {
        return Err(GenError::ZeroPeriod);
    }
    let factored = factorizer.factor(t)?;
    let mut two_exponent = 0;
    let mut odd_part = Vec::new();
    for (p, e) in factored.factors() {
        if p == &BigUint::from(2u32) {
            two_exponent = *e;
        } else {
            odd_part.push((p.clone(), *e));
        }
    }
    Ok(PeriodSpec { target: t.clone(), two_exponent, odd_part })
}

/// g(m): how many irreducible polynomials have period exactly m. This is
/// phi(m) / ord_m(2): the primitive m-th roots of unity split into
/// Frobenius orbits of size ord_m(2), one minimal polynomial each.
pub fn count_irreducibles_with_period(
    m: &BigUint,
    factorizer: &Factorizer,
) -> Result<BigUint, GenError> {
    if m.is_even() {
        return Err(GenError::NotOdd(m.clone()));
    }
    if m.is_one() {
        return Ok(BigUint::one());
    }
    let phi = factorizer.factor(m)?.totient();
    let ord = multiplicative_order(&BigUint::from(2u32), m, factorizer)?;
    Ok(phi / ord)
}

/// All irreducible polynomials of period exactly m (odd), sorted, with the
/// default degree cap of [`GEN_DEGREE_CAP`].
pub fn irreducibles_with_period(
    m: &BigUint,
    factorizer: &Factorizer,
    table: Option<&PeriodTable>,
) -> Result<Vec<Poly>, GenError> {
    irreducibles_with_period_capped(m, factorizer, table, GEN_DEGREE_CAP)
}

/// The factors of x^m + 1 whose period is exactly m: degree ord_m(2) and
/// x^(m/p) != 1 mod g for every prime p | m (checking exactness needs no
/// integer factorization of 2^deg - 1). A period table complete past
/// ord_m(2) answers directly.
pub fn irreducibles_with_period_capped(
    m: &BigUint,
    factorizer: &Factorizer,
    table: Option<&PeriodTable>,
    degree_cap: usize,
) -> Result<Vec<Poly>, GenError> {
    if m.is_even() {
        return Err(GenError::NotOdd(m.clone()));
    }
    if m.is_one() {
        return Ok(vec![Poly::from_terms(&[0, 1])]);
    }
    let ord = multiplicative_order(&BigUint::from(2u32), m, factorizer)?;
    let ord_usize = ord.to_usize().unwrap_or(usize::MAX);
    if ord_usize > degree_cap {
        return Err(GenError::CapExceeded { what: "ord_m(2)", n: ord_usize, cap: degree_cap });
    }
    if let Some(table) = table {
        if table.max_degree() >= ord_usize {
            return Ok(table.polys_with_period(m).to_vec());
        }
    }
    let m_usize = m.to_usize().unwrap_or(usize::MAX);
    if m_usize > MAX_DEGREE {
        return Err(GenError::CapExceeded { what: "m", n: m_usize, cap: MAX_DEGREE });
    }
    let maximal_divisors: Vec<BigUint> =
        factorizer.factor(m)?.factors().iter().map(|(p, _)| m / p).collect();
    // x^m + 1
    let xm1 = Poly::from_terms(&[0, m_usize]);
    let x = Poly::x();
    let mut out = Vec::new();
    for (g, _) in berlekamp_factor(&xm1)?.factors() {
        if g.degree() != Some(ord_usize) {
            continue;
        }
        let exact = maximal_divisors
            .iter()
            .map(|d| x.powmod(d, g).map(|r| !r.is_one()))
            .collect::<Result<Vec<bool>, _>>()?
            .into_iter()
            .all(|b| b);
        if exact {
            out.push(g.clone());
        }
    }
    out.sort();
    Ok(out)
}

/// Substitutes x -> x^m.
fn compose_x_power(f: &Poly, m: usize) -> Poly {
    let d = f.degree().unwrap_or(0);
    let terms: Vec<usize> = (0..=d).filter(|&k| f.coeff(k)).map(|k| k * m).collect();
    Poly::from_terms(&terms)
}

/// Lifts an irreducible of period m^k to one of period m^(k+1): factor
/// f(x^m) and keep the lexicographically smallest factor whose period is
/// m times larger. When m does not divide the old period, one factor
/// keeps it and is skipped.
pub fn lift_prime_power(
    f: &Poly,
    m: &BigUint,
    factorizer: &Factorizer,
) -> Result<Poly, GenError> {
    let old_period = irreducible_period_with(f, factorizer, GEN_DEGREE_CAP)?;
    let target = &old_period * m;
    let m_usize = m.to_usize().ok_or(GenError::CapExceeded {
        what: "m",
        n: usize::MAX,
        cap: MAX_DEGREE,
    })?;
    let deg = f.degree().expect("irreducible") * m_usize;
    if deg > MAX_DEGREE {
        return Err(GenError::CapExceeded { what: "lift degree", n: deg, cap: MAX_DEGREE });
    }
    let lifted = compose_x_power(f, m_usize);
    let mut best: Option<Poly> = None;
    for (g, _) in berlekamp_factor(&lifted)?.factors() {
        if g.degree().unwrap_or(0) > GEN_DEGREE_CAP {
            return Err(GenError::CapExceeded {
                what: "lifted factor degree",
                n: g.degree().unwrap_or(0),
                cap: GEN_DEGREE_CAP,
            });
        }
        if irreducible_period_with(g, factorizer, GEN_DEGREE_CAP)? == target
            && best.as_ref().is_none_or(|b| g < b)
        {
            best = Some(g.clone());
        }
    }
    Ok(best.expect("f(x^m) always has a factor of period m * p(f)"))
}

/// Exponent window for (x+1)^s to have period exactly 2^t.
pub fn power_of_two_exponent_range(t: u32) -> (u64, u64) {
    if t == 0 {
        (1, 1)
    } else {
        ((1 << (t - 1)) + 1, 1 << t)
    }
}

/// The paper-form lower bound on rules of period T = U * 2^t:
/// 2^t (2^(tr) - 2^((t-1)r)) prod g + 2^(tr) prod g, with the degenerate
/// cases T = 1 -> 1, U = 1 -> 2^(t-1), t = 0 -> 2 prod g.
pub fn count_lower_bound(spec: &PeriodSpec, g: &[BigUint]) -> BigUint {
    let r = spec.odd_part.len() as u32;
    let t = spec.two_exponent;
    let prod_g: BigUint = g.iter().product();
    if spec.target.is_one() {
        return BigUint::one();
    }
    if r == 0 {
        return BigUint::one() << (t - 1);
    }
    if t == 0 {
        return prod_g * 2u32;
    }
    let pow = |e: u32| BigUint::one() << e;
    (pow(t) * (pow(t * r) - pow((t - 1) * r)) + pow(t * r)) * prod_g
}

struct PoolEntry {
    poly: Poly,
    degree: usize,
    /// valuation of the entry's period at each odd prime of U
    valuations: Vec<u32>,
}

/// Generates polynomials (and rules, symmetric split) of period exactly T.
pub fn generate_polynomials(
    t: &BigUint,
    limit: Option<usize>,
) -> Result<GenOutput, GenError> {
    generate_polynomials_with(t, limit, Factorizer::shared(), None)
}

pub fn generate_polynomials_with(
    target: &BigUint,
    limit: Option<usize>,
    factorizer: &Factorizer,
    table: Option<&PeriodTable>,
) -> Result<GenOutput, GenError> {
    let spec = decompose_period(target, factorizer)?;
    let mut g_values = Vec::new();
    for (m, e) in &spec.odd_part {
        let modulus = m.pow(*e);
        let g = count_irreducibles_with_period(&modulus, factorizer)?;
        g_values.push((modulus, g));
    }
    let lower_bound = count_lower_bound(&spec, &g_values.iter().map(|(_, g)| g.clone()).collect::<Vec<_>>());

    // pool: irreducibles of period d for every odd divisor d > 1 of U
    let mut pool: Vec<PoolEntry> = Vec::new();
    for divisor in odd_divisors(&spec) {
        let valuations: Vec<u32> = spec
            .odd_part
            .iter()
            .map(|(m, _)| valuation(&divisor, m))
            .collect();
        if divisor.is_one() {
            continue;
        }
        for poly in irreducibles_with_period(&divisor, factorizer, table)? {
            let degree = poly.degree().expect("irreducible");
            pool.push(PoolEntry { poly, degree, valuations: valuations.clone() });
        }
    }
    pool.sort_by(|a, b| (a.degree, &a.poly).cmp(&(b.degree, &b.poly)));
    if pool.len() > 22 {
        return Err(GenError::TooManyCombinations { ceiling: COMBINATION_CEILING });
    }

    // pass 1: how many in-cap candidates exist at each degree
    let window = ExponentWindow::new(spec.two_exponent);
    let mut counts = [0u64; GEN_DEGREE_CAP + 1];
    let stats = enumerate_candidates(&pool, &spec, &window, |degree, _, _, _| {
        counts[degree as usize] += 1;
    })?;

    // pass 2: materialize ascending by degree only as far as the limit
    // needs; within one degree the bit-value sort below finishes the
    // canonical (degree, bits) order before any truncation
    let mut cutoff = GEN_DEGREE_CAP as u64;
    if let Some(limit) = limit {
        let mut cumulative = 0u64;
        for (d, c) in counts.iter().enumerate() {
            cumulative += c;
            if cumulative >= limit as u64 {
                cutoff = d as u64;
                break;
            }
        }
    }
    let total_to_build: u64 = counts.iter().take(cutoff as usize + 1).sum();
    if total_to_build > CANDIDATE_CEILING {
        return Err(GenError::TooManyCombinations { ceiling: CANDIDATE_CEILING });
    }
    let x_plus_1 = Poly::from_terms(&[0, 1]);
    let mut candidates: Vec<Poly> = Vec::with_capacity(total_to_build as usize);
    enumerate_candidates(&pool, &spec, &window, |degree, chosen, exps, a0| {
        if degree > cutoff {
            return;
        }
        let mut f = Poly::one();
        for (entry, &e) in chosen.iter().zip(exps) {
            for _ in 0..e {
                f = f.mul(&entry.poly);
            }
        }
        for _ in 0..a0 {
            f = f.mul(&x_plus_1);
        }
        candidates.push(f);
    })?;

    // soundness gate: emit only what verifies
    let verified: Vec<Option<Poly>> = exec::map_collect(candidates, |f| {
        let ok = poly_period_with(&f, factorizer, GEN_DEGREE_CAP)
            .map(|r| r.period == spec.target)
            .unwrap_or(false);
        debug_assert!(ok, "constructed candidate must have the target period");
        ok.then_some(f)
    });
    let mut polynomials: Vec<Poly> = verified.into_iter().flatten().collect();
    polynomials.sort_by(|a, b| (a.degree(), a).cmp(&(b.degree(), b)));
    polynomials.dedup();
    let mut truncated = polynomials.len() < counts.iter().sum::<u64>() as usize;
    if let Some(limit) = limit {
        if polynomials.len() > limit {
            polynomials.truncate(limit);
            truncated = true;
        }
    }
    let rules = polynomials
        .iter()
        .map(|f| {
            let size = f.degree().expect("nonconstant") + 1;
            poly_to_rule(f, Rule::symmetric_split(size)).expect("constant term 1")
        })
        .collect();
    Ok(GenOutput {
        spec,
        polynomials,
        rules,
        lower_bound,
        g_values,
        skipped_over_cap: stats.skipped_over_cap,
        truncated,
    })
}

struct ExponentWindow {
    max_exp: u64,
    lo: u64,
}

impl ExponentWindow {
    fn new(t: u32) -> Self {
        let max_exp = 1u64 << t;
        ExponentWindow { max_exp, lo: if t == 0 { 1 } else { (1 << (t - 1)) + 1 } }
    }

    fn admits(&self, max_all: u64) -> bool {
        (self.lo..=self.max_exp).contains(&max_all)
    }
}

struct EnumerationStats {
    skipped_over_cap: u64,
}

/// Drives `visit(degree, chosen, exponents, a0)` over every factor
/// combination with period T and degree within [`GEN_DEGREE_CAP`].
/// Exponent digits above the degree cap carry immediately, so combination
/// counts stay proportional to the in-cap volume.
fn enumerate_candidates<'p, F>(
    pool: &'p [PoolEntry],
    spec: &PeriodSpec,
    window: &ExponentWindow,
    mut visit: F,
) -> Result<EnumerationStats, GenError>
where
    F: FnMut(u64, &[&'p PoolEntry], &[u64], u64),
{
    let cap = GEN_DEGREE_CAP as u64;
    let mut skipped_over_cap = 0u64;
    let mut combinations = 0u64;
    // exponents above the cap can never appear: every pool entry has
    // degree >= 1
    let exp_ceiling = window.max_exp.min(cap);
    if window.lo > exp_ceiling {
        // the window starts above any representable exponent
        return Ok(EnumerationStats { skipped_over_cap: 0 });
    }
    let max_a0 = window.max_exp.min(cap);
    for mask in 0u64..1 << pool.len() {
        // per-prime max valuation over the subset must be exactly e_i
        let ok = spec.odd_part.iter().enumerate().all(|(i, (_, e))| {
            (0..pool.len())
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| pool[j].valuations[i])
                .max()
                .unwrap_or(0)
                == *e
        });
        if !ok {
            continue;
        }
        let chosen: Vec<&PoolEntry> =
            (0..pool.len()).filter(|&j| mask >> j & 1 == 1).map(|j| &pool[j]).collect();
        let base_degree: u64 = chosen.iter().map(|p| p.degree as u64).sum();
        if base_degree > cap {
            continue;
        }
        let mut exps = vec![1u64; chosen.len()];
        'odometer: loop {
            combinations += 1;
            if combinations > COMBINATION_CEILING {
                return Err(GenError::TooManyCombinations { ceiling: COMBINATION_CEILING });
            }
            let degree: u64 =
                chosen.iter().zip(&exps).map(|(p, &e)| p.degree as u64 * e).sum();
            if degree <= cap {
                let max_exp_part = exps.iter().copied().max().unwrap_or(0);
                for a0 in 0..=max_a0 {
                    if degree + a0 > cap {
                        skipped_over_cap += max_a0 - a0 + 1;
                        break;
                    }
                    let max_all = max_exp_part.max(a0);
                    if degree + a0 > 0 && window.admits(max_all) {
                        visit(degree + a0, &chosen, &exps, a0);
                    }
                }
            } else {
                skipped_over_cap += max_a0 + 1;
            }
            // advance, carrying any digit that overflows its window or
            // can no longer fit under the cap
            let mut i = 0;
            while i < exps.len() {
                let rest: u64 = chosen
                    .iter()
                    .zip(&exps)
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (p, &e))| p.degree as u64 * e)
                    .sum();
                let head_room = (cap.saturating_sub(rest)) / chosen[i].degree as u64;
                if exps[i] < exp_ceiling.min(head_room.max(1)) {
                    exps[i] += 1;
                    continue 'odometer;
                }
                exps[i] = 1;
                i += 1;
            }
            break;
        }
    }
    Ok(EnumerationStats { skipped_over_cap })
}

fn odd_divisors(spec: &PeriodSpec) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    for (m, e) in &spec.odd_part {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for d in &out {
            let mut pe = BigUint::one();
            for _ in 0..=*e {
                next.push(d * &pe);
                pe *= m;
            }
        }
        out = next;
    }
    out.sort();
    out
}

fn valuation(n: &BigUint, p: &BigUint) -> u32 {
    let mut v = 0;
    let mut n = n.clone();
    while !n.is_one() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}
