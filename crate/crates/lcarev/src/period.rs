//! The fast path for the period of reversibility: the period of the
//! rule's polynomial, computed as the multiplicative order of x in the
//! quotient ring of GF(2) polynomials modulo f.
//!
//! Irreducible f of degree n: factor 2^n - 1 and strip primes from the
//! group order while x^(order/p) stays 1. Reducible f: factor with
//! Berlekamp, take the lcm of the irreducible periods and multiply by the
//! least power of two covering the largest multiplicity.

use std::collections::HashMap;
use std::path::Path;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::exec;
use crate::gf2poly::{berlekamp_factor, is_irreducible, Poly, PolyError};
use crate::intfactor::{FactorError, Factorizer};
use crate::rule::{normalize_rule, rule_to_poly, Rule, RuleError};

/// Default degree cap: keeps every 2^n - 1 factorization inside the
/// bundled cache with margin.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Hard cap for the definitional brute-force scan.
pub const BRUTEFORCE_DEGREE_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PeriodError {
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("polynomial has no constant term (period undefined)")]
    NoConstantTerm,
    #[error("polynomial must have degree >= 1")]
    ConstantInput,
    #[error("degree {degree} exceeds the cap of {cap}")]
    CapExceeded { degree: usize, cap: usize },
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("period table at {path}: {message}")]
    Table { path: String, message: String },
}

/// Period of a polynomial together with how it decomposes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodResult {
    pub period: BigUint,
    /// (irreducible factor, multiplicity, period of the factor).
    pub factor_periods: Vec<(Poly, u32, BigUint)>,
    /// Least 2^t covering the largest multiplicity.
    pub power_part: BigUint,
}

/// Period of an irreducible polynomial at the default cap.
pub fn irreducible_period(f: &Poly) -> Result<BigUint, PeriodError> {
    irreducible_period_with(f, Factorizer::shared(), DEFAULT_DEGREE_CAP)
}

pub fn irreducible_period_with(
    f: &Poly,
    factorizer: &Factorizer,
    degree_cap: usize,
) -> Result<BigUint, PeriodError> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(PeriodError::ConstantInput),
    };
    if !f.constant_term() {
        return Err(PeriodError::NoConstantTerm);
    }
    if n > degree_cap {
        return Err(PeriodError::CapExceeded { degree: n, cap: degree_cap });
    }
    if !is_irreducible(f)? {
        return Err(PeriodError::NotIrreducible);
    }
    order_of_x(f, n, factorizer)
}

/// Multiplicative order of x mod irreducible f: start from 2^n - 1 and
/// divide out each prime while x^(order/p) is still 1.
fn order_of_x(f: &Poly, n: usize, factorizer: &Factorizer) -> Result<BigUint, PeriodError> {
    let group = (BigUint::one() << n) - BigUint::one();
    let factored = factorizer.factor(&group)?;
    let x = Poly::x();
    let mut order = group;
    for (p, e) in factored.factors() {
        for _ in 0..*e {
            let candidate = &order / p;
            if x.powmod(&candidate, f)?.is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Period of any polynomial with a constant term, at the default cap.
pub fn poly_period(f: &Poly) -> Result<PeriodResult, PeriodError> {
    poly_period_with(f, Factorizer::shared(), DEFAULT_DEGREE_CAP)
}

pub fn poly_period_with(
    f: &Poly,
    factorizer: &Factorizer,
    degree_cap: usize,
) -> Result<PeriodResult, PeriodError> {
    match f.degree() {
        None | Some(0) => return Err(PeriodError::ConstantInput),
        Some(_) => {}
    }
    if !f.constant_term() {
        return Err(PeriodError::NoConstantTerm);
    }
    let factorization = berlekamp_factor(f)?;
    for (g, _) in factorization.factors() {
        let d = g.degree().expect("irreducible factors are nonzero");
        if d > degree_cap {
            return Err(PeriodError::CapExceeded { degree: d, cap: degree_cap });
        }
    }
    let periods: Vec<Result<BigUint, PeriodError>> = exec::map_collect(
        factorization.factors().to_vec(),
        |(g, _)| {
            let d = g.degree().expect("nonzero");
            if !is_irreducible(&g)? {
                return Err(PeriodError::NotIrreducible);
            }
            order_of_x(&g, d, factorizer)
        },
    );
    let mut factor_periods = Vec::with_capacity(periods.len());
    let mut lcm = BigUint::one();
    for ((g, e), period) in factorization.factors().iter().zip(periods) {
        let period = period?;
        lcm = lcm.lcm(&period);
        factor_periods.push((g.clone(), *e, period));
    }
    let power_part = BigUint::one() << next_pow2_exponent(factorization.max_multiplicity());
    Ok(PeriodResult { period: &lcm * &power_part, factor_periods, power_part })
}

/// Exponent t of the least 2^t >= m.
fn next_pow2_exponent(m: u32) -> u32 {
    debug_assert!(m >= 1);
    32 - (m - 1).leading_zeros()
}

/// Definitional oracle: the least k >= 1 with x^k == 1 mod f, by a linear
/// scan that keeps x^k reduced. Independent of the factorization path.
pub fn period_bruteforce(f: &Poly) -> Result<BigUint, PeriodError> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(PeriodError::ConstantInput),
    };
    if !f.constant_term() {
        return Err(PeriodError::NoConstantTerm);
    }
    if n > BRUTEFORCE_DEGREE_CAP {
        return Err(PeriodError::CapExceeded { degree: n, cap: BRUTEFORCE_DEGREE_CAP });
    }
    let fbits: u32 = (0..=n).map(|k| (f.coeff(k) as u32) << k).sum();
    let mask = (1u32 << n) - 1;
    let mut r = 1u32; // x^0
    for k in 1u64..=1 << (n + 1) {
        r <<= 1;
        if r >> n & 1 == 1 {
            r ^= fbits;
        }
        r &= mask;
        if r == 1 {
            return Ok(BigUint::from(k));
        }
    }
    unreachable!("x is a unit mod f when f(0) = 1; its order is below 2^(n+1)")
}

/// Period of a rule: normalize, translate to the polynomial, compute.
/// Split-independent by construction.
pub fn rule_period(r: &Rule) -> Result<PeriodResult, PeriodError> {
    rule_period_with(r, Factorizer::shared(), DEFAULT_DEGREE_CAP)
}

pub fn rule_period_with(
    r: &Rule,
    factorizer: &Factorizer,
    degree_cap: usize,
) -> Result<PeriodResult, PeriodError> {
    let (norm, _) = normalize_rule(r)?;
    if norm.size() == 1 {
        // the identity rule: reversible for every n
        return Ok(PeriodResult {
            period: BigUint::one(),
            factor_periods: Vec::new(),
            power_part: BigUint::one(),
        });
    }
    poly_period_with(&rule_to_poly(&norm), factorizer, degree_cap)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableEntry {
    degree: usize,
    poly: String,
    period: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableFile {
    max_degree: usize,
    entries: Vec<TableEntry>,
}

/// Cache of (irreducible polynomial, period) rows, complete for every
/// degree up to `max_degree`. Written by the CLI `table` command and
/// consumed by rule generation.
#[derive(Debug, Clone, Default)]
pub struct PeriodTable {
    max_degree: usize,
    by_period: HashMap<BigUint, Vec<Poly>>,
}

impl PeriodTable {
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Builds the complete table for all irreducible polynomials of degree
    /// 1..=max_degree (f = x excluded: it has no period).
    pub fn build(
        max_degree: usize,
        factorizer: &Factorizer,
    ) -> Result<PeriodTable, PeriodError> {
        // 2^(d-1) candidates per degree; 24 already means ~17M Rabin tests
        if max_degree > 24 {
            return Err(PeriodError::CapExceeded { degree: max_degree, cap: 24 });
        }
        let mut polys = Vec::new();
        for d in 1..=max_degree {
            // MSB and constant term fixed to 1
            for mid in 0u64..1 << (d.saturating_sub(1)) {
                let bits = (1 << d) | (mid << 1) | 1;
                let f = Poly::from_bits_u64(bits);
                polys.push(f);
            }
        }
        let rows: Vec<Option<(usize, Poly, BigUint)>> = exec::map_collect(polys, |f| {
            if !is_irreducible(&f).expect("degree >= 1") {
                return None;
            }
            let d = f.degree().unwrap();
            let period = order_of_x(&f, d, factorizer).expect("cache covers small degrees");
            Some((d, f, period))
        });
        let mut table = PeriodTable { max_degree, by_period: HashMap::new() };
        for (_, f, period) in rows.into_iter().flatten() {
            table.by_period.entry(period).or_default().push(f);
        }
        for polys in table.by_period.values_mut() {
            polys.sort();
        }
        Ok(table)
    }

    /// All table polynomials of period exactly `period`, sorted. Complete
    /// only when ord_period(2) <= max_degree; the caller checks that.
    pub fn polys_with_period(&self, period: &BigUint) -> &[Poly] {
        self.by_period.get(period).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn load(path: &Path) -> Result<PeriodTable, PeriodError> {
        let wrap = |message: String| PeriodError::Table {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| wrap(e.to_string()))?;
        let file: TableFile = serde_json::from_str(&text).map_err(|e| wrap(e.to_string()))?;
        let mut table = PeriodTable { max_degree: file.max_degree, by_period: HashMap::new() };
        for entry in file.entries {
            let poly: Poly = entry.poly.parse().map_err(|e: PolyError| wrap(e.to_string()))?;
            let period: BigUint =
                entry.period.parse().map_err(|_| wrap(format!("bad period {:?}", entry.period)))?;
            table.by_period.entry(period).or_default().push(poly);
        }
        for polys in table.by_period.values_mut() {
            polys.sort();
            polys.dedup();
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<(), PeriodError> {
        let mut rows: Vec<(&BigUint, &Poly)> = self
            .by_period
            .iter()
            .flat_map(|(period, polys)| polys.iter().map(move |p| (period, p)))
            .collect();
        rows.sort_by(|a, b| (a.1.degree(), a.1).cmp(&(b.1.degree(), b.1)));
        let file = TableFile {
            max_degree: self.max_degree,
            entries: rows
                .into_iter()
                .map(|(period, poly)| TableEntry {
                    degree: poly.degree().unwrap_or(0),
                    poly: poly.to_bit_string(),
                    period: period.to_string(),
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&file).expect("serializable");
        std::fs::write(path, text).map_err(|e| PeriodError::Table {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Sorted (degree, poly, period) rows, for rendering.
    pub fn rows(&self) -> Vec<(usize, Poly, BigUint)> {
        let mut rows: Vec<(usize, Poly, BigUint)> = self
            .by_period
            .iter()
            .flat_map(|(period, polys)| {
                polys.iter().map(move |p| (p.degree().unwrap_or(0), p.clone(), period.clone()))
            })
            .collect();
        rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn table3_rows() {
        // the paper's period table for small irreducibles
        for (poly, period) in [
            ("11", 1u64),
            ("111", 3),
            ("1011", 7),
            ("11111", 5),
            ("100101", 31),
            ("100111001", 17),
            ("1000000011", 73),
            ("11111111111", 11),
        ] {
            assert_eq!(irreducible_period(&p(poly)).unwrap(), big(period), "{poly}");
            assert_eq!(poly_period(&p(poly)).unwrap().period, big(period), "{poly}");
        }
    }

    #[test]
    fn irreducible_period_errors() {
        assert_eq!(irreducible_period(&p("101")), Err(PeriodError::NotIrreducible));
        assert_eq!(irreducible_period(&p("10")), Err(PeriodError::NoConstantTerm));
        assert_eq!(irreducible_period(&p("1")), Err(PeriodError::ConstantInput));
        let high = Poly::monomial(65).add(&Poly::monomial(0)).add(&Poly::monomial(1));
        assert!(matches!(
            irreducible_period(&high),
            Err(PeriodError::CapExceeded { .. }) | Err(PeriodError::NotIrreducible)
        ));
    }

    #[test]
    fn reducible_periods() {
        let r = poly_period(&p("11111")).unwrap();
        assert_eq!(r.period, big(5));
        // (x+1)^3: lcm 1, power part 4
        let r = poly_period(&p("1111")).unwrap();
        assert_eq!((r.period.clone(), r.power_part.clone()), (big(4), big(4)));
        // (x^2+x+1)^2: lcm 3, power part 2
        let r = poly_period(&p("10101")).unwrap();
        assert_eq!((r.period.clone(), r.power_part.clone()), (big(6), big(2)));
        assert_eq!(r.factor_periods, vec![(p("111"), 2, big(3))]);
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(period_bruteforce(&p("111")).unwrap(), big(3));
        assert_eq!(period_bruteforce(&p("11")).unwrap(), big(1));
        assert_eq!(period_bruteforce(&p("11001")).unwrap(), big(15));
        assert_eq!(period_bruteforce(&p("10")), Err(PeriodError::NoConstantTerm));
        assert!(matches!(
            period_bruteforce(&Poly::monomial(17).add(&Poly::one())),
            Err(PeriodError::CapExceeded { .. })
        ));
    }

    #[test]
    fn rule_period_examples() {
        let rule = |t, l| Rule::parse(t, l).unwrap();
        assert_eq!(rule_period(&rule("11111", 2)).unwrap().period, big(5));
        assert_eq!(rule_period(&rule("10011", 2)).unwrap().period, big(15));
        assert_eq!(rule_period(&rule("11", 0)).unwrap().period, big(1));
        assert_eq!(rule_period(&rule("1", 0)).unwrap().period, big(1));
        assert_eq!(rule_period(&rule("010", 1)).unwrap().period, big(1));
        // split does not matter
        for left in 0..5 {
            assert_eq!(rule_period(&rule("10011", left)).unwrap().period, big(15));
        }
    }

    #[test]
    fn period_matches_bruteforce_to_degree_8() {
        for d in 1..=8usize {
            for mid in 0u64..1 << (d - 1) {
                let f = Poly::from_bits_u64((1 << d) | (mid << 1) | 1);
                let fast = poly_period(&f).unwrap().period;
                let slow = period_bruteforce(&f).unwrap();
                assert_eq!(fast, slow, "f = {f}");
            }
        }
    }

    #[test]
    fn reciprocal_and_coprime_invariants() {
        for bits in [0b1011u64, 0b11001, 0b101111, 0b1100111] {
            let f = Poly::from_bits_u64(bits);
            let r = f.reciprocal();
            assert_eq!(
                poly_period(&f).unwrap().period,
                poly_period(&r).unwrap().period,
                "f = {f}"
            );
        }
        // coprime squarefree product: period is the lcm
        let f = p("1011"); // period 7
        let g = p("111"); // period 3
        assert_eq!(poly_period(&f.mul(&g)).unwrap().period, big(21));
    }

    #[test]
    fn table_build_and_roundtrip() {
        let fz = Factorizer::default();
        let table = PeriodTable::build(4, &fz).unwrap();
        assert_eq!(table.polys_with_period(&big(3)), &[p("111")]);
        assert_eq!(table.polys_with_period(&big(7)), &[p("1011"), p("1101")]);
        assert_eq!(table.polys_with_period(&big(5)), &[p("11111")]);
        assert_eq!(table.polys_with_period(&big(15)), &[p("10011"), p("11001")]);
        let dir = std::env::temp_dir().join(format!("lcarev-table-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("period_table.json");
        table.save(&path).unwrap();
        let loaded = PeriodTable::load(&path).unwrap();
        assert_eq!(loaded.max_degree(), 4);
        assert_eq!(loaded.polys_with_period(&big(15)), table.polys_with_period(&big(15)));
        std::fs::remove_dir_all(&dir).ok();
    }
}
