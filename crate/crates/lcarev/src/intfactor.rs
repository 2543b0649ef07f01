//! Integer factorization support for the period computations.
//!
//! The period of a degree-n irreducible polynomial divides 2^n - 1, so the
//! factorizer is tuned for exactly those integers: a bundled cache covers
//! 2^n - 1 for n <= 128, and anything else goes through trial division
//! followed by Pollard rho with Brent cycle detection under a time budget.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::RwLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::{Lazy, OnceCell};

/// Default wall-clock budget for one factorization.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(30);

const TRIAL_LIMIT: u64 = 100_000;

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| sieve(TRIAL_LIMIT));

static EMBEDDED_CACHE_JSON: &str = include_str!("../data/mersenne_factors.json");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error("factorization timed out; {} prime power(s) found, composite cofactor remains", partial.len())]
    Timeout {
        /// Prime powers extracted before the budget ran out.
        partial: Vec<(BigUint, u32)>,
        /// Product of the parts that remain unfactored.
        remaining: BigUint,
    },
    #[error("cannot factor zero")]
    Zero,
    #[error("factor cache at {path}: {message}")]
    Cache { path: String, message: String },
}

/// A positive integer as a multiset of prime powers, primes strictly
/// increasing. The product of the prime powers reconstructs `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl FactoredInt {
    fn new(value: BigUint, mut factors: Vec<(BigUint, u32)>) -> Self {
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        debug_assert!({
            let mut prod = BigUint::one();
            for (p, e) in &factors {
                prod *= p.pow(*e);
            }
            prod == value
        });
        FactoredInt { value, factors }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Prime-power pairs, primes strictly increasing.
    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    /// Euler's totient from the factorization.
    pub fn totient(&self) -> BigUint {
        let mut phi = BigUint::one();
        for (p, e) in &self.factors {
            phi *= p.pow(e - 1) * (p - 1u32);
        }
        phi
    }

    /// All divisors, unsorted.
    pub fn divisors(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::one()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            for d in &out {
                let mut pe = BigUint::one();
                for _ in 0..=*e {
                    next.push(d * &pe);
                    pe *= p;
                }
            }
            out = next;
        }
        out
    }
}

/// Deterministic Miller-Rabin below 2^64 (fixed witness set), probabilistic
/// with error below 2^-128 above.
pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => is_prime_big(n),
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // this witness set is deterministic for all n < 2^64
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime_big(n: &BigUint) -> bool {
    debug_assert!(n.bits() > 64);
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut seed = splitmix(n.to_u64_digits().iter().fold(0u64, |a, w| a ^ w));
    // 12 fixed small bases plus 64 derived ones: error < 4^-64 = 2^-128
    let fixed = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    'witness: for round in 0..(fixed.len() + 64) {
        let a = if round < fixed.len() {
            BigUint::from(fixed[round])
        } else {
            seed = splitmix(seed);
            BigUint::from(seed % (u64::MAX - 2) + 2)
        };
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Pollard rho with Brent cycle detection; returns a nontrivial factor of
/// odd composite `n`, or None when the deadline passes.
fn pollard_brent_u64(n: u64, deadline: Option<Instant>) -> Option<u64> {
    debug_assert!(n > 3 && n % 2 == 1);
    const BATCH: u64 = 128;
    for c in 1u64..=64 {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mulmod_u64(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += BATCH;
            }
            r *= 2;
            if let Some(dl) = deadline {
                if Instant::now() > dl {
                    return None;
                }
            }
        }
        if g == n {
            // redo the last batch one step at a time
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pollard_brent_big(n: &BigUint, deadline: Option<Instant>) -> Option<BigUint> {
    const BATCH: u64 = 128;
    for c in 1u64..=64 {
        let cc = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cc) % n;
        let abs_diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = (q * abs_diff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            r *= 2;
            if let Some(dl) = deadline {
                if Instant::now() > dl {
                    return None;
                }
            }
        }
        if g == *n {
            g = BigUint::one();
            while g.is_one() {
                ys = f(&ys);
                g = abs_diff(&x, &ys).gcd(n);
            }
        }
        if g != *n {
            return Some(g);
        }
    }
    None
}

/// Factorizer with a read-mostly cache: the bundled 2^n - 1 table plus an
/// optional JSON file that user runs can extend. Reads are concurrent,
/// writes are idempotent inserts behind the lock.
pub struct Factorizer {
    cache: RwLock<HashMap<BigUint, Vec<(BigUint, u32)>>>,
    budget: Duration,
    path: Option<PathBuf>,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer::new(DEFAULT_BUDGET)
    }
}

impl Factorizer {
    pub fn new(budget: Duration) -> Self {
        Factorizer {
            cache: RwLock::new(embedded_cache().clone()),
            budget,
            path: None,
        }
    }

    /// Loads (or prepares to create) a JSON cache file on top of the
    /// bundled table. Format: map from decimal value to [prime, exponent]
    /// pairs, primes as decimal strings.
    pub fn with_cache_file(budget: Duration, path: &Path) -> Result<Self, FactorError> {
        let mut map = embedded_cache().clone();
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| FactorError::Cache {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            for (value, factors) in parse_cache_json(&text).map_err(|message| FactorError::Cache {
                path: path.display().to_string(),
                message,
            })? {
                map.insert(value, factors);
            }
        }
        Ok(Factorizer {
            cache: RwLock::new(map),
            budget,
            path: Some(path.to_path_buf()),
        })
    }

    /// Process-wide instance backed by the bundled cache only.
    pub fn shared() -> &'static Factorizer {
        static SHARED: OnceCell<Factorizer> = OnceCell::new();
        SHARED.get_or_init(Factorizer::default)
    }

    /// Complete prime factorization of `n >= 1`.
    pub fn factor(&self, n: &BigUint) -> Result<FactoredInt, FactorError> {
        if n.is_zero() {
            return Err(FactorError::Zero);
        }
        if n.is_one() {
            return Ok(FactoredInt::new(n.clone(), Vec::new()));
        }
        if let Some(found) = self.cache.read().expect("cache lock").get(n) {
            return Ok(FactoredInt::new(n.clone(), found.clone()));
        }
        let deadline = Instant::now() + self.budget;
        let result = factor_uncached(n, Some(deadline))?;
        self.cache
            .write()
            .expect("cache lock")
            .entry(n.clone())
            .or_insert_with(|| result.factors.clone());
        Ok(result)
    }

    /// Factorization of 2^n - 1 (cache-backed for n <= 128).
    pub fn factor_mersenne(&self, n: u32) -> Result<FactoredInt, FactorError> {
        let value = (BigUint::one() << n) - BigUint::one();
        self.factor(&value)
    }

    /// Persists the cache to its file, if one was configured.
    pub fn save(&self) -> Result<(), FactorError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let cache = self.cache.read().expect("cache lock");
        let mut entries: Vec<_> = cache.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::from("{\n");
        for (i, (value, factors)) in entries.iter().enumerate() {
            let pairs: Vec<String> = factors
                .iter()
                .map(|(p, e)| format!("[\"{p}\",{e}]"))
                .collect();
            out.push_str(&format!("\"{}\":[{}]", value, pairs.join(",")));
            out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
        }
        out.push_str("}\n");
        std::fs::write(path, out).map_err(|e| FactorError::Cache {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

type PrimePowers = Vec<(BigUint, u32)>;

fn parse_cache_json(text: &str) -> Result<Vec<(BigUint, PrimePowers)>, String> {
    let raw: HashMap<String, Vec<(String, u32)>> =
        serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(raw.len());
    for (value, pairs) in raw {
        let v: BigUint = value.parse().map_err(|_| format!("bad integer {value:?}"))?;
        let mut factors = Vec::with_capacity(pairs.len());
        let mut prod = BigUint::one();
        for (p, e) in pairs {
            let p: BigUint = p.parse().map_err(|_| format!("bad prime {p:?}"))?;
            prod *= p.pow(e);
            factors.push((p, e));
        }
        if prod != v {
            return Err(format!("entry {v} does not reconstruct from its factors"));
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        out.push((v, factors));
    }
    Ok(out)
}

fn embedded_cache() -> &'static HashMap<BigUint, Vec<(BigUint, u32)>> {
    static CACHE: OnceCell<HashMap<BigUint, Vec<(BigUint, u32)>>> = OnceCell::new();
    CACHE.get_or_init(|| {
        parse_cache_json(EMBEDDED_CACHE_JSON)
            .expect("bundled factor table is well-formed")
            .into_iter()
            .collect()
    })
}

fn factor_uncached(n: &BigUint, deadline: Option<Instant>) -> Result<FactoredInt, FactorError> {
    let mut counts: HashMap<BigUint, u32> = HashMap::new();
    let mut rest = n.clone();
    for &p in SMALL_PRIMES.iter() {
        if rest.is_one() {
            break;
        }
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        while (&rest % &bp).is_zero() {
            *counts.entry(bp.clone()).or_insert(0) += 1;
            rest /= &bp;
        }
    }
    let mut pending = Vec::new();
    if !rest.is_one() {
        pending.push(rest);
    }
    let mut timed_out = false;
    let mut unfactored = BigUint::one();
    while let Some(m) = pending.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *counts.entry(m).or_insert(0) += 1;
            continue;
        }
        if timed_out || deadline.is_some_and(|d| Instant::now() > d) {
            timed_out = true;
            unfactored *= &m;
            continue;
        }
        let d = match m.to_u64() {
            Some(v) => pollard_brent_u64(v, deadline).map(BigUint::from),
            None => pollard_brent_big(&m, deadline),
        };
        match d {
            Some(d) => {
                let q = &m / &d;
                pending.push(d);
                pending.push(q);
            }
            None => {
                timed_out = true;
                unfactored *= &m;
            }
        }
    }
    let mut factors: Vec<(BigUint, u32)> = counts.into_iter().collect();
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    if timed_out {
        return Err(FactorError::Timeout {
            partial: factors,
            remaining: unfactored,
        });
    }
    Ok(FactoredInt::new(n.clone(), factors))
}

/// Multiplicative order of `base` modulo odd `m` (gcd(base, m) must be 1):
/// start from phi(m) and strip primes while the power still maps to 1.
pub fn multiplicative_order(
    base: &BigUint,
    m: &BigUint,
    factorizer: &Factorizer,
) -> Result<BigUint, FactorError> {
    if m.is_one() {
        return Ok(BigUint::one());
    }
    let phi = factorizer.factor(m)?.totient();
    let phi_factored = factorizer.factor(&phi)?;
    let mut ord = phi;
    for (p, _) in phi_factored.factors() {
        loop {
            if !(&ord % p).is_zero() {
                break;
            }
            let candidate = &ord / p;
            if base.modpow(&candidate, m).is_one() {
                ord = candidate;
            } else {
                break;
            }
        }
    }
    Ok(ord)
}
