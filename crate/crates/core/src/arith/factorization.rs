use std::collections::BTreeMap;
use std::fmt;

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use super::primes::PrimeTable;
use crate::error::{Error, Result};

/// Default bound below which integers may be materialized for oracles.
pub const DEFAULT_MATERIALIZE_BOUND: u64 = 1_000_000_000;

/// An integer `n = Π p_i^{α_i}` held as its exponent vector over
/// prime-table indices, with cached high-precision logarithms.
///
/// Large witnesses (log n ≈ 10^4) are never materialized; every size
/// comparison goes through `log_n`.
#[derive(Debug, Clone)]
pub struct Factorization {
    prime_indices: Vec<usize>,
    primes: Vec<u64>,
    exponents: Vec<u32>,
    log_n: Float,
    log_gamma: Float,
    sum_loglog: Float,
}

/// Compact JSON form `{"idx":[...],"exp":[...]}` (1-based prime indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub idx: Vec<usize>,
    pub exp: Vec<u32>,
}

impl Factorization {
    /// Builds from ascending 1-based prime indices and positive exponents.
    pub fn new(table: &PrimeTable, prime_indices: Vec<usize>, exponents: Vec<u32>) -> Result<Self> {
        if prime_indices.len() != exponents.len() {
            return Err(Error::Factorization(format!(
                "{} indices but {} exponents",
                prime_indices.len(),
                exponents.len()
            )));
        }
        if prime_indices.is_empty() {
            return Err(Error::Factorization("n = 1 has no factorization".into()));
        }
        if prime_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Factorization("prime indices must be strictly ascending".into()));
        }
        if let Some(pos) = exponents.iter().position(|&a| a == 0) {
            return Err(Error::Factorization(format!("exponent {pos} is zero")));
        }
        let prec = table.prec();
        let mut log_n = Float::with_val(prec, 0);
        let mut log_gamma = Float::with_val(prec, 0);
        let mut sum_loglog = Float::with_val(prec, 0);
        let mut primes = Vec::with_capacity(prime_indices.len());
        for (&i, &a) in prime_indices.iter().zip(&exponents) {
            primes.push(table.try_prime(i)?);
            let lp = table.log_prime(i);
            log_n += Float::with_val(prec, lp * a);
            log_gamma += lp;
            sum_loglog += table.loglog_prime(i);
        }
        Ok(Factorization { prime_indices, primes, exponents, log_n, log_gamma, sum_loglog })
    }

    /// `Π_{i<=k} p_i^{α_i}` for the exponent vector `α` over the first primes.
    pub fn from_exponent_vector(table: &PrimeTable, exponents: &[u32]) -> Result<Self> {
        Self::new(table, (1..=exponents.len()).collect(), exponents.to_vec())
    }

    /// The primorial `n_k`.
    pub fn primorial(table: &PrimeTable, k: usize) -> Result<Self> {
        Self::from_exponent_vector(table, &vec![1; k])
    }

    /// Builds from `(prime, exponent)` pairs in any order; repeated primes merge.
    pub fn from_prime_powers(table: &PrimeTable, powers: &[(u64, u32)]) -> Result<Self> {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for &(p, a) in powers {
            let idx = table
                .index_of(p)
                .ok_or_else(|| Error::Factorization(format!("{p} is not a prime in the table")))?;
            if a > 0 {
                *merged.entry(idx).or_insert(0) += a;
            }
        }
        let (idx, exp) = merged.into_iter().unzip();
        Self::new(table, idx, exp)
    }

    pub fn from_json(table: &PrimeTable, json: &FactorizationJson) -> Result<Self> {
        Self::new(table, json.idx.clone(), json.exp.clone())
    }

    pub fn to_json(&self) -> FactorizationJson {
        FactorizationJson { idx: self.prime_indices.clone(), exp: self.exponents.clone() }
    }

    pub fn prime_indices(&self) -> &[usize] {
        &self.prime_indices
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn log_n(&self) -> &Float {
        &self.log_n
    }

    pub fn prec(&self) -> u32 {
        self.log_n.prec()
    }

    /// ω(n), the number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.exponents.len()
    }

    /// Ω(n), the number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.exponents.iter().map(|&a| u64::from(a)).sum()
    }

    /// τ(n) = Π(α_i + 1).
    pub fn tau(&self) -> Integer {
        self.exponents.iter().fold(Integer::from(1), |acc, &a| acc * (a + 1))
    }

    /// log τ(n), summed term by term.
    pub fn log_tau(&self) -> Float {
        let prec = self.prec();
        self.exponents
            .iter()
            .fold(Float::with_val(prec, 0), |acc, &a| acc + Float::with_val(prec, a + 1).ln())
    }

    /// log γ(n), the logarithm of the radical.
    pub fn gamma_log(&self) -> &Float {
        &self.log_gamma
    }

    /// log β(n) = −Σ log log p over the distinct primes.
    pub fn beta_log(&self) -> Float {
        Float::with_val(self.prec(), -&self.sum_loglog)
    }

    /// True when the exponents are nonincreasing over the first ω primes.
    pub fn is_canonical(&self) -> bool {
        self.prime_indices.iter().enumerate().all(|(i, &p)| p == i + 1)
            && self.exponents.windows(2).all(|w| w[0] >= w[1])
    }

    /// Largest prime index dividing n.
    pub fn max_prime_index(&self) -> usize {
        *self.prime_indices.last().expect("nonempty")
    }

    /// The exponent of `p_idx` in n (0 if absent).
    pub fn exponent_of(&self, idx: usize) -> u32 {
        match self.prime_indices.binary_search(&idx) {
            Ok(pos) => self.exponents[pos],
            Err(_) => 0,
        }
    }

    /// `n / p_idx`.
    pub fn divide_prime(&self, table: &PrimeTable, idx: usize) -> Result<Self> {
        let pos = self
            .prime_indices
            .binary_search(&idx)
            .map_err(|_| Error::Factorization(format!("p_{idx} does not divide n")))?;
        let mut indices = self.prime_indices.clone();
        let mut exps = self.exponents.clone();
        if exps[pos] == 1 {
            indices.remove(pos);
            exps.remove(pos);
        } else {
            exps[pos] -= 1;
        }
        Self::new(table, indices, exps)
    }

    /// Product of two factorizations.
    pub fn multiply(&self, other: &Factorization, table: &PrimeTable) -> Result<Self> {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for f in [self, other] {
            for (&i, &a) in f.prime_indices.iter().zip(&f.exponents) {
                *merged.entry(i).or_insert(0) += a;
            }
        }
        let (idx, exp) = merged.into_iter().unzip();
        Self::new(table, idx, exp)
    }

    /// Materializes n, refusing when `log n` exceeds `log bound`.
    pub fn to_integer(&self, bound: u64) -> Result<Integer> {
        let limit = (bound as f64).ln() + 1e-9;
        if self.log_n.to_f64() > limit {
            return Err(Error::TooLarge { value: format!("exp({})", self.log_n.to_f64()), bound });
        }
        Ok(self.to_integer_unchecked())
    }

    /// Materializes n regardless of size.
    pub fn to_integer_unchecked(&self) -> Integer {
        self.primes
            .iter()
            .zip(&self.exponents)
            .fold(Integer::from(1), |acc, (&p, &a)| acc * Integer::from(Integer::u_pow_u(p as u32, a)))
    }

    /// Checks the cached invariants against a fresh recomputation.
    pub fn check_invariants(&self, table: &PrimeTable) -> Result<()> {
        let fresh = Self::new(table, self.prime_indices.clone(), self.exponents.clone())?;
        let tol = table.ctx().ten_pow_neg(table.ctx().digits() - 5);
        let err = Float::with_val(self.prec(), &fresh.log_n - &self.log_n).abs();
        if err > tol {
            return Err(Error::Factorization("cached log n drifted from recomputed value".into()));
        }
        if self.big_omega() < self.omega() as u64 {
            return Err(Error::Factorization("Ω < ω".into()));
        }
        Ok(())
    }

    /// Parses `p1^a1 * p2^a2 * ...`.
    ///
    /// Factors may also be plain integers (factored against the table), or
    /// primorials written `n<k>`, each optionally raised to a power, e.g.
    /// `720*n7` or `24*n16`.
    pub fn parse(table: &PrimeTable, text: &str) -> Result<Self> {
        let mut merged: BTreeMap<u64, u32> = BTreeMap::new();
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty factorization literal".into()));
        }
        for term in cleaned.split(['*', '·']) {
            let (base, power) = match term.split_once('^') {
                Some((b, e)) => {
                    let e: u32 = e.parse().map_err(|_| Error::Parse(format!("bad exponent in {term:?}")))?;
                    (b, e)
                }
                None => (term, 1),
            };
            if base.is_empty() {
                return Err(Error::Parse(format!("empty factor in {text:?}")));
            }
            if let Some(k) = base.strip_prefix('n') {
                let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad primorial {base:?}")))?;
                for i in 1..=k {
                    *merged.entry(table.try_prime(i)?).or_insert(0) += power;
                }
                continue;
            }
            let value: Integer = base
                .parse()
                .map_err(|_| Error::Parse(format!("{base:?} is not an integer or primorial")))?;
            for (p, a) in trial_factor(table, value)? {
                *merged.entry(p).or_insert(0) += a * power;
            }
        }
        let powers: Vec<(u64, u32)> = merged.into_iter().collect();
        Self::from_prime_powers(table, &powers)
    }
}

fn trial_factor(table: &PrimeTable, value: Integer) -> Result<Vec<(u64, u32)>> {
    if value < 1 {
        return Err(Error::Parse(format!("factor {value} must be positive")));
    }
    let mut rest = value;
    let mut out = Vec::new();
    for &p in table.primes() {
        if rest == 1 {
            break;
        }
        let mut a = 0;
        while rest.is_divisible_u(p as u32) {
            rest.div_exact_u_mut(p as u32);
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
    }
    if rest != 1 {
        return Err(Error::Factorization(format!(
            "cofactor {rest} has no prime factor in the table (largest {})",
            table.primes().last().copied().unwrap_or(0)
        )));
    }
    Ok(out)
}

impl PartialEq for Factorization {
    fn eq(&self, other: &Self) -> bool {
        self.prime_indices == other.prime_indices && self.exponents == other.exponents
    }
}

impl Eq for Factorization {}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (&p, &a)) in self.primes.iter().zip(&self.exponents).enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if a == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{a}")?;
            }
        }
        Ok(())
    }
}

/// Trial-division factorization of `n <= bound`.
pub fn factorize_small(table: &PrimeTable, n: u64, bound: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::domain("factorize_small", format!("n = {n} < 2")));
    }
    if n > bound {
        return Err(Error::TooLarge { value: n.to_string(), bound });
    }
    let mut rest = n;
    let mut powers = Vec::new();
    let mut d = 2u64;
    while d * d <= rest {
        let mut a = 0;
        while rest.is_multiple_of(d) {
            rest /= d;
            a += 1;
        }
        if a > 0 {
            powers.push((d, a));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        powers.push((rest, 1));
    }
    Factorization::from_prime_powers(table, &powers)
}

/// `log max(2, x)`.
pub fn log_plus(x: &Float) -> Result<Float> {
    if *x <= 0 {
        return Err(Error::domain("log_plus", format!("x = {} must be positive", x.to_f64())));
    }
    let prec = x.prec();
    if *x < 2 {
        Ok(Float::with_val(prec, 2).ln())
    } else {
        Ok(Float::with_val(prec, x.ln_ref()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrecisionContext;

    fn table() -> PrimeTable {
        PrimeTable::new(200, &PrecisionContext::default())
    }

    #[test]
    fn tau_examples() {
        let t = table();
        let f = factorize_small(&t, 60060, DEFAULT_MATERIALIZE_BOUND).unwrap();
        assert_eq!(f.exponents(), &[2, 1, 1, 1, 1, 1]);
        assert_eq!(f.tau(), 96);
        let p = factorize_small(&t, 2, DEFAULT_MATERIALIZE_BOUND).unwrap();
        assert_eq!(p.prime_indices(), &[1]);
        assert_eq!(p.tau(), 2);
        let n = Factorization::parse(&t, "720*n7").unwrap();
        assert_eq!(n.to_integer(DEFAULT_MATERIALIZE_BOUND).unwrap(), 367_567_200u64);
        assert_eq!(n.tau(), 1152);
    }

    #[test]
    fn omega_gamma() {
        let t = table();
        let f = factorize_small(&t, 12, DEFAULT_MATERIALIZE_BOUND).unwrap();
        assert_eq!((f.omega(), f.big_omega()), (2, 3));
        assert!((f.gamma_log().to_f64() - 6f64.ln()).abs() < 1e-15);
        let n44 = Factorization::primorial(&t, 44).unwrap();
        assert_eq!(n44.gamma_log(), t.log_primorial(44));
        assert_eq!(n44.log_n(), t.log_primorial(44));
    }

    #[test]
    fn beta_primorial_six_endpoint() {
        // The limit-point endpoint 1.145206… is β(n_6)^{1/6}·log 6.
        let t = table();
        let n6 = factorize_small(&t, 30030, DEFAULT_MATERIALIZE_BOUND).unwrap();
        let v = Float::with_val(t.prec(), n6.beta_log() / 6u32).exp() * Float::with_val(t.prec(), 6).ln();
        assert!((v.to_f64() - 1.145206).abs() < 1e-6);
    }

    #[test]
    fn materialization_bound() {
        let t = table();
        assert!(matches!(factorize_small(&t, 6_983_776_800, DEFAULT_MATERIALIZE_BOUND), Err(Error::TooLarge { .. })));
        let f = factorize_small(&t, 6_983_776_800, 10_000_000_000).unwrap();
        assert_eq!(f.to_string(), "2^5 * 3^3 * 5^2 * 7 * 11 * 13 * 17 * 19");
        assert!(factorize_small(&t, 1, 10).is_err());
    }

    #[test]
    fn parse_forms() {
        let t = table();
        let a = Factorization::parse(&t, "24*n16").unwrap();
        let b = Factorization::parse(&t, "782139803452561073520").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_integer_unchecked().to_string(), "782139803452561073520");
        let c = Factorization::parse(&t, "2^5 * 3^3 * 5^2 * 7 * 11 * 13 * 17 * 19").unwrap();
        assert_eq!(c.tau(), 2304);
        assert!(Factorization::parse(&t, "2^x").is_err());
        assert!(Factorization::parse(&t, "").is_err());
        assert!(Factorization::parse(&t, "0").is_err());
    }

    #[test]
    fn json_form() {
        let t = table();
        let f = Factorization::parse(&t, "2^2*3*5").unwrap();
        let js = serde_json::to_string(&f.to_json()).unwrap();
        assert_eq!(js, r#"{"idx":[1,2,3],"exp":[2,1,1]}"#);
        let back: FactorizationJson = serde_json::from_str(&js).unwrap();
        assert_eq!(Factorization::from_json(&t, &back).unwrap(), f);
    }

    #[test]
    fn rejects_bad_vectors() {
        let t = table();
        assert!(Factorization::new(&t, vec![2, 1], vec![1, 1]).is_err());
        assert!(Factorization::new(&t, vec![1, 2], vec![1, 0]).is_err());
        assert!(Factorization::new(&t, vec![1], vec![1, 1]).is_err());
        assert!(Factorization::new(&t, vec![201], vec![1]).is_err());
    }

    #[test]
    fn log_plus_clamps() {
        let ctx = PrecisionContext::default();
        let l2 = ctx.float(2).ln();
        assert_eq!(log_plus(&ctx.float(1)).unwrap(), l2);
        assert_eq!(log_plus(&ctx.float(2)).unwrap(), l2);
        assert_eq!(log_plus(&ctx.float(10)).unwrap(), ctx.float(10).ln());
        assert!(log_plus(&ctx.float(0)).is_err());
    }

    #[test]
    fn divide_and_multiply() {
        let t = table();
        let f = Factorization::parse(&t, "2^2*3").unwrap();
        let g = f.divide_prime(&t, 1).unwrap();
        assert_eq!(g.to_string(), "2 * 3");
        let h = g.divide_prime(&t, 1).unwrap();
        assert_eq!(h.to_string(), "3");
        assert!(h.divide_prime(&t, 1).is_err());
        let m = f.multiply(&h, &t).unwrap();
        assert_eq!(m.to_string(), "2^2 * 3^2");
        assert!(m.check_invariants(&t).is_ok());
    }
}
