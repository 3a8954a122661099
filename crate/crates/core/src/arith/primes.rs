use rug::Float;

use super::precision::PrecisionContext;
use crate::error::{Error, Result};

const SEGMENT: u64 = 1 << 15;

/// Upper bound for the `k`-th prime (Rosser: `p_k < k(ln k + ln ln k)` for `k >= 6`).
pub fn nth_prime_upper_bound(k: usize) -> u64 {
    if k < 6 {
        return 13;
    }
    let kf = k as f64;
    (kf * (kf.ln() + kf.ln().ln())).ceil() as u64 + 1
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Segmented sieve of Eratosthenes yielding the primes `<= limit` in order.
pub struct SegmentedSieve {
    limit: u64,
    base: Vec<u64>,
    low: u64,
    buffer: Vec<u64>,
    pos: usize,
}

impl SegmentedSieve {
    pub fn new(limit: u64) -> Self {
        let root = (limit as f64).sqrt() as u64 + 1;
        SegmentedSieve { limit, base: simple_sieve(root), low: 0, buffer: Vec::new(), pos: 0 }
    }

    fn fill(&mut self) -> bool {
        self.buffer.clear();
        self.pos = 0;
        while self.buffer.is_empty() {
            if self.low > self.limit {
                return false;
            }
            let high = (self.low + SEGMENT - 1).min(self.limit);
            let len = (high - self.low + 1) as usize;
            let mut composite = vec![false; len];
            for &p in &self.base {
                if p * p > high {
                    break;
                }
                let first = (self.low.div_ceil(p) * p).max(p * p);
                let mut m = first;
                while m <= high {
                    composite[(m - self.low) as usize] = true;
                    m += p;
                }
            }
            for (i, &c) in composite.iter().enumerate() {
                let v = self.low + i as u64;
                if !c && v >= 2 {
                    self.buffer.push(v);
                }
            }
            self.low = high + 1;
        }
        true
    }
}

impl Iterator for SegmentedSieve {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buffer.len() && !self.fill() {
            return None;
        }
        let p = self.buffer[self.pos];
        self.pos += 1;
        Some(p)
    }
}

/// The first `k` primes, generated by the segmented sieve.
pub fn first_k_primes(k: usize) -> Vec<u64> {
    SegmentedSieve::new(nth_prime_upper_bound(k)).take(k).collect()
}

/// The first `K` primes with high-precision logarithms, log-logarithms and
/// their prefix sums (`cum_log[k] = log n_k`, the primorial of order `k`).
///
/// Indices are 1-based throughout: `prime(1) = 2`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    ctx: PrecisionContext,
    primes: Vec<u64>,
    log_primes: Vec<Float>,
    loglog_primes: Vec<Float>,
    cum_log: Vec<Float>,
    cum_loglog: Vec<Float>,
    log_f64: Vec<f64>,
}

/// Builds the table of the first `k` primes at the given precision.
pub fn first_primes(k: usize, ctx: &PrecisionContext) -> PrimeTable {
    PrimeTable::new(k, ctx)
}

impl PrimeTable {
    pub fn new(k: usize, ctx: &PrecisionContext) -> Self {
        let primes = first_k_primes(k.max(1));
        let prec = ctx.prec();
        let mut log_primes = Vec::with_capacity(primes.len());
        let mut loglog_primes = Vec::with_capacity(primes.len());
        let mut cum_log = Vec::with_capacity(primes.len() + 1);
        let mut cum_loglog = Vec::with_capacity(primes.len() + 1);
        let mut acc = Float::with_val(prec, 0);
        let mut acc_ll = Float::with_val(prec, 0);
        cum_log.push(acc.clone());
        cum_loglog.push(acc_ll.clone());
        for &p in &primes {
            let lp = Float::with_val(prec, p).ln();
            let llp = Float::with_val(prec, lp.ln_ref());
            acc += &lp;
            acc_ll += &llp;
            cum_log.push(acc.clone());
            cum_loglog.push(acc_ll.clone());
            log_primes.push(lp);
            loglog_primes.push(llp);
        }
        let log_f64 = log_primes.iter().map(Float::to_f64).collect();
        PrimeTable { ctx: ctx.clone(), primes, log_primes, loglog_primes, cum_log, cum_loglog, log_f64 }
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn prec(&self) -> u32 {
        self.ctx.prec()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    fn check(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.primes.len() {
            return Err(Error::TableTooSmall { needed: i, available: self.primes.len() });
        }
        Ok(())
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `p_i`, 1-based.
    pub fn prime(&self, i: usize) -> u64 {
        self.primes[i - 1]
    }

    pub fn try_prime(&self, i: usize) -> Result<u64> {
        self.check(i)?;
        Ok(self.primes[i - 1])
    }

    pub fn log_prime(&self, i: usize) -> &Float {
        &self.log_primes[i - 1]
    }

    pub fn loglog_prime(&self, i: usize) -> &Float {
        &self.loglog_primes[i - 1]
    }

    pub fn log_prime_f64(&self, i: usize) -> f64 {
        self.log_f64[i - 1]
    }

    /// `log n_k`, with `n_0 = 1`.
    pub fn log_primorial(&self, k: usize) -> &Float {
        &self.cum_log[k]
    }

    pub fn try_log_primorial(&self, k: usize) -> Result<&Float> {
        if k > self.primes.len() {
            return Err(Error::TableTooSmall { needed: k, available: self.primes.len() });
        }
        Ok(&self.cum_log[k])
    }

    /// `log β(n_k) = -Σ_{i<=k} log log p_i`.
    pub fn log_beta_primorial(&self, k: usize) -> Float {
        Float::with_val(self.prec(), -&self.cum_loglog[k])
    }

    pub fn cum_log(&self) -> &[Float] {
        &self.cum_log
    }

    /// 1-based index of `p`, if `p` is a prime in the table.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }
}
