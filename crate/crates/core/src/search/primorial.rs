//! Primorial ranks and canonical exponent-vector walks.

use rug::Float;

use crate::arith::{Factorization, PrimeTable};
use crate::error::{Error, Result};

/// u(x): the largest ℓ with `n_ℓ <= x`, given `log x`.
///
/// Errors when every primorial in the table is `<= x`, since the answer
/// could then exceed the table.
pub fn u_of(table: &PrimeTable, log_x: &Float) -> Result<usize> {
    if *log_x < 0 {
        return Err(Error::domain("u_of", "x must be at least 1"));
    }
    let cum = table.cum_log();
    let count = cum.partition_point(|c| c <= log_x);
    if count == cum.len() {
        return Err(Error::TableTooSmall { needed: cum.len(), available: table.len() });
    }
    Ok(count - 1)
}

/// Sorts the exponents in descending order onto the first ω primes.
pub fn canonicalize(table: &PrimeTable, f: &Factorization) -> Result<Factorization> {
    let mut exps = f.exponents().to_vec();
    exps.sort_unstable_by(|a, b| b.cmp(a));
    Factorization::from_exponent_vector(table, &exps)
}

/// Visits every nonincreasing vector `(α_1, …, α_k)` with `1 <= α_i <= caps[i]`
/// and, when `log_bound` is given, `Σ α_i log p_i <= log_bound`.
///
/// Returns the number of vectors visited.
pub fn for_each_canonical<F>(table: &PrimeTable, caps: &[u32], log_bound: Option<&Float>, mut visit: F) -> Result<u64>
where
    F: FnMut(&[u32]) -> Result<()>,
{
    let k = caps.len();
    if k == 0 {
        return Err(Error::domain("for_each_canonical", "need at least one prime"));
    }
    table.try_log_primorial(k)?;
    if caps.contains(&0) {
        return Ok(0);
    }
    let lp: Vec<f64> = (1..=k).map(|i| table.log_prime_f64(i)).collect();
    // tail[i] = Σ_{t >= i} log p_t, the cheapest completion from position i.
    let mut tail = vec![0.0; k + 1];
    for i in (0..k).rev() {
        tail[i] = tail[i + 1] + lp[i];
    }
    let bound = log_bound.map(|b| b.to_f64() + 1e-9);
    let mut v = vec![0u32; k];
    let mut count = 0u64;
    walk(table, caps, &lp, &tail, bound, log_bound, &mut v, 0, u32::MAX, 0.0, &mut count, &mut visit)?;
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn walk<F>(
    table: &PrimeTable,
    caps: &[u32],
    lp: &[f64],
    tail: &[f64],
    bound: Option<f64>,
    exact: Option<&Float>,
    v: &mut [u32],
    pos: usize,
    prev: u32,
    acc: f64,
    count: &mut u64,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&[u32]) -> Result<()>,
{
    if pos == v.len() {
        if let Some(b) = exact {
            let f = Factorization::from_exponent_vector(table, v)?;
            if f.log_n() > b {
                return Ok(());
            }
        }
        *count += 1;
        return visit(v);
    }
    let top = caps[pos].min(prev);
    for a in 1..=top {
        let next = acc + a as f64 * lp[pos];
        if let Some(b) = bound {
            if next + tail[pos + 1] > b {
                break;
            }
        }
        v[pos] = a;
        walk(table, caps, lp, tail, bound, exact, v, pos + 1, a, next, count, visit)?;
    }
    Ok(())
}

/// All `s <= limit` whose prime factors are among the first `r` primes, as
/// `(s, exponents over p_1..p_r)`, in increasing order of `s`.
pub fn smooth_numbers(table: &PrimeTable, r: usize, limit: u64) -> Result<Vec<(u64, Vec<u32>)>> {
    let primes: Vec<u64> = (1..=r).map(|i| table.try_prime(i)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut exps = vec![0u32; r];
    smooth_walk(&primes, limit, 0, 1, &mut exps, &mut out);
    out.sort_by_key(|(s, _)| *s);
    Ok(out)
}

fn smooth_walk(primes: &[u64], limit: u64, pos: usize, value: u64, exps: &mut [u32], out: &mut Vec<(u64, Vec<u32>)>) {
    if pos == primes.len() {
        out.push((value, exps.to_vec()));
        return;
    }
    let mut v = value;
    let mut a = 0;
    loop {
        exps[pos] = a;
        smooth_walk(primes, limit, pos + 1, v, exps, out);
        match v.checked_mul(primes[pos]) {
            Some(next) if next <= limit => {
                v = next;
                a += 1;
            }
            _ => break,
        }
    }
    exps[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrecisionContext;

    fn table() -> PrimeTable {
        PrimeTable::new(100, &PrecisionContext::default())
    }

    #[test]
    fn u_small_values() {
        let t = table();
        let ctx = t.ctx().clone();
        assert_eq!(u_of(&t, &ctx.float(0)).unwrap(), 0);
        assert_eq!(u_of(&t, &ctx.float(30).ln()).unwrap(), 3);
        assert_eq!(u_of(&t, &ctx.float(29).ln()).unwrap(), 2);
        assert!(u_of(&t, &ctx.float(-1)).is_err());
        assert!(u_of(&t, &ctx.float(1e6)).is_err());
    }

    #[test]
    fn canonical_form() {
        let t = table();
        let f = Factorization::parse(&t, "2*3^2").unwrap();
        let c = canonicalize(&t, &f).unwrap();
        assert_eq!(c, Factorization::parse(&t, "2^2*3").unwrap());
        assert_eq!(c.tau(), f.tau());
        assert!(c.log_n() <= f.log_n());
    }

    #[test]
    fn capped_walk_counts() {
        let t = table();
        let mut seen = Vec::new();
        let n = for_each_canonical(&t, &[2, 2, 1], None, |v| {
            seen.push(v.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(n, 3);
        assert_eq!(seen, vec![vec![1, 1, 1], vec![2, 1, 1], vec![2, 2, 1]]);
        let bound = t.ctx().float(60).ln();
        let n = for_each_canonical(&t, &[5, 5, 5], Some(&bound), |_| Ok(())).unwrap();
        // 30 and 60.
        assert_eq!(n, 2);
    }

    #[test]
    fn smooth_numbers_small() {
        let t = table();
        let s: Vec<u64> = smooth_numbers(&t, 2, 20).unwrap().into_iter().map(|(s, _)| s).collect();
        assert_eq!(s, vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18]);
    }
}
