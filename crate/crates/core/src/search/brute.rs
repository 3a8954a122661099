//! Exhaustive checks of the inequalities over `2 <= n <= n_max`.

use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde_json::json;

use crate::arith::{Factorization, PrecisionContext, PrimeTable};
use crate::bounds::{eta2, eta3, inequality_margin, Inequality, InequalityConstants};
use crate::error::{Error, Result};

use super::reference::LARGEST_INEQ2_COUNTEREXAMPLE;
use super::report::{VerificationReport, Witness};

/// Largest n_max accepted without the long-running flag.
pub const DEFAULT_NMAX_LIMIT: u64 = 10_000_000;
/// Width of the f64 band sent to the high-precision check.
pub const F64_BAND: f64 = 1e-9;
const CHUNK: u64 = 1 << 16;
const MAX_WITNESSES: usize = 50;

/// Smallest-prime-factor table for `0..=n`.
pub fn spf_sieve(n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            let mut m = i.saturating_mul(i);
            while m <= n {
                if spf[m] == 0 {
                    spf[m] = i as u32;
                }
                m += i;
            }
        }
    }
    spf
}

/// `(p, α)` pairs of `n >= 2`, ascending.
pub fn factor_with(spf: &[u32], mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    while n > 1 {
        let p = spf[n as usize] as u64;
        let mut a = 0;
        while n.is_multiple_of(p) {
            n /= p;
            a += 1;
        }
        out.push((p, a));
    }
    out
}

struct F64Consts {
    log_eta2: f64,
    eta3: f64,
}

/// f64 mirror of [`inequality_margin`]; Jensen1 returns None (checked exactly).
fn margin_f64(ineq: Inequality, pf: &[(u64, u32)], c: &F64Consts) -> Option<f64> {
    let k = pf.len() as f64;
    let mut lt = 0.0;
    let mut ln_n = 0.0;
    let mut lg = 0.0;
    let mut lb = 0.0;
    for &(p, a) in pf {
        let lp = (p as f64).ln();
        lt += ((a + 1) as f64).ln();
        ln_n += a as f64 * lp;
        lg += lp;
        lb -= lp.ln();
    }
    let lpk = k.max(2.0).ln();
    let rhs = match ineq {
        Inequality::Jensen1 => return None,
        Inequality::Ramanujan => k * ((ln_n + lg) / k).ln() + lb,
        Inequality::Fond1 => k * (ln_n / k).ln() + k * (1.0 + lg / ln_n).ln() + lb,
        Inequality::Fond2 => k * (2.0 * ln_n / k).ln() + lb,
        Inequality::Inequality1 => k * ((ln_n / k / lpk).ln() + c.log_eta2),
        Inequality::Inequality2 => k * (2.0 * ln_n / k / lpk).ln(),
        Inequality::Inequality3 => k * (1.0 + c.eta3 * ln_n / k / lpk).ln(),
        Inequality::Theorem4 => k * (1.0 + ln_n / (k * k.ln())).ln(),
    };
    Some(rhs - lt)
}

/// `2^ω <= τ <= (1 + Ω/ω)^ω`, in integers.
pub fn jensen1_holds(pf: &[(u64, u32)]) -> bool {
    let k = pf.len() as u32;
    let tau: Integer = pf.iter().fold(Integer::from(1), |acc, &(_, a)| acc * (a + 1));
    let big_omega: u32 = pf.iter().map(|&(_, a)| a).sum();
    let lower = Integer::from(1) << k;
    let lhs = tau.clone() * Integer::from(k).pow(k);
    let rhs = Integer::from(k + big_omega).pow(k);
    lower <= tau && lhs <= rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Holds,
    Fails,
    Skipped,
}

pub fn brute_check(ctx: &PrecisionContext, ineq: Inequality, n_max: u64, long_running: bool) -> Result<VerificationReport> {
    let started = Instant::now();
    if n_max < 2 {
        return Err(Error::domain("brute_check", "n_max must be at least 2"));
    }
    if n_max > DEFAULT_NMAX_LIMIT && !long_running {
        return Err(Error::CardinalityGuard { cardinality: n_max as u128, guard: DEFAULT_NMAX_LIMIT as u128 });
    }
    let mut rep = VerificationReport::new(&format!("brute:{}", ineq.name()), None, ctx);
    rep.param("inequality", ineq.name());
    rep.param("n_max", n_max);

    let spf = spf_sieve(n_max);
    let prime_count = spf.iter().enumerate().skip(2).filter(|&(i, &p)| p as usize == i).count();
    let table: OnceLock<PrimeTable> = OnceLock::new();
    let hp = || table.get_or_init(|| PrimeTable::new(prime_count, ctx));
    let hp_consts: OnceLock<InequalityConstants> = OnceLock::new();
    let prec = ctx.prec();
    let consts = F64Consts { log_eta2: eta2(prec).ln().to_f64(), eta3: eta3(&PrimeTable::new(8, ctx))?.to_f64() };
    let tol = ctx.identity_tol();

    let high_precision = |pf: &[(u64, u32)]| -> Result<(bool, Float)> {
        let t = hp();
        let c = match hp_consts.get() {
            Some(c) => c,
            None => {
                let _ = hp_consts.set(InequalityConstants::new(t)?);
                hp_consts.get().expect("just set")
            }
        };
        let f = Factorization::from_prime_powers(t, pf)?;
        let m = inequality_margin(ineq, &f, c)?;
        let holds = if ineq.strict() { m > tol } else { m >= Float::with_val(prec, -&tol) };
        Ok((holds, m))
    };

    let check_one = |n: u64| -> Result<(Outcome, bool, f64)> {
        let pf = factor_with(&spf, n);
        if !ineq.applies(pf.len()) {
            return Ok((Outcome::Skipped, false, f64::INFINITY));
        }
        match margin_f64(ineq, &pf, &consts) {
            None => Ok((if jensen1_holds(&pf) { Outcome::Holds } else { Outcome::Fails }, false, f64::INFINITY)),
            Some(m) if m > F64_BAND => Ok((Outcome::Holds, false, m)),
            Some(m) if m < -F64_BAND => Ok((Outcome::Fails, false, m)),
            Some(m) => {
                let (holds, _) = high_precision(&pf)?;
                Ok((if holds { Outcome::Holds } else { Outcome::Fails }, true, m))
            }
        }
    };

    struct Part {
        holds: u64,
        skipped: u64,
        high_precision: u64,
        fails: Vec<u64>,
        min: (f64, u64),
    }
    let starts: Vec<u64> = (2..=n_max).step_by(CHUNK as usize).collect();
    let parts: Vec<Part> = starts
        .par_iter()
        .map(|&s| {
            let mut p = Part { holds: 0, skipped: 0, high_precision: 0, fails: Vec::new(), min: (f64::INFINITY, 0) };
            for n in s..=(s + CHUNK - 1).min(n_max) {
                let (o, used_hp, m) = check_one(n)?;
                p.high_precision += used_hp as u64;
                match o {
                    Outcome::Holds => p.holds += 1,
                    Outcome::Skipped => p.skipped += 1,
                    Outcome::Fails => p.fails.push(n),
                }
                if m < p.min.0 {
                    p.min = (m, n);
                }
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;

    let mut fails = Vec::new();
    let mut hp_count = 0;
    let mut min = (f64::INFINITY, 0u64);
    for p in parts {
        rep.exhaustion.accept(p.holds);
        rep.exhaustion.reject("not_applicable", p.skipped);
        hp_count += p.high_precision;
        fails.extend(p.fails);
        if p.min.0 < min.0 {
            min = p.min;
        }
    }
    rep.exhaustion.reject("counterexample", fails.len() as u64);
    rep.param("high_precision_checks", hp_count);
    if min.1 != 0 {
        rep.param("smallest_margin", json!({"n": min.1, "margin": min.0}));
    }
    for &n in fails.iter().take(MAX_WITNESSES) {
        let pf = factor_with(&spf, n);
        let f = Factorization::from_prime_powers(hp(), &pf)?;
        let (_, m) = high_precision(&pf)?;
        rep.witnesses.push(Witness::new(&n.to_string(), &f).with_value("margin", &m));
    }
    rep.param("counterexamples", fails.len());

    match ineq {
        Inequality::Inequality2 => {
            let bound: Integer = LARGEST_INEQ2_COUNTEREXAMPLE.parse().expect("valid literal");
            let outside: Vec<u64> =
                fails.iter().copied().filter(|&n| factor_with(&spf, n).len() < 4 || n > bound).collect();
            let omegas: Vec<usize> = fails.iter().map(|&n| factor_with(&spf, n).len()).collect();
            let range = omegas.iter().min().zip(omegas.iter().max());
            rep.check(
                "counterexamples within exclusion set",
                outside.is_empty(),
                format!("{} counterexamples, ω range {range:?}, outside {outside:?}", fails.len()),
            );
        }
        _ => {
            rep.check(
                "no counterexample",
                fails.is_empty(),
                match min.1 {
                    0 => format!("first failures {:?}", &fails[..fails.len().min(5)]),
                    n => format!("first failures {:?}; smallest f64 margin {} at n = {n}", &fails[..fails.len().min(5)], min.0),
                },
            );
        }
    }
    Ok(rep.finish(started))
}
