//! λ(n) < 1 whenever ω(n) >= 74.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use rug::Float;
use serde_json::json;

use crate::arith::{Factorization, PrimeTable};
use crate::bounds::{f_family_constants, lambda_from_logs, lambda_of};
use crate::error::Result;
use crate::lemmas::{g_unique_max, upsilon_primorial_below_one};

use super::common::{fmt, upsilon_at_primorial, upsilon_root};
use super::primorial::u_of;
use super::reference::{table5_cap, TABLE2, TABLE3, TABLE4, TABLE5, TABLE5_K};
use super::report::{VerificationReport, Witness};

pub const K_MIN: usize = 74;
pub const K_MAX: usize = 94;

/// Survivors of a stage: k → kept values of j1.
pub type Survivors = BTreeMap<usize, Vec<usize>>;

/// Exponent vector of the extremal witness with `k` distinct primes.
pub fn witness_exponents(k: usize) -> Vec<u32> {
    let head = [13, 8, 5, 4, 3, 3, 3];
    (0..k)
        .map(|i| match i {
            0..=6 => head[i],
            7..=15 => 2,
            _ => 1,
        })
        .collect()
}

/// Published survivors as a map.
pub fn published(rows: &[(usize, usize, usize)]) -> Survivors {
    rows.iter().map(|&(k, lo, hi)| (k, (lo..=hi).collect())).collect()
}

/// The published stage-3 outcome.
pub fn published_stage3() -> Survivors {
    BTreeMap::from([(74, vec![16, 17, 18])])
}

#[derive(Debug, Clone, Copy)]
struct C2Range {
    min: f64,
    max: f64,
    evals: u64,
}

impl C2Range {
    fn new() -> Self {
        C2Range { min: f64::INFINITY, max: f64::NEG_INFINITY, evals: 0 }
    }

    fn add(&mut self, c2: f64) {
        self.min = self.min.min(c2);
        self.max = self.max.max(c2);
        self.evals += 1;
    }

    fn merge(&mut self, o: &C2Range) {
        self.min = self.min.min(o.min);
        self.max = self.max.max(o.max);
        self.evals += o.evals;
    }
}

/// Per-k thresholds `log z_k` with `υ(n_k, z_k) = 1`.
pub struct Thm4Search<'a> {
    table: &'a PrimeTable,
    log_z: BTreeMap<usize, Float>,
    threshold: Float,
}

impl<'a> Thm4Search<'a> {
    pub fn new(table: &'a PrimeTable) -> Result<Self> {
        let ctx = table.ctx();
        let one = ctx.float(1);
        let mut log_z = BTreeMap::new();
        for k in K_MIN..=K_MAX {
            let half = Float::with_val(ctx.prec(), table.try_log_primorial(k)? / 2u32);
            log_z.insert(k, upsilon_root(table, k, &one, &half)?);
        }
        Ok(Thm4Search { table, log_z, threshold: ctx.threshold().clone() })
    }

    pub fn log_z(&self, k: usize) -> &Float {
        &self.log_z[&k]
    }

    /// u(z_k / (n_k n_{j_1} ⋯)), zero when the quotient is below 1.
    pub fn room(&self, k: usize, js: &[usize]) -> Result<usize> {
        let prec = self.table.prec();
        let mut x = Float::with_val(prec, self.log_z(k) - self.table.log_primorial(k));
        for &j in js {
            x -= self.table.log_primorial(j);
        }
        if x < 0 {
            return Ok(0);
        }
        u_of(self.table, &x)
    }

    /// `(k, u_k)` for k = 74..=94.
    pub fn table2(&self) -> Result<Vec<(usize, usize)>> {
        (K_MIN..=K_MAX).map(|k| Ok((k, self.room(k, &[])?))).collect()
    }

    /// Rank caps: largest j with `log p_j (αk + 2) <= 2 log z_k`.
    pub fn table5(&self) -> Vec<(u32, Vec<usize>)> {
        let prec = self.table.prec();
        TABLE5
            .iter()
            .map(|&(alpha, _)| {
                let row = TABLE5_K
                    .iter()
                    .map(|&k| {
                        let rhs = Float::with_val(prec, self.log_z(k) * 2u32);
                        (1..=self.table.len())
                            .take_while(|&j| {
                                Float::with_val(prec, self.table.log_prime(j) * (alpha as u64 * k as u64 + 2)) <= rhs
                            })
                            .last()
                            .unwrap_or(0)
                    })
                    .collect();
                (alpha, row)
            })
            .collect()
    }

    /// λ of `n_k n_{j_1} n_{j_2} ⋯`.
    pub fn lambda_direct(&self, k: usize, js: &[usize]) -> Float {
        let prec = self.table.prec();
        let mut log_n = self.table.log_primorial(k).clone();
        for &j in js {
            log_n += self.table.log_primorial(j);
        }
        let mut log_tau = Float::with_val(prec, 0);
        for i in 1..=k {
            let e = 2 + js.iter().filter(|&&j| i <= j).count() as u32;
            log_tau += Float::with_val(prec, e).ln();
        }
        lambda_from_logs(&log_tau, &log_n, k)
    }

    /// `max_z f_s(js…, k, z)` and c2, for cutoffs `js = [j_1, …, j_{s+1}]`.
    pub fn f_max(&self, k: usize, js: &[usize]) -> Result<(Float, Float)> {
        let c = f_family_constants(self.table, k, js)?;
        let g = g_unique_max(&c.c1, &c.c2, &c.alpha, self.table.ctx().root_tol())?;
        let prec = self.table.prec();
        let klogk = Float::with_val(prec, k).ln() * k as u32;
        Ok((g.value * klogk, c.c2))
    }

    fn kept(&self, v: &Float) -> bool {
        *v >= self.threshold
    }

    /// Whether some continuation of `prefix` reaches the threshold.
    fn survives(&self, k: usize, prefix: &[usize], depth: usize, caps: Option<[usize; 3]>, c2: &mut C2Range) -> Result<bool> {
        let d = prefix.len();
        let mut hi = prefix[d - 1].min(self.room(k, prefix)?);
        if let (Some(caps), true) = (caps, d >= 2) {
            hi = hi.min(caps[d - 2]);
        }
        let mut js = prefix.to_vec();
        js.push(0);
        for jn in 0..=hi {
            if jn == 0 {
                if self.kept(&self.lambda_direct(k, prefix)) {
                    return Ok(true);
                }
                continue;
            }
            js[d] = jn;
            if d == depth {
                let (v, c) = self.f_max(k, &js)?;
                c2.add(c.to_f64());
                if self.kept(&v) {
                    return Ok(true);
                }
            } else if self.survives(k, &js, depth, caps, c2)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Runs stage `depth` over `input`, returning the surviving `(k, j1)`.
    fn stage(&self, depth: usize, input: &Survivors, use_caps: bool) -> Result<(Survivors, C2Range)> {
        let work: Vec<(usize, usize)> = input.iter().flat_map(|(&k, js)| js.iter().map(move |&j| (k, j))).collect();
        let acc = Mutex::new(C2Range::new());
        let flags: Vec<Result<bool>> = work
            .par_iter()
            .map(|&(k, j1)| {
                if j1 == 0 {
                    return Ok(self.kept(&self.lambda_direct(k, &[])));
                }
                let caps = if use_caps {
                    let c = [table5_cap(4, k), table5_cap(5, k), table5_cap(6, k)];
                    Some(c.map(|x| x.unwrap_or(usize::MAX)))
                } else {
                    None
                };
                let mut local = C2Range::new();
                let r = self.survives(k, &[j1], depth, caps, &mut local);
                acc.lock().expect("c2 accumulator").merge(&local);
                r
            })
            .collect();
        let mut out = Survivors::new();
        for (&(k, j1), f) in work.iter().zip(flags) {
            if f? {
                out.entry(k).or_default().push(j1);
            }
        }
        Ok((out, acc.into_inner().expect("c2 accumulator")))
    }

    /// Survivors of stage `depth` (caps from the rank table apply from stage 3 on).
    pub fn stage_survivors(&self, depth: usize, input: &Survivors) -> Result<Survivors> {
        Ok(self.stage(depth, input, depth >= 3)?.0)
    }

    /// Stage-1 input: every `0 <= j1 <= u_k` for k = 74..=94.
    pub fn stage1_input(&self) -> Result<Survivors> {
        (K_MIN..=K_MAX).map(|k| Ok((k, (0..=self.room(k, &[])?).collect()))).collect()
    }
}

fn show(s: &Survivors) -> String {
    s.iter()
        .map(|(k, js)| format!("{k}: {:?}", js))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn verify_thm4(table: &PrimeTable, stage: Option<u8>, long_running: bool) -> Result<VerificationReport> {
    let started = Instant::now();
    let ctx = table.ctx();
    let prec = ctx.prec();
    let phase = stage.map(|s| format!("stage{s}"));
    let mut rep = VerificationReport::new("thm4", phase.as_deref(), ctx);
    if let Some(s) = stage {
        rep.param("stage", s);
    }
    rep.param("long_running", long_running);

    // Witnesses and the k >= 95 exclusion.
    let w73 = Factorization::from_exponent_vector(table, &witness_exponents(73))?;
    let w74 = Factorization::from_exponent_vector(table, &witness_exponents(74))?;
    let l73 = lambda_of(&w73)?;
    let l74 = lambda_of(&w74)?;
    rep.check("lambda(n') = 1.0008832", (l73.to_f64() - 1.0008832).abs() < 1e-6, fmt(&l73));
    rep.check("lambda(n'') = 0.99991077", (l74.to_f64() - 0.99991077).abs() < 1e-7, fmt(&l74));
    rep.witnesses.push(Witness::new("n' (73 primes)", &w73).with_value("lambda", &l73));
    rep.witnesses.push(Witness::new("n'' (74 primes)", &w74).with_value("lambda", &l74));

    let limit = table.len().min(super::common::LARGE_K_LIMIT);
    let first_bad = (95..=limit).find(|&k| !upsilon_primorial_below_one(table, k).unwrap_or(false));
    let u94 = upsilon_at_primorial(table, 94)?;
    rep.check(
        "k >= 95 excluded",
        first_bad.is_none() && u94 > 1,
        format!("υ(n_k, n_k) < 1 on 95..={limit}; υ(n_94, n_94) = {}", fmt(&u94)),
    );

    let search = Thm4Search::new(table)?;
    let t2 = search.table2()?;
    rep.check("table 2", t2 == TABLE2, format!("{t2:?}"));
    rep.table("table2", json!(t2));
    let mut ratio_max = 0.0f64;
    let mut gap_max = f64::NEG_INFINITY;
    for k in K_MIN..=K_MAX {
        let lz = search.log_z(k);
        let ln = table.log_primorial(k);
        ratio_max = ratio_max.max(Float::with_val(prec, lz / ln).to_f64());
        gap_max = gap_max.max(Float::with_val(prec, lz - Float::with_val(prec, ln * 2u32)).to_f64());
    }
    rep.check("log z_k / log n_k < 2", ratio_max < 2.0, format!("max ratio {ratio_max:.6}"));
    rep.check("log(z_k / n_k^2) < -159.6", gap_max < -159.6, format!("max {gap_max:.4}"));
    let c2_cap = Float::with_val(prec, table.log_primorial(94) * 5u32);
    rep.check("5 log n_94 < 2342", c2_cap < 2342, fmt(&c2_cap));

    let t5 = search.table5();
    let t5_ok = t5.iter().zip(TABLE5.iter()).all(|(a, b)| a.0 == b.0 && a.1 == b.1);
    rep.check("table 5", t5_ok, format!("{t5:?}"));
    rep.table("table5", json!(t5));

    let stages: Vec<u8> = match stage {
        Some(s) => vec![s],
        None => vec![1, 2, 3, 4],
    };
    let mut prev: Option<Survivors> = None;
    let mut c2_all = C2Range::new();
    for s in stages {
        if s >= 3 && !long_running {
            rep.mark_partial(format!("stage {s} needs the long-running flag"));
            continue;
        }
        let input = match (s, prev.take()) {
            (_, Some(p)) => p,
            (1, None) => search.stage1_input()?,
            (2, None) => published(&TABLE3),
            (3, None) => published(&TABLE4),
            (4, None) => published_stage3(),
            _ => return Err(crate::Error::domain("verify_thm4", format!("unknown stage {s}"))),
        };
        let (out, c2) = search.stage(s as usize, &input, s >= 3)?;
        c2_all.merge(&c2);
        rep.exhaustion.accept(input.values().map(|v| v.len() as u64).sum());
        let (name, expected) = match s {
            1 => ("table 3", published(&TABLE3)),
            2 => ("table 4", published(&TABLE4)),
            3 => ("stage 3 survivors", published_stage3()),
            _ => ("stage 4 eliminates all", Survivors::new()),
        };
        rep.check(name, out == expected, show(&out));
        rep.table(&format!("stage{s}"), json!(out));
        prev = Some(out);
    }
    if c2_all.evals > 0 {
        rep.check(
            "159.6 < c2 < 2342",
            c2_all.min > 159.6 && c2_all.max < 2342.0,
            format!("c2 in [{:.4}, {:.4}] over {} maxima", c2_all.min, c2_all.max, c2_all.evals),
        );
        rep.param("f_max_evaluations", c2_all.evals);
    }
    Ok(rep.finish(started))
}
