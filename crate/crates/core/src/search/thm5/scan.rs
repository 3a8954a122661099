//! f64 screening of expanded exponent vectors with a high-precision recheck.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::arith::{Factorization, PrimeTable};
use crate::bounds::lambda_of;
use crate::error::{Error, Result};

use crate::search::boxes::{enumerate_box, CandidateBox, EnumerateOptions, Scored};
use crate::search::interval::{Window, K44};
use crate::search::reference::N_STAR;

/// Slack on λ and log n below which an f64 verdict is trusted.
pub const SCREEN_MARGIN: f64 = 1e-9;
const MAX_EXPONENT: i64 = 4096;

/// Evaluation counts by outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub below_window: u64,
    pub lambda_below_one: u64,
    pub cleared_high_precision: u64,
    pub n_star: u64,
    pub violations: u64,
}

impl Tally {
    pub fn total(&self) -> u64 {
        self.below_window + self.lambda_below_one + self.cleared_high_precision + self.n_star + self.violations
    }

    pub fn add(&mut self, o: &Tally) {
        self.below_window += o.below_window;
        self.lambda_below_one += o.lambda_below_one;
        self.cleared_high_precision += o.cleared_high_precision;
        self.n_star += o.n_star;
        self.violations += o.violations;
    }
}

#[derive(Default)]
struct AtomicTally {
    below_window: AtomicU64,
    lambda_below_one: AtomicU64,
}

/// Per-base offsets: `fac[i][a − lo_i] = ((a+1)/(v_i+1))^{1/44}` and the log n change.
struct Offsets {
    lo: Vec<i64>,
    fac: Vec<Vec<f64>>,
    dl: Vec<Vec<f64>>,
}

/// Screens `λ(n) >= 1` and `log n >= 10640.8` in f64.
pub struct Screen {
    log_p: Vec<f64>,
    ln1: Vec<f64>,
    c: f64,
    log_floor: f64,
}

/// Counts returned by the per-base kernels before the recheck.
#[derive(Debug, Clone, Copy, Default)]
pub struct Screened {
    pub below_window: u64,
    pub lambda_below_one: u64,
}

impl Screen {
    pub fn new(table: &PrimeTable, log_floor: f64) -> Self {
        let log_p = (1..=K44).map(|i| table.log_prime_f64(i)).collect();
        let ln1 = (0..=MAX_EXPONENT).map(|a| ((a + 1) as f64).ln()).collect();
        let k = K44 as f64;
        Screen { log_p, ln1, c: k * k.ln(), log_floor }
    }

    pub fn validate(&self, wins: &[Window]) -> Result<()> {
        if wins.len() != K44 {
            return Err(Error::domain("screen", "need 44 windows"));
        }
        for (i, w) in wins.iter().enumerate() {
            if w.lo < 1 || w.hi > MAX_EXPONENT {
                return Err(Error::domain("screen", format!("window {i} = {w:?} outside 1..={MAX_EXPONENT}")));
            }
        }
        Ok(())
    }

    fn base(&self, v: &[i64]) -> (f64, f64) {
        let mut s = 0.0;
        let mut l = 0.0;
        for (i, &a) in v.iter().enumerate() {
            s += self.ln1[a as usize];
            l += a as f64 * self.log_p[i];
        }
        ((s / K44 as f64).exp(), l)
    }

    fn offsets(&self, v: &[i64], wins: &[Window]) -> Offsets {
        let k = K44 as f64;
        let mut fac = Vec::with_capacity(K44);
        let mut dl = Vec::with_capacity(K44);
        for (i, w) in wins.iter().enumerate() {
            let l0 = self.ln1[v[i] as usize];
            fac.push(w.iter().map(|a| ((self.ln1[a as usize] - l0) / k).exp()).collect());
            dl.push(w.iter().map(|a| (a - v[i]) as f64 * self.log_p[i]).collect());
        }
        Offsets { lo: wins.iter().map(|w| w.lo).collect(), fac, dl }
    }

    /// True when the vector needs a high-precision look.
    #[inline]
    fn flag(&self, t: f64, l: f64, c: &mut Screened) -> bool {
        if l < self.log_floor - SCREEN_MARGIN {
            c.below_window += 1;
            false
        } else if (t - 1.0) * self.c < (1.0 - SCREEN_MARGIN) * l {
            c.lambda_below_one += 1;
            false
        } else {
            true
        }
    }

    /// All vectors obtained from `v` by moving two coordinates into `wins`.
    pub fn scan_pairs(&self, v: &[i64], wins: &[Window], flagged: &mut Vec<Vec<i64>>) -> Screened {
        let (t0, l0) = self.base(v);
        let off = self.offsets(v, wins);
        let mut c = Screened::default();
        for i1 in 0..K44 {
            for i2 in i1 + 1..K44 {
                for (x1, (&f1, &d1)) in off.fac[i1].iter().zip(&off.dl[i1]).enumerate() {
                    let t1 = t0 * f1;
                    let l1 = l0 + d1;
                    for (x2, (&f2, &d2)) in off.fac[i2].iter().zip(&off.dl[i2]).enumerate() {
                        if self.flag(t1 * f2, l1 + d2, &mut c) {
                            let mut u = v.to_vec();
                            u[i1] = off.lo[i1] + x1 as i64;
                            u[i2] = off.lo[i2] + x2 as i64;
                            flagged.push(u);
                        }
                    }
                }
            }
        }
        c
    }

    /// Vectors from `v` with the three `triple` coordinates and one other
    /// coordinate moved into `wins`.
    pub fn scan_quads(&self, v: &[i64], triple: [usize; 3], wins: &[Window], flagged: &mut Vec<Vec<i64>>) -> Screened {
        let (t0, l0) = self.base(v);
        let off = self.offsets(v, wins);
        let [p, q, r] = triple;
        let others: Vec<usize> = (0..K44).filter(|i| !triple.contains(i)).collect();
        let mut c = Screened::default();
        for (xp, (&fp, &dp)) in off.fac[p].iter().zip(&off.dl[p]).enumerate() {
            for (xq, (&fq, &dq)) in off.fac[q].iter().zip(&off.dl[q]).enumerate() {
                for (xr, (&fr, &dr)) in off.fac[r].iter().zip(&off.dl[r]).enumerate() {
                    let t3 = t0 * fp * fq * fr;
                    let l3 = l0 + dp + dq + dr;
                    for &o in &others {
                        for (xo, (&fo, &d_o)) in off.fac[o].iter().zip(&off.dl[o]).enumerate() {
                            if self.flag(t3 * fo, l3 + d_o, &mut c) {
                                let mut u = v.to_vec();
                                u[p] = off.lo[p] + xp as i64;
                                u[q] = off.lo[q] + xq as i64;
                                u[r] = off.lo[r] + xr as i64;
                                u[o] = off.lo[o] + xo as i64;
                                flagged.push(u);
                            }
                        }
                    }
                }
            }
        }
        c
    }
}

/// High-precision outcome for a flagged vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    NStar,
    Cleared,
    Violation { lambda: Float, log_n: Float },
}

pub fn is_n_star(v: &[i64]) -> bool {
    v.len() == N_STAR.len() && v.iter().zip(N_STAR).all(|(&a, b)| a == b as i64)
}

pub fn recheck(table: &PrimeTable, v: &[i64], log_floor: &Float) -> Result<Verdict> {
    if is_n_star(v) {
        return Ok(Verdict::NStar);
    }
    let exps: Vec<u32> = v
        .iter()
        .map(|&a| u32::try_from(a).map_err(|_| Error::domain("recheck", "negative exponent")))
        .collect::<Result<_>>()?;
    let f = Factorization::from_exponent_vector(table, &exps)?;
    if f.log_n() < log_floor {
        return Ok(Verdict::Cleared);
    }
    let lambda = lambda_of(&f)?;
    if lambda < 1 {
        return Ok(Verdict::Cleared);
    }
    Ok(Verdict::Violation { lambda, log_n: f.log_n().clone() })
}

/// Result of screening one chunk, after the recheck.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChunkResult {
    pub bases: u64,
    pub tally: Tally,
    pub violations: Vec<Vec<i64>>,
}

/// Applies `kernel` to every base vector in `b`, then rechecks the flagged
/// vectors in high precision. Duplicate flagged vectors are rechecked once
/// but counted each time they occur.
pub fn screen_box<F>(table: &PrimeTable, b: &CandidateBox, log_floor: &Float, partitions: usize, kernel: F) -> Result<ChunkResult>
where
    F: Fn(&[i64], &mut Vec<Vec<i64>>) -> Screened + Sync,
{
    let counts = AtomicTally::default();
    let flagged_all: Mutex<Vec<Vec<i64>>> = Mutex::new(Vec::new());
    let opts = EnumerateOptions { partitions, long_running: true, ..Default::default() };
    let out = enumerate_box(b, &opts, |v| {
        let mut flagged = Vec::new();
        let c = kernel(v, &mut flagged);
        counts.below_window.fetch_add(c.below_window, Ordering::Relaxed);
        counts.lambda_below_one.fetch_add(c.lambda_below_one, Ordering::Relaxed);
        let n = flagged.len();
        if n > 0 {
            flagged_all.lock().expect("unpoisoned").extend(flagged);
        }
        Scored { key: n, class: if n > 0 { "flagged" } else { "clear" } }
    })?;
    let mut flagged = flagged_all.into_inner().expect("unpoisoned");
    flagged.sort();
    let mut res = ChunkResult {
        bases: out.enumerated,
        tally: Tally {
            below_window: counts.below_window.into_inner(),
            lambda_below_one: counts.lambda_below_one.into_inner(),
            ..Default::default()
        },
        violations: Vec::new(),
    };
    let mut i = 0;
    while i < flagged.len() {
        let mut end = i + 1;
        while end < flagged.len() && flagged[end] == flagged[i] {
            end += 1;
        }
        let reps = (end - i) as u64;
        match recheck(table, &flagged[i], log_floor)? {
            Verdict::NStar => res.tally.n_star += reps,
            Verdict::Cleared => res.tally.cleared_high_precision += reps,
            Verdict::Violation { .. } => {
                res.tally.violations += reps;
                res.violations.push(flagged[i].clone());
            }
        }
        i = end;
    }
    Ok(res)
}
